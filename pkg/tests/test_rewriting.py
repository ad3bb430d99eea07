"""Rewrite engine: folds, single rules, conditions, rule-set loops."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from lucin.parsing import parse_formula, print_term
from lucin.rewriting import (
    FALSE, TRUE, DomainError, Rule, RuleSet, Tri, calc_single,
    eval_condition, fold_op, negate, normalize, rewrite_set, rewrite_single,
)
from lucin.terms import (
    Const, Free, Lrd, Subst, TermError, alpha_equal, app, mk_num,
)


def f(src: str):
    return parse_formula(src)


def rule(name: str, src: str):
    from lucin.parsing import parse_rule_decl, tokenize, _Cursor
    rd = parse_rule_decl(_Cursor(tokenize(f"rule {name}: {src}")))
    return Rule(rd.name, rd.lhs, rd.rhs, rd.conds)


# ------------------------------------------------------------------ folds

def test_fold_arithmetic():
    assert alpha_equal(fold_op("plus", [mk_num(2), mk_num(3)]), mk_num(5))
    assert alpha_equal(fold_op("minus", [mk_num(2), mk_num(3)]), mk_num(-1))
    assert alpha_equal(fold_op("times", [mk_num(-2), mk_num(3)]), mk_num(-6))
    assert alpha_equal(fold_op("mod", [mk_num(12), mk_num(8)]), mk_num(4))
    assert alpha_equal(fold_op("pow", [mk_num(2), mk_num(5)]), mk_num(32))
    assert alpha_equal(fold_op("neg", [mk_num(4)]), mk_num(-4))
    assert fold_op("plus", [Free("x"), mk_num(1)]) is None


def test_fold_divide_exact():
    assert alpha_equal(fold_op("divide", [mk_num(8), mk_num(4)]), mk_num(2))


def test_fold_divide_reduces_and_canonicalizes():
    out = fold_op("divide", [mk_num(6), mk_num(4)])
    assert alpha_equal(out, f("3 / 2"))
    out = fold_op("divide", [mk_num(3), mk_num(-2)])
    assert alpha_equal(out, f("-3 / 2"))
    # already in lowest terms with positive denominator: no move
    assert fold_op("divide", [mk_num(3), mk_num(2)]) is None


def test_fold_divide_by_zero():
    with pytest.raises(DomainError):
        fold_op("divide", [mk_num(1), mk_num(0)])
    with pytest.raises(DomainError):
        fold_op("mod", [mk_num(1), mk_num(0)])


def test_fold_pow_negative_exponent():
    assert alpha_equal(fold_op("pow", [mk_num(2), mk_num(-3)]), f("1 / 8"))
    with pytest.raises(DomainError):
        fold_op("pow", [mk_num(0), mk_num(-1)])


def test_fold_sqrt():
    assert alpha_equal(fold_op("sqrt", [mk_num(4)]), mk_num(2))
    assert fold_op("sqrt", [mk_num(2)]) is None
    assert fold_op("sqrt", [mk_num(-4)]) is None


def test_fold_comparisons():
    assert fold_op("eq", [mk_num(0), mk_num(0)]) == TRUE
    assert fold_op("eq", [mk_num(1), mk_num(0)]) == FALSE
    assert fold_op("lt", [mk_num(1), mk_num(2)]) == TRUE
    assert fold_op("ge", [mk_num(1), mk_num(2)]) == FALSE
    # never decide symbolic equations
    assert fold_op("eq", [Free("gcd"), mk_num(4)]) is None


def test_fold_booleans():
    assert fold_op("and", [TRUE, Free("p")]) == Free("p")
    assert fold_op("and", [Free("p"), FALSE]) == FALSE
    assert fold_op("or", [FALSE, Free("p")]) == Free("p")
    assert fold_op("not", [TRUE]) == FALSE
    assert alpha_equal(fold_op("is_num", [mk_num(3)]), TRUE)
    assert fold_op("is_num", [Free("x")]) is None


def test_calc_single_leftmost_outermost():
    t = f("(1 + 2) + (3 + 4)")
    res = calc_single("plus", t)
    # outermost first: operands are not yet folded, so the whole sum
    # cannot fold; leftmost inner redex moves first
    assert alpha_equal(res.term, f("3 + (3 + 4)"))
    res2 = calc_single("plus", res.term)
    assert alpha_equal(res2.term, f("3 + 7"))
    res3 = calc_single("plus", res2.term)
    assert alpha_equal(res3.term, mk_num(10))
    assert calc_single("plus", res3.term) is None


def test_calc_single_reports_path():
    t = f("x + (3 + 4)")
    res = calc_single("plus", t)
    assert res.path == (Lrd.R,)
    assert res.applied == "plus"


def test_calc_single_unknown_op():
    with pytest.raises(TermError):
        calc_single("frobnicate", f("1 + 2"))


# ------------------------------------------------------------ single rules

def test_rewrite_single_basic():
    r = rule("add_zero", "?a + 0 = ?a")
    res = rewrite_single(r, f("(x + 0) * y"))
    assert alpha_equal(res.term, f("x * y"))
    assert res.applied == "add_zero"
    assert res.assumptions == ()


def test_rewrite_single_no_match():
    r = rule("add_zero", "?a + 0 = ?a")
    assert rewrite_single(r, f("x + 1")) is None


def test_rewrite_single_leftmost_outermost():
    r = rule("mul_one", "?a * 1 = ?a")
    res = rewrite_single(r, f("(x * 1) * 1"))
    # outermost redex wins
    assert alpha_equal(res.term, f("x * 1"))
    assert res.path == ()


def test_rewrite_condition_discharged_by_solver():
    solver = RuleSet("solve", calc_ops=("noteq",))
    r = rule("div_self", "?x != 0 ==> ?x / ?x = 1")
    res = rewrite_single(r, f("3 / 3"), solver=solver)
    assert alpha_equal(res.term, mk_num(1))
    assert res.assumptions == ()


def test_rewrite_condition_refuted_blocks():
    solver = RuleSet("solve", calc_ops=("noteq",))
    r = rule("div_self", "?x != 0 ==> ?x / ?x = 1")
    assert rewrite_single(r, f("0 / 0"), solver=solver) is None


def test_rewrite_condition_unknown_becomes_assumption():
    solver = RuleSet("solve", calc_ops=("noteq",))
    r = rule("div_self", "?x != 0 ==> ?x / ?x = 1")
    res = rewrite_single(r, f("x / x"), solver=solver)
    assert alpha_equal(res.term, mk_num(1))
    assert len(res.assumptions) == 1
    assert print_term(res.assumptions[0]) == "x != 0"


def test_rewrite_condition_uses_existing_assumptions():
    r = rule("div_self", "?x != 0 ==> ?x / ?x = 1")
    res = rewrite_single(r, f("x / x"), assumptions=(f("x != 0"),))
    assert res.assumptions == ()
    # a contradicting assumption refutes the condition at this redex
    assert rewrite_single(r, f("x / x"), assumptions=(f("x = 0"),)) is None


def test_rewrite_refuted_at_one_redex_moves_on():
    solver = RuleSet("solve", calc_ops=("noteq",))
    r = rule("div_self", "?x != 0 ==> ?x / ?x = 1")
    res = rewrite_single(r, f("(0 / 0) + (y / y)"), solver=solver)
    assert alpha_equal(res.term, f("(0 / 0) + 1"))


def test_rule_rejects_unbound_schematics():
    with pytest.raises(TermError):
        rule("bad", "?a + 0 = ?b")


def test_rule_instantiate():
    r = rule("isolate", "?k != 0 ==> (?k * ?y = ?w) = (?y = ?w / ?k)")
    inst = r.instantiate(Subst({"k": mk_num(2)}))
    res = rewrite_single(inst, f("2 * x = 4"),
                         solver=RuleSet("s", calc_ops=("noteq",)))
    assert alpha_equal(res.term, f("x = 4 / 2"))
    assert res.assumptions == ()


# ------------------------------------------------------------- conditions

def test_negate():
    assert alpha_equal(negate(f("x != 0")), f("x = 0"))
    assert alpha_equal(negate(f("x < 1")), f("x >= 1"))
    assert alpha_equal(negate(f("not p")), f("p"))
    assert negate(f("x + 1")) is None


def test_eval_condition():
    solver = RuleSet("solve", calc_ops=("eq", "noteq", "lt", "plus"))
    assert eval_condition(f("1 + 1 = 2"), solver=solver) is Tri.TRUE
    assert eval_condition(f("1 < 0"), solver=solver) is Tri.FALSE
    assert eval_condition(f("x = 0"), solver=solver) is Tri.UNKNOWN
    assert eval_condition(f("x = 0"), assumptions=(f("x = 0"),)) is Tri.TRUE
    assert eval_condition(f("x = 0"), assumptions=(f("x != 0"),)) is Tri.FALSE
    assert eval_condition(f("x != 0"), assumptions=(f("x = 0"),)) is Tri.FALSE


# -------------------------------------------------------------- rule sets

def _arith_set(**kw):
    return RuleSet("eval_arith",
                   calc_ops=("plus", "minus", "times", "divide", "pow",
                             "mod", "neg", "sqrt"), **kw)


def test_rewrite_set_evaluates_arithmetic():
    rs = _arith_set()
    out = rewrite_set(rs, f("(2 + 3) * 4 - 6 / 3"))
    assert alpha_equal(out.term, mk_num(18))
    assert not out.hit_limit
    assert all(s.kind == "calc" for s in out.trace)


def test_rewrite_set_rules_before_calcs():
    rs = RuleSet("s", rules=(rule("mul_zero", "?a * 0 = 0"),),
                 calc_ops=("times",))
    out = rewrite_set(rs, f("(2 * 3) * 0"))
    assert alpha_equal(out.term, mk_num(0))
    assert out.trace[0].kind == "rule"
    assert out.trace[0].name == "mul_zero"


def test_rewrite_set_collects_assumptions_once():
    solver = RuleSet("solve", calc_ops=("noteq",))
    rs = RuleSet("s", rules=(rule("div_self", "?x != 0 ==> ?x / ?x = 1"),),
                 calc_ops=("plus",), cond_solver=solver)
    out = rewrite_set(rs, f("x / x + x / x"))
    assert alpha_equal(out.term, mk_num(2))
    assert len(out.assumptions) == 1
    assert print_term(out.assumptions[0]) == "x != 0"


def test_rewrite_set_step_limit():
    grow = rule("grow", "?a + 0 = (?a + 0) + 0")
    rs = RuleSet("bad", rules=(grow,), max_steps=10)
    out = rewrite_set(rs, f("x + 0"))
    assert out.hit_limit
    assert len(out.trace) == 10


def test_normalize_idempotent_on_examples():
    rs = _arith_set()
    for src in ["1 + 2 * 3", "x + (2 - 2)", "(8 / 4) mod 3", "2 ^ 10"]:
        once = normalize(rs, f(src))
        assert alpha_equal(once, normalize(rs, once))


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
@settings(max_examples=100)
def test_eval_matches_python(a, b, c):
    rs = _arith_set()
    out = normalize(rs, parse_formula(f"{a} * {b} + {c}"))
    assert alpha_equal(out, mk_num(a * b + c))


@given(st.integers(0, 400), st.integers(1, 400))
@settings(max_examples=100)
def test_mod_matches_python(a, b):
    rs = _arith_set()
    out = normalize(rs, parse_formula(f"{a} mod {b}"))
    assert alpha_equal(out, mk_num(a % b))

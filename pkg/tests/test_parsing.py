"""Surface syntax: lexing, precedence, round-trips, declarations."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from lucin.parsing import (
    ParseError, PrintError, parse_formula, parse_program_expr,
    parse_rule_decl, parse_theory, print_term, tokenize, _Cursor,
)
from lucin.terms import (
    Abs, App, Const, Free, SchematicVar, alpha_equal, app, head_const,
    is_num, mk_num, num_value, strip_app,
)


def rt(src: str) -> None:
    t = parse_formula(src)
    again = parse_formula(print_term(t))
    assert alpha_equal(t, again), (src, print_term(t))


@pytest.mark.parametrize("src", [
    "1 + 2 * x",
    "(a + b) * c",
    "a - b - c",
    "a ^ b ^ c",
    "-3 * x",
    "x + -3",
    "-(x * y)",
    "-x ^ 2",
    "2 ^ -3",
    "12 mod 8",
    "2 * x + -4 = 0",
    "x / (1 + 1/x)",
    "[1, 2, 3]",
    "[]",
    "[x = 0, x = sqrt 2]",
    "[[1], [2, 3]]",
    "(a, b)",
    "(a, b, c)",
    "gcd = 4",
    "sqrt 2",
    "x != 0 & y < 1",
    "a | b & c",
    "not (x = 0)",
    "?a + ?b = ?c",
    "lastElem [1, 2]",
    "f x y",
    "f (g x)",
])
def test_print_parse_roundtrip(src):
    rt(src)


def test_precedence_structure():
    t = parse_formula("1 + 2 * x")
    assert head_const(t) == "plus"
    _, args = strip_app(t)
    assert head_const(args[1]) == "times"

    t = parse_formula("a - b - c")
    _, args = strip_app(t)
    assert head_const(args[0]) == "minus"  # left assoc

    t = parse_formula("a ^ b ^ c")
    _, args = strip_app(t)
    assert head_const(args[1]) == "pow"  # right assoc

    t = parse_formula("a | b & c")
    _, args = strip_app(t)
    assert head_const(args[1]) == "and"


def test_unary_minus_folds_numerals():
    t = parse_formula("-3")
    assert is_num(t) and num_value(t) == -3
    t = parse_formula("2 - 3")
    assert head_const(t) == "minus"
    t = parse_formula("-x")
    assert head_const(t) == "neg"
    # unary minus binds tighter than infix operators
    t = parse_formula("-3 * x")
    assert head_const(t) == "times"
    t = parse_formula("-x ^ 2")
    assert head_const(t) == "pow"


def test_application_left_nested():
    t = parse_formula("f x y")
    assert t == App(App(Free("f"), Free("x")), Free("y"))


def test_list_and_pair_sugar():
    t = parse_formula("[1, 2]")
    assert alpha_equal(t, app(Const("cons"), mk_num(1),
                              app(Const("cons"), mk_num(2), Const("nil"))))
    t = parse_formula("(a, b, c)")
    head, args = strip_app(t)
    assert isinstance(head, Const) and head.name == "pair"
    assert head_const(args[1]) == "pair"


def test_unicode_aliases():
    assert alpha_equal(parse_formula("a · b"), parse_formula("a * b"))
    assert alpha_equal(parse_formula("x ≠ 0"), parse_formula("x != 0"))
    assert alpha_equal(parse_formula("p ∧ q"), parse_formula("p & q"))
    assert alpha_equal(parse_formula("p ∨ q"), parse_formula("p | q"))
    assert alpha_equal(parse_formula("¬p"), parse_formula("not p"))
    assert alpha_equal(parse_formula("a ≤ b"), parse_formula("a <= b"))


def test_comments_stripped():
    t = parse_formula("1 + # a note\n2")
    assert alpha_equal(t, parse_formula("1 + 2"))


def test_comparison_nonassociative():
    with pytest.raises(ParseError):
        parse_formula("a = b = c")
    # parenthesized is fine
    parse_formula("(a = b) = c")


def test_schematics():
    t = parse_formula("?a + 0")
    _, args = strip_app(t)
    assert args[0] == SchematicVar("a")


def test_errors_carry_positions():
    with pytest.raises(ParseError) as e:
        parse_formula("1 +\n* 2", source_name="frag")
    assert e.value.span.source == "frag"
    assert e.value.span.line == 2
    with pytest.raises(ParseError) as e:
        parse_formula("x @ y")
    assert "@" in str(e.value)


def test_tactics_rejected_in_formulas():
    with pytest.raises(ParseError):
        parse_formula("Rewrite x")
    with pytest.raises(ParseError):
        parse_formula("''abc''")


def test_trailing_input_rejected():
    with pytest.raises(ParseError):
        parse_formula("1 + 2 3 +")
    with pytest.raises(ParseError):
        parse_formula("(1 + 2))")


def test_program_chain():
    t = parse_program_expr("Rewrite ''a'' #> Calculate ''minus'' #> Take x")
    assert head_const(t) == "Chain"
    _, args = strip_app(t)
    assert head_const(args[1]) == "Chain"  # right assoc


def test_program_let_nesting():
    t = parse_program_expr("let a = Take x ;; b = Take a in b")
    assert head_const(t) == "Let"
    _, args = strip_app(t)
    assert isinstance(args[1], Abs) and args[1].var == "a"
    inner = args[1].body
    assert head_const(inner) == "Let"


def test_program_if_while_repeat_try():
    t = parse_program_expr("If (x = 0) Then (Take a) Else (Take b)")
    head, args = strip_app(t)
    assert head == Const("If") and len(args) == 3

    t = parse_program_expr("While (it > 1) Do (Calculate ''divide'' it)")
    head, args = strip_app(t)
    assert head == Const("While") and len(args) == 2

    t = parse_program_expr("Repeat (Try (Rewrite ''r''))")
    assert head_const(t) == "Repeat"
    _, args = strip_app(t)
    assert head_const(args[0]) == "Try"


def test_program_or_alternative():
    t = parse_program_expr("Rewrite ''a'' Or Rewrite ''b''")
    assert head_const(t) == "Or"


def test_program_strings_become_constants():
    t = parse_program_expr("Rewrite ''add_zero''")
    _, args = strip_app(t)
    assert args[0] == Const("''add_zero''")


def test_program_roundtrip_debug_print():
    src = "let r = Calculate ''mod'' (a mod b) in Take (gcd = r)"
    t = parse_program_expr(src)
    s = print_term(t, debug=True)
    assert "lam r" in s


def test_abs_not_printable_in_user_mode():
    t = parse_program_expr("let a = Take x in a")
    with pytest.raises(PrintError):
        print_term(t)


def test_rule_decl():
    cur = _Cursor(tokenize(
        "rule isolate_mul: ?k != 0 ==> (?k * ?y = ?w) = (?y = ?w / ?k)"))
    rd = parse_rule_decl(cur)
    assert rd.name == "isolate_mul"
    assert len(rd.conds) == 1
    assert print_term(rd.conds[0]) == "?k != 0"
    assert print_term(rd.lhs) == "?k * ?y = ?w"
    assert print_term(rd.rhs) == "?y = ?w / ?k"


def test_rule_decl_multiple_conds():
    cur = _Cursor(tokenize(
        "rule r: ?a != 0 & ?b != 0 ==> (?a / ?b) = (?a / ?b)"))
    rd = parse_rule_decl(cur)
    assert len(rd.conds) == 2


def test_rule_decl_unicode_arrow():
    cur = _Cursor(tokenize("rule r: ?x ≠ 0 ⇒ ?x / ?x = 1"))
    rd = parse_rule_decl(cur)
    assert len(rd.conds) == 1
    assert print_term(rd.lhs) == "?x / ?x"


def test_rule_decl_requires_equation():
    cur = _Cursor(tokenize("rule r: ?a + ?b"))
    with pytest.raises(ParseError):
        parse_rule_decl(cur)


_THEORY = """
theory demo

rules
  rule add_zero: ?a + 0 = ?a
  rule div_self: ?x != 0 ==> ?x / ?x = 1

rulesets
  ruleset simp: rules [add_zero, div_self] calc [plus, mod] max_steps 50
  ruleset just_calc: rules [] calc [plus]

problems
  problem [arith, simplify]:
    given [t]
    find [t_out]

programs
  method [arith, simplify, direct]:
    problem [arith, simplify]
    start (t)
    norm simp
    program simplify_it(t) = Rewrite_Set ''simp'' t
"""


def test_parse_theory_sections():
    thy = parse_theory(_THEORY)
    assert thy.name == "demo"
    assert [r.name for r in thy.rules] == ["add_zero", "div_self"]
    rs = thy.rulesets[0]
    assert rs.name == "simp"
    assert rs.rule_names == ("add_zero", "div_self")
    assert rs.calc_ops == ("plus", "mod")
    assert rs.max_steps == 50
    assert thy.rulesets[1].rule_names == ()
    pb = thy.problems[0]
    assert pb.key == ("arith", "simplify")
    assert pb.given == ("t",)
    assert pb.find == ("t_out",)
    m = thy.methods[0]
    assert m.key == ("arith", "simplify", "direct")
    assert m.problem_key == ("arith", "simplify")
    assert print_term(m.start) == "t"
    assert m.norm_set == "simp"
    assert m.program.params == ("t",)
    assert head_const(m.program.body) == "Rewrite_Set"


def test_theory_ruleset_then_rules_section_unambiguous():
    thy = parse_theory("""
theory t2
rulesets
  ruleset a: rules []
rules
  rule r: ?x + 0 = ?x
""")
    assert thy.rulesets[0].rule_names == ()
    assert thy.rules[0].name == "r"


# ------------------------------------------------------- property tests

_names = st.sampled_from(["x", "y", "z", "foo"])
_atoms = st.one_of(
    st.integers(-99, 99).map(mk_num),
    _names.map(Free),
    st.sampled_from(["a", "b"]).map(SchematicVar),
)


def _compound(children):
    binops = st.sampled_from(
        ["plus", "minus", "times", "divide", "pow", "mod",
         "eq", "noteq", "lt", "le", "and", "or"])
    return st.one_of(
        st.tuples(binops, children, children).map(
            lambda t: app(Const(t[0]), t[1], t[2])),
        st.tuples(st.sampled_from(["sqrt", "not", "neg"]), children).map(
            lambda t: App(Const(t[0]), t[1])),
        st.lists(children, min_size=0, max_size=3).map(_mk_list),
        st.tuples(children, children).map(
            lambda t: app(Const("pair"), t[0], t[1])),
        st.tuples(_names, children).map(lambda t: App(Free(t[0]), t[1])),
    )


def _mk_list(items):
    out = Const("nil")
    for item in reversed(items):
        out = app(Const("cons"), item, out)
    return out


printable_st = st.recursive(_atoms, _compound, max_leaves=20)


@given(printable_st)
@settings(max_examples=300)
def test_roundtrip_property(t):
    s = print_term(t)
    again = parse_formula(s)
    assert alpha_equal(t, again), s

"""Conditional term rewriting and exact numeral evaluation.

Redex search is leftmost-outermost.  A rule's conditions are discharged
by a solver rule set plus the assumptions collected so far: conditions
that normalize to True are discharged, False blocks the rule at that
redex, anything else is emitted as a new assumption.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .terms import (
    BOOL, Const, Path, Subst, Term, TermError, alpha_equal, app,
    apply_subst, contains_schematic, free_vars, is_num, list_elements,
    match_pattern, mk_num, num_value, pair_elements, replace_at,
    schematic_vars, strip_app, subterms_with_paths, term_list,
)

TRUE = Const("True", BOOL)
FALSE = Const("False", BOOL)


class DomainError(Exception):
    """Raised when a fold is applied outside its domain (x/0, x mod 0)."""


class Tri(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Rule:
    """An oriented equation lhs = rhs guarded by conditions."""

    name: str
    lhs: Term
    rhs: Term
    conds: tuple[Term, ...] = ()

    def __post_init__(self):
        allowed = schematic_vars(self.lhs)
        for t in (self.rhs,) + self.conds:
            extra = schematic_vars(t) - allowed
            if extra:
                raise TermError(
                    f"rule {self.name}: unbound schematic variables {extra}")

    def instantiate(self, subst: Subst) -> "Rule":
        return Rule(self.name,
                    apply_subst(subst, self.lhs),
                    apply_subst(subst, self.rhs),
                    tuple(apply_subst(subst, c) for c in self.conds))


@dataclass
class RuleSet:
    """Ordered rules plus numeral folds, applied first-match-wins."""

    name: str
    rules: tuple[Rule, ...] = ()
    calc_ops: tuple[str, ...] = ()
    cond_solver: Optional["RuleSet"] = None
    max_steps: int = 2000

    def __post_init__(self):
        for op in self.calc_ops:
            if op not in FOLDS:
                raise TermError(f"rule set {self.name}: unknown fold {op!r}")


@dataclass(frozen=True)
class RewriteResult:
    term: Term
    path: Path
    applied: str  # rule name or fold operator
    assumptions: tuple[Term, ...] = ()


@dataclass(frozen=True)
class TraceStep:
    kind: str  # "rule" | "calc"
    name: str
    path: Path


@dataclass(frozen=True)
class SimpResult:
    term: Term
    trace: tuple[TraceStep, ...]
    assumptions: tuple[Term, ...]
    hit_limit: bool = False


# ----------------------------------------------------------------- folds

_FoldFn = Callable[[list[Term]], Optional[Term]]
FOLDS: dict[str, _FoldFn] = {}


def _fold(name: str, arity: int):
    def deco(fn):
        def wrapped(args: list[Term]) -> Optional[Term]:
            if len(args) != arity:
                return None
            return fn(*args)
        FOLDS[name] = wrapped
        return fn
    return deco


def _nums(*ts: Term) -> Optional[list[Fraction]]:
    vals = []
    for t in ts:
        if not is_num(t):
            return None
        vals.append(num_value(t))
    return vals


@_fold("plus", 2)
def _fold_plus(a, b):
    v = _nums(a, b)
    return mk_num(v[0] + v[1]) if v else None


@_fold("minus", 2)
def _fold_minus(a, b):
    v = _nums(a, b)
    return mk_num(v[0] - v[1]) if v else None


@_fold("times", 2)
def _fold_times(a, b):
    v = _nums(a, b)
    return mk_num(v[0] * v[1]) if v else None


@_fold("neg", 1)
def _fold_neg(a):
    v = _nums(a)
    return mk_num(-v[0]) if v else None


def _ratio_term(q: Fraction) -> Term:
    if q.denominator == 1:
        return mk_num(q.numerator)
    return app(Const("divide"), mk_num(q.numerator), mk_num(q.denominator))


@_fold("divide", 2)
def _fold_divide(a, b):
    # numerals stay integers: non-integer quotients reduce to a canonical
    # division term (positive denominator, lowest terms) or do not move
    v = _nums(a, b)
    if v is None:
        return None
    if v[1] == 0:
        raise DomainError("division by zero")
    q = v[0] / v[1]
    if q.denominator == 1:
        return mk_num(q.numerator)
    if (q.numerator, q.denominator) == (v[0], v[1]):
        return None
    return _ratio_term(q)


@_fold("mod", 2)
def _fold_mod(a, b):
    v = _nums(a, b)
    if v is None:
        return None
    if v[1] == 0:
        raise DomainError("mod by zero")
    if v[0].denominator != 1 or v[1].denominator != 1:
        return None
    return mk_num(v[0].numerator % v[1].numerator)


@_fold("pow", 2)
def _fold_pow(a, b):
    v = _nums(a, b)
    if v is None or v[1].denominator != 1:
        return None
    if v[0] == 0 and v[1] < 0:
        raise DomainError("zero to a negative power")
    return _ratio_term(v[0] ** v[1].numerator)


@_fold("sqrt", 1)
def _fold_sqrt(a):
    v = _nums(a)
    if v is None or v[0].denominator != 1 or v[0] < 0:
        return None
    r = math.isqrt(v[0].numerator)
    return mk_num(r) if r * r == v[0].numerator else None


@_fold("is_num", 1)
def _fold_is_num(a):
    if is_num(a):
        return TRUE
    if _ground(a):
        return FALSE
    return None


def _ground(t: Term) -> bool:
    return not free_vars(t) and not contains_schematic(t)


def _cmp_fold(name: str, op: Callable[[Fraction, Fraction], bool]):
    def fn(a, b):
        v = _nums(a, b)
        if v is None:
            return None
        return TRUE if op(v[0], v[1]) else FALSE
    FOLDS[name] = lambda args: fn(*args) if len(args) == 2 else None


_cmp_fold("eq", lambda a, b: a == b)
_cmp_fold("noteq", lambda a, b: a != b)
_cmp_fold("lt", lambda a, b: a < b)
_cmp_fold("le", lambda a, b: a <= b)
_cmp_fold("gt", lambda a, b: a > b)
_cmp_fold("ge", lambda a, b: a >= b)


@_fold("fst", 1)
def _fold_fst(a):
    p = pair_elements(a)
    return p[0] if p else None


@_fold("snd", 1)
def _fold_snd(a):
    p = pair_elements(a)
    return p[1] if p else None


@_fold("hd", 1)
def _fold_hd(a):
    items = list_elements(a)
    if items is None:
        return None
    if not items:
        raise DomainError("hd of the empty list")
    return items[0]


@_fold("tl", 1)
def _fold_tl(a):
    items = list_elements(a)
    if items is None:
        return None
    if not items:
        raise DomainError("tl of the empty list")
    return term_list(items[1:])


@_fold("lastElem", 1)
def _fold_last(a):
    items = list_elements(a)
    if items is None:
        return None
    if not items:
        raise DomainError("lastElem of the empty list")
    return items[-1]


@_fold("nth", 2)
def _fold_nth(n, a):
    # 1-based indexing
    items = list_elements(a)
    if items is None or not is_num(n):
        return None
    k = num_value(n)
    if k.denominator != 1 or not 1 <= k.numerator <= len(items):
        raise DomainError("list index out of range")
    return items[k.numerator - 1]


def _bool_of(t: Term) -> Optional[bool]:
    if isinstance(t, Const):
        if t.name == "True":
            return True
        if t.name == "False":
            return False
    return None


@_fold("and", 2)
def _fold_and(a, b):
    va, vb = _bool_of(a), _bool_of(b)
    if va is False or vb is False:
        return FALSE
    if va is True:
        return b
    if vb is True:
        return a
    return None


@_fold("or", 2)
def _fold_or(a, b):
    va, vb = _bool_of(a), _bool_of(b)
    if va is True or vb is True:
        return TRUE
    if va is False:
        return b
    if vb is False:
        return a
    return None


@_fold("not", 1)
def _fold_not(a):
    v = _bool_of(a)
    if v is None:
        return None
    return FALSE if v else TRUE


def fold_op(op: str, args: list[Term]) -> Optional[Term]:
    fn = FOLDS.get(op)
    return fn(args) if fn else None


def calc_single(op: str, t: Term) -> Optional[RewriteResult]:
    """Fold the leftmost-outermost application of `op`, if any."""
    if op not in FOLDS:
        raise TermError(f"unknown calculation operator {op!r}")
    for path, sub in subterms_with_paths(t):
        head, args = strip_app(sub)
        if isinstance(head, Const) and head.name == op and head.value is None:
            folded = fold_op(op, args)
            if folded is not None:
                return RewriteResult(replace_at(path, t, folded), path, op)
    return None


# ----------------------------------------------------- conditional rewrite


def negate(t: Term) -> Optional[Term]:
    head, args = strip_app(t)
    if not isinstance(head, Const):
        return None
    table = {"eq": "noteq", "noteq": "eq", "lt": "ge", "ge": "lt",
             "le": "gt", "gt": "le"}
    if head.name in table and len(args) == 2:
        return app(Const(table[head.name], BOOL), *args)
    if head.name == "not" and len(args) == 1:
        return args[0]
    return None


def eval_condition(cond: Term, assumptions: tuple[Term, ...] = (),
                   solver: Optional[RuleSet] = None, depth: int = 0) -> Tri:
    """Decide a ground-ish condition: normalize, then consult assumptions."""
    t = cond
    if solver is not None and depth < 3:
        t = rewrite_set(solver, t, depth=depth + 1).term
    b = _bool_of(t)
    if b is True:
        return Tri.TRUE
    if b is False:
        return Tri.FALSE
    head, args = strip_app(t)
    if (solver is not None and "is_num" in solver.calc_ops
            and isinstance(head, Const)
            and head.name == "is_num" and len(args) == 1):
        # the argument is in normal form now; were it a numeral the
        # fold would have answered True already
        return Tri.FALSE
    neg = negate(t)
    for a in assumptions:
        if alpha_equal(t, a):
            return Tri.TRUE
        if neg is not None and alpha_equal(neg, a):
            return Tri.FALSE
    return Tri.UNKNOWN


def rewrite_single(rule: Rule, t: Term,
                   assumptions: tuple[Term, ...] = (),
                   solver: Optional[RuleSet] = None,
                   depth: int = 0) -> Optional[RewriteResult]:
    """Apply `rule` at the leftmost-outermost redex whose conditions
    are not refuted.  Undischarged conditions come back as assumptions."""
    for path, sub in subterms_with_paths(t):
        s = match_pattern(rule.lhs, sub)
        if s is None:
            continue
        new_assumptions: list[Term] = []
        ok = True
        for cond in rule.conds:
            verdict = eval_condition(apply_subst(s, cond), assumptions,
                                     solver, depth)
            if verdict is Tri.FALSE:
                ok = False
                break
            if verdict is Tri.UNKNOWN:
                new_assumptions.append(apply_subst(s, cond))
        if not ok:
            continue
        replaced = replace_at(path, t, apply_subst(s, rule.rhs))
        return RewriteResult(replaced, path, rule.name,
                             tuple(new_assumptions))
    return None


def rewrite_set(rs: RuleSet, t: Term,
                assumptions: tuple[Term, ...] = (),
                depth: int = 0) -> SimpResult:
    """Normalize under `rs`: rules in order, then folds, first hit wins."""
    trace: list[TraceStep] = []
    gained: list[Term] = []
    known = tuple(assumptions)
    for _ in range(rs.max_steps):
        hit = _one_step(rs, t, known, depth)
        if hit is None:
            return SimpResult(t, tuple(trace), tuple(gained))
        kind, res = hit
        t = res.term
        trace.append(TraceStep(kind, res.applied, res.path))
        for a in res.assumptions:
            if not any(alpha_equal(a, k) for k in known):
                known = known + (a,)
                gained.append(a)
    return SimpResult(t, tuple(trace), tuple(gained), hit_limit=True)


def _one_step(rs: RuleSet, t: Term, assumptions: tuple[Term, ...],
              depth: int) -> Optional[tuple[str, RewriteResult]]:
    for rule in rs.rules:
        res = rewrite_single(rule, t, assumptions, rs.cond_solver, depth)
        if res is not None:
            return "rule", res
    for op in rs.calc_ops:
        res = calc_single(op, t)
        if res is not None:
            return "calc", res
    return None


def normalize(rs: RuleSet, t: Term,
              assumptions: tuple[Term, ...] = ()) -> Term:
    return rewrite_set(rs, t, assumptions).term

"""Terms, types, paths and substitutions.

The term language is a small lambda calculus with named binders: constants,
free variables, schematic variables (rule pattern holes), abstractions and
binary applications.  N-ary application is left-nested.  Numerals are
constants carrying an exact `Fraction` payload, so calculation never drifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional


class TermError(Exception):
    """Base class for term-level errors."""


class InvalidPath(TermError):
    """A path step does not exist in the term it is applied to."""


class InvalidInput(TermError):
    """An operation received a term outside its domain."""


# ---------------------------------------------------------------- type tags


@dataclass(frozen=True)
class TypeTag:
    pass


@dataclass(frozen=True)
class Real(TypeTag):
    pass


@dataclass(frozen=True)
class Bool(TypeTag):
    pass


@dataclass(frozen=True)
class Untyped(TypeTag):
    pass


@dataclass(frozen=True)
class ListOf(TypeTag):
    elem: TypeTag


@dataclass(frozen=True)
class Fun(TypeTag):
    dom: TypeTag
    cod: TypeTag


REAL = Real()
BOOL = Bool()
UNTYPED = Untyped()


# -------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Const(Term):
    name: str
    tag: TypeTag = UNTYPED
    value: Optional[Fraction] = None  # set iff the constant is a numeral


@dataclass(frozen=True)
class Free(Term):
    name: str
    tag: TypeTag = UNTYPED


@dataclass(frozen=True)
class SchematicVar(Term):
    name: str
    tag: TypeTag = UNTYPED


@dataclass(frozen=True)
class Abs(Term):
    var: str
    body: Term
    tag: TypeTag = UNTYPED  # tag of the bound variable


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


def mk_num(value) -> Const:
    """Numeral constant for an int or Fraction."""
    frac = Fraction(value)
    return Const(_num_name(frac), REAL, frac)


def _num_name(frac: Fraction) -> str:
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def is_num(t: Term) -> bool:
    return isinstance(t, Const) and t.value is not None


def num_value(t: Term) -> Fraction:
    if not is_num(t):
        raise InvalidInput(f"not a numeral: {t!r}")
    assert isinstance(t, Const) and t.value is not None
    return t.value


def app(fun: Term, *args: Term) -> Term:
    """Left-nested n-ary application."""
    t = fun
    for a in args:
        t = App(t, a)
    return t


def strip_app(t: Term) -> tuple[Term, list[Term]]:
    """Inverse of `app`: peel a left-nested application spine."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def head_const(t: Term) -> Optional[str]:
    """Name of the Const heading the application spine, if any."""
    head, _ = strip_app(t)
    return head.name if isinstance(head, Const) else None


# -------------------------------------------------------------------- paths


class Lrd(Enum):
    L = "L"  # function part of an App
    R = "R"  # argument part of an App
    D = "D"  # body of an Abs

    def __repr__(self) -> str:  # terse in test output
        return self.value


L, R, D = Lrd.L, Lrd.R, Lrd.D

Path = tuple  # tuple[Lrd, ...]


def at_location(path: Path, t: Term) -> Term:
    """Subterm of t at path; raises InvalidPath if a step does not apply."""
    for i, step in enumerate(path):
        match step, t:
            case Lrd.L, App(fun=fun):
                t = fun
            case Lrd.R, App(arg=arg):
                t = arg
            case Lrd.D, Abs(body=body):
                t = body
            case _:
                raise InvalidPath(f"no subterm at step {step.value} "
                                  f"(position {i} of {_path_str(path)})")
    return t


def replace_at(path: Path, t: Term, new: Term) -> Term:
    """Copy of t with the subterm at path replaced by new."""
    if not path:
        return new
    step, rest = path[0], path[1:]
    match step, t:
        case Lrd.L, App(fun=fun, arg=arg):
            return App(replace_at(rest, fun, new), arg)
        case Lrd.R, App(fun=fun, arg=arg):
            return App(fun, replace_at(rest, arg, new))
        case Lrd.D, Abs(var=var, body=body, tag=tag):
            return Abs(var, replace_at(rest, body, new), tag)
        case _:
            raise InvalidPath(f"no subterm at step {step.value} "
                              f"of {_path_str(path)}")


def _path_str(path: Path) -> str:
    return "[" + ", ".join(s.value for s in path) + "]"


def path_str(path: Path) -> str:
    """Serialize a path as a compact string such as "LRD" ("" for the root)."""
    return "".join(s.value for s in path)


def parse_path(s: str) -> Path:
    """Inverse of path_str; raises InvalidPath on any other character."""
    try:
        return tuple(Lrd(ch) for ch in s)
    except ValueError:
        raise InvalidPath(f"invalid path string {s!r}") from None


def subterms_with_paths(t: Term) -> Iterator[tuple[Path, Term]]:
    """All (path, subterm) pairs in leftmost-outermost (pre)order.

    For an App the function part precedes the argument part, so the first
    yielded position satisfying a predicate is the leftmost-outermost one.
    """
    stack: list[tuple[Path, Term]] = [((), t)]
    while stack:
        path, sub = stack.pop()
        yield path, sub
        match sub:
            case App(fun=fun, arg=arg):
                stack.append((path + (R,), arg))
                stack.append((path + (L,), fun))
            case Abs(body=body):
                stack.append((path + (D,), body))


# ---------------------------------------------------------------- variables


def free_vars(t: Term) -> set[str]:
    """Names of free variables (bound occurrences excluded)."""
    out: set[str] = set()

    def go(t: Term, bound: frozenset[str]) -> None:
        match t:
            case Free(name=name):
                if name not in bound:
                    out.add(name)
            case Abs(var=var, body=body):
                go(body, bound | {var})
            case App(fun=fun, arg=arg):
                go(fun, bound)
                go(arg, bound)

    go(t, frozenset())
    return out


def schematic_vars(t: Term) -> set[str]:
    out: set[str] = set()
    for _, sub in subterms_with_paths(t):
        if isinstance(sub, SchematicVar):
            out.add(sub.name)
    return out


def contains_schematic(t: Term) -> bool:
    return any(isinstance(s, SchematicVar) for _, s in subterms_with_paths(t))


def _fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


def rename_free(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of old to new (used for capture avoidance)."""
    match t:
        case Free(name=name, tag=tag) if name == old:
            return Free(new, tag)
        case Abs(var=var, body=body, tag=tag):
            if var == old:
                return t
            return Abs(var, rename_free(body, old, new), tag)
        case App(fun=fun, arg=arg):
            return App(rename_free(fun, old, new), rename_free(arg, old, new))
        case _:
            return t


# ------------------------------------------------------------ substitutions


class Subst:
    """Idempotent mapping from schematic-variable names to terms.

    Idempotence is enforced at construction: no bound term may mention a
    variable of the domain, so applying twice equals applying once
    (syntactic equality, per the module contract).
    """

    def __init__(self, mapping: Optional[dict[str, Term]] = None):
        self._map: dict[str, Term] = dict(mapping or {})
        dom = set(self._map)
        for name, bound in self._map.items():
            hit = schematic_vars(bound) & dom
            if hit:
                raise InvalidInput(
                    f"substitution not idempotent: binding of ?{name} "
                    f"mentions {sorted(hit)}")

    def get(self, name: str) -> Optional[Term]:
        return self._map.get(name)

    def items(self):
        return self._map.items()

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subst):
            return NotImplemented
        return self._map == other._map

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k} -> {v!r}" for k, v in self._map.items())
        return f"Subst({inner})"

    def extended(self, name: str, t: Term) -> "Subst":
        m = dict(self._map)
        m[name] = t
        return Subst(m)


def apply_subst(subst: Subst, t: Term) -> Term:
    """Replace schematic variables by their bindings, avoiding capture.

    Binders whose name collides with a free variable of an inserted term
    are renamed.
    """
    match t:
        case SchematicVar(name=name):
            bound = subst.get(name)
            return bound if bound is not None else t
        case App(fun=fun, arg=arg):
            return App(apply_subst(subst, fun), apply_subst(subst, arg))
        case Abs(var=var, body=body, tag=tag):
            incoming: set[str] = set()
            for name in schematic_vars(body):
                if name in subst:
                    b = subst.get(name)
                    assert b is not None
                    incoming |= free_vars(b)
            if var in incoming:
                fresh = _fresh_name(var, incoming | free_vars(body))
                body = rename_free(body, var, fresh)
                var = fresh
            return Abs(var, apply_subst(subst, body), tag)
        case _:
            return t


def subst_frees(mapping: dict[str, Term], t: Term) -> Term:
    """Replace free variables by terms, avoiding capture.

    Occurrences bound by an enclosing abstraction are left alone.
    """
    if not mapping:
        return t
    incoming: set[str] = set()
    for v in mapping.values():
        incoming |= free_vars(v)

    def go(t: Term, shadow: frozenset[str]) -> Term:
        match t:
            case Free(name=name):
                if name in mapping and name not in shadow:
                    return mapping[name]
                return t
            case App(fun=fun, arg=arg):
                return App(go(fun, shadow), go(arg, shadow))
            case Abs(var=var, body=body, tag=tag):
                relevant = {n for n in free_vars(body)
                            if n in mapping and n != var and n not in shadow}
                if var in incoming and relevant:
                    fresh = _fresh_name(var, incoming | free_vars(body))
                    body = rename_free(body, var, fresh)
                    var = fresh
                return Abs(var, go(body, shadow | {var}), tag)
            case _:
                return t

    return go(t, frozenset())


# ------------------------------------------------------------ list sugar


def term_list(items: list[Term]) -> Term:
    """Build a cons/nil list term."""
    t: Term = Const("nil")
    for item in reversed(items):
        t = App(App(Const("cons"), item), t)
    return t


def list_elements(t: Term) -> Optional[list[Term]]:
    """Elements of a cons/nil list term, or None if t is not one."""
    items: list[Term] = []
    while True:
        if isinstance(t, Const) and t.name == "nil":
            return items
        head, args = strip_app(t)
        if isinstance(head, Const) and head.name == "cons" and len(args) == 2:
            items.append(args[0])
            t = args[1]
            continue
        return None


def pair_elements(t: Term) -> Optional[tuple[Term, Term]]:
    head, args = strip_app(t)
    if isinstance(head, Const) and head.name == "pair" and len(args) == 2:
        return args[0], args[1]
    return None


# ------------------------------------------------------------ alpha equality


def alpha_equal(a: Term, b: Term) -> bool:
    """Structural equality up to bound-variable names.

    Type tags are metadata and do not participate; numerals compare by value.
    """

    def go(a: Term, b: Term, env_a: dict[str, int], env_b: dict[str, int],
           depth: int) -> bool:
        match a, b:
            case Const(), Const():
                if (a.value is None) != (b.value is None):
                    return False
                if a.value is not None:
                    return a.value == b.value
                return a.name == b.name
            case Free(name=na), Free(name=nb):
                da, db = env_a.get(na), env_b.get(nb)
                if da is None and db is None:
                    return na == nb
                return da == db
            case SchematicVar(name=na), SchematicVar(name=nb):
                return na == nb
            case App(), App():
                return (go(a.fun, b.fun, env_a, env_b, depth)
                        and go(a.arg, b.arg, env_a, env_b, depth))
            case Abs(), Abs():
                ea = dict(env_a)
                eb = dict(env_b)
                ea[a.var] = depth
                eb[b.var] = depth
                return go(a.body, b.body, ea, eb, depth + 1)
            case _:
                return False

    return go(a, b, {}, {}, 0)


# ------------------------------------------------------------------ matching


def match_pattern(pattern: Term, t: Term,
                  subst: Optional[Subst] = None) -> Optional[Subst]:
    """First-order match of pattern against a schematic-free term.

    Returns the extending substitution, or None if matching fails.  Raises
    InvalidInput if t itself contains schematic variables.  A schematic
    variable inside a binder never captures: it refuses to bind a term
    mentioning the bound variable.
    """
    if contains_schematic(t):
        raise InvalidInput("match target contains schematic variables")

    def go(p: Term, t: Term, s: Optional[Subst],
           forbidden: frozenset[str]) -> Optional[Subst]:
        if s is None:
            return None
        match p:
            case SchematicVar(name=name):
                if free_vars(t) & forbidden:
                    return None
                prev = s.get(name)
                if prev is not None:
                    return s if alpha_equal(prev, t) else None
                return s.extended(name, t)
            case Const():
                if isinstance(t, Const) and alpha_equal(p, t):
                    return s
                return None
            case Free(name=name):
                if isinstance(t, Free) and t.name == name:
                    return s
                return None
            case App(fun=pf, arg=pa):
                if not isinstance(t, App):
                    return None
                return go(pa, t.arg, go(pf, t.fun, s, forbidden), forbidden)
            case Abs(var=pv, body=pb):
                if not isinstance(t, Abs):
                    return None
                fresh = _fresh_name(pv, free_vars(pb) | free_vars(t.body)
                                    | {pv, t.var})
                pb2 = rename_free(pb, pv, fresh)
                tb2 = rename_free(t.body, t.var, fresh)
                return go(pb2, tb2, s, forbidden | {fresh})
            case _:
                return None

    return go(pattern, t, subst or Subst(), frozenset())


# ------------------------------------------------------------- conveniences


def const_multiset(t: Term) -> dict[str, int]:
    """Multiset of constant names occurring in t (numerals by value name)."""
    out: dict[str, int] = {}
    for _, sub in subterms_with_paths(t):
        if isinstance(sub, Const):
            out[sub.name] = out.get(sub.name, 0) + 1
    return out

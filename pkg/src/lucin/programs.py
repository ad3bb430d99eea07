"""Tactic programs: structure validation and suspended execution state.

A program body is an applicative term built from tactic constants,
tacticals (Chain, If, While, Repeat, Try, Or) and let-bindings.  At load
time the body is walked once into a map of control nodes keyed by path,
so execution can suspend after any tactic and resume from the recorded
path alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .parsing import (
    LET_CONST, RESERVED_VALUE_NAME, TACTIC_CONSTS, TACTICAL_CONSTS,
    parse_program_def, print_term,
)
from .terms import (
    Abs, App, Const, Free, Lrd, Path, Term, app, at_location, free_vars,
    head_const, list_elements, strip_app,
)


class ProgramError(Exception):
    pass


# tactic name -> (min args, max args); one less than max means the
# trailing value argument is threaded implicitly
TACTIC_ARITY = {
    "Calculate": (1, 2),
    "Rewrite": (1, 2),
    "Rewrite_Inst": (2, 3),
    "Rewrite_Set": (1, 2),
    "Rewrite_Set_Inst": (2, 3),
    "Or_to_List": (0, 1),
    "Substitute": (1, 2),
    "Take": (1, 1),
    "SubProblem": (2, 2),
}

TACTICAL_ARITY = {
    "Chain": (2, 3),
    "If": (3, 4),
    "While": (2, 3),
    "Repeat": (1, 2),
    "Try": (1, 2),
    "Or": (2, 3),
}

_PROGRAM_HEAD = "fun_def"


@dataclass(frozen=True)
class Node:
    """One control point of a program body.

    `operands` maps role names to paths; `control` roles are themselves
    nodes, the rest (cond, init) are expressions.
    """

    kind: str  # let chain cond while repeat try alt tactic expr
    loc: Path
    parent: Optional[tuple[Path, str]]
    operands: dict[str, Path] = field(default_factory=dict)
    var: Optional[str] = None  # let binder


_CONTROL_ROLES = {
    "let": ("rhs", "body"),
    "chain": ("first", "second"),
    "cond": ("then", "else"),
    "while": ("body",),
    "repeat": ("body",),
    "try": ("body",),
    "alt": ("first", "second"),
}


def _arg_paths(loc: Path, n: int) -> list[Path]:
    return [loc + (Lrd.L,) * (n - 1 - i) + (Lrd.R,) for i in range(n)]


def _string_value(t: Term) -> Optional[str]:
    if isinstance(t, Const) and t.name.startswith("''") \
            and t.name.endswith("''"):
        return t.name[2:-2]
    return None


@dataclass(frozen=True)
class ProgramDef:
    name: str
    params: tuple[str, ...]
    body: Term
    term: Term  # fun_def head applied to the body; scanning starts at (R,)
    nodes: dict[Path, Node]
    root: Path  # location of the outermost control node

    @staticmethod
    def from_source(src: str, extra_vars: tuple[str, ...] = (),
                    source_name: str = "<program>") -> "ProgramDef":
        decl = parse_program_def(src, source_name)
        return build_program(decl.name, decl.params, decl.body, extra_vars)


def build_program(name: str, params: tuple[str, ...], body: Term,
                  extra_vars: tuple[str, ...] = ()) -> ProgramDef:
    head = app(Free(name), *[Free(p) for p in params])
    term = App(App(Const(_PROGRAM_HEAD), head), body)
    root: Path = (Lrd.R,)
    nodes: dict[Path, Node] = {}
    _build_nodes(term, root, None, nodes)
    _check_vars(name, term, root, nodes,
                scope=set(params) | set(extra_vars))
    return ProgramDef(name, params, body, term, nodes, root)


def _build_nodes(term: Term, loc: Path,
                 parent: Optional[tuple[Path, str]],
                 nodes: dict[Path, Node]) -> None:
    t = at_location(loc, term)
    head, args = strip_app(t)
    name = head.name if isinstance(head, Const) else None
    paths = _arg_paths(loc, len(args))

    if name == LET_CONST:
        if len(args) != 2 or not isinstance(args[1], Abs):
            raise ProgramError("malformed let binding")
        abs_loc = paths[1]
        node = Node("let", loc, parent,
                    {"rhs": paths[0], "body": abs_loc + (Lrd.D,)},
                    var=args[1].var)
        nodes[loc] = node
        _build_nodes(term, node.operands["rhs"], (loc, "rhs"), nodes)
        _build_nodes(term, node.operands["body"], (loc, "body"), nodes)
        return

    if name in TACTICAL_ARITY:
        lo, hi = TACTICAL_ARITY[name]
        if not lo <= len(args) <= hi:
            raise ProgramError(
                f"{name} takes {lo} to {hi} arguments, got {len(args)}")
        ops: dict[str, Path] = {}
        kind = {"Chain": "chain", "If": "cond", "While": "while",
                "Repeat": "repeat", "Try": "try", "Or": "alt"}[name]
        controls: list[tuple[str, Path]] = []
        if name == "Chain":
            controls = [("first", paths[0]), ("second", paths[1])]
        elif name == "If":
            ops["cond"] = paths[0]
            controls = [("then", paths[1]), ("else", paths[2])]
        elif name == "While":
            ops["cond"] = paths[0]
            controls = [("body", paths[1])]
        elif name in ("Repeat", "Try"):
            controls = [("body", paths[0])]
        elif name == "Or":
            controls = [("first", paths[0]), ("second", paths[1])]
        if len(args) == hi:
            ops["init"] = paths[-1]
        for role, p in controls:
            ops[role] = p
        nodes[loc] = Node(kind, loc, parent, ops)
        for role, p in controls:
            _build_nodes(term, p, (loc, role), nodes)
        return

    if name in TACTIC_ARITY:
        lo, hi = TACTIC_ARITY[name]
        if not lo <= len(args) <= hi:
            raise ProgramError(
                f"{name} takes {lo} to {hi} arguments, got {len(args)}")
        nodes[loc] = Node("tactic", loc, parent, {})
        return

    if name in TACTIC_CONSTS or name in TACTICAL_CONSTS:
        raise ProgramError(f"misplaced {name}")
    if _mentions_tactic(t):
        raise ProgramError(
            f"expression {print_term(t, debug=True)} contains tactics")
    nodes[loc] = Node("expr", loc, parent, {})


def _mentions_tactic(t: Term) -> bool:
    match t:
        case Const(name=name):
            return name in TACTIC_CONSTS or name in TACTICAL_CONSTS \
                or name == LET_CONST
        case App(fun=f, arg=a):
            return _mentions_tactic(f) or _mentions_tactic(a)
        case Abs(body=b):
            return _mentions_tactic(b)
        case _:
            return False


def _check_vars(prog: str, term: Term, loc: Path, nodes: dict[Path, Node],
                scope: set[str]) -> None:
    node = nodes[loc]
    if node.kind == "let":
        _check_vars(prog, term, node.operands["rhs"], nodes, scope)
        assert node.var is not None
        _check_vars(prog, term, node.operands["body"], nodes,
                    scope | {node.var})
        return
    for role, p in node.operands.items():
        sub = at_location(p, term)
        if role == "cond":
            _check_expr(prog, sub, scope, allow_it=True)
        elif role == "init":
            _check_expr(prog, sub, scope, allow_it=False)
        elif node.kind != "tactic":
            _check_vars(prog, term, p, nodes, scope)
    if node.kind == "tactic":
        _, args = strip_app(at_location(loc, term))
        for a in args:
            _check_expr(prog, a, scope, allow_it=False)
    if node.kind == "expr":
        _check_expr(prog, at_location(loc, term), scope, allow_it=False)


def _check_expr(prog: str, t: Term, scope: set[str], allow_it: bool) -> None:
    names = free_vars(t)
    if allow_it:
        names = names - {RESERVED_VALUE_NAME}
    elif RESERVED_VALUE_NAME in names:
        raise ProgramError(
            f"program {prog}: {RESERVED_VALUE_NAME!r} is only available "
            "inside If and While conditions")
    unbound = names - scope
    if unbound:
        raise ProgramError(
            f"program {prog}: unbound variables {sorted(unbound)} in "
            f"{print_term(t, debug=True)}")


# --------------------------------------------------------------- tactics


def tactic_name(t: Term) -> Optional[str]:
    name = head_const(t)
    return name if name in TACTIC_ARITY else None


def tactic_args(t: Term) -> list[Term]:
    return strip_app(t)[1]


def subproblem_spec(t: Term) -> tuple[str, tuple[str, ...], tuple[str, ...]]:
    """Unpack (theory, problem key, method key) from a SubProblem spec."""
    from .terms import pair_elements

    def key_of(term: Term, what: str) -> tuple[str, ...]:
        items = list_elements(term)
        if items is None:
            raise ProgramError(f"SubProblem {what} must be a key list")
        out = []
        for item in items:
            s = _string_value(item)
            if s is None:
                raise ProgramError(f"SubProblem {what} must list strings")
            out.append(s)
        return tuple(out)

    p1 = pair_elements(t)
    if p1 is None:
        raise ProgramError("SubProblem expects a (theory, problem, method) "
                           "specification")
    thy = _string_value(p1[0])
    p2 = pair_elements(p1[1])
    if thy is None or p2 is None:
        raise ProgramError("SubProblem expects a (theory, problem, method) "
                           "specification")
    return thy, key_of(p2[0], "problem key"), key_of(p2[1], "method key")


def string_value(t: Term) -> Optional[str]:
    return _string_value(t)


# ----------------------------------------------------------------- istate


@dataclass(frozen=True)
class Istate:
    """Where a suspended program run stands.

    `path` is the location of the last executed tactic, empty when
    nothing ran yet.  `loop_stack` remembers entry values of Repeat
    nodes so fixpoints survive suspension.
    """

    act_arg: Term
    path: Path = ()
    env: tuple[tuple[str, Term], ...] = ()
    finished: bool = False
    loop_stack: tuple[tuple[Path, Term], ...] = ()

    def lookup(self, name: str) -> Optional[Term]:
        for k, v in reversed(self.env):
            if k == name:
                return v
        return None

    def env_map(self) -> dict[str, Term]:
        return dict(self.env)

    def bind(self, name: str, value: Term) -> "Istate":
        return replace(self, env=self.env + ((name, value),))

    def rebind(self, name: str, value: Term) -> "Istate":
        env = tuple((k, value if k == name else v) for k, v in self.env)
        if name not in dict(env):
            env = env + ((name, value),)
        return replace(self, env=env)

    def with_act(self, value: Term) -> "Istate":
        return replace(self, act_arg=value)

    def at_path(self, path: Path) -> "Istate":
        return replace(self, path=path)

    def done(self) -> "Istate":
        return replace(self, finished=True)

    def push_loop(self, loc: Path, entry: Term) -> "Istate":
        return replace(self, loop_stack=self.loop_stack + ((loc, entry),))

    def pop_loop(self) -> "Istate":
        return replace(self, loop_stack=self.loop_stack[:-1])

    def set_loop_entry(self, entry: Term) -> "Istate":
        loc, _ = self.loop_stack[-1]
        return replace(self,
                       loop_stack=self.loop_stack[:-1] + ((loc, entry),))


def initial_istate(prog: ProgramDef, bindings: dict[str, Term],
                   start: Term) -> Istate:
    missing = [p for p in prog.params if p not in bindings]
    if missing:
        raise ProgramError(
            f"program {prog.name}: missing arguments {missing}")
    env = tuple((p, bindings[p]) for p in prog.params)
    return Istate(act_arg=start, env=env)

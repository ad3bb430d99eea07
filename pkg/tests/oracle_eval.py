"""Reference evaluator for whole methods, used as a test oracle.

Runs a method's program by plain recursion over the program term: no
node maps, no paths, no saved interpreter states. The production
engine must reach the same final formula and assumptions on every
model. Tactic applications themselves are shared with the engine on
purpose; what this oracle keeps independent is all control flow.
"""

from dataclasses import dataclass, field

from lucin.interpreter import apply_tactic
from lucin.knowledge import Knowledge
from lucin.parsing import RESERVED_VALUE_NAME
from lucin.programs import (
    LET_CONST, TACTIC_ARITY, TACTICAL_ARITY, string_value, subproblem_spec,
)
from lucin.rewriting import Tri, eval_condition, rewrite_set
from lucin.terms import (
    Abs, Const, Free, Term, alpha_equal, app, list_elements, strip_app,
    subst_frees, term_list,
)

_LOOP_CAP = 10_000


class _Reject(Exception):
    def __init__(self, value: Term):
        self.value = value


@dataclass
class _Ctx:
    kb: Knowledge
    assumptions: list[Term] = field(default_factory=list)

    def note(self, asms) -> None:
        for a in asms:
            if not any(alpha_equal(a, b) for b in self.assumptions):
                self.assumptions.append(a)


def run_method(kb, problem_key, method_key, model):
    """Solve a problem start to finish; returns (final_term, assumptions)."""
    ctx = _Ctx(kb)
    value = _solve(ctx, problem_key, method_key, model)
    return value, tuple(ctx.assumptions)


def _solve(ctx, problem_key, method_key, model) -> Term:
    problem = ctx.kb.problem(problem_key)
    method = ctx.kb.method(method_key)
    ctx.kb.check_model(problem, model)
    start = ctx.kb.start_formula(method, model)
    env = {p: model[p] for p in method.program.params}
    return _eval(ctx, method.program.body, env, start)


def _expr(ctx, t, env) -> Term:
    return rewrite_set(ctx.kb.rule_set("prog_expr"),
                       subst_frees(env, t)).term


def _cond(ctx, t, env, value) -> bool:
    inst = subst_frees({**env, RESERVED_VALUE_NAME: value}, t)
    verdict = eval_condition(inst, tuple(ctx.assumptions),
                             solver=ctx.kb.rule_set("prog_expr"))
    return verdict is Tri.TRUE


def _eval(ctx, t, env, value) -> Term:
    head, args = strip_app(t)
    name = head.name if isinstance(head, Const) else None

    if name == LET_CONST and len(args) == 2 and isinstance(args[1], Abs):
        v = _eval(ctx, args[0], env, value)
        return _eval(ctx, args[1].body, {**env, args[1].var: v}, v)

    if name in TACTICAL_ARITY:
        lo, hi = TACTICAL_ARITY[name]
        init = None
        if len(args) == hi:  # explicit start value
            init = args[-1]
            value = _expr(ctx, init, env)
            args = args[:-1]
        if name == "Chain":
            return _eval(ctx, args[1], env, _eval(ctx, args[0], env, value))
        if name == "If":
            pick = args[1] if _cond(ctx, args[0], env, value) else args[2]
            return _eval(ctx, pick, env, value)
        if name == "While":
            # a loop value named by a variable follows the iteration
            loop_var = init.name if isinstance(init, Free) else None
            for _ in range(_LOOP_CAP):
                if not _cond(ctx, args[0], env, value):
                    return value
                value = _eval(ctx, args[1], env, value)
                if loop_var is not None:
                    env = {**env, loop_var: value}
            raise RuntimeError("oracle loop cap hit")
        if name == "Repeat":
            for _ in range(_LOOP_CAP):
                try:
                    nxt = _eval(ctx, args[0], env, value)
                except _Reject:
                    return value
                if alpha_equal(nxt, value):
                    return nxt
                value = nxt
            raise RuntimeError("oracle loop cap hit")
        if name == "Try":
            try:
                return _eval(ctx, args[0], env, value)
            except _Reject:
                return value
        assert name == "Or"
        try:
            return _eval(ctx, args[0], env, value)
        except _Reject:
            return _eval(ctx, args[1], env, value)

    if name in TACTIC_ARITY:
        if name == "SubProblem":
            thy, pkey, mkey = subproblem_spec(args[0])
            items = list_elements(_expr(ctx, args[1], env))
            problem = _lookup(ctx.kb.problem, thy, pkey)
            method = _lookup(ctx.kb.method, thy, mkey)
            sub_model = dict(zip(problem.given, items))
            result = _solve(ctx, problem.key, method.key, sub_model)
            return _filter_refuted(ctx, result)
        _, hi = TACTIC_ARITY[name]
        full = len(args) == hi
        static = [_expr(ctx, a, env) for a in (args[:-1] if full else args)]
        if not full:
            target = value
        elif name == "Take":
            target = _expr(ctx, args[-1], env)
        else:
            target = subst_frees(env, args[-1])
        res = apply_tactic(ctx.kb, app(head, *static, target),
                           tuple(ctx.assumptions))
        if res is None:
            raise _Reject(value)
        out, asms = res
        ctx.note(asms)
        return out

    return _expr(ctx, t, env)


def _lookup(get, theory, key):
    try:
        return get((theory,) + tuple(key))
    except Exception:
        return get(tuple(key))


def _filter_refuted(ctx, t: Term) -> Term:
    items = list_elements(t)
    if items is None:
        return t
    kept = [el for el in items
            if eval_condition(el, tuple(ctx.assumptions),
                              solver=ctx.kb.rule_set("prog_expr"))
            is not Tri.FALSE]
    return term_list(kept) if len(kept) != len(items) else t

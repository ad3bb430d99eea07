"""Stepwise execution of tactic programs over a calculation.

The walker applies exactly one tactic per advance, suspending at the
tactic's program path; resuming needs nothing but the recorded istate.
Student input is checked by speculating ahead on a copy of the
calculation: formulas up to the method's normal form, tactics against
the ones the program would use next.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

from .calculation import Calculation, Step
from .knowledge import Knowledge, KnowledgeError
from .parsing import RESERVED_VALUE_NAME, print_term
from .programs import (
    TACTIC_ARITY, Istate, Node, ProgramDef, string_value, subproblem_spec,
)
from .rewriting import (
    DomainError, Rule, RuleSet, Tri, calc_single, eval_condition,
    rewrite_set, rewrite_single,
)
from .terms import (
    Const, Free, Path, Subst, Term, TermError, alpha_equal, app,
    at_location, head_const, list_elements, pair_elements, strip_app,
    subst_frees, term_list,
)


class InterpreterError(Exception):
    pass


_SILENT_BUDGET = 500  # loop turns allowed without a visible step
_LOCATE_TERM_STEPS = 50
_LOCATE_TERM_DESCENTS = 3
_LOCATE_TACTIC_SKIPS = 10


# ------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class AppliedStep:
    tactic: Term
    formula: Term
    path: Path
    assumptions: tuple[Term, ...] = ()


@dataclass(frozen=True)
class SubCall:
    theory: str
    problem_key: tuple[str, ...]
    method_key: tuple[str, ...]
    args: tuple[Term, ...]
    path: Path
    tactic: Term


@dataclass(frozen=True)
class NextStep:
    step: Step


@dataclass(frozen=True)
class EndProgram:
    formula: Term


@dataclass(frozen=True)
class Helpless:
    pass


Outcome = Union[NextStep, EndProgram, Helpless]


# ------------------------------------------------------------ the walker


class _Run:
    """One program activation; all control context lives in the istate."""

    def __init__(self, prog: ProgramDef, kb: Knowledge,
                 assumptions: tuple[Term, ...], warnings: list[str]):
        self.prog = prog
        self.kb = kb
        self.asms = assumptions
        self.warnings = warnings
        self.expr_set = kb.rule_set("prog_expr")
        self.budget = _SILENT_BUDGET

    def node(self, loc: Path) -> Node:
        return self.prog.nodes[loc]

    def term_at(self, loc: Path) -> Term:
        return at_location(loc, self.prog.term)

    def eval_expr(self, t: Term, ist: Istate) -> Term:
        inst = subst_frees(ist.env_map(), t)
        out = rewrite_set(self.expr_set, inst)
        if out.hit_limit:
            raise InterpreterError(
                f"expression {print_term(t, debug=True)} does not reduce")
        return out.term

    def eval_cond(self, t: Term, ist: Istate, value: Term) -> bool:
        mapping = ist.env_map()
        mapping[RESERVED_VALUE_NAME] = value
        inst = subst_frees(mapping, t)
        verdict = eval_condition(inst, self.asms, solver=self.expr_set)
        if verdict is Tri.UNKNOWN:
            self.warnings.append(
                f"condition {print_term(inst)} is undecided; "
                "taking the False branch")
        return verdict is Tri.TRUE

    def _spend(self) -> None:
        self.budget -= 1
        if self.budget <= 0:
            raise InterpreterError(
                "the program loops without producing steps")

    # entering a subtree with an incoming value

    def enter(self, ist: Istate, loc: Path, value: Term):
        node = self.node(loc)
        kind = node.kind
        if kind == "expr":
            v = self.eval_expr(self.term_at(loc), ist)
            return self.resume(ist, loc, v, True)
        if kind == "tactic":
            return self.run_tactic(ist, loc, value)
        if kind == "let":
            return self.enter(ist, node.operands["rhs"], value)
        if kind == "chain":
            if "init" in node.operands:
                value = self.eval_expr(
                    self.term_at(node.operands["init"]), ist)
            return self.enter(ist, node.operands["first"], value)
        if kind == "cond":
            if "init" in node.operands:
                value = self.eval_expr(
                    self.term_at(node.operands["init"]), ist)
            cond = self.term_at(node.operands["cond"])
            branch = "then" if self.eval_cond(cond, ist, value) else "else"
            return self.enter(ist, node.operands[branch], value)
        if kind == "while":
            if "init" in node.operands:
                value = self.eval_expr(
                    self.term_at(node.operands["init"]), ist)
            cond = self.term_at(node.operands["cond"])
            if self.eval_cond(cond, ist, value):
                self._spend()
                return self.enter(ist, node.operands["body"], value)
            return self.resume(ist, loc, value, True)
        if kind == "repeat":
            self._spend()
            return self.enter(ist.push_loop(loc, value),
                              node.operands["body"], value)
        if kind == "try":
            return self.enter(ist, node.operands["body"], value)
        if kind == "alt":
            return self.enter(ist, node.operands["first"], value)
        raise InterpreterError(f"cannot execute node kind {kind!r}")

    # continuing after the subtree at loc completed (ok) or rejected

    def resume(self, ist: Istate, loc: Path, value: Term, ok: bool):
        node = self.node(loc)
        if node.parent is None:
            return ("value" if ok else "reject", value, ist)
        ploc, role = node.parent
        pnode = self.node(ploc)
        kind = pnode.kind

        if kind == "let":
            if role == "rhs" and ok:
                assert pnode.var is not None
                ist = ist.bind(pnode.var, value)
                return self.enter(ist, pnode.operands["body"], value)
            return self.resume(ist, ploc, value, ok)
        if kind == "chain":
            if role == "first" and ok:
                return self.enter(ist, pnode.operands["second"], value)
            return self.resume(ist, ploc, value, ok)
        if kind == "cond":
            return self.resume(ist, ploc, value, ok)
        if kind == "while":
            if not ok:
                return self.resume(ist, ploc, value, False)
            ist = self._while_rebind(pnode, ist, value)
            cond = self.term_at(pnode.operands["cond"])
            if self.eval_cond(cond, ist, value):
                self._spend()
                return self.enter(ist, pnode.operands["body"], value)
            return self.resume(ist, ploc, value, True)
        if kind == "repeat":
            entry_loc, entry_val = ist.loop_stack[-1]
            assert entry_loc == ploc, "loop frames out of order"
            if not ok or alpha_equal(value, entry_val):
                return self.resume(ist.pop_loop(), ploc, value, True)
            self._spend()
            return self.enter(ist.set_loop_entry(value),
                              pnode.operands["body"], value)
        if kind == "try":
            return self.resume(ist, ploc, value, True)
        if kind == "alt":
            if not ok and role == "first":
                return self.enter(ist, pnode.operands["second"], value)
            return self.resume(ist, ploc, value, ok)
        raise InterpreterError(f"cannot resume past node kind {kind!r}")

    def _while_rebind(self, pnode: Node, ist: Istate, value: Term) -> Istate:
        # a loop value named by a program variable follows the iteration
        if "init" in pnode.operands:
            init = self.term_at(pnode.operands["init"])
            if isinstance(init, Free):
                return ist.rebind(init.name, value)
        return ist

    def run_tactic(self, ist: Istate, loc: Path, value: Term):
        t = self.term_at(loc)
        head, args = strip_app(t)
        assert isinstance(head, Const)
        name = head.name
        if name == "SubProblem":
            thy, pkey, mkey = subproblem_spec(args[0])
            arg_list = self.eval_expr(args[1], ist)
            items = list_elements(arg_list)
            if items is None:
                raise InterpreterError("SubProblem arguments must be a list")
            tactic = app(head, args[0], arg_list)
            call = SubCall(thy, pkey, mkey, tuple(items), loc, tactic)
            return ("call", call, ist.at_path(loc))
        _, hi = TACTIC_ARITY[name]
        full = len(args) == hi
        static = args[:-1] if full else args
        static_vals = [self.eval_expr(a, ist) for a in static]
        if not full:
            target = value
        elif name == "Take":
            # Take forms a value from program text, so it evaluates
            target = self.eval_expr(args[-1], ist)
        else:
            # other tactics transform their argument as written
            target = subst_frees(ist.env_map(), args[-1])
        tactic = app(head, *static_vals, target)
        res = apply_tactic(self.kb, tactic, self.asms)
        if res is None:
            return self.resume(ist, loc, value, False)
        formula, new_asms = res
        ist2 = ist.at_path(loc).with_act(formula)
        return ("step", AppliedStep(tactic, formula, loc, new_asms), ist2)


# ------------------------------------------------------- tactic semantics


def apply_tactic(kb: Knowledge, t: Term,
                 assumptions: tuple[Term, ...] = ()
                 ) -> Optional[tuple[Term, tuple[Term, ...]]]:
    """Apply a fully-instantiated tactic term; None means not applicable.

    Deterministic in its arguments, which is what makes recorded steps
    replayable.
    """
    head, args = strip_app(t)
    name = head.name if isinstance(head, Const) else None
    if name not in TACTIC_ARITY or len(args) != TACTIC_ARITY[name][1]:
        raise InterpreterError(
            f"not an applicable tactic: {print_term(t, debug=True)}")
    solver = kb.rule_set("eval_arith")

    if name == "Calculate":
        op = string_value(args[0])
        if op is None:
            raise InterpreterError("Calculate expects an operator name")
        res = calc_single(op, args[1])
        return (res.term, ()) if res else None

    if name in ("Rewrite", "Rewrite_Inst"):
        if name == "Rewrite_Inst":
            inst, rule_arg, target = args
            rule = _named_rule(kb, rule_arg).instantiate(_subst_of(inst))
        else:
            rule_arg, target = args
            rule = _named_rule(kb, rule_arg)
        res = rewrite_single(rule, target, assumptions, solver)
        return (res.term, res.assumptions) if res else None

    if name in ("Rewrite_Set", "Rewrite_Set_Inst"):
        if name == "Rewrite_Set_Inst":
            inst, set_arg, target = args
            rs = _named_set(kb, set_arg)
            sub = _subst_of(inst)
            rs = RuleSet(rs.name, tuple(r.instantiate(sub) for r in rs.rules),
                         rs.calc_ops, rs.cond_solver, rs.max_steps)
        else:
            set_arg, target = args
            rs = _named_set(kb, set_arg)
        out = rewrite_set(rs, target, assumptions)
        if out.hit_limit:
            raise InterpreterError(
                f"rule set {rs.name} exceeded its step limit")
        if not out.trace:
            return None
        return (out.term, out.assumptions)

    if name == "Or_to_List":
        return (term_list(_flatten_or(args[0])), ())

    if name == "Substitute":
        eqs = list_elements(args[0])
        if eqs is None:
            raise InterpreterError("Substitute expects a list of equations")
        mapping: dict[str, Term] = {}
        for eq in eqs:
            h, ops = strip_app(eq)
            if not (isinstance(h, Const) and h.name == "eq"
                    and len(ops) == 2 and isinstance(ops[0], Free)):
                raise InterpreterError(
                    "Substitute expects equations variable = term")
            mapping[ops[0].name] = ops[1]
        out = subst_frees(mapping, args[1])
        return None if alpha_equal(out, args[1]) else (out, ())

    assert name == "Take"
    return (args[0], ())


def _named_rule(kb: Knowledge, arg: Term) -> Rule:
    s = string_value(arg)
    if s is None:
        raise InterpreterError("expected a rule name")
    return kb.rule(s)


def _named_set(kb: Knowledge, arg: Term) -> RuleSet:
    s = string_value(arg)
    if s is None:
        raise InterpreterError("expected a rule set name")
    return kb.rule_set(s)


def _flatten_or(t: Term) -> list[Term]:
    head, args = strip_app(t)
    if isinstance(head, Const) and head.name == "or" and len(args) == 2:
        return _flatten_or(args[0]) + _flatten_or(args[1])
    return [t]


def _subst_of(t: Term) -> Subst:
    items = list_elements(t)
    if items is None:
        raise InterpreterError("instantiation must be a list of pairs")
    mapping: dict[str, Term] = {}
    for item in items:
        p = pair_elements(item)
        if p is None:
            raise InterpreterError("instantiation must be a list of pairs")
        key: Optional[str]
        if isinstance(p[0], Free):
            key = p[0].name
        else:
            key = string_value(p[0])
        if key is None:
            raise InterpreterError("instantiation keys must be names")
        mapping[key] = p[1]
    return Subst(mapping)


# ------------------------------------------------------ calculation driver


def advance(calc: Calculation) -> Outcome:
    """Run the interpreter until it produces one visible step."""
    if calc.finished:
        return EndProgram(calc.current_formula())
    returned: Optional[Term] = None
    while True:
        frame = calc.frame
        run = _Run(frame.method.program, calc.kb, frame.assumptions,
                   calc.warnings)
        ist = frame.istate
        if ist.finished:
            tag, payload, ist2 = "value", ist.act_arg, ist
        elif not ist.path:
            tag, payload, ist2 = run.enter(ist, frame.method.program.root,
                                           ist.act_arg)
        else:
            value = returned if returned is not None else ist.act_arg
            tag, payload, ist2 = run.resume(ist, ist.path, value, True)
        returned = None

        if tag == "step":
            ap: AppliedStep = payload
            frame.istate = ist2
            calc.add_assumptions(ap.assumptions)
            step = Step(ap.formula, ap.tactic, calc.level, ap.path,
                        ap.assumptions, "engine")
            calc.append(step)
            return NextStep(step)
        if tag == "call":
            frame.istate = ist2
            step = _enter_subproblem(calc, payload, source="engine")
            return NextStep(step)
        if tag == "value":
            frame.istate = ist2.done().with_act(payload)
            if len(calc.frames) == 1:
                step = Step(payload, None, 0, (), (), "end")
                calc.append(step)
                calc.finished = True
                return EndProgram(payload)
            returned = calc.close_level(payload)
            continue
        assert tag == "reject"
        return Helpless()


def _enter_subproblem(calc: Calculation, call: SubCall, source: str) -> Step:
    kb = calc.kb
    problem = _resolve(kb.problem, call.theory, call.problem_key)
    method = _resolve(kb.method, call.theory, call.method_key)
    if method.problem_key != problem.key:
        raise InterpreterError(
            f"method {list(method.key)} does not solve "
            f"{list(problem.key)}")
    if len(call.args) != len(problem.given):
        raise InterpreterError(
            f"subproblem {list(call.problem_key)} expects "
            f"{len(problem.given)} arguments, got {len(call.args)}")
    model = dict(zip(problem.given, call.args))
    kb.check_model(problem, model)
    start = kb.start_formula(method, model)
    calc.open_level(method, model, start, call.path)
    step = Step(start, call.tactic, calc.level, call.path, (), source)
    calc.append(step)
    return step


def _resolve(lookup, theory: str, key: tuple[str, ...]):
    # spec keys may be written relative to their theory
    for full in ((theory,) + key, key):
        try:
            return lookup(full)
        except KnowledgeError:
            continue
    raise InterpreterError(f"unknown reference {list(key)} in {theory}")


def find_next_step(calc: Calculation) -> Outcome:
    """Propose the next step without committing it."""
    return advance(calc.copy())


# --------------------------------------------------------- student input


@dataclass(frozen=True)
class FoundStep:
    step: Step
    hidden_steps: int


@dataclass(frozen=True)
class NotDerivable:
    reason: str


@dataclass(frozen=True)
class SafeStep:
    step: Step
    skipped: int


@dataclass(frozen=True)
class UnsafeStep:
    step: Step


@dataclass(frozen=True)
class NotLocatable:
    reason: str


def _norm_equal(calc: Calculation, a: Term, b: Term) -> bool:
    if alpha_equal(a, b):
        return True
    norm = calc.frame.method.norm_set
    if norm is None:
        return False
    out_a = rewrite_set(norm, a)
    out_b = rewrite_set(norm, b)
    if out_a.hit_limit or out_b.hit_limit:
        return False
    return alpha_equal(out_a.term, out_b.term)


def locate_input_term(calc: Calculation,
                      formula: Term) -> Union[FoundStep, NotDerivable]:
    """Check a student's formula by deriving ahead on a copy.

    On success the copy replaces the calculation: engine steps in
    between stay hidden, the accepted formula becomes a visible step.
    """
    if calc.finished:
        return NotDerivable("the calculation is already finished")
    work = calc.copy()
    if _norm_equal(work, formula, work.current_formula()):
        step = _commit_user_formula(work, formula)
        _assign(calc, work)
        return FoundStep(step, hidden_steps=0)

    first_new = len(work.steps)
    descents = 0
    for _ in range(_LOCATE_TERM_STEPS):
        out = advance(work)
        if isinstance(out, Helpless):
            return NotDerivable("no further step can be derived")
        if isinstance(out, EndProgram):
            if _final_matches(work, formula):
                _hide_engine_steps(work, first_new, keep_last=True)
                _assign(calc, work)
                last = calc.steps[-1]
                return FoundStep(last, _count_hidden(calc, first_new))
            return NotDerivable("the calculation ends differently")
        step = out.step
        if step.source == "engine" and _is_entry(step):
            descents += 1
            if descents > _LOCATE_TERM_DESCENTS:
                return NotDerivable("too many subproblems ahead")
        if _norm_equal(work, formula, step.formula):
            if alpha_equal(formula, step.formula):
                _hide_engine_steps(work, first_new, keep_last=True)
                final = work.steps[-1]
            else:
                _hide_engine_steps(work, first_new, keep_last=False)
                final = _commit_user_formula(work, formula)
            _assign(calc, work)
            return FoundStep(final, _count_hidden(calc, first_new))
    return NotDerivable("the formula was not reached")


def _final_matches(work: Calculation, formula: Term) -> bool:
    return _norm_equal(work, formula, work.steps[-1].formula)


def _is_entry(step: Step) -> bool:
    return step.tactic is not None and head_const(step.tactic) == "SubProblem"


def _commit_user_formula(work: Calculation, formula: Term) -> Step:
    frame = work.frame
    frame.istate = frame.istate.with_act(formula)
    step = Step(formula, app(Const("Take"), formula), work.level,
                frame.istate.path, (), "user")
    work.append(step)
    return step


def _hide_engine_steps(work: Calculation, first: int, keep_last: bool) -> None:
    last = len(work.steps) - 1
    for i in range(first, len(work.steps)):
        s = work.steps[i]
        if keep_last and i == last:
            continue
        if _is_entry(s) or s.source == "end":
            continue  # structure rows stay visible
        work.steps[i] = replace(s, hidden=True)


def _count_hidden(calc: Calculation, first: int) -> int:
    return sum(1 for s in calc.steps[first:] if s.hidden)


def _assign(calc: Calculation, work: Calculation) -> None:
    calc.frames = work.frames
    calc.steps = work.steps
    calc.warnings = work.warnings
    calc.finished = work.finished


def locate_input_tactic(calc: Calculation, tactic: Term
                        ) -> Union[SafeStep, UnsafeStep, NotLocatable]:
    """Check a student's tactic against the ones the program derives."""
    name = head_const(tactic)
    if name not in TACTIC_ARITY:
        return NotLocatable(f"{name or 'this'} is not a tactic")
    lo, hi = TACTIC_ARITY[name]
    n_args = len(strip_app(tactic)[1])
    if not lo <= n_args <= hi:
        return NotLocatable(f"{name} takes {lo} to {hi} arguments")
    if calc.finished:
        return NotLocatable("the calculation is already finished")

    work = calc.copy()
    first_new = len(work.steps)
    for _ in range(_LOCATE_TACTIC_SKIPS):
        out = advance(work)
        if not isinstance(out, NextStep):
            break
        step = out.step
        if step.tactic is not None and _tactic_matches(tactic, step.tactic):
            skipped = len(work.steps) - first_new - 1
            _hide_engine_steps(work, first_new, keep_last=True)
            _assign(calc, work)
            return SafeStep(calc.steps[-1], skipped)

    # not on the derivation path; maybe it still applies here
    current = calc.current_formula()
    full = tactic if n_args == hi else app(tactic, current)
    try:
        res = apply_tactic(calc.kb, full, calc.frame.assumptions)
    except (InterpreterError, KnowledgeError, TermError, DomainError) as e:
        return NotLocatable(str(e))
    if res is None:
        return NotLocatable("the tactic does not apply here")
    formula, asms = res
    frame = calc.frame
    frame.istate = frame.istate.with_act(formula)
    calc.add_assumptions(asms)
    step = Step(formula, full, calc.level, frame.istate.path, asms,
                "user", safe=False)
    calc.append(step)
    return UnsafeStep(step)


def _tactic_matches(user: Term, engine: Term) -> bool:
    if alpha_equal(user, engine):
        return True
    uh, uargs = strip_app(user)
    eh, eargs = strip_app(engine)
    if not alpha_equal(uh, eh) or len(uargs) > len(eargs):
        return False
    return all(alpha_equal(u, e) for u, e in zip(uargs, eargs))

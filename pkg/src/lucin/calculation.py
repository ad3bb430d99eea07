"""The visible calculation: steps, nesting levels, assumptions.

A calculation is a list of steps plus a stack of program activations
(frames), one per open subproblem.  Steps produced while searching for
a student's formula are kept but hidden; display numbering counts only
visible rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .knowledge import Knowledge, Method, Model
from .parsing import print_term
from .programs import Istate, initial_istate
from .rewriting import Tri, eval_condition
from .terms import (
    Path, Term, alpha_equal, free_vars, list_elements, term_list,
)


@dataclass(frozen=True)
class Step:
    formula: Term
    tactic: Optional[Term]  # None for the initial row and the closing row
    level: int
    path: Path  # program location of the producing tactic
    assumptions: tuple[Term, ...] = ()  # added by this step
    source: str = "engine"  # start | engine | user | end
    safe: bool = True
    hidden: bool = False


@dataclass
class Frame:
    method: Method
    istate: Istate
    assumptions: tuple[Term, ...] = ()
    model: dict[str, Term] = field(default_factory=dict)
    call_path: Optional[Path] = None  # SubProblem site in the parent

    def copy(self) -> "Frame":
        return Frame(self.method, self.istate, self.assumptions,
                     dict(self.model), self.call_path)


class CalcError(Exception):
    pass


class Calculation:
    def __init__(self, kb: Knowledge):
        self.kb = kb
        self.frames: list[Frame] = []
        self.steps: list[Step] = []
        self.warnings: list[str] = []
        self.finished = False

    # ------------------------------------------------------------- state

    @property
    def level(self) -> int:
        return len(self.frames) - 1

    @property
    def frame(self) -> Frame:
        return self.frames[-1]

    def current_formula(self) -> Term:
        if self.finished:
            return self.steps[-1].formula
        return self.frame.istate.act_arg

    @property
    def visible_steps(self) -> list[Step]:
        return [s for s in self.steps if not s.hidden]

    def append(self, step: Step) -> None:
        self.steps.append(step)

    def add_assumptions(self, asms: tuple[Term, ...]) -> None:
        known = list(self.frame.assumptions)
        for a in asms:
            if not any(alpha_equal(a, k) for k in known):
                known.append(a)
        self.frame.assumptions = tuple(known)

    def copy(self) -> "Calculation":
        c = Calculation(self.kb)
        c.frames = [f.copy() for f in self.frames]
        c.steps = list(self.steps)
        c.warnings = list(self.warnings)
        c.finished = self.finished
        return c

    # ------------------------------------------------------------ levels

    def open_level(self, method: Method, model: Model, start: Term,
                   call_path: Optional[Path]) -> None:
        istate = initial_istate(method.program, model, start)
        self.frames.append(Frame(method, istate, model=dict(model),
                                 call_path=call_path))

    def close_level(self, value: Term) -> Term:
        """Pop the finished frame; returns the value the caller receives.

        Solutions contradicting the caller's assumptions are dropped,
        and the child's other assumptions carry over when they mention
        anything the caller can see.
        """
        child = self.frames.pop()
        caller = self.frames[-1]
        combined = caller.assumptions + tuple(
            a for a in child.assumptions
            if not any(alpha_equal(a, k) for k in caller.assumptions))
        value = _drop_refuted(value, combined)
        visible = free_vars(value) | free_vars(caller.istate.act_arg)
        for a in child.assumptions:
            if free_vars(a) & visible and \
                    not any(alpha_equal(a, k) for k in caller.assumptions):
                caller.assumptions = caller.assumptions + (a,)
        return value


def _drop_refuted(value: Term, assumptions: tuple[Term, ...]) -> Term:
    """Filter a solution list against the assumption set."""
    items = list_elements(value)
    if items is None:
        return value
    kept = [el for el in items
            if eval_condition(el, assumptions) is not Tri.FALSE]
    if len(kept) == len(items):
        return value
    return term_list(kept)


def start_calculation(kb: Knowledge, problem_key: tuple[str, ...],
                      method_key: tuple[str, ...],
                      model: Model) -> Calculation:
    problem = kb.problem(problem_key)
    method = kb.method(method_key)
    if method.problem_key != problem_key:
        raise CalcError(
            f"method {list(method_key)} does not solve {list(problem_key)}")
    kb.check_model(problem, model)
    start = kb.start_formula(method, model)
    calc = Calculation(kb)
    calc.open_level(method, model, start, call_path=None)
    calc.append(Step(formula=start, tactic=None, level=0, path=(),
                     source="start"))
    return calc


def render_text(calc: Calculation) -> str:
    """Plain text view: one numbered row per visible step."""
    lines = []
    for i, s in enumerate(calc.visible_steps, start=1):
        indent = "  " * s.level
        tac = f"  [{print_term(s.tactic, debug=True)}]" if s.tactic else ""
        mark = "" if s.safe else "  (unsafe)"
        lines.append(f"{i:3}. {indent}{print_term(s.formula)}{tac}{mark}")
    return "\n".join(lines)

"""Sessions over calculations, exposed as JSON-friendly operations.

One Session owns one calculation. Every mutating operation snapshots
the calculation first, so undo is exact; the state hash covers the
full resumable state (steps plus per-level interpreter positions), so
two sessions with equal hashes behave identically from there on.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

from .calculation import Calculation, start_calculation
from .interpreter import (
    EndProgram, FoundStep, Helpless, InterpreterError, NextStep,
    NotDerivable, NotLocatable, SafeStep, UnsafeStep, advance,
    find_next_step, locate_input_tactic, locate_input_term,
)
from .knowledge import Knowledge, KnowledgeError, default_knowledge
from .parsing import ParseError, parse_formula, parse_program_expr, print_term
from .terms import path_str

_AUTO_CAP = 500

HINT_DETAILS = ("full", "tactic_only", "formula_only")


class ServiceError(Exception):
    """Bad request against the service (unknown session, bad input)."""

    def __init__(self, message: str, kind: str = "bad_request"):
        super().__init__(message)
        self.kind = kind


class Session:
    def __init__(self, session_id: str, kb: Knowledge,
                 problem: tuple[str, ...], method: tuple[str, ...],
                 model_src: dict[str, str]):
        self.id = session_id
        self.kb = kb
        self.problem = problem
        self.method = method
        self.model_src = dict(model_src)
        model = {k: _parse_formula(v) for k, v in model_src.items()}
        self.calc = start_calculation(kb, problem, method, model)
        self._undo_stack: list[Calculation] = []

    # ------------------------------------------------------------- views

    def view(self) -> dict[str, Any]:
        calc = self.calc
        steps = [
            {
                "n": i + 1,
                "level": s.level,
                "formula": print_term(s.formula),
                "tactic": print_term(s.tactic) if s.tactic is not None else None,
                "source": s.source,
                "safe": s.safe,
                "hidden": s.hidden,
                "assumptions": [print_term(a) for a in s.assumptions],
            }
            for i, s in enumerate(calc.steps)
        ]
        view = {
            "id": self.id,
            "problem": list(self.problem),
            "method": list(self.method),
            "model": dict(self.model_src),
            "finished": calc.finished,
            "level": calc.level,
            "current_formula": print_term(calc.current_formula()),
            "steps": steps,
            "assumptions": [print_term(a)
                            for a in calc.frame.assumptions],
            "warnings": list(calc.warnings),
        }
        view["state_hash"] = self._hash(view)
        return view

    def _hash(self, view: dict[str, Any]) -> str:
        internal = {
            "view": view,
            "frames": [
                {
                    "method": list(f.method.key),
                    "path": path_str(f.istate.path),
                    "act": print_term(f.istate.act_arg, debug=True),
                    "env": [[k, print_term(v, debug=True)]
                            for k, v in f.istate.env],
                    "loops": len(f.istate.loop_stack),
                    "finished": f.istate.finished,
                    "call_path": path_str(f.call_path or ()),
                }
                for f in self.calc.frames
            ],
        }
        blob = json.dumps(internal, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    # -------------------------------------------------------- operations

    def _snapshot(self) -> None:
        self._undo_stack.append(self.calc.copy())

    def _discard_snapshot_if_unchanged(self, before_len: int) -> None:
        if len(self.calc.steps) == before_len:
            self._undo_stack.pop()

    def input_term(self, text: str) -> dict[str, Any]:
        formula = _parse_formula(text)
        self._snapshot()
        n0 = len(self.calc.steps)
        out = locate_input_term(self.calc, formula)
        self._discard_snapshot_if_unchanged(n0)
        if isinstance(out, FoundStep):
            return {"kind": "found",
                    "formula": print_term(out.step.formula),
                    "hidden_steps": out.hidden_steps}
        return {"kind": "not_derivable", "message": out.reason}

    def input_tactic(self, text: str) -> dict[str, Any]:
        try:
            tactic = parse_program_expr(text)
        except ParseError as e:
            raise ServiceError(str(e), kind="parse_error") from None
        self._snapshot()
        n0 = len(self.calc.steps)
        out = locate_input_tactic(self.calc, tactic)
        self._discard_snapshot_if_unchanged(n0)
        if isinstance(out, SafeStep):
            return {"kind": "safe",
                    "formula": print_term(out.step.formula),
                    "skipped": out.skipped}
        if isinstance(out, UnsafeStep):
            return {"kind": "unsafe",
                    "formula": print_term(out.step.formula)}
        return {"kind": "not_locatable", "message": out.reason}

    def hint(self, detail: str = "full") -> dict[str, Any]:
        if detail not in HINT_DETAILS:
            raise ServiceError(f"unknown hint detail {detail!r}")
        out = find_next_step(self.calc)
        if isinstance(out, EndProgram):
            return {"kind": "end", "formula": print_term(out.formula)}
        if isinstance(out, Helpless):
            return {"kind": "helpless"}
        res: dict[str, Any] = {"kind": "step"}
        if detail in ("full", "tactic_only") and out.step.tactic is not None:
            res["tactic"] = print_term(out.step.tactic)
        if detail in ("full", "formula_only"):
            res["formula"] = print_term(out.step.formula)
        return res

    def auto(self, steps: Optional[int] = None) -> dict[str, Any]:
        cap = _AUTO_CAP if steps is None else max(0, int(steps))
        self._snapshot()
        n0 = len(self.calc.steps)
        applied = 0
        kind = "stepped"
        for _ in range(cap):
            out = advance(self.calc)
            if isinstance(out, NextStep):
                applied += 1
                continue
            kind = "end" if isinstance(out, EndProgram) else "helpless"
            break
        else:
            if steps is None:
                kind = "helpless"  # cap exhausted without an end
        if self.calc.finished:
            kind = "end"
        self._discard_snapshot_if_unchanged(n0)
        return {"kind": kind, "applied": applied}

    def undo(self) -> dict[str, Any]:
        if not self._undo_stack:
            return {"kind": "nothing_to_undo"}
        self.calc = self._undo_stack.pop()
        return {"kind": "undone"}


class Service:
    """Holds sessions; ids are deterministic per service instance."""

    def __init__(self, kb: Optional[Knowledge] = None):
        self.kb = kb if kb is not None else default_knowledge()
        self.sessions: dict[str, Session] = {}
        self._next_id = 1

    def start_session(self, problem: list[str], method: list[str],
                      model: dict[str, str]) -> Session:
        sid = f"s{self._next_id}"
        try:
            session = Session(sid, self.kb, tuple(problem), tuple(method),
                              model)
        except KnowledgeError as e:
            raise ServiceError(str(e), kind=type(e).__name__) from None
        self._next_id += 1
        self.sessions[sid] = session
        return session

    def session(self, sid: str) -> Session:
        try:
            return self.sessions[sid]
        except KeyError:
            raise ServiceError(f"unknown session {sid!r}",
                               kind="unknown_session") from None

    def catalog(self) -> dict[str, Any]:
        problems = []
        for key, prob in sorted(self.kb.problems.items()):
            methods = [list(m.key) for m in self.kb.methods.values()
                       if m.problem_key == key]
            problems.append({
                "problem": list(key),
                "given": list(prob.given),
                "where": [print_term(c) for c in prob.where],
                "find": list(prob.find),
                "methods": sorted(methods),
            })
        return {"problems": problems}


def _parse_formula(text: str):
    try:
        return parse_formula(text)
    except ParseError as e:
        raise ServiceError(str(e), kind="parse_error") from None


# ------------------------------------------------------- stdio protocol


def handle_message(service: Service, msg: dict[str, Any]) -> dict[str, Any]:
    """One request in, one response out; shared by stdio and tests."""
    try:
        op = msg.get("op")
        if op == "start":
            s = service.start_session(msg["problem"], msg["method"],
                                      msg.get("model", {}))
            return {"ok": True, "view": s.view()}
        if op == "catalog":
            return {"ok": True, **service.catalog()}
        sid = msg.get("id", "")
        s = service.session(sid)
        if op == "term":
            result = s.input_term(msg["formula"])
        elif op == "tactic":
            result = s.input_tactic(msg["tactic"])
        elif op == "hint":
            result = s.hint(msg.get("detail", "full"))
        elif op == "auto":
            result = s.auto(msg.get("steps"))
        elif op == "undo":
            result = s.undo()
        elif op == "state":
            result = {"kind": "state"}
        else:
            raise ServiceError(f"unknown op {op!r}", kind="unknown_op")
        return {"ok": True, "result": result, "view": s.view()}
    except ServiceError as e:
        return {"ok": False,
                "error": {"kind": e.kind, "message": str(e)}}
    except (KnowledgeError, InterpreterError) as e:
        return {"ok": False,
                "error": {"kind": type(e).__name__, "message": str(e)}}
    except KeyError as e:
        return {"ok": False,
                "error": {"kind": "missing_field",
                          "message": f"missing field {e.args[0]!r}"}}


def stdio_loop(service: Service, stdin, stdout) -> None:
    """JSON-lines server: one request object per line, one response per line."""
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as e:
            resp = {"ok": False,
                    "error": {"kind": "bad_json", "message": str(e)}}
        else:
            if msg.get("op") == "quit":
                break
            resp = handle_message(service, msg)
        stdout.write(json.dumps(resp, sort_keys=True) + "\n")
        stdout.flush()

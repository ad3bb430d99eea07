"""Registry of rules, rule sets, problem patterns and methods.

Theory files (*.thy-li) load in sorted filename order; names and keys
are global and must be unique.  Two rule sets are built in: eval_arith
(numeral arithmetic, comparisons, boolean folds) and prog_expr
(eval_arith plus pair and list projections), the latter is what program
expressions evaluate under.  A rule set without an explicit cond_solver
discharges its rule conditions under eval_arith.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Optional

from .parsing import MethodDecl, TheoryDecl, parse_theory, print_term
from .programs import ProgramDef, build_program
from .rewriting import Rule, RuleSet, Tri, eval_condition
from .terms import Term, subst_frees

_ARITH_OPS = ("plus", "minus", "times", "divide", "pow", "mod", "neg",
              "sqrt", "eq", "noteq", "lt", "le", "gt", "ge",
              "and", "or", "not", "is_num")
_EXPR_OPS = _ARITH_OPS + ("fst", "snd", "hd", "tl", "lastElem", "nth")


def _builtin_sets() -> dict[str, RuleSet]:
    return {
        "eval_arith": RuleSet("eval_arith", calc_ops=_ARITH_OPS),
        "prog_expr": RuleSet("prog_expr", calc_ops=_EXPR_OPS),
    }


class KnowledgeError(Exception):
    pass


class DuplicateName(KnowledgeError):
    pass


class UnknownName(KnowledgeError):
    pass


class IncompleteModel(KnowledgeError):
    def __init__(self, missing: list[str]):
        super().__init__(f"model lacks values for {missing}")
        self.missing = missing


class GuardFailed(KnowledgeError):
    def __init__(self, cond: Term):
        super().__init__(f"precondition {print_term(cond)} does not hold")
        self.cond = cond


@dataclass(frozen=True)
class ProblemPattern:
    key: tuple[str, ...]
    given: tuple[str, ...]
    where: tuple[Term, ...]
    find: tuple[str, ...]
    relate: tuple[Term, ...]
    theory: str


@dataclass(frozen=True)
class Method:
    key: tuple[str, ...]
    problem_key: tuple[str, ...]
    start: Term
    norm_set: Optional[RuleSet]
    program: ProgramDef
    theory: str


Model = dict[str, Term]


class Knowledge:
    def __init__(self) -> None:
        self.rules: dict[str, Rule] = {}
        self.rule_sets: dict[str, RuleSet] = dict(_builtin_sets())
        self.problems: dict[tuple[str, ...], ProblemPattern] = {}
        self.methods: dict[tuple[str, ...], Method] = {}

    # ------------------------------------------------------------ loading

    def load_dir(self, directory: FsPath) -> None:
        paths = sorted(FsPath(directory).glob("*.thy-li"))
        if not paths:
            raise KnowledgeError(f"no theory files under {directory}")
        for p in paths:
            self.load_file(p)

    def load_file(self, path: FsPath) -> None:
        decl = parse_theory(path.read_text(), source_name=path.name)
        self.add_theory(decl)

    def add_theory(self, decl: TheoryDecl) -> None:
        for rd in decl.rules:
            if rd.name in self.rules:
                raise DuplicateName(f"rule {rd.name} defined twice")
            self.rules[rd.name] = Rule(rd.name, rd.lhs, rd.rhs, rd.conds)

        # rule sets resolve in two passes so cond_solver may point forward
        # within the same file
        pending = []
        for rsd in decl.rulesets:
            if rsd.name in self.rule_sets:
                raise DuplicateName(f"rule set {rsd.name} defined twice")
            rs = RuleSet(
                rsd.name,
                rules=tuple(self.rule(n) for n in rsd.rule_names),
                calc_ops=rsd.calc_ops,
                max_steps=rsd.max_steps if rsd.max_steps is not None
                else 2000,
            )
            self.rule_sets[rsd.name] = rs
            pending.append((rs, rsd.cond_solver))
        for rs, solver_name in pending:
            rs.cond_solver = self.rule_set(solver_name or "eval_arith")

        for pd in decl.problems:
            if pd.key in self.problems:
                raise DuplicateName(f"problem {list(pd.key)} defined twice")
            self.problems[pd.key] = ProblemPattern(
                pd.key, pd.given, pd.where, pd.find, pd.relate, decl.name)

        for md in decl.methods:
            if md.key in self.methods:
                raise DuplicateName(f"method {list(md.key)} defined twice")
            self.methods[md.key] = self._build_method(md, decl.name)

    def _build_method(self, md: MethodDecl, theory: str) -> Method:
        problem = self.problem(md.problem_key)
        stray = set(md.program.params) - set(problem.given)
        if stray:
            raise KnowledgeError(
                f"method {list(md.key)}: program parameters {sorted(stray)} "
                "are not given items of its problem")
        extra = problem.find + problem.given
        prog = build_program(md.program.name, md.program.params,
                             md.program.body, extra_vars=extra)
        norm = self.rule_set(md.norm_set) if md.norm_set else None
        return Method(md.key, md.problem_key, md.start, norm, prog, theory)

    # ------------------------------------------------------------ lookup

    def rule(self, name: str) -> Rule:
        try:
            return self.rules[name]
        except KeyError:
            raise UnknownName(f"unknown rule {name!r}") from None

    def rule_set(self, name: str) -> RuleSet:
        try:
            return self.rule_sets[name]
        except KeyError:
            raise UnknownName(f"unknown rule set {name!r}") from None

    def problem(self, key: tuple[str, ...]) -> ProblemPattern:
        try:
            return self.problems[key]
        except KeyError:
            raise UnknownName(f"unknown problem {list(key)}") from None

    def method(self, key: tuple[str, ...]) -> Method:
        try:
            return self.methods[key]
        except KeyError:
            raise UnknownName(f"unknown method {list(key)}") from None

    # ------------------------------------------------------------- models

    def check_model(self, problem: ProblemPattern, model: Model) -> None:
        """Completeness plus precondition guards against the model."""
        missing = [g for g in problem.given if g not in model]
        if missing:
            raise IncompleteModel(missing)
        solver = self.rule_set("eval_arith")
        for cond in problem.where:
            inst = subst_frees(dict(model), cond)
            verdict = eval_condition(inst, solver=solver)
            if verdict is not Tri.TRUE:
                raise GuardFailed(inst)

    def start_formula(self, method: Method, model: Model) -> Term:
        return subst_frees(dict(model), method.start)


def default_knowledge() -> Knowledge:
    kb = Knowledge()
    kb.load_dir(FsPath(__file__).parent / "theories")
    return kb

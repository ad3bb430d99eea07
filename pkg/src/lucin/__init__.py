"""Step-wise calculation engine.

A tactic interpreter over functional programs that builds calculations
one formula at a time, checks student input and proposes next steps.
"""

from .calculation import CalcError, Calculation, Step, render_text, start_calculation
from .interpreter import (
    EndProgram,
    FoundStep,
    Helpless,
    InterpreterError,
    NextStep,
    NotDerivable,
    NotLocatable,
    SafeStep,
    UnsafeStep,
    advance,
    apply_tactic,
    find_next_step,
    locate_input_tactic,
    locate_input_term,
)
from .knowledge import (
    GuardFailed,
    IncompleteModel,
    Knowledge,
    KnowledgeError,
    UnknownName,
    default_knowledge,
)
from .parsing import (
    ParseError,
    PrintError,
    parse_formula,
    parse_program_expr,
    parse_theory,
    print_term,
)
from .rewriting import DomainError, Rule, RuleSet, Tri, eval_condition, normalize, rewrite_set
from .terms import (
    Abs,
    App,
    Const,
    Free,
    SchematicVar,
    Subst,
    Term,
    TermError,
    alpha_equal,
    parse_path,
    path_str,
)

__version__ = "0.1.0"

__all__ = [
    "Abs", "App", "CalcError", "Calculation", "Const", "DomainError",
    "EndProgram", "FoundStep", "Free", "GuardFailed", "Helpless",
    "IncompleteModel", "InterpreterError", "Knowledge", "KnowledgeError",
    "NextStep", "NotDerivable", "NotLocatable", "ParseError", "PrintError",
    "Rule", "RuleSet", "SafeStep", "SchematicVar", "Step", "Subst", "Term",
    "TermError", "Tri", "UnknownName", "UnsafeStep", "advance",
    "alpha_equal", "apply_tactic", "default_knowledge", "eval_condition",
    "find_next_step", "locate_input_tactic", "locate_input_term",
    "normalize", "parse_formula", "parse_path", "parse_program_expr",
    "parse_theory", "path_str", "print_term", "render_text",
    "start_calculation", "__version__",
]

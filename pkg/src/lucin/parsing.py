"""Concrete syntax: formulas, rules, tactic programs and theory files.

ASCII spellings are canonical; Unicode aliases are accepted on input.
Every diagnostic carries a SourceSpan.  `print_term` is the inverse of
`parse_formula` up to alpha-equality for user-printable terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .terms import (
    BOOL, UNTYPED, Abs, App, Const, Free, SchematicVar, Term,
    app, is_num, list_elements, mk_num, num_value, strip_app, term_list,
)

# ------------------------------------------------------------------- spans


@dataclass(frozen=True)
class SourceSpan:
    source: str
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.source}:{self.line}:{self.col}"


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class PrintError(Exception):
    pass


# ------------------------------------------------------------------- lexer

_ALIASES = {
    "·": "*", "−": "-", "≠": "!=", "≤": "<=", "≥": ">=",
    "∨": "|", "∧": "&", "⇒": "==>",
}

_KEYWORDS = {
    "program", "let", "in", "If", "Then", "Else", "While", "Do",
    "Repeat", "Try", "Or", "theory", "rules", "rulesets", "problems",
    "programs", "rule", "ruleset", "calc", "cond_solver", "max_steps",
    "problem", "method", "given", "where", "find", "relate", "start",
    "norm",
}

_TWO_CHAR = ("#>", "!=", "<=", ">=", ";;")
_ONE_CHAR = "+-*/^=<>()[],:|&"


@dataclass(frozen=True)
class Token:
    kind: str  # NUM IDENT SCHEMATIC STR OP KW EOF
    text: str
    span: SourceSpan


def tokenize(src: str, source_name: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(src)

    def span(l0: int, c0: int) -> SourceSpan:
        return SourceSpan(source_name, l0, c0, line, col)

    def err(msg: str, l0: int, c0: int):
        raise ParseError(msg, span(l0, c0))

    while i < n:
        ch = src[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#" and src[i:i + 2] != "#>":
            while i < n and src[i] != "\n":
                i += 1
            continue
        l0, c0 = line, col
        if ch == "¬":
            i += 1
            col += 1
            toks.append(Token("IDENT", "not", span(l0, c0)))
            continue
        if ch in _ALIASES:
            i += 1
            col += 1
            toks.append(Token("OP", _ALIASES[ch], span(l0, c0)))
            continue
        if src[i:i + 2] == "''":
            j = src.find("''", i + 2)
            if j < 0:
                err("unterminated ''...'' literal", l0, c0)
            text = src[i + 2:j]
            col += j + 2 - i
            i = j + 2
            toks.append(Token("STR", text, span(l0, c0)))
            continue
        if ch == "?":
            j = i + 1
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            if j == i + 1:
                err("expected identifier after '?'", l0, c0)
            name = src[i + 1:j]
            col += j - i
            i = j
            toks.append(Token("SCHEMATIC", name, span(l0, c0)))
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            text = src[i:j]
            col += j - i
            i = j
            toks.append(Token("NUM", text, span(l0, c0)))
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            text = src[i:j]
            col += j - i
            i = j
            if text == "mod":
                toks.append(Token("OP", "mod", span(l0, c0)))
            elif text in _KEYWORDS:
                toks.append(Token("KW", text, span(l0, c0)))
            else:
                toks.append(Token("IDENT", text, span(l0, c0)))
            continue
        if src[i:i + 3] == "==>":
            i += 3
            col += 3
            toks.append(Token("OP", "==>", span(l0, c0)))
            continue
        if src[i:i + 2] in _TWO_CHAR:
            two = src[i:i + 2]
            i += 2
            col += 2
            toks.append(Token("OP", two, span(l0, c0)))
            continue
        if ch in _ONE_CHAR:
            i += 1
            col += 1
            toks.append(Token("OP", ch, span(l0, c0)))
            continue
        err(f"unexpected character {ch!r}", l0, c0)

    end = SourceSpan(source_name, line, col, line, col)
    toks.append(Token("EOF", "", end))
    return toks


# --------------------------------------------------------- operator tables

# symbol -> (constant name, precedence, right associative)
_INFIX = {
    "|": ("or", 1, True),
    "&": ("and", 2, True),
    "=": ("eq", 3, False),
    "!=": ("noteq", 3, False),
    "<": ("lt", 3, False),
    "<=": ("le", 3, False),
    ">": ("gt", 3, False),
    ">=": ("ge", 3, False),
    "+": ("plus", 4, False),
    "-": ("minus", 4, False),
    "*": ("times", 5, False),
    "/": ("divide", 5, False),
    "mod": ("mod", 5, False),
    "^": ("pow", 6, True),
}
_CMP_PREC = 3
_APP_PREC = 9
_NEG_PRINT_PREC = 8  # printed `-x` forms sit between ^ and application
_OP_OF_CONST = {name: (sym, prec, right)
                for sym, (name, prec, right) in _INFIX.items()}

# identifiers that denote function constants rather than free variables
KNOWN_CONSTS = {
    "sqrt", "not", "hd", "tl", "lastElem", "nth", "is_num",
    "True", "False", "nil", "pair", "cons", "neg", "fst", "snd",
}

TACTIC_CONSTS = {
    "Calculate", "Rewrite", "Rewrite_Inst", "Rewrite_Set",
    "Rewrite_Set_Inst", "Or_to_List", "SubProblem", "Substitute", "Take",
}
TACTICAL_CONSTS = {"Chain", "If", "Or", "Repeat", "Try", "While"}
LET_CONST = "Let"
RESERVED_VALUE_NAME = "it"  # current threaded value inside While/If conditions

_BOOLISH = {"True", "False", "and", "or", "not", "eq", "noteq",
            "lt", "le", "gt", "ge"}


# ------------------------------------------------------------------ parser


class _Cursor:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def at_op(self, *syms: str) -> bool:
        t = self.peek()
        return t.kind == "OP" and t.text in syms

    def at_kw(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "KW" and t.text in words

    def expect_op(self, sym: str) -> Token:
        t = self.peek()
        if not self.at_op(sym):
            raise ParseError(f"expected {sym!r}, found {t.text!r}", t.span)
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if not self.at_kw(word):
            raise ParseError(f"expected {word!r}, found {t.text!r}", t.span)
        return self.next()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "IDENT":
            raise ParseError(f"expected identifier, found {t.text!r}", t.span)
        return self.next()


class _FormulaParser:
    """Precedence climbing over the token stream.

    `program_mode` additionally accepts tactic constants, ''...'' literals,
    tactical keywords (If/While/Repeat/Try/Or), let-bindings and `#>`.
    """

    def __init__(self, cur: _Cursor, program_mode: bool = False,
                 type_of: Optional[dict] = None):
        self.cur = cur
        self.program_mode = program_mode
        self.type_of = type_of or {}

    # chain level (program mode only): lowest precedence, right-assoc
    def parse_chain(self) -> Term:
        left = self.parse_expr(1)
        if self.program_mode and self.cur.at_op("#>"):
            self.cur.next()
            return app(Const("Chain"), left, self.parse_chain())
        if self.program_mode and self.cur.at_kw("Or"):
            self.cur.next()
            return app(Const("Or"), left, self.parse_chain())
        return left

    def parse_expr(self, min_prec: int) -> Term:
        left = self.parse_application()
        while True:
            t = self.cur.peek()
            if t.kind != "OP" or t.text not in _INFIX:
                return left
            name, prec, right_assoc = _INFIX[t.text]
            if prec < min_prec:
                return left
            self.cur.next()
            right = self.parse_expr(prec if right_assoc else prec + 1)
            if prec == _CMP_PREC and self._at_cmp():
                raise ParseError(
                    "comparison operators do not associate; use parentheses",
                    self.cur.peek().span)
            tag = BOOL if prec <= _CMP_PREC else UNTYPED
            left = app(Const(name, tag), left, right)

    def _at_cmp(self) -> bool:
        t = self.cur.peek()
        return (t.kind == "OP" and t.text in _INFIX
                and _INFIX[t.text][1] == _CMP_PREC)

    def parse_application(self) -> Term:
        head = self.parse_atom()
        while self._starts_atom():
            head = App(head, self.parse_atom())
        return head

    def _starts_atom(self) -> bool:
        t = self.cur.peek()
        if t.kind in ("NUM", "IDENT", "SCHEMATIC"):
            return True
        if t.kind == "STR" and self.program_mode:
            return True
        if t.kind == "OP" and t.text in ("(", "["):
            return True
        if (t.kind == "KW" and self.program_mode
                and t.text in ("If", "While", "Repeat", "Try", "let")):
            return True
        return False

    def parse_atom(self) -> Term:
        t = self.cur.peek()
        if t.kind == "NUM":
            self.cur.next()
            return mk_num(int(t.text))
        if t.kind == "OP" and t.text == "-":
            self.cur.next()
            nxt = self.cur.peek()
            if nxt.kind == "NUM":
                # a negative numeral literal; `-(3)` stays an application
                self.cur.next()
                return mk_num(-int(nxt.text))
            return App(Const("neg"), self.parse_application())
        if t.kind == "SCHEMATIC":
            self.cur.next()
            return SchematicVar(t.text)
        if t.kind == "STR":
            if not self.program_mode:
                raise ParseError("string literals only occur in programs",
                                 t.span)
            self.cur.next()
            return Const(f"''{t.text}''")
        if t.kind == "IDENT":
            self.cur.next()
            return self._resolve_ident(t)
        if t.kind == "KW" and self.program_mode:
            return self._parse_keyword_form(t)
        if t.kind == "OP" and t.text == "(":
            return self._parse_parens()
        if t.kind == "OP" and t.text == "[":
            return self._parse_list()
        raise ParseError(f"expected a term, found {t.text!r}", t.span)

    def _sub(self) -> Term:
        return self.parse_chain() if self.program_mode else self.parse_expr(1)

    def _parse_parens(self) -> Term:
        self.cur.expect_op("(")
        items = [self._sub()]
        while self.cur.at_op(","):
            self.cur.next()
            items.append(self._sub())
        self.cur.expect_op(")")
        t = items[-1]
        for item in reversed(items[:-1]):
            t = app(Const("pair"), item, t)
        return t

    def _resolve_ident(self, t: Token) -> Term:
        name = t.text
        if name == "True":
            return Const("True", BOOL)
        if name == "False":
            return Const("False", BOOL)
        if name in TACTIC_CONSTS:
            if not self.program_mode:
                raise ParseError(
                    f"tactic constant {name!r} not allowed in formulas",
                    t.span)
            return Const(name)
        if name in KNOWN_CONSTS:
            return Const(name, BOOL if name in _BOOLISH else UNTYPED)
        return Free(name, self.type_of.get(name, UNTYPED))

    def _parse_list(self) -> Term:
        self.cur.expect_op("[")
        items: list[Term] = []
        if not self.cur.at_op("]"):
            while True:
                items.append(self._sub())
                if self.cur.at_op(","):
                    self.cur.next()
                    continue
                break
        self.cur.expect_op("]")
        return term_list(items)

    def _parse_keyword_form(self, t: Token) -> Term:
        if t.text == "Repeat":
            self.cur.next()
            return App(Const("Repeat"), self.parse_atom())
        if t.text == "Try":
            self.cur.next()
            return App(Const("Try"), self.parse_atom())
        if t.text == "If":
            self.cur.next()
            cond = self.parse_expr(1)
            self.cur.expect_kw("Then")
            then_e = self.parse_atom()
            self.cur.expect_kw("Else")
            else_e = self.parse_atom()
            return app(Const("If"), cond, then_e, else_e)
        if t.text == "While":
            self.cur.next()
            cond = self.parse_expr(1)
            self.cur.expect_kw("Do")
            return app(Const("While"), cond, self.parse_atom())
        if t.text == "let":
            return self._parse_let()
        raise ParseError(f"unexpected keyword {t.text!r}", t.span)

    def _parse_let(self) -> Term:
        self.cur.expect_kw("let")
        bindings: list[tuple[str, Term]] = []
        while True:
            name_tok = self.cur.expect_ident()
            self.cur.expect_op("=")
            bindings.append((name_tok.text, self.parse_chain()))
            if self.cur.at_op(";;"):
                self.cur.next()
                continue
            break
        self.cur.expect_kw("in")
        body = self.parse_chain()
        for name, value in reversed(bindings):
            body = app(Const(LET_CONST), value, Abs(name, body))
        return body


def _finish(cur: _Cursor, t: Term) -> Term:
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.span)
    return t


def parse_formula(src: str, ctx=None, source_name: str = "<input>") -> Term:
    """Parse a mathematical formula (no tactic constants, no strings).

    Free variables get the type recorded in ctx's constraints, if any.
    """
    type_of = dict(getattr(ctx, "type_constraints", {}) or {})
    cur = _Cursor(tokenize(src, source_name))
    return _finish(cur, _FormulaParser(cur, type_of=type_of).parse_expr(1))


def parse_program_expr(src: str, source_name: str = "<input>") -> Term:
    """Parse a program expression (tactics, tacticals, let allowed)."""
    cur = _Cursor(tokenize(src, source_name))
    return _finish(cur, _FormulaParser(cur, program_mode=True).parse_chain())


# ----------------------------------------------------------------- printing


def print_term(t: Term, debug: bool = False) -> str:
    """Render a term; inverse of parse_formula up to alpha.

    Abstractions render as `lam x. body` in debug mode only; user mode
    raises PrintError since the surface grammar cannot re-read them.
    """
    return _pp(t, 0, debug)


def _pp(t: Term, min_prec: int, debug: bool) -> str:
    match t:
        case Const(name=name, value=value):
            if value is not None:
                s = _num_str(value)
                if value < 0:
                    return _paren(s, _NEG_PRINT_PREC, min_prec)
                return s
            if name == "nil":
                return "[]"
            return name
        case Free(name=name):
            return name
        case SchematicVar(name=name):
            return f"?{name}"
        case Abs(var=var, body=body):
            if not debug:
                raise PrintError("abstraction has no user-level syntax")
            return f"(lam {var}. {_pp(body, 0, debug)})"
        case App():
            return _pp_app(t, min_prec, debug)
    raise PrintError(f"unprintable term {t!r}")


def _num_str(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _pp_app(t: App, min_prec: int, debug: bool) -> str:
    head, args = strip_app(t)
    if isinstance(head, Const):
        name = head.name
        if name in _OP_OF_CONST and len(args) == 2:
            sym, prec, right = _OP_OF_CONST[name]
            if prec == _CMP_PREC:
                lp = rp = prec + 1  # non-associative: parenthesize both
            else:
                lp = prec + 1 if right else prec
                rp = prec if right else prec + 1
            s = f"{_pp(args[0], lp, debug)} {sym} {_pp(args[1], rp, debug)}"
            return _paren(s, prec, min_prec)
        if name == "neg" and len(args) == 1:
            inner = _pp(args[0], _APP_PREC, debug)
            if is_num(args[0]) and num_value(args[0]) >= 0:
                inner = f"({inner})"  # keep distinct from a negative literal
            s = "-" + inner
            return _paren(s, _NEG_PRINT_PREC, min_prec)
        if name == "cons" and len(args) == 2:
            items = list_elements(t)
            if items is not None:
                return "[" + ", ".join(_pp(x, 0, debug) for x in items) + "]"
        if name == "pair" and len(args) == 2:
            elems = [args[0]]
            rest = args[1]
            while True:
                h2, a2 = strip_app(rest)
                if isinstance(h2, Const) and h2.name == "pair" and len(a2) == 2:
                    elems.append(a2[0])
                    rest = a2[1]
                else:
                    elems.append(rest)
                    break
            return "(" + ", ".join(_pp(x, 0, debug) for x in elems) + ")"
    parts = [_pp(head, _APP_PREC, debug)] + \
        [_pp(a, _APP_PREC + 1, debug) for a in args]
    return _paren(" ".join(parts), _APP_PREC, min_prec)


def _paren(s: str, prec: int, min_prec: int) -> str:
    return f"({s})" if prec < min_prec else s


# ----------------------------------------------------------- declarations


@dataclass(frozen=True)
class RuleDecl:
    name: str
    conds: tuple[Term, ...]
    lhs: Term
    rhs: Term
    span: SourceSpan


@dataclass(frozen=True)
class RuleSetDecl:
    name: str
    rule_names: tuple[str, ...]
    calc_ops: tuple[str, ...]
    cond_solver: Optional[str]
    max_steps: Optional[int]
    span: SourceSpan


@dataclass(frozen=True)
class ProblemDecl:
    key: tuple[str, ...]
    given: tuple[str, ...]
    where: tuple[Term, ...]
    find: tuple[str, ...]
    relate: tuple[Term, ...]
    span: SourceSpan


@dataclass(frozen=True)
class ProgramDecl:
    name: str
    params: tuple[str, ...]
    body: Term
    span: SourceSpan


@dataclass(frozen=True)
class MethodDecl:
    key: tuple[str, ...]
    problem_key: tuple[str, ...]
    start: Term
    norm_set: Optional[str]
    program: ProgramDecl
    span: SourceSpan


@dataclass(frozen=True)
class TheoryDecl:
    name: str
    rules: tuple[RuleDecl, ...]
    rulesets: tuple[RuleSetDecl, ...]
    problems: tuple[ProblemDecl, ...]
    methods: tuple[MethodDecl, ...]


def parse_rule_decl(cur: _Cursor) -> RuleDecl:
    start = cur.expect_kw("rule")
    name = cur.expect_ident().text
    cur.expect_op(":")
    p = _FormulaParser(cur)
    first = p.parse_expr(1)
    conds: tuple[Term, ...] = ()
    if cur.at_op("==>"):
        cur.next()
        conds = tuple(_split_conj(first))
        first = p.parse_expr(1)
    lhs, rhs = _split_rule_equation(first, start.span)
    return RuleDecl(name, conds, lhs, rhs, start.span)


def _split_conj(t: Term) -> list[Term]:
    head, args = strip_app(t)
    if isinstance(head, Const) and head.name == "and" and len(args) == 2:
        return _split_conj(args[0]) + _split_conj(args[1])
    return [t]


def _split_rule_equation(t: Term, span: SourceSpan) -> tuple[Term, Term]:
    head, args = strip_app(t)
    if isinstance(head, Const) and head.name == "eq" and len(args) == 2:
        return args[0], args[1]
    raise ParseError("rule body must be an equation LHS = RHS", span)


def parse_program_decl(cur: _Cursor) -> ProgramDecl:
    start = cur.expect_kw("program")
    name = cur.expect_ident().text
    cur.expect_op("(")
    params: list[str] = []
    if not cur.at_op(")"):
        while True:
            params.append(cur.expect_ident().text)
            if cur.at_op(","):
                cur.next()
                continue
            break
    cur.expect_op(")")
    cur.expect_op("=")
    body = _FormulaParser(cur, program_mode=True).parse_chain()
    return ProgramDecl(name, tuple(params), body, start.span)


def parse_program_def(src: str, source_name: str = "<program>") -> ProgramDecl:
    cur = _Cursor(tokenize(src, source_name))
    decl = parse_program_decl(cur)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.span)
    return decl


def _parse_key(cur: _Cursor) -> tuple[str, ...]:
    cur.expect_op("[")
    parts = [cur.expect_ident().text]
    while cur.at_op(","):
        cur.next()
        parts.append(cur.expect_ident().text)
    cur.expect_op("]")
    return tuple(parts)


def _parse_name_list(cur: _Cursor) -> tuple[str, ...]:
    cur.expect_op("[")
    names: list[str] = []
    if not cur.at_op("]"):
        while True:
            names.append(cur.expect_ident().text)
            if cur.at_op(","):
                cur.next()
                continue
            break
    cur.expect_op("]")
    return tuple(names)


def _parse_formula_list(cur: _Cursor) -> tuple[Term, ...]:
    cur.expect_op("[")
    out: list[Term] = []
    if not cur.at_op("]"):
        p = _FormulaParser(cur)
        while True:
            out.append(p.parse_expr(1))
            if cur.at_op(","):
                cur.next()
                continue
            break
    cur.expect_op("]")
    return tuple(out)


def parse_theory(src: str, source_name: str = "<theory>") -> TheoryDecl:
    """Parse one theory file (sections: rules, rulesets, problems, programs)."""
    cur = _Cursor(tokenize(src, source_name))
    cur.expect_kw("theory")
    thy_name = cur.expect_ident().text
    rules: list[RuleDecl] = []
    rulesets: list[RuleSetDecl] = []
    problems: list[ProblemDecl] = []
    methods: list[MethodDecl] = []
    while cur.peek().kind != "EOF":
        tok = cur.peek()
        if cur.at_kw("rules"):
            cur.next()
            while cur.at_kw("rule"):
                rules.append(parse_rule_decl(cur))
        elif cur.at_kw("rulesets"):
            cur.next()
            while cur.at_kw("ruleset"):
                rulesets.append(_parse_ruleset_decl(cur))
        elif cur.at_kw("problems"):
            cur.next()
            while cur.at_kw("problem"):
                problems.append(_parse_problem_decl(cur))
        elif cur.at_kw("programs"):
            cur.next()
            while cur.at_kw("method"):
                methods.append(_parse_method_decl(cur))
        else:
            raise ParseError(
                f"expected a section keyword, found {tok.text!r}", tok.span)
    return TheoryDecl(thy_name, tuple(rules), tuple(rulesets),
                      tuple(problems), tuple(methods))


def _parse_ruleset_decl(cur: _Cursor) -> RuleSetDecl:
    # the rule list comes first so a following top-level `rules` section is
    # not mistaken for a field
    start = cur.expect_kw("ruleset")
    name = cur.expect_ident().text
    cur.expect_op(":")
    cur.expect_kw("rules")
    rule_names = _parse_name_list(cur)
    calc_ops: tuple[str, ...] = ()
    cond_solver: Optional[str] = None
    max_steps: Optional[int] = None
    while True:
        if cur.at_kw("calc"):
            cur.next()
            calc_ops = _parse_calc_list(cur)
        elif cur.at_kw("cond_solver"):
            cur.next()
            cond_solver = cur.expect_ident().text
        elif cur.at_kw("max_steps"):
            cur.next()
            tok = cur.peek()
            if tok.kind != "NUM":
                raise ParseError("max_steps expects a number", tok.span)
            cur.next()
            max_steps = int(tok.text)
        else:
            break
    return RuleSetDecl(name, rule_names, calc_ops, cond_solver, max_steps,
                       start.span)


def _parse_calc_list(cur: _Cursor) -> tuple[str, ...]:
    # operator names include 'mod', which lexes as an operator token
    cur.expect_op("[")
    names: list[str] = []
    if not cur.at_op("]"):
        while True:
            tok = cur.peek()
            if tok.kind == "IDENT" or (tok.kind == "OP" and tok.text == "mod"):
                names.append(tok.text)
                cur.next()
            else:
                raise ParseError("expected an operator name", tok.span)
            if cur.at_op(","):
                cur.next()
                continue
            break
    cur.expect_op("]")
    return tuple(names)


def _parse_problem_decl(cur: _Cursor) -> ProblemDecl:
    start = cur.expect_kw("problem")
    key = _parse_key(cur)
    cur.expect_op(":")
    given: tuple[str, ...] = ()
    where: tuple[Term, ...] = ()
    find: tuple[str, ...] = ()
    relate: tuple[Term, ...] = ()
    while True:
        if cur.at_kw("given"):
            cur.next()
            given = _parse_name_list(cur)
        elif cur.at_kw("where"):
            cur.next()
            where = _parse_formula_list(cur)
        elif cur.at_kw("find"):
            cur.next()
            find = _parse_name_list(cur)
        elif cur.at_kw("relate"):
            cur.next()
            relate = _parse_formula_list(cur)
        else:
            break
    return ProblemDecl(key, given, where, find, relate, start.span)


def _parse_method_decl(cur: _Cursor) -> MethodDecl:
    start = cur.expect_kw("method")
    key = _parse_key(cur)
    cur.expect_op(":")
    problem_key: Optional[tuple[str, ...]] = None
    start_term: Optional[Term] = None
    norm_set: Optional[str] = None
    program: Optional[ProgramDecl] = None
    while True:
        if cur.at_kw("problem"):
            cur.next()
            problem_key = _parse_key(cur)
        elif cur.at_kw("start"):
            cur.next()
            start_term = _FormulaParser(cur).parse_atom()
        elif cur.at_kw("norm"):
            cur.next()
            norm_set = cur.expect_ident().text
        elif cur.at_kw("program"):
            program = parse_program_decl(cur)
            break
        else:
            tok = cur.peek()
            raise ParseError(
                f"expected a method field, found {tok.text!r}", tok.span)
    if problem_key is None or start_term is None or program is None:
        raise ParseError("method needs problem, start and program fields",
                         start.span)
    return MethodDecl(key, problem_key, start_term, norm_set, program,
                      start.span)

"""Parsers and printers for domain files, plan files and query formulas.

Domain syntax::

    % comment
    random([locked(door, s0) : 0.9, unlocked(door, s0) : 0.1]).
    action(goto(To, Route)).
    observable(at_key).
    utility(R + P, S) <- prize(P, S) & resources(R, S).
    gotoaction(goto(A, S)).

Bodies use ``&`` (or ``,``) for conjunction, ``~`` for negation as failure,
``\\=`` for disequality and ``X is Expr`` for arithmetic. The Unicode forms
``←``, ``∧``, ``∼``/``¬`` and ``≠`` are accepted too.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .choices import AlternativeSchema, Theory
from .errors import DuplicateDeclaration, ParseError
from .plans import SKIP, IfThenElse, Plan, Primitive, While, seq
from .program import And, Clause, Cmp, Formula, Is, Neg, Not, Or, Pos, Program
from .terms import Fn, Term, Var, format_term, is_arith

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\n)
  | (?P<comment>%[^\n]*)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<op><-|:-|\\=|=<|>=|[()\[\],.:;&~=<>+\-*/|←∧∼¬≠∨])
    """,
    re.VERBOSE,
)

_UNICODE = {"←": "<-", ":-": "<-", "∧": "&", "∼": "~", "¬": "~", "≠": "\\=", "∨": "|"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def tokenize(text: str) -> List[Token]:
    out: List[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "op":
            out.append(Token("op", _UNICODE.get(s, s), line, col))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


_CMP = ("\\=", "=", "<", ">", "=<", ">=")
_PLAN_KEYWORDS = {"skip", "if", "then", "else", "endIf", "while", "do", "endDo"}


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.anon = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{msg} (found {found!r})", tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def at_word(self, word) -> bool:
        return self.tok.kind == "ident" and self.tok.text == word

    def expect_word(self, word):
        if not self.at_word(word):
            raise self.error(f"expected {word!r}")
        self.i += 1

    # terms and arithmetic
    def expr(self) -> Term:
        left = self.mul()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = Fn(op, (left, self.mul()))
        return left

    def mul(self) -> Term:
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            right = self.unary()
            if op == "/" and isinstance(left, Fraction) and isinstance(right, Fraction) and right:
                left = left / right  # a rational literal such as 1/3
            else:
                left = Fn(op, (left, right))
        return left

    def unary(self) -> Term:
        if self.accept("-"):
            if self.tok.kind == "num":
                return -self.number()
            return Fn("-", (self.unary(),))
        return self.primary()

    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            raise self.error("expected a number")
        self.i += 1
        return Fraction(t.text)

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "num":
            return self.number()
        if t.kind == "var":
            self.i += 1
            if t.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(t.text)
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return Fn(t.text, tuple(args))
            return Fn(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error("expected a term")

    def atom(self) -> Fn:
        t = self.tok
        a = self.primary()
        if not isinstance(a, Fn) or is_arith(a):
            raise self.error("expected an atom", t)
        return a

    # clauses
    def literal(self):
        if self.accept("~"):
            return Neg(self.atom())
        start = self.tok
        left = self.expr()
        if self.tok.kind == "op" and self.tok.text in _CMP:
            op = self.tok.text
            self.i += 1
            return Cmp(op, left, self.expr())
        if self.at_word("is"):
            self.i += 1
            return Is(left, self.expr())
        if not isinstance(left, Fn) or is_arith(left):
            raise self.error("expected a literal", start)
        return Pos(left)

    def body(self) -> Tuple:
        lits = [self.literal()]
        while self.accept("&") or self.accept(","):
            lits.append(self.literal())
        return tuple(lits)

    def probability(self) -> Fraction:
        p = self.number()
        if self.accept("/"):
            d = self.number()
            if d == 0:
                raise self.error("zero denominator")
            p = p / d
        return p

    def random_decl(self) -> AlternativeSchema:
        self.expect("(")
        self.expect("[")
        members = []
        if not self.at("]"):
            while True:
                a = self.atom()
                self.expect(":")
                members.append((a, self.probability()))
                if not self.accept(","):
                    break
        self.expect("]")
        self.expect(")")
        return AlternativeSchema(tuple(members))

    def domain(self) -> Theory:
        schemas, actions, observables, clauses = [], [], [], []
        while self.tok.kind != "eof":
            start = self.tok
            self.anon = 0
            if self.at_word("random") and self.peek().text == "(" and self.peek(2).text == "[":
                self.i += 1
                sch = self.random_decl()
                self.expect(".")
                if sch in schemas:
                    raise DuplicateDeclaration(f"duplicate {sch}", start.line, start.col)
                schemas.append(sch)
                continue
            head = self.atom()
            body = ()
            if self.accept("<-"):
                body = self.body()
            self.expect(".")
            if not body and head.name in ("action", "observable") and head.arity == 1:
                target = actions if head.name == "action" else observables
                item = head.args[0]
                if item in target:
                    raise DuplicateDeclaration(
                        f"duplicate {head.name} {format_term(item)}", start.line, start.col
                    )
                target.append(item)
                continue
            clause = Clause(head, body)
            try:
                clause.check_range_restricted()
            except Exception as exc:
                raise ParseError(str(exc), start.line, start.col) from None
            clauses.append(clause)
        return Theory(tuple(schemas), tuple(actions), tuple(observables), Program(tuple(clauses)))

    # plans
    def keyword(self) -> Optional[str]:
        t = self.tok
        if t.kind == "ident" and t.text in _PLAN_KEYWORDS:
            if t.text == "endDo" or self.peek().text != "(":
                return t.text
        return None

    def plan(self) -> Plan:
        items = [self.statement()]
        while self.accept(";"):
            items.append(self.statement())
        return seq(*items)

    def statement(self) -> Plan:
        kw = self.keyword()
        if kw == "skip":
            self.i += 1
            return SKIP
        if kw == "if":
            self.i += 1
            cond = self.expr()
            self.expect_word("then")
            then = self.plan()
            other = SKIP
            if self.keyword() == "else":
                self.i += 1
                other = self.plan()
            self.expect_word("endIf")
            return IfThenElse(cond, then, other)
        if kw == "while":
            self.i += 1
            cond = self.expr()
            self.expect_word("do")
            body = self.plan()
            self.expect_word("endDo")
            self.expect("(")
            self.expect_word("bound")
            self.expect("=")
            t = self.tok
            bound = self.number()
            if bound.denominator != 1 or bound < 1:
                raise self.error("loop bound must be a positive integer", t)
            self.expect(")")
            return While(cond, body, int(bound))
        if kw is not None:
            raise self.error("expected a plan step")
        return Primitive(self.atom())

    # formulas
    def formula(self) -> Formula:
        parts = [self.conj()]
        while self.accept("|"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.fneg()]
        while self.accept("&") or self.accept(","):
            parts.append(self.fneg())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def fneg(self) -> Formula:
        if self.accept("~"):
            return Not(self.fneg())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def end(self):
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input")


def parse_domain(text: str) -> Theory:
    return _Parser(text).domain()


def parse_plan(text: str) -> Plan:
    p = _Parser(text)
    plan = p.plan()
    p.end()
    return plan


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.end()
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    p.end()
    return t


def print_plan(plan: Plan) -> str:
    return str(plan)


def print_formula(f: Formula) -> str:
    if isinstance(f, Fn):
        return format_term(f)
    if isinstance(f, Not):
        return f"~{_fwrap(f.part)}"
    sep = " & " if isinstance(f, And) else " | "
    return sep.join(_fwrap(p) for p in f.parts)


def _fwrap(f: Formula) -> str:
    return print_formula(f) if isinstance(f, (Fn, Not)) else f"({print_formula(f)})"


def print_domain(theory: Theory) -> str:
    lines = [str(s) for s in theory.schemas]
    lines += [f"action({format_term(a)})." for a in theory.actions]
    lines += [f"observable({format_term(o)})." for o in theory.observables]
    lines += [str(c) for c in theory.program.clauses]
    return "\n".join(lines) + ("\n" if lines else "")

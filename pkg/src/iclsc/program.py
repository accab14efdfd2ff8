"""Literals, clauses, programs and query formulas."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple, Union

from .errors import RangeRestrictionError
from .terms import Fn, Term, Var, format_term, is_arith, term_vars

CMP_OPS = ("\\=", "=", "<", ">", "=<", ">=")


@dataclass(frozen=True)
class Pos:
    atom: Fn

    def __str__(self):
        return format_term(self.atom)


@dataclass(frozen=True)
class Neg:
    atom: Fn

    def __str__(self):
        return f"~{format_term(self.atom)}"


@dataclass(frozen=True)
class Cmp:
    """Built-in comparison. ``\\=`` is structural disequality of ground terms."""

    op: str
    left: Term
    right: Term

    def __str__(self):
        return f"{format_term(self.left)} {self.op} {format_term(self.right)}"


@dataclass(frozen=True)
class Is:
    target: Term
    expr: Term

    def __str__(self):
        return f"{format_term(self.target)} is {format_term(self.expr)}"


Literal = Union[Pos, Neg, Cmp, Is]


def literal_vars(lit: Literal):
    if isinstance(lit, (Pos, Neg)):
        return set(term_vars(lit.atom))
    if isinstance(lit, Cmp):
        return set(term_vars(lit.left)) | set(term_vars(lit.right))
    return set(term_vars(lit.target)) | set(term_vars(lit.expr))


@dataclass(frozen=True)
class Clause:
    head: Fn
    body: Tuple[Literal, ...] = ()

    def __str__(self):
        if not self.body:
            return f"{format_term(self.head)}."
        return f"{format_term(self.head)} <- {' & '.join(str(l) for l in self.body)}."

    def check_range_restricted(self) -> None:
        bound = set(term_vars(self.head))
        for lit in self.body:
            if isinstance(lit, Pos):
                bound |= literal_vars(lit)
            elif isinstance(lit, Is):
                bound |= set(term_vars(lit.target))
            elif isinstance(lit, Cmp) and lit.op == "=":
                bound |= literal_vars(lit)
        free = set()
        for lit in self.body:
            if isinstance(lit, (Neg, Cmp)) or isinstance(lit, Is):
                vs = literal_vars(lit) if not isinstance(lit, Is) else set(term_vars(lit.expr))
                free |= vs - bound
        if free:
            raise RangeRestrictionError(self, free)


def _lift_head_arith(clause: Clause) -> Clause:
    """Replace arithmetic sub-terms of the head by fresh variables plus ``is`` goals."""
    extra: List[Literal] = []

    def lift(t):
        if is_arith(t):
            v = Var(f"_H{len(extra)}")
            extra.append(Is(v, t))
            return v
        if isinstance(t, Fn) and t.args:
            return Fn(t.name, tuple(lift(a) for a in t.args))
        return t

    head = lift(clause.head)
    if not extra:
        return clause
    return Clause(head, clause.body + tuple(extra))


@dataclass(frozen=True)
class Program:
    clauses: Tuple[Clause, ...] = ()
    index: Dict[tuple, Tuple[Clause, ...]] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        idx: Dict[tuple, list] = {}
        for c in self.clauses:
            idx.setdefault(c.head.key, []).append(_lift_head_arith(c))
        object.__setattr__(self, "index", {k: tuple(v) for k, v in idx.items()})

    def for_goal(self, goal: Fn) -> Tuple[Clause, ...]:
        return self.index.get(goal.key, ())

    def predicates(self):
        return set(self.index)

    def check_range_restricted(self) -> None:
        for c in self.clauses:
            c.check_range_restricted()

    def __str__(self):
        return "\n".join(str(c) for c in self.clauses)


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    part: "Formula"


Formula = Union[Fn, And, Or, Not]


def formula_atoms(f: Formula) -> List[Fn]:
    if isinstance(f, Fn):
        return [f]
    if isinstance(f, Not):
        return formula_atoms(f.part)
    out: List[Fn] = []
    for p in f.parts:
        out.extend(formula_atoms(p))
    return out


def eval_formula(f: Formula, truth) -> bool:
    """Evaluate ``f`` with ``truth(atom) -> bool`` deciding the atoms."""
    if isinstance(f, Fn):
        return truth(f)
    if isinstance(f, Not):
        return not eval_formula(f.part, truth)
    if isinstance(f, And):
        return all(eval_formula(p, truth) for p in f.parts)
    return any(eval_formula(p, truth) for p in f.parts)


def facts(atoms: Sequence[Fn]) -> Program:
    return Program(tuple(Clause(a) for a in atoms))

"""Nature's choice space, theories and total choices."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import NotGround, RangeRestrictionError
from .program import Program
from .terms import Fn, Term, Var, format_term, fraction_str, is_ground, rename, subst, term_vars, unify


@dataclass(frozen=True)
class AlternativeSchema:
    """``random([a1 : p1, ..., an : pn])``, possibly parameterised by one variable."""

    members: Tuple[Tuple[Fn, Fraction], ...]

    @property
    def variables(self) -> List[Var]:
        seen: Dict[Var, None] = {}
        for atom, _ in self.members:
            for v in term_vars(atom):
                seen.setdefault(v)
        return list(seen)

    @property
    def var(self) -> Optional[Var]:
        vs = self.variables
        return vs[0] if vs else None

    def __str__(self):
        body = ", ".join(f"{format_term(a)} : {fraction_str(p)}" for a, p in self.members)
        return f"random([{body}])."


class Alternative:
    """One instantiated alternative; identified by its schema index and binding."""

    __slots__ = ("schema", "binding", "members", "_hash")

    def __init__(self, schema: int, binding: Optional[Term], members):
        self.schema = schema
        self.binding = binding
        self.members = tuple(members)
        self._hash = hash((schema, binding))

    @property
    def key(self):
        return (self.schema, self.binding)

    def __eq__(self, other):
        return isinstance(other, Alternative) and self.key == other.key

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (self.schema, "" if self.binding is None else format_term(self.binding))

    def index_of(self, atom: Fn) -> int:
        for i, (a, _) in enumerate(self.members):
            if a == atom:
                return i
        raise KeyError(atom)

    def __repr__(self):
        return "{" + ", ".join(format_term(a) for a, _ in self.members) + "}"


def instantiate(schema: AlternativeSchema, situation: Term) -> Tuple[Tuple[Fn, Fraction], ...]:
    """Ground the schema's members at ``situation``; closed schemas come back unchanged."""
    v = schema.var
    if v is None:
        return schema.members
    if not is_ground(situation):
        raise NotGround(situation, "instantiate needs a ground situation")
    s = {v: situation}
    return tuple((subst(a, s), p) for a, p in schema.members)


@dataclass(frozen=True)
class Theory:
    schemas: Tuple[AlternativeSchema, ...] = ()
    actions: Tuple[Fn, ...] = ()
    observables: Tuple[Term, ...] = ()
    program: Program = field(default_factory=Program)

    def __post_init__(self):
        object.__setattr__(self, "schemas", tuple(self.schemas))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "observables", tuple(self.observables))

    @property
    def choice_space(self) -> "ChoiceSpace":
        cs = self.__dict__.get("_cs")
        if cs is None:
            cs = ChoiceSpace(self.schemas)
            object.__setattr__(self, "_cs", cs)
        return cs

    def with_program(self, program: Program) -> "Theory":
        return Theory(self.schemas, self.actions, self.observables, program)

    def ground_actions(self) -> List[Fn]:
        return [a for a in self.actions if is_ground(a)]

    def ground_observables(self) -> List[Term]:
        return [o for o in self.observables if is_ground(o)]


class ChoiceSpace:
    """Lazily instantiated alternatives, indexed by predicate."""

    def __init__(self, schemas: Sequence[AlternativeSchema]):
        self.schemas = tuple(schemas)
        self._index: Dict[tuple, List[Tuple[int, Fn]]] = {}
        for i, sch in enumerate(self.schemas):
            for atom, _ in sch.members:
                self._index.setdefault(atom.key, []).append((i, atom))
        self._cache: Dict[tuple, Alternative] = {}

    def is_choice_predicate(self, key) -> bool:
        return key in self._index

    def alternative(self, schema: int, binding: Optional[Term]) -> Alternative:
        k = (schema, binding)
        alt = self._cache.get(k)
        if alt is None:
            sch = self.schemas[schema]
            members = instantiate(sch, binding) if binding is not None else sch.members
            alt = self._cache[k] = Alternative(schema, binding, members)
        return alt

    def alternatives_for(self, goal: Fn) -> List[Alternative]:
        """Alternatives holding an atomic choice that unifies with ``goal``."""
        out: List[Alternative] = []
        for i, template in self._index.get(goal.key, ()):
            s = unify(template, goal)
            if s is None:
                continue
            v = self.schemas[i].var
            binding = None
            if v is not None:
                binding = subst(v, s)
                if not is_ground(binding):
                    raise NotGround(goal, "atomic choice called with an unbound situation")
            alt = self.alternative(i, binding)
            if alt not in out:
                out.append(alt)
        return out

    def alternative_of(self, atom: Fn) -> Alternative:
        alts = self.alternatives_for(atom)
        for alt in alts:
            for a, _ in alt.members:
                if a == atom:
                    return alt
        raise KeyError(f"{atom} is not an atomic choice")


class TotalChoice:
    """A selector over some set of alternatives (insertion ordered)."""

    __slots__ = ("_sel",)

    def __init__(self, selection: Optional[Dict[Alternative, int]] = None):
        self._sel: Dict[Alternative, int] = dict(selection or {})

    @classmethod
    def from_atoms(cls, space: ChoiceSpace, atoms: Iterable[Fn]) -> "TotalChoice":
        sel: Dict[Alternative, int] = {}
        for atom in atoms:
            alt = space.alternative_of(atom)
            idx = alt.index_of(atom)
            if sel.get(alt, idx) != idx:
                raise ValueError(f"conflicting selections for {alt}")
            sel[alt] = idx
        return cls(sel)

    def extend(self, alt: Alternative, index: int) -> "TotalChoice":
        sel = dict(self._sel)
        sel[alt] = index
        return TotalChoice(sel)

    def get(self, alt: Alternative) -> Optional[int]:
        return self._sel.get(alt)

    def __contains__(self, alt) -> bool:
        return alt in self._sel

    def __len__(self):
        return len(self._sel)

    def __iter__(self) -> Iterator[Alternative]:
        return iter(self._sel)

    def items(self):
        return self._sel.items()

    def selected(self) -> List[Fn]:
        return [alt.members[i][0] for alt, i in self._sel.items()]

    def canonical(self) -> List[Tuple[Alternative, int]]:
        return sorted(self._sel.items(), key=lambda kv: kv[0].sort_key())

    def compatible(self, other: "TotalChoice") -> bool:
        return all(other._sel.get(a, i) == i for a, i in self._sel.items())

    def __eq__(self, other):
        return isinstance(other, TotalChoice) and self._sel == other._sel

    def __hash__(self):
        return hash(frozenset(self._sel.items()))

    def __repr__(self):
        return "{" + ", ".join(format_term(a) for a in self.selected()) + "}"


def choice_probability(tc: TotalChoice) -> Fraction:
    p = Fraction(1)
    for alt, i in tc.items():
        p *= alt.members[i][1]
    return p


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    subject: object = None

    def __str__(self):
        return f"{self.kind}: {self.message}"


def _apart(t: Term, tag: int) -> Term:
    return rename(t, {}, tag)


def validate_theory(theory: Theory, plans: Sequence = ()) -> List[Violation]:
    """Return every violated theory condition (an empty list means the theory is valid)."""
    out: List[Violation] = []
    for i, sch in enumerate(theory.schemas):
        if not sch.members:
            out.append(Violation("empty-alternative", f"schema {i} has no members", sch))
            continue
        vs = sch.variables
        if len(vs) > 1:
            out.append(Violation(
                "schema-variables",
                f"{sch} has {len(vs)} variables; at most one (the situation) is allowed",
                sch,
            ))
        elif len(vs) == 1:
            for atom, _ in sch.members:
                if vs[0] not in set(term_vars(atom)):
                    out.append(Violation(
                        "schema-variables",
                        f"{format_term(atom)} in {sch} does not mention {vs[0]}",
                        sch,
                    ))
        total = sum((p for _, p in sch.members), Fraction(0))
        for atom, p in sch.members:
            if not 0 <= p <= 1:
                out.append(Violation(
                    "probability-range",
                    f"P0({format_term(atom)}) = {format_term(p)} is outside [0, 1]",
                    atom,
                ))
        if total != 1:
            out.append(Violation(
                "normalization",
                f"probabilities of {sch} sum to {format_term(total)} != 1",
                sch,
            ))
        ms = sch.members
        for a in range(len(ms)):
            for b in range(a + 1, len(ms)):
                if unify(ms[a][0], ms[b][0]) is not None:
                    out.append(Violation(
                        "overlapping-members",
                        f"{format_term(ms[a][0])} and {format_term(ms[b][0])} in {sch} unify",
                        sch,
                    ))
    schemas = theory.schemas
    for i in range(len(schemas)):
        for j in range(i + 1, len(schemas)):
            for a, _ in schemas[i].members:
                for b, _ in schemas[j].members:
                    if unify(_apart(a, 1), _apart(b, 2)) is not None:
                        out.append(Violation(
                            "alternatives-not-disjoint",
                            f"{format_term(a)} (schema {i}) unifies with "
                            f"{format_term(b)} (schema {j})",
                            (schemas[i], schemas[j]),
                        ))
    for clause in theory.program.clauses:
        for sch in schemas:
            for a, _ in sch.members:
                if a.key == clause.head.key and unify(
                    _apart(a, 1), _apart(clause.head, 2)
                ) is not None:
                    out.append(Violation(
                        "choice-unifies-with-head",
                        f"atomic choice {format_term(a)} unifies with the head of: {clause}",
                        clause,
                    ))
    for clause in theory.program.clauses:
        try:
            clause.check_range_restricted()
        except RangeRestrictionError as exc:
            out.append(Violation("range-restriction", str(exc), clause))
    if plans:
        from .plans import plan_violations

        for plan in plans:
            out.extend(plan_violations(theory, plan))
    return out

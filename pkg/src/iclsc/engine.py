"""Top-down tabled evaluation of acyclic programs.

:class:`WorldSolver` answers queries in the world fixed by a (partial) total
choice. Touching an undecided alternative raises :class:`NeedChoice`; the
caller decides how to branch. Completed tables never depend on undecided
alternatives, so a solver's memo can be handed to every child branch.

:class:`Grounder` runs the same search as an over-approximation (negation is
assumed satisfiable, every atomic choice is possible) and records the ground
clause instances it touches.
"""
from __future__ import annotations

import itertools
from typing import Dict, Iterator, List, Optional, Set, Tuple

from .choices import Alternative, ChoiceSpace, TotalChoice
from .errors import CycleFound, HorizonExceeded, NonGroundableClause, NotGround
from .program import Clause, Cmp, Is, Neg, Pos, Program
from .terms import (
    Fn,
    Subst,
    Term,
    evaluate,
    is_ground,
    max_situation_depth,
    rename,
    subst,
    unify,
    variant_key,
)

_fresh = itertools.count(1)


class NeedChoice(Exception):
    """Evaluation reached an alternative the current total choice does not decide."""

    def __init__(self, alternative: Alternative):
        super().__init__(repr(alternative))
        self.alternative = alternative


def _ready(lit, s: Subst) -> bool:
    if isinstance(lit, Neg):
        return is_ground(subst(lit.atom, s))
    if isinstance(lit, Cmp):
        if lit.op == "=":
            return True
        return is_ground(subst(lit.left, s)) and is_ground(subst(lit.right, s))
    return is_ground(subst(lit.expr, s))


def _compare(op: str, a: Term, b: Term) -> bool:
    if op == "\\=":
        return a != b
    x, y = evaluate(a), evaluate(b)
    if op == "<":
        return x < y
    if op == ">":
        return x > y
    if op == "=<":
        return x <= y
    return x >= y


class _TopDown:
    short_circuit = False

    def __init__(self, program: Program, space: ChoiceSpace, memo=None, shared=None):
        self.program = program
        self.space = space
        # memo values are (answers, consulted_a_choice)
        self.memo: Dict[object, Tuple[Tuple[Fn, ...], bool]] = {} if memo is None else memo
        # answers that consulted no choice hold in every world; callers may share them
        self.shared: Optional[Dict[object, Tuple[Fn, ...]]] = shared
        self._active: Dict[object, Fn] = {}
        self._touched = False

    # hooks
    def _choice_answers(self, goal: Fn) -> List[Fn]:
        raise NotImplementedError

    def _negation_succeeds(self, atom: Fn) -> bool:
        raise NotImplementedError

    def _record(self, body, s: Subst, head: Fn) -> None:
        pass

    def _check_goal(self, goal: Fn) -> None:
        pass

    def solve(self, goal: Fn) -> Tuple[Fn, ...]:
        """All answers (ground instances of ``goal``) in insertion order."""
        key = variant_key(goal)
        if self.shared is not None:
            hit = self.shared.get(key)
            if hit is not None:
                return hit
        hit = self.memo.get(key)
        if hit is not None:
            if hit[1]:
                self._touched = True
            return hit[0]
        if key in self._active:
            chain = list(self._active.values())
            start = next(i for i, k in enumerate(self._active) if k == key)
            raise CycleFound(chain[start:] + [goal])
        self._check_goal(goal)
        self._active[key] = goal
        outer, self._touched = self._touched, False
        try:
            answers: Dict[Fn, None] = {}
            if self.space.is_choice_predicate(goal.key):
                self._touched = True
                for a in self._choice_answers(goal):
                    answers.setdefault(a)
            stop_early = self.short_circuit and is_ground(goal)
            for clause in self.program.for_goal(goal):
                if stop_early and answers:
                    break
                tag = next(_fresh)
                mapping: Dict = {}
                head = rename(clause.head, mapping, tag)
                s = unify(head, goal)
                if s is None:
                    continue
                body = tuple(_rename_lit(l, mapping, tag) for l in clause.body)
                for s2 in self._body(body, s, clause):
                    h = subst(head, s2)
                    if not is_ground(h):
                        raise NonGroundableClause(clause, f"answer {h} is not ground")
                    self._record(body, s2, h)
                    answers.setdefault(h)
                    if stop_early:
                        break
            touched = self._touched
        finally:
            del self._active[key]
        self._touched = outer or touched
        result = tuple(answers)
        if touched or self.shared is None:
            self.memo[key] = (result, touched)
        else:
            self.shared[key] = result
        return result

    def _body(self, lits, s: Subst, clause: Clause) -> Iterator[Subst]:
        if not lits:
            yield s
            return
        pick = None
        for i, lit in enumerate(lits):
            if isinstance(lit, Pos) or _ready(lit, s):
                pick = i
                break
        if pick is None:
            raise NonGroundableClause(clause, f"{lits[0]} never becomes ground")
        lit = lits[pick]
        rest = lits[:pick] + lits[pick + 1:]
        if isinstance(lit, Pos):
            atom = subst(lit.atom, s)
            for ans in self.solve(atom):
                s2 = unify(atom, ans, s)
                if s2 is not None:
                    yield from self._body(rest, s2, clause)
        elif isinstance(lit, Neg):
            if self._negation_succeeds(subst(lit.atom, s)):
                yield from self._body(rest, s, clause)
        elif isinstance(lit, Cmp):
            if lit.op == "=":
                s2 = unify(lit.left, lit.right, s)
                if s2 is not None:
                    yield from self._body(rest, s2, clause)
            elif _compare(lit.op, subst(lit.left, s), subst(lit.right, s)):
                yield from self._body(rest, s, clause)
        else:
            value = evaluate(subst(lit.expr, s))
            s2 = unify(lit.target, value, s)
            if s2 is not None:
                yield from self._body(rest, s2, clause)


def _rename_lit(lit, mapping, tag):
    if isinstance(lit, Pos):
        return Pos(rename(lit.atom, mapping, tag))
    if isinstance(lit, Neg):
        return Neg(rename(lit.atom, mapping, tag))
    if isinstance(lit, Cmp):
        return Cmp(lit.op, rename(lit.left, mapping, tag), rename(lit.right, mapping, tag))
    return Is(rename(lit.target, mapping, tag), rename(lit.expr, mapping, tag))


class WorldSolver(_TopDown):
    """Queries in the world(s) agreeing with ``choice``.

    ``on_lookup`` (optional) is called with every alternative consulted.
    """

    short_circuit = True

    def __init__(self, program: Program, space: ChoiceSpace, choice: TotalChoice,
                 memo=None, on_lookup=None, shared=None):
        super().__init__(program, space, memo, shared)
        self.choice = choice
        self.on_lookup = on_lookup

    def _choice_answers(self, goal: Fn) -> List[Fn]:
        out = []
        for alt in self.space.alternatives_for(goal):
            if self.on_lookup is not None:
                self.on_lookup(alt)
            idx = self.choice.get(alt)
            if idx is None:
                raise NeedChoice(alt)
            atom = alt.members[idx][0]
            if unify(atom, goal) is not None:
                out.append(atom)
        return out

    def _negation_succeeds(self, atom: Fn) -> bool:
        return not self.solve(atom)

    def holds(self, atom: Fn) -> bool:
        if not is_ground(atom):
            raise NotGround(atom)
        return bool(self.solve(atom))


class GroundProgram:
    """Ground clauses with only positive and negated atoms in their bodies."""

    def __init__(self, rules=()):
        self.rules: Dict[Fn, List[Tuple[Tuple[Fn, ...], Tuple[Fn, ...]]]] = {}
        self._seen: Set = set()
        for head, pos, neg in rules:
            self.add(head, pos, neg)

    def add(self, head: Fn, pos, neg) -> None:
        k = (head, tuple(pos), tuple(neg))
        if k in self._seen:
            return
        self._seen.add(k)
        self.rules.setdefault(head, []).append((tuple(pos), tuple(neg)))

    def clauses(self):
        for head, bodies in self.rules.items():
            for pos, neg in bodies:
                yield head, pos, neg

    def atoms(self) -> Set[Fn]:
        out: Set[Fn] = set()
        for head, pos, neg in self.clauses():
            out.add(head)
            out.update(pos)
            out.update(neg)
        return out

    def __len__(self):
        return len(self._seen)

    def __eq__(self, other):
        return isinstance(other, GroundProgram) and self._seen == other._seen

    def __repr__(self):
        lines = []
        for head, pos, neg in self.clauses():
            body = [repr(p) for p in pos] + [f"~{n!r}" for n in neg]
            lines.append(f"{head!r}" + (f" <- {' & '.join(body)}." if body else "."))
        return "\n".join(lines)


class Grounder(_TopDown):
    """Demand-driven grounding restricted to situations of depth <= ``horizon``."""

    def __init__(self, program: Program, space: Optional[ChoiceSpace] = None,
                 horizon: Optional[int] = None, assumables=()):
        super().__init__(program, space or ChoiceSpace(()))
        self.horizon = horizon
        self.ground = GroundProgram()
        self.alternatives: Dict[Alternative, None] = {}
        self.choice_atoms: Dict[Fn, None] = {}
        self.assumables = set(assumables)

    def _check_goal(self, goal: Fn) -> None:
        if self.horizon is not None and max_situation_depth(goal) > self.horizon:
            raise HorizonExceeded(goal, self.horizon)

    def _choice_answers(self, goal: Fn) -> List[Fn]:
        out = []
        for alt in self.space.alternatives_for(goal):
            self.alternatives.setdefault(alt)
            for atom, _ in alt.members:
                if unify(atom, goal) is not None:
                    self.choice_atoms.setdefault(atom)
                    out.append(atom)
        return out

    def solve(self, goal: Fn) -> Tuple[Fn, ...]:
        answers = super().solve(goal)
        if self.assumables:
            extra = [a for a in self.assumables
                     if a not in answers and unify(a, goal) is not None]
            if extra:
                answers = tuple(answers) + tuple(sorted(extra, key=repr))
        return answers

    def _negation_succeeds(self, atom: Fn) -> bool:
        self.solve(atom)
        return True

    def _record(self, body, s: Subst, head: Fn) -> None:
        pos, neg = _ground_body(body, s)
        self.ground.add(head, pos, neg)


def _ground_body(lits, s: Subst):
    pos, neg = [], []
    for lit in lits:
        if isinstance(lit, Pos):
            pos.append(subst(lit.atom, s))
        elif isinstance(lit, Neg):
            neg.append(subst(lit.atom, s))
    return pos, neg

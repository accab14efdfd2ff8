"""Exhaustive search over a depth-bounded space of conditional plans.

Plans are generated in a canonical form::

    P ::= skip | a ; P | if c then P' else P' endIf

where a branch may only start at the root or right after an action and the
sub-plans of a branch (``P'``) cannot themselves open with a branch. Anything
sequenced after a branch is pushed into both arms, so this loses nothing.

A plan's expected utility is a sum over its leaf histories. The value of a
history (a run of actions and sensed outcomes) does not depend on the rest of
the plan, so histories are evaluated once and shared across candidates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .choices import Theory, choice_probability
from .errors import ICLError, PlanEvaluationError, UtilityIncomplete
from .evaluation import EUReport, Witness, _utilities, expected_utility_exact, explore
from .plans import SKIP, IfThenElse, Plan, Primitive, Seq, Skip, sense_atom
from .terms import S0, Fn, Term, do, format_term


@dataclass(frozen=True)
class PlanSpace:
    actions: Tuple[Fn, ...]
    observables: Tuple[Term, ...] = ()
    depth: int = 1
    nesting: int = 1

    def __post_init__(self):
        if self.depth < 0 or self.nesting < 0:
            raise ValueError("depth and nesting must be non-negative")
        object.__setattr__(self, "actions", _sorted_unique(self.actions))
        object.__setattr__(self, "observables", _sorted_unique(self.observables))

    @classmethod
    def of(cls, theory: Theory, depth: int, nesting: int,
           actions: Optional[Sequence[Fn]] = None,
           observables: Optional[Sequence[Term]] = None) -> "PlanSpace":
        acts = theory.ground_actions() if actions is None else actions
        obs = theory.ground_observables() if observables is None else observables
        return cls(tuple(acts), tuple(obs), depth, nesting)


def _sorted_unique(items) -> tuple:
    seen = {}
    for t in items:
        seen.setdefault(t)
    return tuple(sorted(seen, key=format_term))


def _prefix(action: Fn, rest: Plan) -> Plan:
    step = Primitive(action)
    return step if isinstance(rest, Skip) else Seq(step, rest)


def _plans(space: PlanSpace, depth: int, nesting: int, branch: bool) -> Iterator[Plan]:
    yield SKIP
    if depth > 0:
        for a in space.actions:
            for rest in _plans(space, depth - 1, nesting, True):
                yield _prefix(a, rest)
    if branch and nesting > 0:
        for c in space.observables:
            for p1 in _plans(space, depth, nesting - 1, False):
                for p2 in _plans(space, depth, nesting - 1, False):
                    yield IfThenElse(c, p1, p2)


def enumerate_plans(space: PlanSpace) -> Iterator[Plan]:
    """Every canonical plan in ``space``: skip, then actions, then branches."""
    return _plans(space, space.depth, space.nesting, True)


def count_plans(space: PlanSpace) -> int:
    """Size of :func:`enumerate_plans` without generating it."""
    na, no = len(space.actions), len(space.observables)
    memo: Dict[tuple, int] = {}

    def n(d, k, b):
        key = (d, k, b)
        if key not in memo:
            total = 1 + (na * n(d - 1, k, True) if d > 0 else 0)
            if b and k > 0:
                total += no * n(d, k - 1, False) ** 2
            memo[key] = total
        return memo[key]

    return n(space.depth, space.nesting, True)


# A history step is ("a", action) or ("o", condition, outcome).
History = Tuple[tuple, ...]


def leaf_histories(plan: Plan, prefix: History = ()) -> List[History]:
    """The histories ending at each leaf of a plan without loops."""
    if isinstance(plan, Skip):
        return [prefix]
    if isinstance(plan, Primitive):
        return [prefix + (("a", plan.action),)]
    if isinstance(plan, Seq):
        out = []
        for h in leaf_histories(plan.first, prefix):
            out.extend(leaf_histories(plan.second, h))
        return out
    if isinstance(plan, IfThenElse):
        return (leaf_histories(plan.then, prefix + (("o", plan.cond, True),))
                + leaf_histories(plan.else_, prefix + (("o", plan.cond, False),)))
    raise TypeError(f"cannot split {type(plan).__name__} into histories")


def _history_task(history: History):
    def task(solver):
        s = S0
        for step in history:
            if step[0] == "a":
                s = do(step[1], s)
            elif solver.holds(sense_atom(step[1], s)) != step[2]:
                return None
        us = _utilities(solver, s)
        if len(us) != 1:
            raise UtilityIncomplete([Witness(solver.choice, s, us)])
        return us[0]

    return task


class HistoryValues:
    """Memoized probability-weighted utility of each history."""

    def __init__(self, theory: Theory):
        self.theory = theory
        self.memo: Dict[History, Fraction] = {}
        self.shared: dict = {}

    def __call__(self, history: History) -> Fraction:
        v = self.memo.get(history)
        if v is None:
            v = Fraction(0)
            for tc, u in explore(self.theory, _history_task(history), shared=self.shared):
                if u is not None:
                    v += choice_probability(tc) * u
            self.memo[history] = v
        return v

    def plan_value(self, plan: Plan) -> Fraction:
        return sum((self(h) for h in leaf_histories(plan)), Fraction(0))


def best_plan(theory: Theory, space: PlanSpace) -> Tuple[Plan, EUReport]:
    """A plan of maximum expected utility; ties go to the earliest emitted."""
    values = HistoryValues(theory)
    best: Optional[Plan] = None
    best_eu: Optional[Fraction] = None
    for plan in enumerate_plans(space):
        try:
            eu = values.plan_value(plan)
        except ICLError as exc:
            raise PlanEvaluationError(plan, exc) from exc
        if best_eu is None or eu > best_eu:
            best, best_eu = plan, eu
    try:
        report = expected_utility_exact(theory, best)
    except ICLError as exc:
        raise PlanEvaluationError(best, exc) from exc
    return best, report

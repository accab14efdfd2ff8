"""Expected utility of conditional plans.

Three routes to the same number:

* :func:`expected_utility_exact` splits lazily on the alternatives evaluation
  actually demands (explanations);
* :func:`expected_utility_enumerate` materialises every world over the
  alternatives found relevant by grounding (the brute-force oracle);
* :func:`expected_utility_mc` samples worlds with a counter-based generator.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .choices import Alternative, Theory, TotalChoice, choice_probability
from .engine import Grounder, NeedChoice, WorldSolver
from .errors import ICLError, NotGround, TooManyWorlds, UtilityIncomplete
from .plans import Plan, branch_profile, sense_atom, trans
from .program import Formula, eval_formula, formula_atoms
from .terms import S0, Fn, Term, Var, format_term, is_ground

ENUMERATION_LIMIT = 2**20


@dataclass(frozen=True)
class Explanation:
    choices: TotalChoice
    final_situation: Term
    utility: Fraction
    probability: Fraction


@dataclass
class EUReport:
    expected_utility: Fraction
    explanations: List[Explanation] = field(default_factory=list)
    mass: Fraction = Fraction(0)

    @classmethod
    def from_explanations(cls, explanations: Sequence[Explanation]) -> "EUReport":
        eu = sum((e.probability * e.utility for e in explanations), Fraction(0))
        mass = sum((e.probability for e in explanations), Fraction(0))
        return cls(eu, list(explanations), mass)


@dataclass(frozen=True)
class Witness:
    """A branch whose final situation has zero or several utilities."""

    choices: TotalChoice
    situation: Term
    utilities: Tuple[Fraction, ...]

    def __str__(self):
        found = ", ".join(format_term(u) for u in self.utilities) or "none"
        return f"world {self.choices} at {format_term(self.situation)}: utilities {found}"


def explore(theory: Theory, task: Callable[[WorldSolver], object],
            start: Optional[TotalChoice] = None, on_lookup=None, shared=None
            ) -> Iterator[Tuple[TotalChoice, object]]:
    """Run ``task`` under every explanation, splitting when an alternative is demanded.

    Branches are visited depth first; members of a split alternative in
    declaration order. ``shared`` caches choice-free answers across calls.
    """
    space = theory.choice_space
    program = theory.program
    shared = {} if shared is None else shared
    stack = [(start or TotalChoice(), {})]
    while stack:
        tc, memo = stack.pop()
        solver = WorldSolver(program, space, tc, memo=memo, on_lookup=on_lookup,
                             shared=shared)
        try:
            result = task(solver)
        except NeedChoice as need:
            alt = need.alternative
            for i in reversed(range(len(alt.members))):
                stack.append((tc.extend(alt, i), dict(solver.memo)))
            continue
        yield tc, result


def _utilities(solver: WorldSolver, s: Term) -> Tuple[Fraction, ...]:
    answers = solver.solve(Fn("utility", (Var("U"), s)))
    values = []
    for a in answers:
        u = a.args[0]
        if not isinstance(u, Fraction):
            raise ICLError(f"utility is not a number: {a}")
        if u not in values:
            values.append(u)
    return tuple(values)


def sense_value(theory: Theory, tc: TotalChoice, cond: Term, s: Term) -> Tuple[bool, TotalChoice]:
    """Whether ``cond`` is sensed at ``s``; raises NeedChoice if ``tc`` is insufficient."""
    if not is_ground(s):
        raise NotGround(s)
    solver = WorldSolver(theory.program, theory.choice_space, tc)
    return solver.holds(sense_atom(cond, s)), tc


def utility_of(theory: Theory, tc: TotalChoice, s: Term) -> Fraction:
    solver = WorldSolver(theory.program, theory.choice_space, tc)
    us = _utilities(solver, s)
    if len(us) != 1:
        raise UtilityIncomplete([Witness(tc, s, us)])
    return us[0]


def _plan_task(plan: Plan, strict: bool):
    def task(solver: WorldSolver):
        final = trans(plan, solver.holds, S0)
        us = _utilities(solver, final)
        if len(us) != 1:
            w = Witness(solver.choice, final, us)
            if strict:
                raise UtilityIncomplete([w])
            return final, w
        return final, us[0]

    return task


def expected_utility_exact(theory: Theory, plan: Plan) -> EUReport:
    """Expected utility by lazy explanation branching (exact rationals)."""
    out = []
    for tc, (final, u) in explore(theory, _plan_task(plan, strict=True)):
        out.append(Explanation(tc, final, u, choice_probability(tc)))
    return EUReport.from_explanations(out)


def check_utility_complete(theory: Theory, plan: Plan) -> List[Witness]:
    """Every branch of ``plan`` whose final situation lacks a unique utility."""
    witnesses = []
    for _, (final, u) in explore(theory, _plan_task(plan, strict=False)):
        if isinstance(u, Witness):
            witnesses.append(u)
    return witnesses


def query_probability(theory: Theory, query: Formula) -> Fraction:
    """Probability that ``query`` (a ground formula) is true, by explanation summation."""
    for a in formula_atoms(query):
        if not is_ground(a):
            raise NotGround(a)
    total = Fraction(0)
    for tc, value in explore(theory, lambda sv: eval_formula(query, sv.holds)):
        if value:
            total += choice_probability(tc)
    return total


def relevant_alternatives(theory: Theory, plan: Plan, horizon: int) -> List[Alternative]:
    """Alternatives reachable by grounding the plan's sense and utility queries."""
    g = Grounder(theory.program, theory.choice_space, horizon)
    for br in branch_profile(plan):
        for cond, s, _ in br.outcomes:
            g.solve(sense_atom(cond, s))
        g.solve(Fn("utility", (Var("U"), br.final)))
    return sorted(g.alternatives, key=Alternative.sort_key)


def expected_utility_enumerate(theory: Theory, plan: Plan, horizon: int,
                               limit: int = ENUMERATION_LIMIT) -> EUReport:
    """Expected utility summed over every selector function on the relevant alternatives."""
    alts = relevant_alternatives(theory, plan, horizon)
    count = math.prod(len(a.members) for a in alts)
    if count > limit:
        raise TooManyWorlds(count, limit)
    out = []
    shared: dict = {}
    for picks in product(*(range(len(a.members)) for a in alts)):
        tc = TotalChoice(dict(zip(alts, picks)))
        solver = WorldSolver(theory.program, theory.choice_space, tc, shared=shared)
        try:
            final = trans(plan, solver.holds, S0)
            us = _utilities(solver, final)
        except NeedChoice as need:
            raise ICLError(
                f"evaluation demanded {need.alternative}, which grounding did not find"
            ) from None
        if len(us) != 1:
            raise UtilityIncomplete([Witness(tc, final, us)])
        out.append(Explanation(tc, final, us[0], choice_probability(tc)))
    return EUReport.from_explanations(out)


# Monte Carlo

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _alt_key(alt: Alternative) -> int:
    ident = f"{alt.schema}|{'' if alt.binding is None else format_term(alt.binding)}"
    return int.from_bytes(hashlib.blake2b(ident.encode(), digest_size=8).digest(), "little")


def uniforms(seed: int, alt: Alternative, idx: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) draws keyed by (seed, world index, alternative)."""
    base = _mix_int(_mix_int(seed & _MASK) ^ _alt_key(alt))
    z = np.uint64(base) + idx.astype(np.uint64) * np.uint64(_GOLDEN)
    return (_mix(z) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class _Node:
    __slots__ = ("tc", "memo", "alt", "children", "leaf")

    def __init__(self, tc, memo):
        self.tc, self.memo = tc, memo
        self.alt = None
        self.children = None
        self.leaf = None


class _LazyTree:
    """Explanation tree expanded only where samples go."""

    def __init__(self, theory: Theory, plan: Plan):
        self.theory = theory
        self.task = _plan_task(plan, strict=True)
        self.root = _Node(TotalChoice(), {})
        self.leaves: List[_Node] = []
        self.shared: dict = {}

    def expand(self, node: _Node) -> None:
        solver = WorldSolver(self.theory.program, self.theory.choice_space, node.tc,
                             memo=node.memo, shared=self.shared)
        try:
            node.leaf = self.task(solver)
            node.memo = None
            self.leaves.append(node)
        except NeedChoice as need:
            node.alt = need.alternative
            node.children = [None] * len(node.alt.members)
            node.memo = solver.memo

    def sample(self, n: int, seed: int):
        utilities = np.empty(n, dtype=np.float64)
        leaf_of = np.empty(n, dtype=np.int64)
        ids = {}
        order: List[_Node] = []

        def visit(node: _Node, idx: np.ndarray):
            if node.leaf is None and node.alt is None:
                self.expand(node)
            if node.leaf is not None:
                utilities[idx] = float(node.leaf[1])
                k = ids.get(id(node))
                if k is None:
                    k = ids[id(node)] = len(order)
                    order.append(node)
                leaf_of[idx] = k
                return
            probs = [float(p) for _, p in node.alt.members]
            cum = np.cumsum(probs)
            cum[-1] = np.inf
            pick = np.searchsorted(cum, uniforms(seed, node.alt, idx), side="right")
            for j in range(len(probs)):
                sub = idx[pick == j]
                if sub.size == 0:
                    continue
                child = node.children[j]
                if child is None:
                    child = node.children[j] = _Node(node.tc.extend(node.alt, j), dict(node.memo))
                visit(child, sub)

        visit(self.root, np.arange(n, dtype=np.int64))
        return utilities, leaf_of, order


def expected_utility_mc(theory: Theory, plan: Plan, n: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo estimate and its standard error; deterministic given ``seed``."""
    if n < 1:
        raise ValueError("n must be positive")
    utilities, _, _ = _LazyTree(theory, plan).sample(n, seed)
    est = float(utilities.mean())
    se = float(utilities.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return est, se


@dataclass(frozen=True)
class Sample:
    index: int
    choices: TotalChoice
    final_situation: Term
    utility: Fraction


def simulate(theory: Theory, plan: Plan, n: int, seed: int) -> List[Sample]:
    """Per-sample traces for the same draws :func:`expected_utility_mc` uses."""
    _, leaf_of, order = _LazyTree(theory, plan).sample(n, seed)
    out = []
    for i in range(n):
        node = order[int(leaf_of[i])]
        final, u = node.leaf
        out.append(Sample(i, node.tc, final, u))
    return out

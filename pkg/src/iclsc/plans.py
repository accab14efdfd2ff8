"""Conditional plans and the ``trans`` relation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Tuple, Union

from .errors import LoopBoundExceeded
from .terms import S0, Fn, Term, do, format_term, unify


@dataclass(frozen=True)
class Skip:
    def __str__(self):
        return "skip"


@dataclass(frozen=True)
class Primitive:
    action: Fn

    def __str__(self):
        return format_term(self.action)


@dataclass(frozen=True)
class Seq:
    first: "Plan"
    second: "Plan"

    def __str__(self):
        return f"{self.first}; {self.second}"


@dataclass(frozen=True)
class IfThenElse:
    cond: Term
    then: "Plan"
    else_: "Plan"

    def __str__(self):
        return f"if {format_term(self.cond)} then {self.then} else {self.else_} endIf"


@dataclass(frozen=True)
class While:
    cond: Term
    body: "Plan"
    bound: int

    def __str__(self):
        return f"while {format_term(self.cond)} do {self.body} endDo(bound={self.bound})"


Plan = Union[Skip, Primitive, Seq, IfThenElse, While]

SKIP = Skip()


def seq(*plans: Plan) -> Plan:
    """Right-nested sequence; ``seq()`` is skip."""
    if not plans:
        return SKIP
    out = plans[-1]
    for p in reversed(plans[:-1]):
        out = Seq(p, out)
    return out


def normalize(plan: Plan) -> Plan:
    """Re-associate sequences to the right (the form the parser produces)."""
    if isinstance(plan, Seq):
        items: List[Plan] = []

        def flat(p):
            if isinstance(p, Seq):
                flat(p.first)
                flat(p.second)
            else:
                items.append(normalize(p))

        flat(plan)
        return seq(*items)
    if isinstance(plan, IfThenElse):
        return IfThenElse(plan.cond, normalize(plan.then), normalize(plan.else_))
    if isinstance(plan, While):
        return While(plan.cond, normalize(plan.body), plan.bound)
    return plan


def sense_atom(cond: Term, situation: Term) -> Fn:
    return Fn("sense", (cond, situation))


World = Callable[[Fn], bool]


def trans(plan: Plan, world: World, s: Term) -> Term:
    """Situation reached by doing ``plan`` from ``s`` in ``world``.

    ``world`` maps a ground ``sense(C, S)`` atom to its truth value.
    """
    if isinstance(plan, Skip):
        return s
    if isinstance(plan, Primitive):
        return do(plan.action, s)
    if isinstance(plan, Seq):
        return trans(plan.second, world, trans(plan.first, world, s))
    if isinstance(plan, IfThenElse):
        branch = plan.then if world(sense_atom(plan.cond, s)) else plan.else_
        return trans(branch, world, s)
    if isinstance(plan, While):
        for _ in range(plan.bound):
            if not world(sense_atom(plan.cond, s)):
                return s
            s = trans(plan.body, world, s)
        if world(sense_atom(plan.cond, s)):
            raise LoopBoundExceeded(plan.cond, plan.bound, s)
        return s
    raise TypeError(f"not a plan: {plan!r}")


class Branch(NamedTuple):
    outcomes: Tuple[Tuple[Term, Term, bool], ...]  # (condition, situation, sensed)
    final: Term
    actions: int


def _profile(plan: Plan, s: Term, outcomes, n: int, out: list) -> List[Tuple[tuple, Term, int]]:
    # returns continuation states (outcomes, situation, action count)
    if isinstance(plan, Skip):
        return [(outcomes, s, n)]
    if isinstance(plan, Primitive):
        return [(outcomes, do(plan.action, s), n + 1)]
    if isinstance(plan, Seq):
        res = []
        for o, s2, n2 in _profile(plan.first, s, outcomes, n, out):
            res.extend(_profile(plan.second, s2, o, n2, out))
        return res
    if isinstance(plan, IfThenElse):
        return (
            _profile(plan.then, s, outcomes + ((plan.cond, s, True),), n, out)
            + _profile(plan.else_, s, outcomes + ((plan.cond, s, False),), n, out)
        )
    if isinstance(plan, While):
        res = []
        frontier = [(outcomes, s, n)]
        for _ in range(plan.bound):
            nxt = []
            for o, s2, n2 in frontier:
                res.append((o + ((plan.cond, s2, False),), s2, n2))
                nxt.extend(_profile(plan.body, s2, o + ((plan.cond, s2, True),), n2, out))
            frontier = nxt
        for o, s2, n2 in frontier:
            # paths still looping after the bound are errors, not branches
            res.append((o + ((plan.cond, s2, False),), s2, n2))
        return res
    raise TypeError(f"not a plan: {plan!r}")


def branch_profile(plan: Plan, start: Term = S0) -> List[Branch]:
    """One entry per root-to-leaf path through the plan's sensing structure."""
    return [Branch(o, s, n) for o, s, n in _profile(plan, start, (), 0, [])]


def visited_situations(plan: Plan, start: Term = S0) -> List[Term]:
    """Every situation some branch passes through, in first-visit order."""
    seen = {start: None}
    for br in branch_profile(plan, start):
        for _, s, _ in br.outcomes:
            seen.setdefault(s)
        chain = []
        s = br.final
        while s != start and isinstance(s, Fn) and s.name == "do":
            chain.append(s)
            s = s.args[1]
        for s in reversed(chain):
            seen.setdefault(s)
    return list(seen)


def plan_depth(plan: Plan) -> int:
    return max(b.actions for b in branch_profile(plan))


def plan_violations(theory, plan: Plan) -> list:
    from .choices import Violation
    from .terms import rename

    out = []

    def matches(term, templates):
        return any(unify(term, rename(t, {}, 1)) is not None for t in templates)

    def walk(p):
        if isinstance(p, Primitive):
            if not matches(p.action, theory.actions):
                out.append(Violation("undeclared-action", f"{p} is not a declared action", p))
        elif isinstance(p, Seq):
            walk(p.first)
            walk(p.second)
        elif isinstance(p, (IfThenElse, While)):
            if not matches(p.cond, theory.observables):
                out.append(Violation(
                    "undeclared-observable",
                    f"{format_term(p.cond)} is not a declared observable",
                    p.cond,
                ))
            if isinstance(p, IfThenElse):
                walk(p.then)
                walk(p.else_)
            else:
                if p.bound < 1:
                    out.append(Violation("loop-bound", f"bound {p.bound} < 1", p))
                walk(p.body)

    walk(plan)
    return out

"""Probabilistic STRIPS actions, their translation into ICL_SC, and a size benchmark.

A pSTRIPS action is a list of triggers; each trigger is a conjunction of
fluent literals with a distribution over effect sets. Translation emits, for
outcome ``j`` of trigger ``i`` of action ``a``::

    b_a_i_j(a, S) <- t_i[S] & r_a_i_j(S).
    p(do(a, S)) <- b_a_i_j(a, S).            % each +p in the effect
    undoes(p, a, S) <- b_a_i_j(a, S).        % each -p in the effect

with the ``r_a_i_*`` of one trigger forming one alternative, plus a single
frame rule per fluent ``p(do(A, S)) <- p(S) & ~undoes(p, A, S)``.

Text format::

    % comment
    fluents p q
    init p
    observe p
    reward p 10
    action wait
      trigger p ~q
        0.7 +p -q
        0.3
      trigger
        1 +q
    end

A bare ``trigger`` is the empty conjunction (true). ``observe`` and ``reward``
are optional and add sensing and a utility to the imported theory.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .choices import AlternativeSchema, Theory
from .errors import BadOutcomeDistribution, BadTriggerPartition, ICLError, ParseError
from .plans import IfThenElse, Plan, Primitive, Seq, Skip, While
from .program import Clause, Is, Neg, Pos, Program
from .terms import S0, Fn, Term, Var, const, do, format_term, fraction_str

Literal = Tuple[str, bool]  # (fluent, positive)
State = FrozenSet[str]


@dataclass(frozen=True)
class Outcome:
    probability: Fraction
    effects: Tuple[Literal, ...] = ()


@dataclass(frozen=True)
class Trigger:
    condition: Tuple[Literal, ...]
    outcomes: Tuple[Outcome, ...]

    def holds(self, state: State) -> bool:
        return all((f in state) == pos for f, pos in self.condition)


@dataclass(frozen=True)
class PStripsAction:
    name: str
    tuples: Tuple[Trigger, ...]

    def trigger_for(self, state: State) -> Trigger:
        for t in self.tuples:
            if t.holds(state):
                return t
        raise BadTriggerPartition(f"no trigger of {self.name} matches {sorted(state)}")


@dataclass(frozen=True)
class PStripsDomain:
    fluents: Tuple[str, ...]
    actions: Tuple[PStripsAction, ...]
    init: FrozenSet[str] = frozenset()
    observe: Tuple[str, ...] = ()
    rewards: Tuple[Tuple[str, Fraction], ...] = ()


@dataclass(frozen=True)
class SizeMetrics:
    clauses: int
    tuples: int
    literals: int
    alternatives: int = 0


def _lit_str(lit: Literal) -> str:
    return ("" if lit[1] else "~") + lit[0]


def _effect_str(lit: Literal) -> str:
    return ("+" if lit[1] else "-") + lit[0]


# validation

def validate_action(action: PStripsAction, fluents: Iterable[str]) -> None:
    """Raise if outcome distributions are improper or triggers don't partition the states."""
    known = set(fluents)
    for t in action.tuples:
        for f, _ in t.condition:
            if f not in known:
                raise ICLError(f"action {action.name}: unknown fluent {f!r} in trigger")
        if len({f for f, _ in t.condition}) != len(t.condition):
            raise BadTriggerPartition(
                f"action {action.name}: trigger {' '.join(map(_lit_str, t.condition))} "
                "mentions a fluent twice")
        if not t.outcomes:
            raise BadOutcomeDistribution(f"action {action.name}: trigger without outcomes")
        total = Fraction(0)
        for o in t.outcomes:
            if not 0 <= o.probability <= 1:
                raise BadOutcomeDistribution(
                    f"action {action.name}: probability {fraction_str(o.probability)} "
                    "outside [0, 1]")
            total += o.probability
            signs: Dict[str, bool] = {}
            for f, pos in o.effects:
                if f not in known:
                    raise ICLError(f"action {action.name}: unknown fluent {f!r} in effect")
                if signs.setdefault(f, pos) != pos:
                    raise BadOutcomeDistribution(
                        f"action {action.name}: outcome both adds and deletes {f}")
        if total != 1:
            raise BadOutcomeDistribution(
                f"action {action.name}: outcome probabilities sum to {fraction_str(total)}")
    # Triggers are conjunctions: two overlap unless they disagree on some fluent.
    ts = action.tuples
    for i in range(len(ts)):
        ci = dict(ts[i].condition)
        for j in range(i + 1, len(ts)):
            if all(ci.get(f, pos) == pos for f, pos in ts[j].condition):
                raise BadTriggerPartition(
                    f"action {action.name}: triggers {i + 1} and {j + 1} overlap")
    mentioned = sorted({f for t in ts for f, _ in t.condition})
    for values in product((False, True), repeat=len(mentioned)):
        state = frozenset(f for f, v in zip(mentioned, values) if v)
        if not any(t.holds(state) for t in ts):
            desc = " ".join(_lit_str((f, v)) for f, v in zip(mentioned, values)) or "true"
            raise BadTriggerPartition(f"action {action.name}: no trigger covers {desc}")


def validate_domain(domain: PStripsDomain) -> None:
    if len(set(domain.fluents)) != len(domain.fluents):
        raise ICLError("duplicate fluent")
    names = [a.name for a in domain.actions]
    if len(set(names)) != len(names):
        raise ICLError("duplicate action")
    known = set(domain.fluents)
    for f in list(domain.init) + list(domain.observe) + [f for f, _ in domain.rewards]:
        if f not in known:
            raise ICLError(f"unknown fluent {f!r}")
    for a in domain.actions:
        validate_action(a, domain.fluents)


# translation

class _Fresh:
    def __init__(self, reserved: Iterable[str]):
        self.used = set(reserved)

    def __call__(self, base: str) -> str:
        name, k = base, 1
        while name in self.used:
            name = f"{base}_{k}"
            k += 1
        self.used.add(name)
        return name


_S = Var("S")
_A = Var("A")


def _fluent(f: str, s: Term) -> Fn:
    return Fn(f, (s,))


def import_pstrips(actions: Sequence[PStripsAction], fluents: Sequence[str],
                   init: Iterable[str] = (), observe: Sequence[str] = (),
                   rewards: Sequence[Tuple[str, Fraction]] = (),
                   reserved: Iterable[str] = ()) -> Theory:
    """Translate pSTRIPS actions into a theory fragment.

    ``reserved`` lists further predicate names the emitted helper predicates
    must avoid (for instance those of a theory this fragment is merged into).
    """
    domain = PStripsDomain(tuple(fluents), tuple(actions), frozenset(init),
                           tuple(observe), tuple(rewards))
    validate_domain(domain)
    fresh = _Fresh(set(fluents) | {a.name for a in actions} | set(reserved)
                   | {"undoes", "sense", "utility", "do", "s0"})
    undoes = "undoes"
    schemas: List[AlternativeSchema] = []
    clauses: List[Clause] = []
    for a in actions:
        act = const(a.name)
        for i, t in enumerate(a.tuples, 1):
            members = []
            for j, o in enumerate(t.outcomes, 1):
                r = fresh(f"r_{a.name}_{i}_{j}")
                b = fresh(f"b_{a.name}_{i}_{j}")
                members.append((_fluent(r, _S), o.probability))
                body = tuple(Pos(_fluent(f, _S)) if pos else Neg(_fluent(f, _S))
                             for f, pos in t.condition) + (Pos(_fluent(r, _S)),)
                bat = Fn(b, (act, _S))
                clauses.append(Clause(bat, body))
                for f, pos in o.effects:
                    head = _fluent(f, do(act, _S)) if pos else Fn(undoes, (const(f), act, _S))
                    clauses.append(Clause(head, (Pos(bat),)))
            schemas.append(AlternativeSchema(tuple(members)))
    for f in fluents:
        clauses.append(Clause(_fluent(f, do(_A, _S)), (
            Pos(_fluent(f, _S)), Neg(Fn(undoes, (const(f), _A, _S))))))
    for f in sorted(init):
        clauses.append(Clause(_fluent(f, S0), ()))
    for f in observe:
        clauses.append(Clause(Fn("sense", (const(f), _S)), (Pos(_fluent(f, _S)),)))
    if rewards:
        clauses.extend(_utility_clauses(rewards, fresh))
    return Theory(tuple(schemas), tuple(const(a.name) for a in actions),
                  tuple(const(f) for f in observe), Program(tuple(clauses)))


def _utility_clauses(rewards, fresh) -> List[Clause]:
    out = []
    body = []
    total: Term = Fraction(0)
    for k, (f, w) in enumerate(rewards):
        v = fresh(f"value_{f}")
        out.append(Clause(Fn(v, (w, _S)), (Pos(_fluent(f, _S)),)))
        out.append(Clause(Fn(v, (Fraction(0), _S)), (Neg(_fluent(f, _S)),)))
        x = Var(f"V{k}")
        body.append(Pos(Fn(v, (x, _S))))
        total = x if k == 0 else Fn("+", (total, x))
    u = Var("U")
    out.append(Clause(Fn("utility", (u, _S)), tuple(body) + (Is(u, total),)))
    return out


def import_domain(domain: PStripsDomain, reserved: Iterable[str] = ()) -> Theory:
    return import_pstrips(domain.actions, domain.fluents, domain.init, domain.observe,
                          domain.rewards, reserved)


def size_of_actions(actions: Sequence[PStripsAction]) -> SizeMetrics:
    tuples = literals = 0
    for a in actions:
        for t in a.tuples:
            for o in t.outcomes:
                tuples += 1
                literals += len(t.condition) + len(o.effects)
    return SizeMetrics(0, tuples, literals, 0)


def size_of_theory(theory: Theory) -> SizeMetrics:
    lits = sum(1 + len(c.body) for c in theory.program.clauses)
    return SizeMetrics(len(theory.program.clauses), 0, lits, len(theory.schemas))


# direct simulation

def _apply(state: State, effects: Sequence[Literal]) -> State:
    s = set(state)
    for f, pos in effects:
        if pos:
            s.add(f)
        else:
            s.discard(f)
    return frozenset(s)


def step_distribution(action: PStripsAction, state: State) -> Dict[State, Fraction]:
    out: Dict[State, Fraction] = {}
    for o in action.trigger_for(state).outcomes:
        nxt = _apply(state, o.effects)
        out[nxt] = out.get(nxt, Fraction(0)) + o.probability
    return out


def run_plan(domain: PStripsDomain, plan: Plan,
             dist: Optional[Mapping[State, Fraction]] = None) -> Dict[State, Fraction]:
    """Push a state distribution through ``plan``; branches sense fluents exactly."""
    if dist is None:
        dist = {frozenset(domain.init): Fraction(1)}
    by_name = {a.name: a for a in domain.actions}
    return _run(by_name, plan, dict(dist))


def _run(by_name, plan, dist):
    if isinstance(plan, Skip):
        return dist
    if isinstance(plan, Primitive):
        a = plan.action
        if not isinstance(a, Fn) or a.args or a.name not in by_name:
            raise ICLError(f"unknown action {format_term(a)}")
        out: Dict[State, Fraction] = {}
        for state, p in dist.items():
            for nxt, q in step_distribution(by_name[a.name], state).items():
                out[nxt] = out.get(nxt, Fraction(0)) + p * q
        return out
    if isinstance(plan, Seq):
        return _run(by_name, plan.second, _run(by_name, plan.first, dist))
    if isinstance(plan, IfThenElse):
        f = plan.cond.name
        yes = {s: p for s, p in dist.items() if f in s}
        no = {s: p for s, p in dist.items() if f not in s}
        out = _run(by_name, plan.then, yes)
        for s, p in _run(by_name, plan.else_, no).items():
            out[s] = out.get(s, Fraction(0)) + p
        return out
    if isinstance(plan, While):
        raise ICLError("the direct simulator does not run while loops")
    raise TypeError(plan)


def expected_reward(domain: PStripsDomain, plan: Plan) -> Fraction:
    w = dict(domain.rewards)
    return sum((p * sum((w.get(f, Fraction(0)) for f in s), Fraction(0))
                for s, p in run_plan(domain, plan).items()), Fraction(0))


# persistence benchmark

def persistence_probability(i: int) -> Fraction:
    """Probability that fluent ``i`` (1-based) survives one wait."""
    return 1 - Fraction(1, i + 2)


def persistence_icl(n: int) -> Theory:
    """Direct ICL encoding: one frame rule and one lapse rule per fluent."""
    schemas, clauses = [], []
    for i in range(1, n + 1):
        f = f"f{i}"
        keep = persistence_probability(i)
        schemas.append(AlternativeSchema((
            (_fluent(f"persists_{i}", _S), keep),
            (_fluent(f"lapses_{i}", _S), 1 - keep),
        )))
        clauses.append(Clause(_fluent(f, do(_A, _S)), (
            Pos(_fluent(f, _S)), Neg(Fn("undoes", (const(f), _A, _S))))))
        clauses.append(Clause(Fn("undoes", (const(f), _A, _S)),
                              (Pos(_fluent(f"lapses_{i}", _S)),)))
    return Theory(tuple(schemas), (const("wait"),), (), Program(tuple(clauses)))


def persistence_pstrips(n: int) -> PStripsAction:
    """The wait action as a single trigger with one outcome per subset of lapsing fluents."""
    outcomes = []
    for lapses in product((False, True), repeat=n):
        p = Fraction(1)
        effects = []
        for i, lapse in enumerate(lapses, 1):
            keep = persistence_probability(i)
            p *= (1 - keep) if lapse else keep
            if lapse:
                effects.append((f"f{i}", False))
        outcomes.append(Outcome(p, tuple(effects)))
    return PStripsAction("wait", (Trigger((), tuple(outcomes)),))


def persistence_benchmark(n: int):
    """``((icl_theory, icl_size), (pstrips_action, pstrips_size))`` for ``n`` fluents."""
    if n < 1:
        raise ValueError("n must be at least 1")
    icl = persistence_icl(n)
    wait = persistence_pstrips(n)
    return (icl, size_of_theory(icl)), (wait, size_of_actions([wait]))


_COLUMNS = ("n", "icl_clauses", "icl_alternatives", "icl_literals",
            "pstrips_tuples", "pstrips_literals")


def export_size_report(rows: Iterable[Tuple[int, SizeMetrics, SizeMetrics]]) -> dict:
    """Tabulate ``(n, icl_size, pstrips_size)`` rows as a plain document."""
    out = []
    for n, icl, ps in rows:
        out.append([n, icl.clauses, icl.alternatives, icl.literals, ps.tuples, ps.literals])
    return {"columns": list(_COLUMNS), "rows": out}


def benchmark_report(max_n: int) -> dict:
    rows = []
    for n in range(1, max_n + 1):
        (_, icl), (_, ps) = persistence_benchmark(n)
        rows.append((n, icl, ps))
    return export_size_report(rows)


def format_size_table(doc: dict) -> str:
    cols = doc["columns"]
    cells = [[str(c) for c in cols]] + [[str(v) for v in r] for r in doc["rows"]]
    widths = [max(len(row[k]) for row in cells) for k in range(len(cols))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def size_report_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# text format

_LINE = re.compile(r"\S+")


def _parse_prob(text: str, line: int, col: int) -> Fraction:
    try:
        if "/" in text:
            a, b = text.split("/")
            return Fraction(int(a), int(b))
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability {text!r}", line, col) from None


def _name(word: str, line: int, col: int) -> str:
    if not re.fullmatch(r"[a-z][A-Za-z0-9_]*", word):
        raise ParseError(f"bad name {word!r}", line, col)
    return word


def parse_pstrips(text: str) -> PStripsDomain:
    fluents: List[str] = []
    init: Set[str] = set()
    observe: List[str] = []
    rewards: List[Tuple[str, Fraction]] = []
    actions: List[PStripsAction] = []
    current: Optional[Tuple[str, list]] = None
    trigger: Optional[Tuple[tuple, list]] = None

    def close_trigger():
        nonlocal trigger
        if trigger is not None:
            current[1].append(Trigger(trigger[0], tuple(trigger[1])))
            trigger = None

    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0]
        words = [(m.group(), m.start() + 1) for m in _LINE.finditer(line)]
        if not words:
            continue
        head, hc = words[0]
        rest = words[1:]
        if head == "fluents":
            for w, c in rest:
                fluents.append(_name(w, ln, c))
        elif head == "init":
            init.update(_name(w, ln, c) for w, c in rest)
        elif head == "observe":
            observe.extend(_name(w, ln, c) for w, c in rest)
        elif head == "reward":
            if len(rest) != 2:
                raise ParseError("reward needs a fluent and a value", ln, hc)
            rewards.append((_name(*rest[0], ln), _parse_prob(rest[1][0], ln, rest[1][1])))
        elif head == "action":
            if current is not None:
                raise ParseError("missing 'end' before next action", ln, hc)
            if len(rest) != 1:
                raise ParseError("action needs exactly one name", ln, hc)
            current = (_name(*rest[0], ln), [])
        elif head == "trigger":
            if current is None:
                raise ParseError("trigger outside an action", ln, hc)
            close_trigger()
            cond = []
            for w, c in rest:
                pos = not w.startswith("~")
                cond.append((_name(w.lstrip("~"), ln, c), pos))
            trigger = (tuple(cond), [])
        elif head == "end":
            if current is None:
                raise ParseError("'end' without an action", ln, hc)
            close_trigger()
            actions.append(PStripsAction(current[0], tuple(current[1])))
            current = None
        elif head[0].isdigit():
            if trigger is None:
                raise ParseError("outcome outside a trigger", ln, hc)
            p = _parse_prob(head, ln, hc)
            effects = []
            for w, c in rest:
                if w[0] not in "+-":
                    raise ParseError(f"effect must start with + or -: {w!r}", ln, c)
                effects.append((_name(w[1:], ln, c + 1), w[0] == "+"))
            trigger[1].append(Outcome(p, tuple(effects)))
        else:
            raise ParseError(f"unexpected {head!r}", ln, hc)
    if current is not None:
        raise ParseError(f"action {current[0]} is missing 'end'", len(text.splitlines()) + 1, 1)
    return PStripsDomain(tuple(fluents), tuple(actions), frozenset(init),
                         tuple(observe), tuple(rewards))


def print_pstrips(domain: PStripsDomain) -> str:
    lines = ["fluents " + " ".join(domain.fluents)]
    if domain.init:
        lines.append("init " + " ".join(sorted(domain.init)))
    if domain.observe:
        lines.append("observe " + " ".join(domain.observe))
    for f, w in domain.rewards:
        lines.append(f"reward {f} {fraction_str(w)}")
    for a in domain.actions:
        lines.append(f"action {a.name}")
        for t in a.tuples:
            lines.append(("  trigger " + " ".join(map(_lit_str, t.condition))).rstrip())
            for o in t.outcomes:
                lines.append(("    " + fraction_str(o.probability) + " "
                              + " ".join(map(_effect_str, o.effects))).rstrip())
        lines.append("end")
    return "\n".join(lines) + "\n"

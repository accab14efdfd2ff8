"""Shared fixtures-by-function and random generators for the test suite."""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import List

from iclsc.choices import AlternativeSchema, Theory
from iclsc.dsl import parse_domain, parse_plan
from iclsc.plans import SKIP, IfThenElse, Primitive, Seq
from iclsc.program import Clause, Neg, Pos, Program
from iclsc.terms import S0, Fn, Var, const, do

DATA = resources.files("iclsc") / "data"


def office_text() -> str:
    return (DATA / "office.icl").read_text()


def office_plan_text() -> str:
    return (DATA / "office.plan").read_text()


@lru_cache(maxsize=None)
def office():
    return parse_domain(office_text())


@lru_cache(maxsize=None)
def office_plan():
    return parse_plan(office_plan_text())


# random small situation-calculus theories

S = Var("S")
A = Var("A")
ACTIONS = (const("a"), const("b"))
OBS = const("o")


def _prob(rng: random.Random, k: int) -> List[Fraction]:
    ws = [rng.randint(1, 5) for _ in range(k)]
    return [Fraction(w, sum(ws)) for w in ws]


def random_theory(rng: random.Random) -> Theory:
    """At most 5 alternatives and 12 clauses over fluents f1, f2 and actions a, b."""
    schemas = []
    closed, param = [], []
    n_alt = rng.randint(1, 5)
    for i in range(n_alt):
        k = rng.choice((2, 2, 3))
        ps = _prob(rng, k)
        if rng.random() < 0.4:
            members = tuple((Fn(f"c{i}_{j}", (S0,)), p) for j, p in enumerate(ps))
            closed.append([m for m, _ in members])
        else:
            members = tuple((Fn(f"c{i}_{j}", (S,)), p) for j, p in enumerate(ps))
            param.append([m for m, _ in members])
        schemas.append(AlternativeSchema(members))

    def choice_lit():
        pool = [m for alt in param for m in alt[:-1]] or None
        if pool is None:
            return None
        return Pos(rng.choice(pool))

    fl = [f"f{i}" for i in range(1, rng.randint(1, 2) + 1)]
    clauses: List[Clause] = []
    # initial state
    for f in fl:
        r = rng.random()
        if r < 0.4 and closed:
            alt = rng.choice(closed)
            clauses.append(Clause(Fn(f, (S0,)), (Pos(rng.choice(alt[:-1])),)))
        elif r < 0.6:
            clauses.append(Clause(Fn(f, (S0,)), ()))
    # effects and frame
    for f in fl:
        act = rng.choice(ACTIONS)
        body = []
        if rng.random() < 0.5:
            g = rng.choice(fl)
            body.append(Pos(Fn(g, (S,))) if rng.random() < 0.5 else Neg(Fn(g, (S,))))
        c = choice_lit()
        if c is not None and rng.random() < 0.8:
            body.append(c)
        clauses.append(Clause(Fn(f, (do(act, S),)), tuple(body)))
        frame = [Pos(Fn(f, (S,)))]
        c = choice_lit()
        if c is not None and rng.random() < 0.5:
            frame.append(c)
        clauses.append(Clause(Fn(f, (do(A, S),)), tuple(frame)))
    # sensing, possibly noisy
    g = rng.choice(fl)
    sense_body = [Pos(Fn(g, (S,)))]
    c = choice_lit()
    if c is not None and rng.random() < 0.5:
        sense_body.append(c)
    clauses.append(Clause(Fn("sense", (OBS, S)), tuple(sense_body)))
    # utility: one value per truth assignment of the utility fluents
    ufl = fl[: rng.randint(1, len(fl))]
    for bits in range(1 << len(ufl)):
        body = tuple(Pos(Fn(f, (S,))) if bits >> k & 1 else Neg(Fn(f, (S,)))
                     for k, f in enumerate(ufl))
        clauses.append(Clause(Fn("utility", (Fraction(rng.randint(-10, 20)), S)), body))
    assert len(clauses) <= 12
    return Theory(tuple(schemas), ACTIONS, (OBS,), Program(tuple(clauses)))


def random_plan(rng: random.Random, depth: int = 3):
    """A plan with at most ``depth`` actions on every branch."""
    if depth == 0 or rng.random() < 0.2:
        return SKIP
    r = rng.random()
    if r < 0.3:
        return IfThenElse(OBS, random_plan(rng, depth), random_plan(rng, depth))
    first = Primitive(rng.choice(ACTIONS))
    rest = random_plan(rng, depth - 1)
    return first if rest == SKIP else Seq(first, rest)


# random acyclic ground programs

def random_ground_program(rng: random.Random, n_atoms: int):
    """Acyclic propositional program: atom i only depends on atoms j > i."""
    atoms = [const(f"q{i}") for i in range(n_atoms)]
    clauses = []
    for i in range(n_atoms):
        for _ in range(rng.choice((0, 1, 1, 2))):
            later = atoms[i + 1:]
            k = min(len(later), rng.randint(0, 3))
            body = []
            for b in rng.sample(later, k):
                body.append(Pos(b) if rng.random() < 0.6 else Neg(b))
            clauses.append(Clause(atoms[i], tuple(body)))
    perm = list(range(n_atoms))
    rng.shuffle(perm)
    rename = {atoms[i]: const(f"x{perm[i]}") for i in range(n_atoms)}

    def rn(lit):
        return type(lit)(rename[lit.atom])

    program = Program(tuple(Clause(rename[c.head], tuple(rn(l) for l in c.body))
                            for c in clauses))
    return program, [rename[a] for a in atoms]


def clark_model(program: Program, atoms, assumed=()):
    """Least fixpoint of the completion, iterated until stable (fine for acyclic programs)."""
    truth = {a: False for a in atoms}
    for a in assumed:
        truth[a] = True
    for _ in range(len(atoms) + 2):
        new = dict(truth)
        for a in atoms:
            if a in assumed:
                continue
            new[a] = any(
                all(truth[l.atom] if isinstance(l, Pos) else not truth[l.atom] for l in c.body)
                for c in program.clauses if c.head == a
            )
        if new == truth:
            break
        truth = new
    return {a for a, v in truth.items() if v}


def random_pstrips_domain(rng):
    """A small random pSTRIPS domain with a valid trigger partition per action."""
    from iclsc.strips import Outcome, PStripsAction, PStripsDomain, Trigger
    fl = [f"p{i}" for i in range(rng.randint(1, 3))]
    acts = []
    for k in range(rng.randint(1, 2)):
        r = rng.random()
        if r < 0.3:
            conds = [()]
        elif r < 0.7 or len(fl) < 2:
            f = rng.choice(fl)
            conds = [((f, True),), ((f, False),)]
        else:
            f, g = rng.sample(fl, 2)
            conds = [((f, True),), ((f, False), (g, True)), ((f, False), (g, False))]
        tuples = []
        for cond in conds:
            ws = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
            outs = []
            for w in ws:
                eff = tuple((g, rng.random() < 0.5)
                            for g in rng.sample(fl, rng.randint(0, len(fl))))
                outs.append(Outcome(Fraction(w, sum(ws)), eff))
            tuples.append(Trigger(cond, tuple(outs)))
        acts.append(PStripsAction(f"a{k}", tuple(tuples)))
    init = frozenset(f for f in fl if rng.random() < 0.5)
    obs = tuple(f for f in fl if rng.random() < 0.5) or (fl[0],)
    rewards = tuple((f, Fraction(rng.randint(-5, 10))) for f in fl)
    return PStripsDomain(tuple(fl), tuple(acts), init, obs, rewards)

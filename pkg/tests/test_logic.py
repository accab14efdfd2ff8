import random

import pytest

from helpers import clark_model, office, office_plan, random_ground_program
from iclsc.dsl import parse_domain, parse_term
from iclsc.errors import CycleFound, HorizonExceeded, NotGround
from iclsc.logic import check_acyclic, holds, level_map, relevant_ground, stable_model
from iclsc.plans import branch_profile
from iclsc.program import And, Not, Or
from iclsc.terms import S0, Fn, Var, const, max_situation_depth


def prog(text):
    return parse_domain(text).program


def atom(text):
    return parse_term(text)


def test_level_map_two_atoms():
    assert check_acyclic(prog("p <- ~q."), 0) == {const("q"): 0, const("p"): 1}


def test_self_loop_is_a_cycle():
    with pytest.raises(CycleFound) as info:
        check_acyclic(prog("p <- ~p."), 0)
    assert info.value.cycle == [const("p"), const("p")]


def test_longer_cycle_reported():
    with pytest.raises(CycleFound) as info:
        check_acyclic(prog("p <- q. q <- r & ~s. r <- p."), 0)
    cyc = info.value.cycle
    assert cyc[0] == cyc[-1] and set(cyc) == {const("p"), const("q"), const("r")}


def test_office_acyclic_to_plan_horizon():
    th = office()
    goals = []
    for br in branch_profile(office_plan()):
        goals.append(Fn("utility", (Var("U"), br.final)))
        for cond, s, _ in br.outcomes:
            goals.append(Fn("sense", (cond, s)))
    levels = check_acyclic(th.program, 6, goals, th.choice_space)
    assert levels
    for head, pos, neg in _clauses(th, goals):
        for b in pos + neg:
            assert levels[head] > levels[b]


def _clauses(th, goals):
    gp = relevant_ground(th.program, And(tuple(goals)), 6, th.choice_space)
    return list(gp.clauses())


def test_relevant_ground_drops_unreachable():
    gp = relevant_ground(prog("p <- q. q. r <- s."), const("p"), 0)
    assert sorted(map(repr, gp.clauses())) == sorted(
        map(repr, [(const("p"), (const("q"),), ()), (const("q"), (), ())]))


EX22 = ("carrying(key, do(pickup(key), S)) <- "
        "at(robot, Pos, S) & at(key, Pos, S) & pickup_succeeds(S).")
EX22_FACTS = [atom("at(robot, r101, s0)"), atom("at(key, r101, s0)"), atom("pickup_succeeds(s0)")]
GOAL22 = atom("carrying(key, do(pickup(key), s0))")


def test_relevant_ground_example_instances_at_s0_only():
    gp = relevant_ground(prog(EX22), GOAL22, 1, assumables=EX22_FACTS)
    clauses = list(gp.clauses())
    assert len(clauses) == 1
    head, pos, neg = clauses[0]
    assert head == GOAL22 and set(pos) == set(EX22_FACTS) and not neg
    for a in pos:
        assert a.args[-1] == S0


def test_holds_examples():
    gp = relevant_ground(prog("p <- ~q."), const("p"), 0)
    assert holds(gp, set(), const("p"))
    gp = relevant_ground(prog(EX22), GOAL22, 1, assumables=EX22_FACTS)
    assert holds(gp, set(EX22_FACTS), GOAL22)
    assert not holds(gp, set(EX22_FACTS[:2]), GOAL22)


def test_holds_rejects_non_ground_goal():
    gp = relevant_ground(prog("p <- ~q."), const("p"), 0)
    with pytest.raises(NotGround):
        holds(gp, set(), Fn("p", (Var("X"),)))


def test_grounding_stays_within_plan_length():
    th = office()
    for br in branch_profile(office_plan()):
        goal = Fn("utility", (Var("U"), br.final))
        gp = relevant_ground(th.program, goal, br.actions, th.choice_space)
        depth = max(max_situation_depth(h) for h, _, _ in gp.clauses())
        assert depth <= br.actions
        with pytest.raises(HorizonExceeded):
            relevant_ground(th.program, goal, br.actions - 1, th.choice_space)


def test_arithmetic_and_disequality():
    p = prog("n(3). m(X) <- n(Y) & X is Y * 2 + 1. ok <- m(X) & X \\= 6. big <- m(X) & X >= 7.")
    gp = relevant_ground(p, And((const("ok"), const("big"))), 0)
    assert holds(gp, set(), And((const("ok"), const("big"), atom("m(7)"))))


def _assumed(rng, program, atoms):
    heads = {c.head for c in program.clauses}
    return {a for a in atoms if a not in heads and rng.random() < 0.5}


@pytest.mark.parametrize("seed", range(40))
def test_random_programs_match_completion(seed):
    rng = random.Random(seed)
    program, atoms = random_ground_program(rng, rng.randint(1, 40))
    assumed = _assumed(rng, program, atoms)
    expected = clark_model(program, atoms, assumed)
    full = relevant_ground(program, And(tuple(atoms)), 0, assumables=assumed)
    assert stable_model(full, assumed) & set(atoms) == expected
    for a in rng.sample(atoms, min(5, len(atoms))):
        sub = relevant_ground(program, a, 0, assumables=assumed)
        assert len(sub) <= len(full)
        assert holds(sub, assumed, a) == (a in expected) == holds(full, assumed, a)


@pytest.mark.parametrize("seed", range(20))
def test_stable_model_independent_of_level_order(seed):
    rng = random.Random(100 + seed)
    program, atoms = random_ground_program(rng, rng.randint(2, 40))
    gp = relevant_ground(program, And(tuple(atoms)), 0, assumables=atoms)
    levels = level_map(gp)
    by_level = sorted(levels, key=lambda a: (levels[a], repr(a)))
    # the generator's reverse order is another valid topological order
    rank = {a: i for i, a in enumerate(atoms)}
    reverse = sorted(levels, key=lambda a: -rank[a])
    assert stable_model(gp, (), by_level) == stable_model(gp, (), reverse)


@pytest.mark.parametrize("seed", range(20))
def test_holds_is_compositional(seed):
    rng = random.Random(200 + seed)
    program, atoms = random_ground_program(rng, rng.randint(2, 30))
    gp = relevant_ground(program, And(tuple(atoms)), 0)
    for _ in range(10):
        f, g = rng.choice(atoms), rng.choice(atoms)
        hf, hg = holds(gp, (), f), holds(gp, (), g)
        assert holds(gp, (), And((f, g))) == (hf and hg)
        assert holds(gp, (), Or((f, g))) == (hf or hg)
        assert holds(gp, (), Not(f)) == (not hf)

"""Acceptance criteria 1 to 10.

Each test prints one ``criterion N: PASS|FAIL`` line with its runtime; run with
``pytest tests/test_acceptance.py -s`` to see them.
"""
import functools
import random
import time
from fractions import Fraction

from helpers import office, office_plan, office_plan_text, office_text, random_pstrips_domain
from helpers import random_plan, random_theory
from iclsc.choices import TotalChoice
from iclsc.cli import main
from iclsc.dsl import parse_domain, parse_term
from iclsc.engine import WorldSolver
from iclsc.evaluation import (
    check_utility_complete, expected_utility_enumerate, expected_utility_exact,
    expected_utility_mc, query_probability, utility_of,
)
from iclsc.planner import PlanSpace, best_plan, count_plans, enumerate_plans
from iclsc.plans import IfThenElse, Seq, plan_depth, trans
from iclsc.strips import expected_reward, import_domain, persistence_benchmark
from iclsc.terms import S0

F = Fraction


def criterion(number, limit, label):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - start
                assert elapsed < limit, f"took {elapsed:.2f} s, limit {limit} s"
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                print(f"\ncriterion {number}: FAIL {label} ({elapsed:.2f} s): {exc}")
                raise
            print(f"\ncriterion {number}: PASS {label} ({elapsed:.2f} s < {limit} s)")
        return run
    return wrap


@criterion(1, 1.0, "marginal probability of at(key, r101, s0) is 13/20")
def test_criterion_01_marginal_probability():
    assert query_probability(office(), parse_term("at(key, r101, s0)")) == F(13, 20)


S1 = "do(goto(r101, direct), s0)"
WORKED = (
    "locked(door, s0)", "at_key_lo(r101, s0)", "would_not_fall_down_stairs(s0)",
    f"sensor_true_pos({S1})", f"pickup_succeeds({S1})",
    f"keeps_carrying(key, do(pickup(key), {S1}))",
)


@criterion(2, 1.0, "worked world has utility 1090")
def test_criterion_02_worked_world():
    th = office()
    tc = TotalChoice.from_atoms(th.choice_space, [parse_term(a) for a in WORKED])
    solver = WorldSolver(th.program, th.choice_space, tc)
    final = trans(office_plan(), solver.holds, S0)
    assert utility_of(th, tc, final) == 1090


@criterion(3, 1.0, "fall explanations: utility -810 each, mass 1/10")
def test_criterion_03_fall_mass():
    fall = parse_term("would_fall_down_stairs(s0)")
    report = expected_utility_exact(office(), office_plan())
    falls = [e for e in report.explanations if fall in e.choices.selected()]
    assert falls and all(e.utility == -810 for e in falls)
    assert sum(e.probability for e in falls) == F(1, 10)


@criterion(4, 30.0, "explanation masses sum to exactly 1")
def test_criterion_04_mass_conservation():
    assert expected_utility_exact(office(), office_plan()).mass == 1
    for seed in range(200):
        rng = random.Random(seed)
        th, plan = random_theory(rng), random_plan(rng)
        assert expected_utility_exact(th, plan).mass == 1, seed


@criterion(5, 120.0, "exact evaluation equals world enumeration")
def test_criterion_05_oracle_equivalence():
    plan = office_plan()
    assert (expected_utility_exact(office(), plan).expected_utility
            == expected_utility_enumerate(office(), plan, plan_depth(plan)).expected_utility)
    for seed in range(200):
        rng = random.Random(seed)
        th, plan = random_theory(rng), random_plan(rng)
        assert len(th.schemas) <= 5 and plan_depth(plan) <= 3
        exact = expected_utility_exact(th, plan).expected_utility
        assert exact == expected_utility_enumerate(th, plan, plan_depth(plan)).expected_utility, seed


@criterion(6, 60.0, "Monte Carlo within 3 SE in at least 9 of 10 seeds")
def test_criterion_06_monte_carlo():
    exact = float(expected_utility_exact(office(), office_plan()).expected_utility)
    hits = 0
    for seed in range(10):
        est, se = expected_utility_mc(office(), office_plan(), 100_000, seed)
        hits += abs(est - exact) <= 3 * se
    assert hits >= 9, hits


@criterion(7, 10.0, "pSTRIPS tuples 2^n, ICL clauses linear, n = 1..12")
def test_criterion_07_strips_separation():
    clauses = []
    for n in range(1, 13):
        (_, icl_size), (_, ps_size) = persistence_benchmark(n)
        assert ps_size.tuples == 2 ** n
        clauses.append(icl_size.clauses)
    assert len({b - a for a, b in zip(clauses, clauses[1:])}) == 1


@criterion(8, 120.0, "imported pSTRIPS theories match the simulator")
def test_criterion_08_strips_preservation():
    checked = 0
    for seed in range(100):
        domain = random_pstrips_domain(random.Random(seed))
        th = import_domain(domain)
        for plan in enumerate_plans(PlanSpace.of(th, 2, 1)):
            assert expected_utility_exact(th, plan).expected_utility == \
                expected_reward(domain, plan), (seed, plan)
            checked += 1
    assert checked > 1000


OFFICE_ACTIONS = ("goto(r101, direct)", "goto(r123, direct)", "pickup(key)")


def _branches_on_at_key(plan):
    if isinstance(plan, IfThenElse):
        return str(plan.cond) == "at_key"
    return isinstance(plan, Seq) and _branches_on_at_key(plan.second)


@criterion(9, 300.0, "best plan is optimal by exhaustion; sensing at_key helps")
def test_criterion_09_planner():
    th = office()
    acts = [parse_term(a) for a in OFFICE_ACTIONS]
    space = PlanSpace.of(th, 3, 1, actions=acts)
    plans = list(enumerate_plans(space))
    assert len(plans) == count_plans(space)
    values = [expected_utility_exact(th, p).expected_utility for p in plans]
    plan, report = best_plan(th, space)
    assert report.expected_utility == max(values)
    branching = [v for p, v in zip(plans, values) if _branches_on_at_key(p)]
    flat = [v for p, v in zip(plans, values) if plan_depth(p) == 3 and not _branches_on_at_key(p)
            and "if" not in str(p)]
    assert branching and flat and max(branching) >= max(flat)


@criterion(10, 1.0, "deleting the third prize clause is detected")
def test_criterion_10_utility_completeness(tmp_path, capsys):
    clause = "prize(0, S) <- ~in_lab(S) & ~crashed(S).\n"
    text = office_text()
    assert clause in text
    broken = text.replace(clause, "")
    witnesses = check_utility_complete(parse_domain(broken), office_plan())
    assert witnesses and witnesses[0].utilities == ()
    dom, plan = tmp_path / "broken.icl", tmp_path / "office.plan"
    dom.write_text(broken)
    plan.write_text(office_plan_text())
    assert main(["eval", str(dom), str(plan)]) != 0
    assert "not utility complete" in capsys.readouterr().err

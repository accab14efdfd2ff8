import json
from fractions import Fraction

import pytest

from helpers import office_plan_text, office_text
from iclsc.cli import main
from iclsc.dsl import parse_domain

PRIZE_ZERO = "prize(0, S) <- ~in_lab(S) & ~crashed(S).\n"

SMALL_STRIPS = """\
fluents lit
observe lit
reward lit 4
action toggle
  trigger lit
    1 -lit
  trigger ~lit
    0.75 +lit
    0.25
end
"""


@pytest.fixture
def files(tmp_path):
    dom = tmp_path / "office.icl"
    dom.write_text(office_text())
    plan = tmp_path / "office.plan"
    plan.write_text(office_plan_text())
    short = tmp_path / "short.plan"
    short.write_text("goto(r101, direct); pickup(key)\n")
    broken = tmp_path / "broken.icl"
    assert PRIZE_ZERO in office_text()
    broken.write_text(office_text().replace(PRIZE_ZERO, ""))
    ps = tmp_path / "lamp.pstrips"
    ps.write_text(SMALL_STRIPS)
    return {"dom": str(dom), "plan": str(plan), "short": str(short), "broken": str(broken),
            "ps": str(ps), "dir": tmp_path}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(files, capsys):
    code, out, _ = run(capsys, "validate", files["dom"], files["plan"])
    assert code == 0 and "ok" in out


def test_eval_reports_exact_fraction(files, capsys):
    code, out, _ = run(capsys, "eval", files["dom"], files["plan"], "--json")
    assert code == 0
    doc = json.loads(out)
    assert Fraction(doc["expected_utility"]) == Fraction(53784171, 100000)
    assert Fraction(doc["mass"]) == 1


def test_eval_oracle_agrees(files, capsys):
    code, out, _ = run(capsys, "eval", files["dom"], files["short"], "--oracle")
    assert code == 0 and "(agrees)" in out


def test_eval_with_mc_is_reproducible(files, capsys):
    args = ("eval", files["dom"], files["plan"], "--mc", "2000", "--seed", "9")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == 0 and first == second


def test_simulate_byte_identical(files, capsys):
    args = ("simulate", files["dom"], files["plan"], "--n", "50", "--seed", "3")
    code, out, _ = run(capsys, *args)
    assert code == 0 and len(out.splitlines()) == 51
    assert run(capsys, *args)[1] == out
    assert run(capsys, "simulate", files["dom"], files["plan"], "--n", "50", "--seed", "4")[1] != out


def test_incomplete_utility_fails(files, capsys):
    code, _, err = run(capsys, "eval", files["broken"], files["plan"])
    assert code == 1 and "not utility complete" in err


def test_missing_file(files, capsys):
    code, out, err = run(capsys, "validate", str(files["dir"] / "nope.icl"))
    assert code == 1 and out == "" and err.startswith("error: cannot read")


def test_parse_error_has_position(files, capsys):
    bad = files["dir"] / "bad.icl"
    bad.write_text("p <- q")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1 and "bad.icl:1:7:" in err


@pytest.mark.parametrize("argv", [[], ["eval", "x"], ["frobnicate"], ["simulate", "a", "b", "--n", "0", "--seed", "1"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_prob(files, capsys):
    code, out, _ = run(capsys, "prob", files["dom"], "at(key, r101, s0)")
    assert code == 0 and Fraction(out.split()[0]) == Fraction(13, 20)


def test_best_plan_restricted(files, capsys):
    code, out, _ = run(capsys, "best-plan", files["dom"], "--depth", "1", "--nesting", "1",
                       "--action", "pickup(key)", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["plan"] == "skip" and doc["expected_utility"] == "200"


def test_best_plan_limit(files, capsys):
    code, _, err = run(capsys, "best-plan", files["dom"], "--depth", "3", "--nesting", "1",
                       "--limit", "10")
    assert code == 1 and "--limit" in err


def test_import_strips(files, capsys):
    code, out, _ = run(capsys, "import-strips", files["ps"])
    assert code == 0
    th = parse_domain(out)
    assert len(th.schemas) == 2 and th.observables


def test_bench_strips(capsys):
    code, out, _ = run(capsys, "bench-strips", "--max-n", "5", "--json")
    doc = json.loads(out)
    assert code == 0 and [r[0] for r in doc["rows"]] == [1, 2, 3, 4, 5]
    tuples = doc["rows"][-1][doc["columns"].index("pstrips_tuples")]
    assert tuples == 32
    code, table, _ = run(capsys, "bench-strips", "--max-n", "3")
    assert len(table.splitlines()) == 4

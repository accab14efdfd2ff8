"""Command line interface: ``iclsc <command> ...``.

Exit status is 0 on success, 1 for validation or evaluation errors (including
missing files) and 2 for usage errors. Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import strips
from .choices import validate_theory
from .dsl import parse_domain, parse_formula, parse_plan, parse_term, print_domain
from .errors import ICLError, ParseError
from .evaluation import (
    check_utility_complete,
    expected_utility_enumerate,
    expected_utility_exact,
    expected_utility_mc,
    query_probability,
    simulate,
)
from .planner import PlanSpace, best_plan, count_plans
from .plans import plan_depth
from .report import mc_text, report_json, report_text, sample_line
from .terms import fraction_str


class _Fail(Exception):
    """Abort the command with exit status 1."""


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Fail(f"cannot read {path}: {exc.strerror or exc}") from None


def _parse(path: str, parser):
    text = _read(path)
    try:
        return parser(text)
    except ParseError as exc:
        raise _Fail(f"{path}:{exc}") from None


def _load(domain_path: str, plan_path: Optional[str] = None):
    theory = _parse(domain_path, parse_domain)
    plan = _parse(plan_path, parse_plan) if plan_path else None
    problems = validate_theory(theory, [plan] if plan is not None else [])
    if problems:
        raise _Fail("\n".join(f"{domain_path}: {v}" for v in problems))
    return theory, plan


def _out(text: str) -> None:
    sys.stdout.write(text)


def cmd_validate(args) -> int:
    theory, _ = _load(args.domain, args.plan)
    _out(f"{args.domain}: ok ({len(theory.schemas)} alternatives, "
         f"{len(theory.program.clauses)} clauses, {len(theory.actions)} actions, "
         f"{len(theory.observables)} observables)\n")
    return 0


def cmd_eval(args) -> int:
    theory, plan = _load(args.domain, args.plan)
    witnesses = check_utility_complete(theory, plan)
    if witnesses:
        raise _Fail("\n".join(["not utility complete:"] + [f"  {w}" for w in witnesses]))
    report = expected_utility_exact(theory, plan)
    _out(report_json(report, plan) if args.json else report_text(report, plan))
    if args.mc is not None:
        est, se = expected_utility_mc(theory, plan, args.mc, args.seed)
        _out(mc_text(est, se, args.mc, args.seed))
    if args.oracle:
        horizon = args.horizon if args.horizon is not None else plan_depth(plan)
        oracle = expected_utility_enumerate(theory, plan, horizon)
        if oracle.expected_utility != report.expected_utility:
            raise _Fail(
                f"oracle mismatch: exact {fraction_str(report.expected_utility)} != "
                f"enumerated {fraction_str(oracle.expected_utility)}"
            )
        _out(f"oracle: {fraction_str(oracle.expected_utility)} over "
             f"{len(oracle.explanations)} worlds (agrees)\n")
    return 0


def cmd_prob(args) -> int:
    theory, _ = _load(args.domain)
    try:
        query = parse_formula(args.query)
    except ParseError as exc:
        raise _Fail(f"query:{exc}") from None
    p = query_probability(theory, query)
    _out(f"{fraction_str(p)} (~{float(p):.6g})\n")
    return 0


def cmd_best_plan(args) -> int:
    theory, _ = _load(args.domain)
    try:
        actions = [parse_term(a) for a in args.action] if args.action else None
        observables = [parse_term(o) for o in args.observable] if args.observable else None
    except ParseError as exc:
        raise _Fail(f"argument:{exc}") from None
    if args.no_observables:
        observables = []
    space = PlanSpace.of(theory, args.depth, args.nesting, actions, observables)
    total = count_plans(space)
    if args.limit is not None and total > args.limit:
        raise _Fail(f"plan space has {total} plans, more than --limit {args.limit}")
    plan, report = best_plan(theory, space)
    if args.json:
        doc = json.loads(report_json(report, plan))
        doc["plans_considered"] = total
        _out(json.dumps(doc, indent=2) + "\n")
    else:
        _out(f"plans considered: {total}\n")
        _out(report_text(report, plan))
    return 0


def cmd_simulate(args) -> int:
    theory, plan = _load(args.domain, args.plan)
    samples = simulate(theory, plan, args.n, args.seed)
    for s in samples:
        _out(sample_line(s) + "\n")
    if samples:
        mean = sum(float(s.utility) for s in samples) / len(samples)
        _out(f"mean\t{mean:.6f}\n")
    return 0


def cmd_import_strips(args) -> int:
    domain = _parse(args.file, strips.parse_pstrips)
    theory = strips.import_domain(domain)
    _out(print_domain(theory))
    return 0


def cmd_bench_strips(args) -> int:
    doc = strips.benchmark_report(args.max_n)
    _out(strips.size_report_json(doc) if args.json else strips.format_size_table(doc))
    return 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _natural(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="iclsc", description="Decision-theoretic planning "
                                 "with the independent choice logic and situation calculus.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a domain (and optionally a plan)")
    p.add_argument("domain")
    p.add_argument("plan", nargs="?")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("eval", help="expected utility of a plan")
    p.add_argument("domain")
    p.add_argument("plan")
    p.add_argument("--mc", type=_positive, metavar="N", help="also estimate by Monte Carlo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against brute-force world enumeration")
    p.add_argument("--horizon", type=_natural, help="situation depth for --oracle")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("prob", help="probability of a ground query formula")
    p.add_argument("domain")
    p.add_argument("query")
    p.set_defaults(run=cmd_prob)

    p = sub.add_parser("best-plan", help="exhaustive search for a best plan")
    p.add_argument("domain")
    p.add_argument("--depth", type=_natural, required=True,
                   help="maximum primitive actions per branch")
    p.add_argument("--nesting", type=_natural, required=True,
                   help="maximum branch nesting")
    p.add_argument("--action", action="append", metavar="TERM",
                   help="restrict to this action (repeatable)")
    p.add_argument("--observable", action="append", metavar="TERM",
                   help="restrict to this observable (repeatable)")
    p.add_argument("--no-observables", action="store_true")
    p.add_argument("--limit", type=_positive, help="refuse spaces with more plans")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_best_plan)

    p = sub.add_parser("simulate", help="per-sample Monte Carlo trace")
    p.add_argument("domain")
    p.add_argument("plan")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("import-strips", help="translate a pSTRIPS file to domain syntax")
    p.add_argument("file")
    p.set_defaults(run=cmd_import_strips)

    p = sub.add_parser("bench-strips", help="representation size, ICL vs pSTRIPS")
    p.add_argument("--max-n", type=_positive, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_bench_strips)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ICLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RecursionError:
        print("error: recursion limit reached (is the program acyclic?)", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Text and JSON renderings of evaluation results."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional

from .evaluation import EUReport, Sample
from .terms import format_term, fraction_str


def _decimal(q: Fraction) -> float:
    return float(q)


def report_document(report: EUReport, plan=None) -> dict:
    doc = {
        "expected_utility": fraction_str(report.expected_utility),
        "expected_utility_decimal": _decimal(report.expected_utility),
        "mass": fraction_str(report.mass),
        "explanations": [
            {
                "choices": [format_term(a) for a in e.choices.selected()],
                "probability": fraction_str(e.probability),
                "final_situation": format_term(e.final_situation),
                "utility": fraction_str(e.utility),
            }
            for e in report.explanations
        ],
    }
    if plan is not None:
        doc = {"plan": str(plan), **doc}
    return doc


def report_json(report: EUReport, plan=None) -> str:
    return json.dumps(report_document(report, plan), indent=2) + "\n"


def report_text(report: EUReport, plan=None) -> str:
    lines = []
    if plan is not None:
        lines.append(f"plan: {plan}")
    eu = report.expected_utility
    lines.append(f"expected utility: {fraction_str(eu)} (~{_decimal(eu):.6g})")
    lines.append(f"explanations: {len(report.explanations)}, mass {fraction_str(report.mass)}")
    for e in report.explanations:
        choices = ", ".join(format_term(a) for a in e.choices.selected()) or "(none)"
        lines.append(
            f"  p={fraction_str(e.probability)}  u={fraction_str(e.utility)}  "
            f"{choices}  -> {format_term(e.final_situation)}"
        )
    return "\n".join(lines) + "\n"


def mc_text(estimate: float, stderr: float, n: int, seed: int,
            exact: Optional[Fraction] = None) -> str:
    line = f"monte carlo: {estimate:.6f} +/- {stderr:.6f} (n={n}, seed={seed})"
    if exact is not None:
        line += f"; exact {fraction_str(exact)}"
    return line + "\n"


def sample_line(s: Sample) -> str:
    choices = ", ".join(format_term(a) for a in s.choices.selected())
    return f"{s.index}\t{fraction_str(s.utility)}\t{format_term(s.final_situation)}\t{choices}"

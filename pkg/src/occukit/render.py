"""Serialization of exact results to JSON/CSV-friendly structures.

Rationals travel as decimal strings of numerator and denominator so a parsed
file reproduces the in-memory value exactly; the float ``approx`` field is
advisory display sugar only.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from math import inf
from typing import Any, Mapping

from .inequality import InductionAudit, InequalityVerdict, ReducedCheck, SweepSummary
from .moments import MomentReport
from .oracle import ComparisonReport, EmpiricalMoments, ExactPmf


def approx_float(q: Fraction) -> float:
    try:
        return float(q)
    except OverflowError:
        return inf if q > 0 else -inf


def approx_str(q: Fraction, digits: int = 12) -> str:
    """Decimal rendering to the given number of significant digits."""
    if digits < 1:
        raise ValueError(f"need at least one digit, got {digits}")
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def fraction_json(q: Fraction) -> dict[str, Any]:
    return {
        "num": str(q.numerator),
        "den": str(q.denominator),
        "approx": approx_float(q),
    }


def fraction_from_json(obj: Mapping[str, Any]) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


VERDICT_CSV_COLUMNS = (
    "n", "T", "r", "m", "p", "class", "lhs", "rhs",
    "margin_num", "margin_den", "holds",
)


def verdict_csv_row(v: InequalityVerdict) -> tuple[str, ...]:
    return (
        str(v.params.n),
        str(v.params.T),
        str(len(v.p)),
        ";".join(str(x) for x in v.params.m),
        ";".join(str(x) for x in v.p),
        v.proximity.value,
        f"{v.lhs.numerator}/{v.lhs.denominator}",
        f"{v.rhs.numerator}/{v.rhs.denominator}",
        str(v.margin.numerator),
        str(v.margin.denominator),
        "true" if v.holds else "false",
    )


def verdict_json_dict(v: InequalityVerdict) -> dict[str, Any]:
    return {
        "n": v.params.n,
        "T": v.params.T,
        "r": len(v.p),
        "m": list(v.params.m),
        "p": list(v.p),
        "class": v.proximity.value,
        "lhs": fraction_json(v.lhs),
        "rhs": fraction_json(v.rhs),
        "margin": fraction_json(v.margin),
        "margin_display": approx_str(v.margin),
        "holds": v.holds,
    }


def summary_json_dict(s: SweepSummary) -> dict[str, Any]:
    out: dict[str, Any] = {
        "type": "summary",
        "total": s.total,
        "holds": s.holds_count,
        "violations": s.violation_count,
        "by_class": dict(s.by_class),
        "violations_by_class": dict(s.violations_by_class),
    }
    if s.min_margin is not None:
        out["min_margin"] = fraction_json(s.min_margin)
        n, m, p = s.min_margin_at
        out["min_margin_at"] = {"n": n, "m": list(m), "p": list(p)}
    return out


def moment_report_json_dict(r: MomentReport) -> dict[str, Any]:
    return {
        "n": r.params.n,
        "m": list(r.params.m),
        "t": r.t,
        "mode": r.mode.value,
        "raw_moments": [
            {"order": v, **fraction_json(q)}
            for v, q in enumerate(r.raw_moments, start=1)
        ],
        "mean": fraction_json(r.mean),
        "variance": fraction_json(r.variance),
        "delta_ev": fraction_json(r.delta_ev),
    }


def pmf_json_dict(pmf: ExactPmf) -> dict[str, Any]:
    return {
        "n": pmf.params.n,
        "m": list(pmf.params.m),
        "t": pmf.t,
        "mode": pmf.mode.value,
        "outcomes": str(pmf.outcome_count),
        "pmf": {
            str(x): {"num": str(q.numerator), "den": str(q.denominator)}
            for x, q in pmf.probabilities.items()
        },
    }


def empirical_json_dict(e: EmpiricalMoments) -> dict[str, Any]:
    return {
        "trials": e.trials,
        "seed": e.seed,
        "estimates": [
            {"order": v, "value": est, "stderr": se}
            for v, (est, se) in enumerate(
                zip(e.raw_moment_estimates, e.standard_errors), start=1
            )
        ],
        "histogram": list(e.occupancy_histogram),
    }


def comparison_json_dict(c: ComparisonReport) -> dict[str, Any]:
    rows = []
    for row in c.rows:
        item: dict[str, Any] = {
            "order": row.order,
            "formula": fraction_json(row.formula),
        }
        if row.oracle is not None:
            item["oracle"] = fraction_json(row.oracle)
            item["equal"] = row.matches
        if row.estimate is not None:
            item["estimate"] = row.estimate
            item["stderr"] = row.stderr
            item["z"] = row.z_score
        rows.append(item)
    out: dict[str, Any] = {
        "n": c.params.n,
        "m": list(c.params.m),
        "t": c.t,
        "mode": c.mode.value,
        "method": c.method,
        "rows": rows,
    }
    if c.trials is not None:
        out["trials"] = c.trials
        out["seed"] = c.seed
    return out


def reduced_json_dict(r: ReducedCheck) -> dict[str, Any]:
    return {
        "lhs": fraction_json(r.lhs),
        "rhs": fraction_json(r.rhs),
        "holds": r.holds,
    }


def audit_json_dict(a: InductionAudit) -> dict[str, Any]:
    return {
        "m": a.m,
        "lhs_monotone_in_n": a.lhs_monotone_in_n,
        "rhs_monotone_in_n": a.rhs_monotone_in_n,
        "all_ok": a.all_ok,
        "rows": [
            {
                "T": row.T,
                "n": row.n,
                "lhs_ratio": fraction_json(row.lhs_ratio),
                "rhs_ratio": fraction_json(row.rhs_ratio),
                "ok": row.ok,
            }
            for row in a.rows
        ],
    }

"""Acceptance suite: one test per criterion, each printing a PASS line with
its tally when it completes. Run with ``pytest tests/test_acceptance.py -v -s``.

All equality assertions are exact rational comparisons; the only tolerances
anywhere are the Monte Carlo z-score bound (5 standard errors) and the
wall-clock target for the large dynamic program (10 seconds).
"""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction

import pytest

from occukit.combinat import stirling2
from occukit.core import Params, SizeSpec, weight_sum_dp, weight_sum_naive
from occukit.errors import DegenerateDenominatorError
from occukit.inequality import (
    GridSpec,
    audit_induction_step,
    check_inequality,
    factorization_identity_check,
    full_size_reduction,
    grid_search,
    induction_profile,
    near_full_size_reduction,
    summarize_sweep,
)
from occukit.moments import TailMode, delta_ev_bound_check, moment_report, raw_moment
from occukit.oracle import (
    DEFAULT_BUDGET,
    exhaustive_outcome_count,
    exhaustive_pmf,
    monte_carlo,
)

STIRLING_TABLE = {
    1: [1],
    2: [1, 1],
    3: [1, 3, 1],
    4: [1, 7, 6, 1],
    5: [1, 15, 25, 10, 1],
    6: [1, 31, 90, 65, 15, 1],
}


def _oracle_family():
    """Every instance with n in [2,6], T in [1,3], draw sizes in [1, n-1]."""
    for n in range(2, 7):
        for T in range(1, 4):
            for m in itertools.product(range(1, n), repeat=T):
                yield Params(n, m)


def test_criterion_1_stirling_table_fidelity():
    for v, row in STIRLING_TABLE.items():
        computed = [stirling2(v, i) for i in range(1, v + 1)]
        assert computed == row, f"row v={v}: {computed} != {row}"
    print("ACCEPTANCE 1 stirling-table-fidelity: PASS (all rows v<=6 exact)")


def test_criterion_2_moment_oracle_equivalence():
    checks = 0
    skips = []
    for params in _oracle_family():
        for t in range(1, params.T + 1):
            for mode in TailMode:
                pmf = exhaustive_pmf(params, t, mode)
                for v in (1, 2, 3):
                    if v > params.n:
                        with pytest.raises(DegenerateDenominatorError):
                            raw_moment(params, t, mode, v)
                        skips.append((params.n, params.m, t, mode.value, v))
                        continue
                    formula = raw_moment(params, t, mode, v)
                    truth = pmf.moment(v)
                    assert formula == truth, (
                        f"mismatch at n={params.n} m={params.m} t={t} "
                        f"mode={mode.value} v={v}: {formula} != {truth}"
                    )
                    checks += 1
    assert checks > 0 and skips, "family construction degenerated"
    assert all(v > n for n, _, _, _, v in skips), "skipped a non-degenerate case"
    print(
        f"ACCEPTANCE 2 moment-oracle-equivalence: PASS "
        f"({checks} exact equalities, {len(skips)} skips, all with order > n)"
    )


def test_criterion_3_mean_variance_gap_bounds():
    checked = 0
    ties = 0
    for params in _oracle_family():
        for t in range(1, params.T + 1):
            for mode in TailMode:
                report = moment_report(params, t, mode, max_order=2)
                if report.mean == 0:
                    continue
                verdict = delta_ev_bound_check(report)
                if report.mean != report.variance:
                    assert verdict.holds_positive, (
                        f"gap not positive at n={params.n} m={params.m} "
                        f"t={t} mode={mode.value}"
                    )
                else:
                    ties += 1
                assert verdict.holds_upper, (
                    f"gap above 2*mean^2 at n={params.n} m={params.m} "
                    f"t={t} mode={mode.value}"
                )
                checked += 1
    print(
        f"ACCEPTANCE 3 mean-variance-gap: PASS "
        f"({checked} instances, {ties} mean==variance ties)"
    )


def test_criterion_4_factorization_identity():
    rng = random.Random(20250404)
    instances = 0
    while instances < 200:
        n = rng.randint(2, 12)
        T = rng.randint(1, 8)
        m = tuple(rng.randint(1, n) for _ in range(T))
        r = rng.randint(1, 3)
        p = tuple(rng.randint(0, T) for _ in range(r))
        domain = 1
        for pj in p:
            domain *= len(list(itertools.combinations(range(T), pj)))
        if domain > 20_000:
            continue
        assert factorization_identity_check(Params(n, m), p), (
            f"identity failed at n={n} m={m} p={p}"
        )
        instances += 1
    print(f"ACCEPTANCE 4 factorization-identity: PASS ({instances} instances)")


def test_criterion_5_inequality_sweep_conservative():
    grid = GridSpec(
        n_values=range(3, 11),
        T_values=range(1, 6),
        r_values=(2, 3),
        m_policy="mixed",
        p_policy="proximity",
    )
    summary = summarize_sweep(grid_search(grid))
    assert summary.min_margin is not None  # margins are tracked, not discarded
    assert summary.violation_count == 0, (
        f"{summary.violation_count} violations; first: "
        f"{summary.first_violations[:3]}"
    )
    print(
        f"ACCEPTANCE 5 inequality-sweep: PASS ({summary.total} grid points, "
        f"0 violations, min margin {summary.min_margin} at "
        f"{summary.min_margin_at})"
    )


def test_criterion_6_closed_form_reductions():
    # (a) full-size reduction vs the general check, across the sweep grid's
    # instance classes (both sides depend only on the multiset of m).
    full_checked = 0
    for n in range(3, 11):
        for T in range(1, 6):
            for m in itertools.combinations_with_replacement(range(1, n), T):
                params = Params(n, m)
                reduced = full_size_reduction(params)
                general = check_inequality(params, (T, T))
                assert reduced.holds == general.holds, (n, m)
                full_checked += 1

    # (b) near-full-size reduction vs the general check on uniform draws.
    near_checked = 0
    for n in range(3, 11):
        for T in range(1, 6):
            for m in range(2, n):
                if T == 1 and n == m + 1:
                    with pytest.raises(ValueError):
                        near_full_size_reduction(n, m, T)
                    continue
                reduced = near_full_size_reduction(n, m, T)
                general = check_inequality(Params(n, (m,) * T), (T - 1, T - 1))
                assert reduced.holds == general.holds, (n, m, T)
                near_checked += 1

    # (c) the minimal-case profile and quadratic.
    assert induction_profile(2) == Fraction(9, 8)
    for m in range(2, 101):
        assert m * m - m + 2 > 0
        assert 4 * m * (m + 1) - (3 * m - 1) * (m + 2) == m * m - m + 2

    # (d) induction-step audit at minimal admissible n and at n = m + 10.
    audit_rows = 0
    for m in range(2, 11):
        audit = audit_induction_step(
            m, range(1, 11), n_offsets=(0,), extra_n=(m + 10,)
        )
        assert audit.all_ok, f"audit failure for m={m}: {audit.rows}"
        assert audit.lhs_monotone_in_n and audit.rhs_monotone_in_n
        audit_rows += len(audit.rows)
    print(
        f"ACCEPTANCE 6 closed-form-reductions: PASS "
        f"({full_checked} full-size, {near_checked} near-full agreements, "
        f"profile and quadratic for m<=100, {audit_rows} audit rows ok)"
    )


def test_criterion_7_dp_naive_equivalence_and_speed():
    rng = random.Random(20250707)
    instances = 0
    while instances < 200:
        n = rng.randint(1, 12)
        T = rng.randint(1, 12)
        m = tuple(rng.randint(1, n) for _ in range(T))
        r = rng.randint(0, 3)
        entries = []
        for _ in range(r):
            if rng.random() < 0.5:
                entries.append(rng.randint(0, T))
            else:
                width = rng.randint(1, min(T + 1, 4))
                entries.append(set(rng.sample(range(T + 1), width)))
        spec = SizeSpec.coerce(entries)
        domain = 1
        for entry in spec.entries:
            domain *= sum(
                len(list(itertools.combinations(range(T), s))) for s in entry
            )
        if domain > 20_000:
            continue
        params = Params(n, m)
        assert weight_sum_dp(params, spec) == weight_sum_naive(params, spec), (
            f"dp != naive at n={n} m={m} spec={spec.describe()}"
        )
        instances += 1

    # literal cross-check at the largest naive-feasible shape
    wide = Params(100, (40,) * 12)
    assert weight_sum_dp(wide, [4, 4]) == weight_sum_naive(wide, [4, 4])

    # engineering target: the big instance finishes within 10 seconds
    big = Params(100, (40,) * 60)
    start = time.perf_counter()
    value = weight_sum_dp(big, [20, 20, 20])
    elapsed = time.perf_counter() - start
    assert value > 0
    assert elapsed < 10.0, f"large DP took {elapsed:.2f}s"
    print(
        f"ACCEPTANCE 7 dp-naive-equivalence: PASS ({instances} instances, "
        f"T=12 literal cross-check, T=60 DP in {elapsed:.2f}s < 10s)"
    )


MC_CONFIGS = (
    (Params(40, (12, 15, 18)), 2, TailMode.AT_LEAST, 101),
    (Params(40, (10, 10, 10)), 1, TailMode.EXACTLY, 202),
    (Params(50, (20, 25)), 2, TailMode.AT_LEAST, 303),
    (Params(35, (14, 7, 21)), 3, TailMode.EXACTLY, 404),
    (Params(60, (30, 30)), 1, TailMode.EXACTLY, 505),
)


def test_criterion_8_monte_carlo_consistency():
    trials = 1_000_000
    worst = 0.0
    for params, t, mode, seed in MC_CONFIGS:
        assert exhaustive_outcome_count(params) > DEFAULT_BUDGET
        result = monte_carlo(params, t, mode, trials, seed, max_order=2)
        for order in (1, 2):
            exact = float(raw_moment(params, t, mode, order))
            est = result.raw_moment_estimates[order - 1]
            se = result.standard_errors[order - 1]
            assert se > 0, f"degenerate stderr at {params}"
            z = abs(est - exact) / se
            worst = max(worst, z)
            assert z <= 5, (
                f"|z|={z:.2f} > 5 at n={params.n} m={params.m} t={t} "
                f"mode={mode.value} order={order}"
            )
    params, t, mode, seed = MC_CONFIGS[0]
    serial = monte_carlo(params, t, mode, trials, seed, max_order=2)
    threaded = monte_carlo(params, t, mode, trials, seed, max_order=2, threads=4)
    assert serial == threaded, "estimates depend on the worker count"
    print(
        f"ACCEPTANCE 8 monte-carlo-consistency: PASS (5 configs x {trials} "
        f"trials, worst |z|={worst:.2f} <= 5, thread-count invariant)"
    )

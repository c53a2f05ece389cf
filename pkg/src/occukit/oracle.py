"""Ground-truth engines for the occupancy distribution.

Two independent routes, deliberately disjoint from the norm/moment machinery
they validate:

* :func:`exhaustive_pmf` enumerates every possible T-tuple of draws (uniform
  product measure) and tallies occupancy counts into an exact rational pmf.
  Feasible only while ``prod C(n, m_i)`` stays within a budget.
* :func:`monte_carlo` samples draw tuples with a counter-based RNG and
  reports moment estimates with standard errors. Randomness for a trial is a
  pure function of ``(seed, trial index)``: trials are processed in
  fixed-size blocks, each owning a disjoint Philox counter range, so results
  are bit-identical no matter how many workers run the blocks.

Subset draws use a partial Fisher-Yates shuffle (first ``m_i`` positions of
an index array), vectorised across a block; integer picks go through the
generator's exact bounded sampler, so every subset is uniform.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.random import Generator, Philox

from .combinat import binomial
from .core import Params
from .errors import BudgetExceededError
from .moments import TailMode, raw_moment, threshold_sizes

DEFAULT_BUDGET = 10_000_000

_BLOCK_TRIALS = 1 << 15
_MASK64 = (1 << 64) - 1


def exhaustive_outcome_count(params: Params) -> int:
    """Number of draw tuples the exhaustive enumerator must visit."""
    out = 1
    for m_i in params.m:
        out *= binomial(params.n, m_i)
    return out


@lru_cache(maxsize=256)
def _coverage_profile_counts(params: Params) -> dict[tuple[int, ...], int]:
    """Joint tally of the coverage-count histogram over all draw tuples.

    For each tuple of draws, ``hist[c]`` is the number of population elements
    covered exactly ``c`` times; the map sends each histogram to how many
    tuples realise it. Every pmf of this instance derives from the tally.
    """
    n, T = params.n, params.T
    per_draw = [list(itertools.combinations(range(n), m_i)) for m_i in params.m]
    tally: dict[tuple[int, ...], int] = {}
    for combo in itertools.product(*per_draw):
        cover = [0] * n
        for subset in combo:
            for e in subset:
                cover[e] += 1
        hist = [0] * (T + 1)
        for c in cover:
            hist[c] += 1
        key = tuple(hist)
        tally[key] = tally.get(key, 0) + 1
    return tally


@dataclass(slots=True)
class ExactPmf:
    """Exact pmf of one occupancy count, with rational probabilities."""

    params: Params
    t: int
    mode: TailMode
    probabilities: dict[int, Fraction]
    outcome_count: int

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(x for x, p in self.probabilities.items() if p != 0))

    def moment(self, order: int) -> Fraction:
        if order < 0:
            raise ValueError(f"moment order must be >= 0, got {order}")
        return sum(
            (p * x**order for x, p in self.probabilities.items()), Fraction(0)
        )

    @property
    def mean(self) -> Fraction:
        return self.moment(1)


def exhaustive_pmf(
    params: Params, t: int, mode: TailMode, budget: int = DEFAULT_BUDGET
) -> ExactPmf:
    """Exact distribution of the occupancy count by full enumeration."""
    threshold_sizes(params.T, t, mode)  # validates t
    count = exhaustive_outcome_count(params)
    if count > budget:
        raise BudgetExceededError(count, budget)
    tally = _coverage_profile_counts(params)
    by_x: dict[int, int] = {}
    for hist, tuples in tally.items():
        if mode is TailMode.EXACTLY:
            x = hist[t]
        else:
            x = sum(hist[t:])
        by_x[x] = by_x.get(x, 0) + tuples
    probabilities = {x: Fraction(c, count) for x, c in sorted(by_x.items())}
    total = sum(probabilities.values())
    if total != 1:
        raise AssertionError(f"pmf does not sum to 1: {total}")
    return ExactPmf(
        params=params, t=t, mode=mode, probabilities=probabilities,
        outcome_count=count,
    )


def _block_generator(seed: int, block_index: int) -> Generator:
    key = [seed & _MASK64, (seed >> 64) & _MASK64]
    counter = [0, 0, block_index & _MASK64, (block_index >> 64) & _MASK64]
    return Generator(Philox(counter=counter, key=key))


def _block_selections(params: Params, gen: Generator, size: int) -> list[np.ndarray]:
    """Partial Fisher-Yates per trial row, vectorised over a block.

    Returns, per draw, a ``(size, m_i)`` array of selected element indices.
    """
    n = params.n
    rows = np.arange(size)
    out = []
    for m_i in params.m:
        perm = np.tile(np.arange(n, dtype=np.int32), (size, 1))
        for j in range(m_i):
            idx = gen.integers(j, n, size=size)
            front = perm[rows, j].copy()
            perm[rows, j] = perm[rows, idx]
            perm[rows, idx] = front
        out.append(perm[:, :m_i])
    return out


def _block_histogram(
    params: Params, t: int, mode: TailMode, seed: int, block_index: int, size: int
) -> np.ndarray:
    gen = _block_generator(seed, block_index)
    n = params.n
    counts = np.zeros((size, n), dtype=np.int16)
    rows_col = np.arange(size)[:, None]
    for sel in _block_selections(params, gen, size):
        counts[rows_col, sel] += 1
    if mode is TailMode.EXACTLY:
        x = (counts == t).sum(axis=1)
    else:
        x = (counts >= t).sum(axis=1)
    return np.bincount(x, minlength=n + 1)


def _blocks(trials: int) -> list[tuple[int, int]]:
    full, rem = divmod(trials, _BLOCK_TRIALS)
    out = [(i, _BLOCK_TRIALS) for i in range(full)]
    if rem:
        out.append((full, rem))
    return out


@dataclass(frozen=True, slots=True)
class EmpiricalMoments:
    """Monte Carlo moment estimates for one (instance, threshold, mode)."""

    trials: int
    seed: int
    raw_moment_estimates: tuple[float, ...]  # index v-1 holds the E(x^v) estimate
    standard_errors: tuple[float, ...]
    occupancy_histogram: tuple[int, ...]  # exact trial counts per occupancy value


def monte_carlo(
    params: Params,
    t: int,
    mode: TailMode,
    trials: int,
    seed: int,
    *,
    max_order: int = 4,
    threads: int = 1,
) -> EmpiricalMoments:
    """Estimate raw moments by simulation; reproducible per (seed, trials).

    The per-trial occupancy values are tallied into an exact integer
    histogram, so the accumulation is order-independent and the final
    estimates do not depend on the worker count.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    threshold_sizes(params.T, t, mode)
    blocks = _blocks(trials)

    def run(block: tuple[int, int]) -> np.ndarray:
        index, size = block
        return _block_histogram(params, t, mode, seed, index, size)

    hist = np.zeros(params.n + 1, dtype=np.int64)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for partial in pool.map(run, blocks):
                hist += partial
    else:
        for block in blocks:
            hist += run(block)

    counts = tuple(int(c) for c in hist)
    power_sum = {
        w: sum(c * x**w for x, c in enumerate(counts))
        for w in range(1, 2 * max_order + 1)
    }
    estimates = []
    errors = []
    for v in range(1, max_order + 1):
        estimates.append(float(Fraction(power_sum[v], trials)))
        if trials > 1:
            var_num = trials * power_sum[2 * v] - power_sum[v] ** 2
            errors.append(
                math.sqrt(float(Fraction(var_num, trials**2 * (trials - 1))))
            )
        else:
            errors.append(float("nan"))
    return EmpiricalMoments(
        trials=trials,
        seed=seed,
        raw_moment_estimates=tuple(estimates),
        standard_errors=tuple(errors),
        occupancy_histogram=counts,
    )


def element_inclusion_counts(
    params: Params, trials: int, seed: int
) -> list[list[int]]:
    """Per (draw, element) tallies of how often each element was selected.

    Diagnostic for the sampler's marginals: every tally divided by ``trials``
    should sit near ``m_i / n``.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    acc = np.zeros((params.T, params.n), dtype=np.int64)
    for index, size in _blocks(trials):
        gen = _block_generator(seed, index)
        for d, sel in enumerate(_block_selections(params, gen, size)):
            acc[d] += np.bincount(sel.ravel(), minlength=params.n)
    return [[int(c) for c in row] for row in acc]


class ComparisonRow(NamedTuple):
    order: int
    formula: Fraction
    oracle: Fraction | None = None
    matches: bool | None = None
    estimate: float | None = None
    stderr: float | None = None
    z_score: float | None = None


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    params: Params
    t: int
    mode: TailMode
    method: str  # "exhaustive" | "monte-carlo"
    rows: tuple[ComparisonRow, ...]
    trials: int | None = None
    seed: int | None = None

    @property
    def all_equal(self) -> bool:
        return all(row.matches for row in self.rows if row.matches is not None)


def compare_report(
    params: Params,
    t: int,
    mode: TailMode,
    max_order: int = 3,
    *,
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
    trials: int = 1_000_000,
    seed: int = 0,
    threads: int = 1,
) -> ComparisonReport:
    """Moment formula vs. ground truth, order by order.

    The exhaustive route asserts exact rational equality; the Monte Carlo
    route reports z-scores against the simulation's standard errors. With
    ``method="auto"`` the exhaustive route is taken whenever the instance
    fits the enumeration budget.
    """
    if method not in ("auto", "exhaustive", "monte-carlo"):
        raise ValueError(f"unknown comparison method {method!r}")
    if method == "auto":
        method = (
            "exhaustive"
            if exhaustive_outcome_count(params) <= budget
            else "monte-carlo"
        )
    rows = []
    if method == "exhaustive":
        pmf = exhaustive_pmf(params, t, mode, budget=budget)
        for v in range(1, max_order + 1):
            formula = raw_moment(params, t, mode, v)
            truth = pmf.moment(v)
            rows.append(
                ComparisonRow(
                    order=v, formula=formula, oracle=truth,
                    matches=formula == truth,
                )
            )
        return ComparisonReport(
            params=params, t=t, mode=mode, method=method, rows=tuple(rows)
        )
    emp = monte_carlo(
        params, t, mode, trials, seed, max_order=max_order, threads=threads
    )
    for v in range(1, max_order + 1):
        formula = raw_moment(params, t, mode, v)
        est = emp.raw_moment_estimates[v - 1]
        se = emp.standard_errors[v - 1]
        expected = float(formula)
        if se > 0:
            z = (est - expected) / se
        else:
            z = 0.0 if est == expected else math.inf
        rows.append(
            ComparisonRow(
                order=v, formula=formula, estimate=est, stderr=se, z_score=z
            )
        )
    return ComparisonReport(
        params=params, t=t, mode=mode, method=method, rows=tuple(rows),
        trials=trials, seed=seed,
    )

"""Product-vs-joint norm inequality: single checks, grid sweeps, and the
closed-form reductions that cross-check the general machinery.

The claim under test: for slot sizes ``p_1, ..., p_r`` whose spread
``max(p_i) - min(p_i)`` is at most 1, the product of single-slot norms
dominates the joint norm,

    prod over j of ||(p_j)||  >=  ||(p_1, ..., p_r)||.

Empirically the domination extends to spread up to ``max(1, r - 2)``; beyond
that it can fail (see ``grid_search``, which never suppresses a violation;
mapping the boundary is the point). A sweep classifies every size vector by
its spread: ``conservative`` (<= 1), ``relaxed`` (<= max(1, r - 2)), or
``unconstrained``.

Closed forms implemented as independent cross-checks, all for two slots:

* every slot at full size ``p = T`` reduces to
  ``(1 - 1/n)^(T-1) >= prod (1 - 1/m_i)``;
* every slot at size ``T - 1`` with uniform draw sizes ``m`` reduces to a
  scalar inequality in ``(n, m, T)``;
* the induction step for the latter reduces to a ratio inequality whose two
  sides are rational in ``(n, m, T)``; ``audit_induction_step`` evaluates it
  on a lattice of admissible ``n`` and checks the monotonicity (left side
  non-decreasing, right side non-increasing in ``n``) that lets the minimal
  ``n`` decide all larger ones.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Sequence

from .combinat import falling_factorial, iter_k_subsets
from .core import Params, SizeSpec, occupancy_norm, pattern_weight, weight_sum_table


class ProximityClass(enum.Enum):
    """How far apart the requested slot sizes are allowed to be."""

    CONSERVATIVE = "conservative"  # spread <= 1
    RELAXED = "relaxed"  # spread <= max(1, r - 2)
    UNCONSTRAINED = "unconstrained"

    @classmethod
    def from_string(cls, value: str) -> "ProximityClass":
        for item in cls:
            if item.value == value:
                return item
        raise ValueError(
            f"unknown proximity class {value!r}; expected one of "
            + ", ".join(repr(i.value) for i in cls)
        )


_CLASS_RANK = {
    ProximityClass.CONSERVATIVE: 0,
    ProximityClass.RELAXED: 1,
    ProximityClass.UNCONSTRAINED: 2,
}


def classify_sizes(p: Sequence[int]) -> ProximityClass:
    """Tightest class the size vector satisfies."""
    if len(p) <= 1:
        return ProximityClass.CONSERVATIVE
    spread = max(p) - min(p)
    if spread <= 1:
        return ProximityClass.CONSERVATIVE
    if spread <= max(1, len(p) - 2):
        return ProximityClass.RELAXED
    return ProximityClass.UNCONSTRAINED


class InequalityVerdict(NamedTuple):
    params: Params
    p: tuple[int, ...]
    lhs: Fraction  # product of single-slot norms
    rhs: Fraction  # joint norm
    margin: Fraction  # lhs - rhs
    holds: bool
    proximity: ProximityClass


def check_inequality(params: Params, p: Sequence[int]) -> InequalityVerdict:
    """Evaluate both sides exactly on one instance. Reports, never asserts:
    a negative margin comes back as a verdict with ``holds=False``."""
    p = tuple(int(v) for v in p)
    for v in p:
        if not 0 <= v <= params.T:
            raise ValueError(f"slot size {v} out of range [0, {params.T}]")
    lhs = Fraction(1)
    for v in p:
        lhs *= occupancy_norm(params, SizeSpec.fixed(v))
    rhs = occupancy_norm(params, SizeSpec.fixed(*p))
    margin = lhs - rhs
    return InequalityVerdict(
        params=params, p=p, lhs=lhs, rhs=rhs, margin=margin,
        holds=margin >= 0, proximity=classify_sizes(p),
    )


def factorization_identity_check(params: Params, p: Sequence[int]) -> bool:
    """Verify that the tuple-sum form of the inequality's left side equals
    the product of per-slot normalized sums.

    The left side is computed literally: enumerate every pattern tuple with
    the prescribed sizes, multiply the single-pattern weights, sum, and
    divide by ``n^(r(T-1))``. The right side multiplies the per-slot sums
    ``sum g / n^(T-1)``. Exact equality is the algebraic identity that lets
    the inequality be stated purely in norms.
    """
    p = tuple(int(v) for v in p)
    for v in p:
        if not 0 <= v <= params.T:
            raise ValueError(f"slot size {v} out of range [0, {params.T}]")
    r, T, n = len(p), params.T, params.n
    if r == 0:
        return True
    slot_weights = [
        [pattern_weight(params, s) for s in iter_k_subsets(T, size)] for size in p
    ]
    tuple_sum = 0
    for combo in itertools.product(*slot_weights):
        w = 1
        for value in combo:
            w *= value
        tuple_sum += w
    lhs = Fraction(tuple_sum, n ** (r * (T - 1)))
    rhs = Fraction(1)
    for weights in slot_weights:
        rhs *= Fraction(sum(weights), n ** (T - 1))
    return lhs == rhs


# ---------------------------------------------------------------------------
# Grid sweeps
# ---------------------------------------------------------------------------

_M_POLICIES = ("uniform", "mixed")
_P_POLICIES = ("all-equal", "proximity", "relaxed", "all")


@dataclass(frozen=True)
class GridSpec:
    """Finite parameter grid for a sweep.

    ``m_policy`` is ``uniform`` (all draw sizes equal) or ``mixed`` (every
    vector). Draw sizes run over ``[1, n-1]`` unless ``include_full_m``
    admits ``m_i = n``. ``p_policy`` bounds the size-vector spread:
    ``all-equal``, ``proximity`` (spread <= 1), ``relaxed``
    (spread <= max(1, r-2)), or ``all``.
    """

    n_values: tuple[int, ...]
    T_values: tuple[int, ...]
    r_values: tuple[int, ...]
    m_policy: str = "mixed"
    p_policy: str = "proximity"
    include_full_m: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        object.__setattr__(self, "T_values", tuple(int(v) for v in self.T_values))
        object.__setattr__(self, "r_values", tuple(int(v) for v in self.r_values))
        if not (self.n_values and self.T_values and self.r_values):
            raise ValueError("grid ranges must be non-empty")
        if min(self.n_values) < 1 or min(self.T_values) < 1 or min(self.r_values) < 1:
            raise ValueError("grid values must be positive")
        if max(self.r_values) > min(self.n_values):
            raise ValueError(
                f"grid admits r={max(self.r_values)} slots with population "
                f"n={min(self.n_values)}; norms need r <= n everywhere"
            )
        if self.m_policy not in _M_POLICIES:
            raise ValueError(f"m_policy must be one of {_M_POLICIES}")
        if self.p_policy not in _P_POLICIES:
            raise ValueError(f"p_policy must be one of {_P_POLICIES}")
        if not self.include_full_m and min(self.n_values) < 2:
            raise ValueError("n=1 leaves no admissible draw sizes below n")


def _m_vectors(grid: GridSpec, n: int, T: int) -> Iterator[tuple[int, ...]]:
    limit = n if grid.include_full_m else n - 1
    if grid.m_policy == "uniform":
        for m in range(1, limit + 1):
            yield (m,) * T
    else:
        yield from itertools.product(range(1, limit + 1), repeat=T)


def _p_vectors(grid: GridSpec, T: int, r: int) -> Iterator[tuple[int, ...]]:
    if grid.p_policy == "all-equal":
        for p in range(T + 1):
            yield (p,) * r
        return
    if grid.p_policy == "proximity":
        bound = 1
    elif grid.p_policy == "relaxed":
        bound = max(1, r - 2)
    else:
        bound = T
    for vec in itertools.product(range(T + 1), repeat=r):
        if max(vec) - min(vec) <= bound:
            yield vec


class _CellCache:
    """Per-(n, T) memo for sweep margins.

    Both sides of the inequality are invariant under permuting the draw-size
    vector (relabelling draw indices) and under permuting the slot sizes
    (independent slots), so one exact computation per sorted (m, p) pair
    serves every grid point in its symmetry class.
    """

    def __init__(self, n: int, T: int):
        self.n = n
        self.T = T
        self._singles: dict[tuple[int, ...], list[Fraction]] = {}
        self._joint: dict[tuple[tuple[int, ...], int], dict[tuple[int, ...], int]] = {}
        self._entries: dict[
            tuple[tuple[int, ...], tuple[int, ...]],
            tuple[Fraction, Fraction, Fraction, bool],
        ] = {}

    def _single_norms(self, m_sorted: tuple[int, ...]) -> list[Fraction]:
        cached = self._singles.get(m_sorted)
        if cached is None:
            table = weight_sum_table(Params(self.n, m_sorted), 1)
            den = self.n ** (self.T - 1)
            cached = [Fraction(table[(p,)], den) for p in range(self.T + 1)]
            self._singles[m_sorted] = cached
        return cached

    def _joint_table(
        self, m_sorted: tuple[int, ...], r: int
    ) -> dict[tuple[int, ...], int]:
        key = (m_sorted, r)
        cached = self._joint.get(key)
        if cached is None:
            cached = weight_sum_table(Params(self.n, m_sorted), r)
            self._joint[key] = cached
        return cached

    def entry(
        self, m_sorted: tuple[int, ...], p_sorted: tuple[int, ...]
    ) -> tuple[Fraction, Fraction, Fraction, bool]:
        key = (m_sorted, p_sorted)
        cached = self._entries.get(key)
        if cached is None:
            singles = self._single_norms(m_sorted)
            lhs = Fraction(1)
            for p in p_sorted:
                lhs *= singles[p]
            r = len(p_sorted)
            joint = self._joint_table(m_sorted, r)[p_sorted]
            rhs = Fraction(joint, falling_factorial(self.n, r) ** (self.T - 1))
            margin = lhs - rhs
            cached = (lhs, rhs, margin, margin >= 0)
            self._entries[key] = cached
        return cached

    def preload(
        self,
        entries: Iterable[
            tuple[
                tuple[int, ...],
                tuple[int, ...],
                tuple[Fraction, Fraction, Fraction, bool],
            ]
        ],
    ) -> None:
        for m_sorted, p_sorted, value in entries:
            self._entries[(m_sorted, p_sorted)] = value


def _cell_worker(task):
    n, T, m_groups, p_groups = task
    cell = _CellCache(n, T)
    out = []
    for m_sorted in m_groups:
        for p_sorted in p_groups:
            out.append((m_sorted, p_sorted, cell.entry(m_sorted, p_sorted)))
    return out


def _canonical_cell_keys(
    grid: GridSpec, n: int, T: int
) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    m_groups = sorted({tuple(sorted(m)) for m in _m_vectors(grid, n, T)})
    p_groups = sorted(
        {
            tuple(sorted(p))
            for r in grid.r_values
            for p in _p_vectors(grid, T, r)
        }
    )
    return m_groups, p_groups


def grid_search(
    grid: GridSpec,
    class_filter: ProximityClass = ProximityClass.UNCONSTRAINED,
    threads: int = 1,
) -> Iterator[InequalityVerdict]:
    """Yield one verdict per grid point, in deterministic grid order
    (n, then T, then r, then m vector, then p vector, each ascending).

    ``class_filter`` keeps only verdicts whose class is at most as wide:
    ``conservative`` emits conservative points only, ``relaxed`` adds the
    relaxed ones, ``unconstrained`` emits everything. Violations are ordinary
    results; nothing is suppressed or raised. With ``threads > 1`` the margin
    computations for each (n, T) cell are distributed over worker processes;
    the emitted stream is identical to the serial one.
    """
    rank = _CLASS_RANK[class_filter]
    emitted = 0
    for n in grid.n_values:
        for T in grid.T_values:
            cell = _CellCache(n, T)
            if threads > 1:
                m_groups, p_groups = _canonical_cell_keys(grid, n, T)
                step = max(1, len(m_groups) // (threads * 4) or 1)
                tasks = [
                    (n, T, m_groups[i : i + step], p_groups)
                    for i in range(0, len(m_groups), step)
                ]
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    for chunk in pool.map(_cell_worker, tasks):
                        cell.preload(chunk)
            for r in grid.r_values:
                p_list = [
                    (p, tuple(sorted(p)), classify_sizes(p))
                    for p in _p_vectors(grid, T, r)
                ]
                p_list = [
                    item for item in p_list if _CLASS_RANK[item[2]] <= rank
                ]
                if not p_list:
                    continue
                for m in _m_vectors(grid, n, T):
                    params = Params(n, m)
                    m_sorted = tuple(sorted(m))
                    for p, p_sorted, proximity in p_list:
                        lhs, rhs, margin, holds = cell.entry(m_sorted, p_sorted)
                        emitted += 1
                        yield InequalityVerdict(
                            params=params, p=p, lhs=lhs, rhs=rhs,
                            margin=margin, holds=holds, proximity=proximity,
                        )
    if emitted == 0:
        raise ValueError("grid produced no points (empty sweep)")


@dataclass(slots=True)
class SweepSummary:
    """Streaming tallies over a sweep."""

    total: int = 0
    holds_count: int = 0
    violation_count: int = 0
    by_class: dict[str, int] = field(default_factory=dict)
    violations_by_class: dict[str, int] = field(default_factory=dict)
    min_margin: Fraction | None = None
    min_margin_at: tuple | None = None  # (n, m, p)
    first_violations: list[InequalityVerdict] = field(default_factory=list)

    def add(self, verdict: InequalityVerdict) -> None:
        self.total += 1
        name = verdict.proximity.value
        self.by_class[name] = self.by_class.get(name, 0) + 1
        if verdict.holds:
            self.holds_count += 1
        else:
            self.violation_count += 1
            self.violations_by_class[name] = self.violations_by_class.get(name, 0) + 1
            if len(self.first_violations) < 10:
                self.first_violations.append(verdict)
        if self.min_margin is None or verdict.margin < self.min_margin:
            self.min_margin = verdict.margin
            self.min_margin_at = (verdict.params.n, verdict.params.m, verdict.p)


def summarize_sweep(verdicts: Iterable[InequalityVerdict]) -> SweepSummary:
    summary = SweepSummary()
    for verdict in verdicts:
        summary.add(verdict)
    return summary


# ---------------------------------------------------------------------------
# Closed-form reductions (two slots)
# ---------------------------------------------------------------------------


class ReducedCheck(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    holds: bool


def full_size_reduction(params: Params) -> ReducedCheck:
    """Two slots, both at full size ``p = T``.

    Only one pattern tuple survives (everything covered everywhere), and the
    inequality collapses to ``(1 - 1/n)^(T-1) >= prod (1 - 1/m_i)``. Must
    agree in truth value with ``check_inequality(params, (T, T))``.
    """
    if params.n < 2:
        raise ValueError("reduction needs n > 1")
    lhs = Fraction(params.n - 1, params.n) ** (params.T - 1)
    rhs = Fraction(1)
    for m_i in params.m:
        rhs *= Fraction(m_i - 1, m_i)
    return ReducedCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs)


def near_full_size_reduction(n: int, m: int, T: int) -> ReducedCheck:
    """Two slots at size ``T - 1`` with uniform draw sizes ``m``.

    Scalar form of the check:

        (1 - 1/n)^(T-1) * T * (n-m)/m
            >= ((m-1)/m)^(T-1) * ((n-m-1)/m + (T-1)(n-m)/(m-1))

    Requires ``2 <= m < n``; for ``T = 1`` additionally ``n >= m + 2`` (at
    ``n = m + 1`` the ratio analysis loses its positive denominator). Must
    agree in truth value with ``check_inequality`` at ``p = (T-1, T-1)``.
    """
    if m < 2:
        raise ValueError(f"uniform draw size must be >= 2, got m={m}")
    if n <= m:
        raise ValueError(f"need m < n, got m={m}, n={n}")
    if T < 1:
        raise ValueError(f"need T >= 1, got {T}")
    if T == 1 and n < m + 2:
        raise ValueError("T=1 needs n >= m + 2 (n = m + 1 is inadmissible)")
    lhs = Fraction(n - 1, n) ** (T - 1) * T * Fraction(n - m, m)
    rhs = Fraction(m - 1, m) ** (T - 1) * (
        Fraction(n - m - 1, m) + (T - 1) * Fraction(n - m, m - 1)
    )
    return ReducedCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs)


# ---------------------------------------------------------------------------
# Induction-step audit for the near-full reduction
# ---------------------------------------------------------------------------


def minimal_admissible_n(m: int, T: int) -> int:
    """Smallest population for which the induction ratios are defined:
    ``m + 1`` for ``T >= 2`` and ``m + 2`` for ``T = 1``."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    if T < 1:
        raise ValueError(f"need T >= 1, got {T}")
    return m + 1 if T >= 2 else m + 2


def induction_ratios(m: int, T: int, n: int) -> tuple[Fraction, Fraction]:
    """Both sides of the ratio inequality behind the induction step.

    With ``A = (n-m-1)/m`` and ``B = (n-m)/(m-1)``:

        left  = (1 - 1/n) * (T+1)^2 / T^2
        right = (1 - 1/m) * (A + T*B) / (A + (T-1)*B)

    The left side increases with ``n``, the right side decreases, so checking
    the minimal admissible ``n`` settles all larger populations.
    """
    if n < minimal_admissible_n(m, T):
        raise ValueError(
            f"n={n} inadmissible for m={m}, T={T}; "
            f"need n >= {minimal_admissible_n(m, T)}"
        )
    lhs = Fraction(n - 1, n) * Fraction((T + 1) ** 2, T**2)
    a = Fraction(n - m - 1, m)
    b = Fraction(n - m, m - 1)
    rhs = Fraction(m - 1, m) * (a + T * b) / (a + (T - 1) * b)
    return lhs, rhs


def induction_profile(T: int) -> Fraction:
    """Growth profile ``(T+1)^2 (T-1) / T^3`` of the minimal-population case.

    For ``T >= 2`` the audit's ``n = m + 1`` row reduces to comparing this
    against ``1 - 1/m^2``. The profile equals ``1 + 1/T - 1/T^2 - 1/T^3``,
    which stays strictly above 1 for every ``T >= 2`` (value 9/8 at ``T = 2``,
    peak 32/27 at ``T = 3``, then decreasing toward 1), so it dominates every
    ``1 - 1/m^2``.
    """
    if T < 1:
        raise ValueError(f"need T >= 1, got {T}")
    return Fraction((T + 1) ** 2 * (T - 1), T**3)


class InductionRow(NamedTuple):
    T: int
    n: int
    lhs_ratio: Fraction
    rhs_ratio: Fraction
    ok: bool


@dataclass(frozen=True, slots=True)
class InductionAudit:
    m: int
    rows: tuple[InductionRow, ...]
    lhs_monotone_in_n: bool  # left ratio non-decreasing along sampled n
    rhs_monotone_in_n: bool  # right ratio non-increasing along sampled n

    @property
    def all_ok(self) -> bool:
        return all(row.ok for row in self.rows)


def audit_induction_step(
    m: int,
    T_values: Iterable[int],
    n_offsets: Iterable[int] = (0, 1, 2, 5, 10),
    extra_n: Iterable[int] = (),
) -> InductionAudit:
    """Evaluate the induction-step ratio inequality on a lattice of cases.

    For each ``T``, the sampled populations are the minimal admissible ``n``
    plus the given offsets, together with any absolute values from
    ``extra_n`` (which must be admissible). Each row records both ratio sides
    exactly and whether the left dominates; the audit also confirms the
    monotonicity in ``n`` that the minimal-case argument relies on.
    """
    rows: list[InductionRow] = []
    lhs_monotone = True
    rhs_monotone = True
    extras = tuple(int(v) for v in extra_n)
    for T in sorted(set(int(v) for v in T_values)):
        base = minimal_admissible_n(m, T)
        ns = sorted({base + int(off) for off in n_offsets} | set(extras))
        if any(v < base for v in ns):
            raise ValueError(
                f"sampled n below the minimal admissible {base} for T={T}"
            )
        sequence = [induction_ratios(m, T, n) for n in ns]
        for n, (lhs, rhs) in zip(ns, sequence):
            rows.append(
                InductionRow(T=T, n=n, lhs_ratio=lhs, rhs_ratio=rhs, ok=lhs >= rhs)
            )
        for (lhs_a, rhs_a), (lhs_b, rhs_b) in zip(sequence, sequence[1:]):
            if lhs_b < lhs_a:
                lhs_monotone = False
            if rhs_b > rhs_a:
                rhs_monotone = False
    if not rows:
        raise ValueError("no T values supplied")
    return InductionAudit(
        m=m,
        rows=tuple(rows),
        lhs_monotone_in_n=lhs_monotone,
        rhs_monotone_in_n=rhs_monotone,
    )

"""Exact occupancy weights, constrained weight sums, and norms.

Model
-----
A population of ``n`` elements is sampled by ``T`` independent uniform draws;
draw ``i`` picks a subset of fixed size ``m_i`` without replacement. Track
``r`` distinct population elements and prescribe, for each tracked element
``j``, the *coverage pattern* ``A_j``: the set of draw indices that must
contain it. The number of ways the draws can realise the joint prescription,
counted with the tracked elements placed injectively, factorises over draws:

    joint_weight(A_1, ..., A_r) =
        prod over draws i of  (m_i)_{k_i} * (n - m_i)_{r - k_i}

where ``k_i`` is how many of the ``A_j`` contain draw ``i`` and ``(x)_k`` is
the falling factorial. Dividing by ``(n)_r`` per draw turns the weight into
the probability that ``r`` fixed distinct elements show exactly the patterns
``A_1, ..., A_r``.

Summing the weight over all pattern tuples whose sizes are constrained
(``|A_j| = p_j``, or more generally ``|A_j| in B_j``) gives the *weight sum*
``G(p_1, ..., p_r)``. The associated *norm*

    ||(p_1, ..., p_r)|| = G(p_1, ..., p_r) / ((n)_r)^(T-1)

is the expected number of ordered r-tuples of distinct elements where element
``j`` is covered by exactly ``p_j`` draws (a joint factorial moment of the
occupancy counts). Norms are the building blocks of every moment formula and
of the product-vs-joint inequality in :mod:`occukit.inequality`.

All arithmetic is exact: weights are Python integers, norms are
``fractions.Fraction``. Floats appear only in display helpers.

Evaluation routes
-----------------
``weight_sum_naive`` enumerates every admissible pattern tuple literally and
is the oracle. ``weight_sum_dp`` reaches the same value by dynamic
programming over draws with per-slot size budgets, cost
``O(T * prod(p_j + 1) * 2^r)`` instead of ``O(prod C(T, p_j))``.
``weight_sum_table`` produces ``G`` for every size vector of a given tuple
length in one pass, which is what the inequality sweeps consume.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .combinat import falling_factorial, iter_k_subsets
from .errors import DegenerateDenominatorError


@dataclass(frozen=True, slots=True)
class Params:
    """One problem instance: population size ``n`` and draw sizes ``m``.

    ``m`` has one entry per draw; its length is the number of draws ``T``.
    Every size must satisfy ``1 <= m_i <= n``.
    """

    n: int
    m: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        if self.n < 1:
            raise ValueError(f"population size must be positive, got n={self.n}")
        if len(self.m) < 1:
            raise ValueError("at least one draw size is required")
        for i, size in enumerate(self.m, start=1):
            if not 1 <= size <= self.n:
                raise ValueError(
                    f"draw size m_{i}={size} out of range [1, n={self.n}]"
                )

    @property
    def T(self) -> int:
        """Number of draws."""
        return len(self.m)


SpecLike = Union["SizeSpec", Sequence[int], Sequence[Iterable[int]]]


@dataclass(frozen=True, slots=True)
class SizeSpec:
    """Per-slot admissible pattern sizes.

    Each entry is a non-empty set of allowed cardinalities for one slot.
    A fixed size vector ``(p_1, ..., p_r)`` is the special case where every
    entry is a singleton; mixed fixed/set entries are allowed. Upper bounds
    are validated against a concrete instance at evaluation time, since the
    same spec may be reused across instances with different ``T``.
    """

    entries: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        for entry in self.entries:
            if not entry:
                raise ValueError("size sets must be non-empty")
            if any(size < 0 for size in entry):
                raise ValueError(f"sizes must be non-negative, got {sorted(entry)}")

    @classmethod
    def fixed(cls, *sizes: int) -> "SizeSpec":
        return cls(tuple(frozenset((int(p),)) for p in sizes))

    @classmethod
    def of_sets(cls, *size_sets: Iterable[int]) -> "SizeSpec":
        return cls(tuple(frozenset(int(s) for s in b) for b in size_sets))

    @classmethod
    def repeated(cls, entry: int | Iterable[int], count: int) -> "SizeSpec":
        """``count`` identical slots, each allowing ``entry`` (int or set)."""
        b = frozenset((int(entry),)) if isinstance(entry, int) else frozenset(entry)
        return cls((b,) * count)

    @classmethod
    def coerce(cls, value: SpecLike) -> "SizeSpec":
        if isinstance(value, SizeSpec):
            return value
        entries = []
        for item in value:
            if isinstance(item, int):
                entries.append(frozenset((item,)))
            else:
                entries.append(frozenset(int(s) for s in item))
        return cls(tuple(entries))

    @property
    def r(self) -> int:
        """Number of slots (tracked elements)."""
        return len(self.entries)

    @property
    def is_fixed(self) -> bool:
        return all(len(b) == 1 for b in self.entries)

    @property
    def fixed_sizes(self) -> tuple[int, ...]:
        if not self.is_fixed:
            raise ValueError("spec has non-singleton size sets")
        return tuple(next(iter(b)) for b in self.entries)

    def describe(self) -> str:
        if self.is_fixed:
            return "p=(" + ", ".join(str(p) for p in self.fixed_sizes) + ")"
        return "B=(" + ", ".join(
            "{" + ",".join(str(s) for s in sorted(b)) + "}" for b in self.entries
        ) + ")"


def _validate_pattern(params: Params, pattern: Iterable[int]) -> frozenset[int]:
    out = frozenset(int(i) for i in pattern)
    for i in out:
        if not 1 <= i <= params.T:
            raise ValueError(f"draw index {i} outside [1, {params.T}]")
    return out


def _validate_spec(params: Params, spec: SizeSpec) -> None:
    for j, entry in enumerate(spec.entries, start=1):
        if max(entry) > params.T:
            raise ValueError(
                f"slot {j} allows size {max(entry)} > number of draws T={params.T}"
            )


def membership_counts(T: int, patterns: Sequence[Iterable[int]]) -> tuple[int, ...]:
    """Per-draw multiplicities: how many patterns contain each draw index."""
    counts = [0] * T
    for pattern in patterns:
        for i in pattern:
            if not 1 <= i <= T:
                raise ValueError(f"draw index {i} outside [1, {T}]")
            counts[i - 1] += 1
    return tuple(counts)


def pattern_weight(params: Params, pattern: Iterable[int]) -> int:
    """Weight of a single coverage pattern.

    Each draw index in the pattern contributes ``m_i``, each index outside it
    contributes ``n - m_i``. Divided by ``n^T`` this is the probability that
    one fixed element is covered by exactly the draws in ``pattern``.
    """
    covered = _validate_pattern(params, pattern)
    out = 1
    for i, size in enumerate(params.m, start=1):
        out *= size if i in covered else params.n - size
    return out


def joint_weight(params: Params, patterns: Sequence[Iterable[int]]) -> int:
    """Weight of a tuple of coverage patterns for distinct tracked elements.

    Zero whenever some draw cannot host the prescription, i.e. when
    ``k_i > m_i`` or ``r - k_i > n - m_i``; the falling factorials encode
    that automatically. The empty tuple has weight 1.
    """
    validated = [_validate_pattern(params, p) for p in patterns]
    r = len(validated)
    counts = membership_counts(params.T, validated)
    out = 1
    for size, k in zip(params.m, counts):
        out *= falling_factorial(size, k) * falling_factorial(params.n - size, r - k)
    return out


def power_weight(params: Params, pattern: Iterable[int], r: int) -> int:
    """Weight of ``r`` identical coverage patterns.

    Equal to ``joint_weight`` on r copies of ``pattern``, in product form:
    covered draws contribute ``(m_i)_r``, the rest ``(n - m_i)_r``.
    """
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    covered = _validate_pattern(params, pattern)
    out = 1
    for i, size in enumerate(params.m, start=1):
        base = size if i in covered else params.n - size
        out *= falling_factorial(base, r)
    return out


def _slot_subsets(T: int, sizes: frozenset[int]) -> list[frozenset[int]]:
    out: list[frozenset[int]] = []
    for p in sorted(sizes):
        out.extend(frozenset(s) for s in iter_k_subsets(T, p))
    return out


def weight_sum_naive(params: Params, spec: SpecLike) -> int:
    """Sum of ``joint_weight`` over all size-admissible pattern tuples,
    by literal enumeration. The ground-truth route; cost is the product of
    the per-slot subset counts.
    """
    spec = SizeSpec.coerce(spec)
    _validate_spec(params, spec)
    if spec.r == 0:
        return 1
    T, n, m, r = params.T, params.n, params.m, spec.r
    # Bitmask encoding and per-draw factor tables keep the tuple loop tight
    # without changing the enumeration itself.
    slot_masks: list[list[int]] = []
    for entry in spec.entries:
        masks = []
        for subset in _slot_subsets(T, entry):
            mask = 0
            for i in subset:
                mask |= 1 << (i - 1)
            masks.append(mask)
        slot_masks.append(masks)
    factors = [
        [
            falling_factorial(m[i], k) * falling_factorial(n - m[i], r - k)
            for k in range(r + 1)
        ]
        for i in range(T)
    ]
    total = 0
    for combo in itertools.product(*slot_masks):
        w = 1
        for i in range(T):
            k = 0
            for mask in combo:
                k += (mask >> i) & 1
            w *= factors[i][k]
            if w == 0:
                break
        total += w
    return total


def _position_combos(r: int) -> list[list[tuple[int, ...]]]:
    return [list(itertools.combinations(range(r), k)) for k in range(r + 1)]


class _SizeWindow:
    """Reachability test for one slot's admissible sizes during the DP."""

    __slots__ = ("lo", "hi", "contiguous", "sorted_sizes")

    def __init__(self, sizes: frozenset[int]):
        self.sorted_sizes = sorted(sizes)
        self.lo = self.sorted_sizes[0]
        self.hi = self.sorted_sizes[-1]
        self.contiguous = len(sizes) == self.hi - self.lo + 1

    def feasible(self, used: int, remaining: int) -> bool:
        # Some admissible size must lie in [used, used + remaining].
        if self.contiguous:
            return used <= self.hi and self.lo <= used + remaining
        j = bisect_left(self.sorted_sizes, used)
        return j < len(self.sorted_sizes) and self.sorted_sizes[j] <= used + remaining


def weight_sum_dp(params: Params, spec: SpecLike) -> int:
    """Same value as :func:`weight_sum_naive`, by dynamic programming.

    Walks the draws in order; the state is how many pattern memberships each
    slot has used so far. For each draw an inner pass over the ``2^r``
    membership choices applies the factor ``(m_i)_k (n - m_i)_(r-k)``, which
    depends on the draw only through the membership count ``k``. States that
    cannot reach an admissible final size with the draws left are pruned.

    When every slot allows the same sizes, states that are permutations of
    one another have identical futures and are merged (sorted state vector),
    shrinking the state space by up to ``r!``.
    """
    spec = SizeSpec.coerce(spec)
    _validate_spec(params, spec)
    r = spec.r
    if r == 0:
        return 1
    T, n, m = params.T, params.n, params.m
    combos = _position_combos(r)
    merged = len(set(spec.entries)) == 1
    windows = [_SizeWindow(entry) for entry in spec.entries]
    if merged:
        windows = [windows[0]] * r

    states: dict[tuple[int, ...], int] = {(0,) * r: 1}
    for idx in range(T):
        remaining = T - idx - 1
        fac = [
            falling_factorial(m[idx], k) * falling_factorial(n - m[idx], r - k)
            for k in range(r + 1)
        ]
        nxt: dict[tuple[int, ...], int] = {}
        for state, w in states.items():
            for k in range(r + 1):
                f = fac[k]
                if f == 0:
                    continue
                wf = w * f
                for positions in combos[k]:
                    used = list(state)
                    for pos in positions:
                        used[pos] += 1
                    if merged:
                        used.sort()
                    ok = True
                    for slot, u in enumerate(used):
                        if not windows[slot].feasible(u, remaining):
                            ok = False
                            break
                    if not ok:
                        continue
                    key = tuple(used)
                    prev = nxt.get(key)
                    nxt[key] = wf if prev is None else prev + wf
        states = nxt
    total = 0
    for state, w in states.items():
        if merged:
            if all(u in spec.entries[0] for u in state):
                total += w
        elif all(u in spec.entries[slot] for slot, u in enumerate(state)):
            total += w
    return total


def weight_sum_table(params: Params, r: int) -> dict[tuple[int, ...], int]:
    """Weight sums ``G(p)`` for *every* size vector of ``r`` slots at once.

    One dense forward DP over the draws; the returned mapping covers all
    ``(T+1)^r`` size vectors (zero entries included). Used by the inequality
    sweeps, where all sizes of a cell are needed anyway.
    """
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    if r == 0:
        return {(): 1}
    T, n, m = params.T, params.n, params.m
    base = T + 1
    size = base**r
    offsets: list[tuple[int, int]] = []  # (encoded increment, membership count)
    for k, position_sets in enumerate(_position_combos(r)):
        for positions in position_sets:
            offsets.append((sum(base**pos for pos in positions), k))
    cur = [0] * size
    cur[0] = 1
    for idx in range(T):
        fac = [
            falling_factorial(m[idx], k) * falling_factorial(n - m[idx], r - k)
            for k in range(r + 1)
        ]
        live = [(delta, fac[k]) for delta, k in offsets if fac[k] != 0]
        nxt = [0] * size
        for s, w in enumerate(cur):
            if w:
                for delta, f in live:
                    nxt[s + delta] += w * f
        cur = nxt
    table: dict[tuple[int, ...], int] = {}
    for s in range(size):
        digits = []
        enc = s
        for _ in range(r):
            digits.append(enc % base)
            enc //= base
        table[tuple(digits)] = cur[s]
    return table


@lru_cache(maxsize=None)
def _cached_norm(params: Params, spec: SizeSpec) -> Fraction:
    num = weight_sum_dp(params, spec)
    den = falling_factorial(params.n, spec.r) ** (params.T - 1)
    return Fraction(num, den)


def occupancy_norm(params: Params, spec: SpecLike) -> Fraction:
    """Normalized weight sum ``G / ((n)_r)^(T-1)``, in lowest terms.

    Raises :class:`DegenerateDenominatorError` when more slots are requested
    than the population holds (``r > n``), where ``(n)_r = 0`` makes the
    quantity undefined. Results are memoized per ``(params, spec)``.
    """
    spec = SizeSpec.coerce(spec)
    if spec.r > params.n:
        raise DegenerateDenominatorError(
            f"norm undefined: {spec.r} slots exceed population size n={params.n}"
        )
    _validate_spec(params, spec)
    return _cached_norm(params, spec)

"""Two-partition enumeration and separation gaps.

A two-partition of a distance multiset is an ordered triple of value indices
(r, s, t) with y_r + y_s = y_t, where r = s is allowed only when the value
occurs at least twice.  Because the values are positive and strictly
decreasing, every two-partition has r > t and s > t.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, NamedTuple, Sequence, Tuple

import numpy as np

from .core import DistanceMultiset
from .numbers import Number, all_exact, as_fraction


class TwoPartition(NamedTuple):
    r: int
    s: int
    t: int


TwoPartitionSet = FrozenSet[TwoPartition]


@dataclass(frozen=True)
class GapProfile:
    """Per-target separation of invalid sums, and their overall minimum."""

    per_target: Tuple[Number, ...]
    gap_star: Number

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_target", tuple(self.per_target))
        if min(self.per_target, default=math.inf) != self.gap_star:
            raise ValueError("gap_star must be the minimum of per_target")


def enumerate_two_partitions(Y: DistanceMultiset) -> TwoPartitionSet:
    """Exact two-pointer scan, one pass per target index t.

    For each t the pointers start at r = t + 1 and s = m' and walk toward each
    other; values are distinct, so a hit advances both.  Both orders (r, s, t)
    and (s, r, t) are recorded, and the diagonal triple (r, r, t) at most once,
    subject to the multiplicity rule.  Total work O(m'^2).
    """
    y = Y.values
    mu = Y.multiplicities
    m = len(y)
    found: set = set()
    for t in range(1, m + 1):
        target = y[t - 1]
        r, s = t + 1, m
        while r < s:
            sigma = y[r - 1] + y[s - 1]
            if sigma == target:
                found.add(TwoPartition(r, s, t))
                found.add(TwoPartition(s, r, t))
                r += 1
                s -= 1
            elif sigma > target:
                r += 1
            else:
                s -= 1
        if r == s and r <= m and mu[r - 1] >= 2 and 2 * y[r - 1] == target:
            found.add(TwoPartition(r, r, t))
    return frozenset(found)


def enumerate_two_partitions_bruteforce(Y: DistanceMultiset) -> TwoPartitionSet:
    """Direct scan of all m'^3 triples; the test oracle for the two-pointer scan.

    Exact-rational inputs are lifted to a common integer grid so the triple
    scan can run vectorized; anything that does not fit in machine integers
    falls back to the plain Python loop.
    """
    y = Y.values
    scaled = _common_integer_grid(y)
    if scaled is not None:
        return _bruteforce_int(scaled, Y.multiplicities)
    return _bruteforce_python(y, Y.multiplicities)


def _common_integer_grid(values: Sequence[Number]) -> "np.ndarray | None":
    if not all_exact(values):
        return None
    fracs = [as_fraction(v) for v in values]
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    scaled = [int(f * denom) for f in fracs]
    if max(abs(v) for v in scaled) >= 2**61:
        return None
    return np.asarray(scaled, dtype=np.int64)


def _bruteforce_int(y: "np.ndarray", mu: Sequence[int]) -> TwoPartitionSet:
    m = len(y)
    sums = y[:, None] + y[None, :]
    found: set = set()
    for t in range(1, m + 1):
        rs, ss = np.nonzero(sums == y[t - 1])
        for r0, s0 in zip(rs.tolist(), ss.tolist()):
            r, s = r0 + 1, s0 + 1
            if r != s or mu[r - 1] >= 2:
                found.add(TwoPartition(r, s, t))
    return frozenset(found)


def _bruteforce_python(y: Sequence[Number], mu: Sequence[int]) -> TwoPartitionSet:
    m = len(y)
    found: set = set()
    for t in range(1, m + 1):
        target = y[t - 1]
        for r in range(1, m + 1):
            for s in range(1, m + 1):
                if y[r - 1] + y[s - 1] == target and (r != s or mu[r - 1] >= 2):
                    found.add(TwoPartition(r, s, t))
    return frozenset(found)


def gaps(Y: DistanceMultiset) -> GapProfile:
    """Distance from each target value to the nearest unequal pair sum.

    The minimum runs over all ordered pairs (r, s), with no multiplicity
    restriction; a target equals +inf when every pair sums to it exactly.
    """
    y = Y.values
    m = len(y)
    sums = sorted({y[r] + y[s] for r in range(m) for s in range(r, m)})
    per_target: List[Number] = []
    for t in range(m):
        target = y[t]
        best: Number = math.inf
        pos = bisect_left(sums, target)
        for k in (pos - 1, pos, pos + 1):
            if 0 <= k < len(sums) and sums[k] != target:
                d = abs(sums[k] - target)
                if d < best:
                    best = d
        per_target.append(best)
    return GapProfile(tuple(per_target), min(per_target))


def approximate_two_partitions(Yhat: DistanceMultiset, tau: Number) -> TwoPartitionSet:
    """All triples passing |y_r + y_s - y_t| <= tau, banded two-pointer scan.

    Keeps the conventions of the exact set: r, s range over indices above t
    and the diagonal triple needs multiplicity >= 2.  The tolerance is
    absolute.  With tau = 0 on exact data this reproduces the exact scan.
    """
    if tau < 0:
        raise ValueError("tolerance must be nonnegative")
    y = Yhat.values
    mu = Yhat.multiplicities
    m = len(y)
    ascending = list(reversed(y))  # for bisect; index a maps to s = m - a
    found: set = set()
    for t in range(1, m + 1):
        target = y[t - 1]
        lo, hi = target - tau, target + tau
        for r in range(t + 1, m + 1):
            # for fixed r the sums y_r + y_s decrease as s grows, so the band
            # is the contiguous run of s with y_s in [lo - y_r, hi - y_r]
            s_first = m - bisect_right_num(ascending, hi - y[r - 1])
            s_last = m - bisect_left_num(ascending, lo - y[r - 1])
            for s in range(max(s_first, r) + 1, min(s_last, m) + 1):
                found.add(TwoPartition(r, s, t))
                found.add(TwoPartition(s, r, t))
            if s_first < r <= s_last and mu[r - 1] >= 2:
                found.add(TwoPartition(r, r, t))
    return frozenset(found)


def bisect_left_num(ascending: Sequence[Number], bound: Number) -> int:
    """First index with value >= bound in an ascending list."""
    lo, hi = 0, len(ascending)
    while lo < hi:
        mid = (lo + hi) // 2
        if ascending[mid] < bound:
            lo = mid + 1
        else:
            hi = mid
    return lo


def bisect_right_num(ascending: Sequence[Number], bound: Number) -> int:
    """First index with value > bound in an ascending list."""
    lo, hi = 0, len(ascending)
    while lo < hi:
        mid = (lo + hi) // 2
        if ascending[mid] <= bound:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sorted_triples(pset: TwoPartitionSet) -> List[TwoPartition]:
    """Canonical listing order for output: ascending (r, s, t)."""
    return sorted(pset)

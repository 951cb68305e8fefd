"""Point sets, distance multisets, interval indexing, rulers and assignments.

All interval and value indices exposed by this module are 1-based: interval
``(i, j)`` means the pair of point indices ``1 <= i < j <= n`` and ``r`` is the
position of a distinct distance value in decreasing order.  Matrix storage is
plain 0-based nested tuples; the index convention never leaks into the API.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .numbers import Number, all_exact, as_fraction, is_exact

log = logging.getLogger(__name__)

#: relative threshold under which two double-mode distances are considered the
#: same distinct value when grouping
DOUBLE_MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing coordinates of n >= 2 collinear points."""

    coords: Tuple[Number, ...]

    def __post_init__(self) -> None:
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 2:
            raise ValueError("a point set needs at least two points")
        for a, b in zip(coords, coords[1:]):
            if not a < b:
                raise ValueError("coordinates must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.coords)

    def anchored(self) -> "PointSet":
        """Translate so the first coordinate is zero."""
        x0 = self.coords[0]
        return PointSet(tuple(x - x0 for x in self.coords))

    def reflected(self) -> "PointSet":
        """Mirror image, re-sorted increasing and anchored at zero."""
        last = self.coords[-1]
        return PointSet(tuple(last - x for x in reversed(self.coords)))


@dataclass(frozen=True)
class DistanceMultiset:
    """Distinct positive values in strictly decreasing order with multiplicities."""

    values: Tuple[Number, ...]
    multiplicities: Tuple[int, ...]

    def __post_init__(self) -> None:
        values = tuple(self.values)
        mults = tuple(int(m) for m in self.multiplicities)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "multiplicities", mults)
        if not values:
            raise ValueError("empty distance multiset")
        if len(values) != len(mults):
            raise ValueError("values and multiplicities differ in length")
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be >= 1")
        if any(not v > 0 for v in values):
            raise ValueError("distances must be positive")
        for a, b in zip(values, values[1:]):
            if not a > b:
                raise ValueError("values must be strictly decreasing")

    @property
    def m_prime(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    @property
    def exact(self) -> bool:
        return all_exact(self.values)

    def expanded(self) -> List[Number]:
        """The multiset written out as a nonincreasing list of length total."""
        out: List[Number] = []
        for v, m in zip(self.values, self.multiplicities):
            out.extend([v] * m)
        return out

    def point_count(self) -> int:
        """n with total == n(n-1)/2, or raise if total is not triangular."""
        m = self.total
        n = int((1 + math.isqrt(1 + 8 * m)) // 2)
        if n * (n - 1) // 2 != m or n < 2:
            raise ValueError(f"total multiplicity {m} is not n(n-1)/2 for any n >= 2")
        return n


def intervals(n: int) -> List[Tuple[int, int]]:
    """All monotone intervals (i, j), 1 <= i < j <= n, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def refinements(n: int) -> List[Tuple[int, int, int]]:
    """All monotone refinements (i, j, k), i < j < k, in lexicographic order."""
    return [
        (i, j, k)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for k in range(j + 1, n + 1)
    ]


def group_values(raw: Iterable[Number]) -> DistanceMultiset:
    """Group a raw list of distances into (values, multiplicities).

    Exact inputs are merged on exact equality only.  Double inputs merge
    values within ``DOUBLE_MERGE_RTOL`` relative distance; any such merge is
    logged because it changes the combinatorics downstream.
    """
    items = sorted(raw, reverse=True)
    if not items:
        raise ValueError("no distances to group")
    exact = all_exact(items)
    values: List[Number] = [items[0]]
    mults: List[int] = [1]
    for v in items[1:]:
        prev = values[-1]
        if exact:
            same = v == prev
        else:
            same = v == prev or abs(prev - v) <= DOUBLE_MERGE_RTOL * max(abs(prev), abs(v))
            if same and v != prev:
                log.info("merging nearly equal distances %r and %r", prev, v)
        if same:
            mults[-1] += 1
        else:
            values.append(v)
            mults.append(1)
    return DistanceMultiset(tuple(values), tuple(mults))


def delta(ps: PointSet) -> DistanceMultiset:
    """The difference multiset {x_j - x_i : i < j}, grouped."""
    return group_values(b - a for a, b in itertools.combinations(ps.coords, 2))


def beltway_delta(ps: PointSet, circumference: Number) -> DistanceMultiset:
    """Shortest-arc distance multiset of points on a circle of given length."""
    if not circumference > 0:
        raise ValueError("circumference must be positive")
    for x in ps.coords:
        if not (0 <= x < circumference):
            raise ValueError(f"coordinate {x} outside [0, circumference)")
    dists = []
    for a, b in itertools.combinations(ps.coords, 2):
        d = b - a
        arc = min(d, circumference - d)
        if not arc > 0:
            raise ValueError("coincident or antipodally wrapped points give a zero arc")
        dists.append(arc)
    return group_values(dists)


@dataclass(frozen=True)
class AssignmentMatrix:
    """A (possibly fractional) multi-matching from intervals to value indices.

    ``entries`` maps (i, j, r) to a weight in [0, 1]; missing keys are exact
    zeros (including pruned variables).
    """

    n: int
    m_prime: int
    entries: Mapping[Tuple[int, int, int], Number]

    def __post_init__(self) -> None:
        clean: Dict[Tuple[int, int, int], Number] = {}
        for (i, j, r), w in self.entries.items():
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad interval ({i}, {j}) for n={self.n}")
            if not (1 <= r <= self.m_prime):
                raise ValueError(f"bad value index {r} for m'={self.m_prime}")
            if w < -1e-9 or w > 1 + 1e-9:
                raise ValueError(f"weight {w} for ({i},{j},{r}) outside [0, 1]")
            if w != 0:
                clean[(i, j, r)] = w
        object.__setattr__(self, "entries", clean)

    def weight(self, i: int, j: int, r: int) -> Number:
        return self.entries.get((i, j, r), 0)

    def row(self, i: int, j: int) -> Dict[int, Number]:
        return {r: w for (a, b, r), w in self.entries.items() if (a, b) == (i, j)}

    def is_integral(self, tol: float = 0.0) -> bool:
        return all(abs(w - round(w)) <= tol for w in self.entries.values())

    def rounded(self) -> "AssignmentMatrix":
        """Snap every weight to the nearest of {0, 1}."""
        snapped = {k: round(w) for k, w in self.entries.items() if round(w) != 0}
        return AssignmentMatrix(self.n, self.m_prime, snapped)

    def labels(self) -> Dict[Tuple[int, int], int]:
        """Hard assignment by per-interval argmax; ties go to the smallest r."""
        out: Dict[Tuple[int, int], int] = {}
        for (i, j) in intervals(self.n):
            row = self.row(i, j)
            if not row:
                raise ValueError(f"interval ({i}, {j}) has no assigned weight")
            best = max(sorted(row), key=lambda r: (row[r], -r))
            out[(i, j)] = best
        return out

    def check_multimatching(self, multiplicities: Sequence[int], tol: float = 1e-6) -> None:
        """Raise unless row sums are 1 and column sums match multiplicities."""
        for (i, j) in intervals(self.n):
            s = sum(self.row(i, j).values())
            if abs(s - 1) > tol:
                raise ValueError(f"row sum {s} at interval ({i}, {j})")
        for r in range(1, self.m_prime + 1):
            s = sum(w for (a, b, rr), w in self.entries.items() if rr == r)
            if abs(s - multiplicities[r - 1]) > tol:
                raise ValueError(f"column sum {s} for value index {r}")


@dataclass(frozen=True)
class Ruler:
    """An n x n oriented difference matrix; see is_ruler for the triangle law."""

    entries: Tuple[Tuple[Number, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("ruler matrix must be square")
        if n < 1:
            raise ValueError("empty ruler")

    @property
    def n(self) -> int:
        return len(self.entries)

    def diff(self, i: int, j: int) -> Number:
        """Entry for 1-based point indices (i, j)."""
        return self.entries[i - 1][j - 1]


def ruler_from_points(ps: PointSet) -> Ruler:
    coords = ps.coords
    return Ruler(tuple(tuple(b - a for b in coords) for a in coords))


def ruler_from_assignment(assignment: AssignmentMatrix, Y: DistanceMultiset) -> Ruler:
    """rho[i][j] = sum_r y_r * P(i, j, r), extended skew-symmetrically.

    No triangle check happens here; use is_ruler on the result.
    """
    if assignment.m_prime != Y.m_prime:
        raise ValueError(
            f"assignment has m'={assignment.m_prime} but multiset has {Y.m_prime}"
        )
    n = assignment.n
    mat: List[List[Number]] = [[0] * n for _ in range(n)]
    for (i, j) in intervals(n):
        row = assignment.row(i, j)
        if abs(sum(row.values()) - 1) > 1e-9:
            raise ValueError(f"row sums of the assignment must be 1 (interval ({i},{j}))")
        v = sum(Y.values[r - 1] * w for r, w in row.items())
        mat[i - 1][j - 1] = v
        mat[j - 1][i - 1] = -v
    return Ruler(tuple(tuple(row) for row in mat))


def _as_matrix(rho) -> Tuple[Tuple[Number, ...], ...]:
    if isinstance(rho, Ruler):
        return rho.entries
    rows = tuple(tuple(row) for row in rho)
    if any(len(row) != len(rows) for row in rows):
        raise ValueError("matrix must be square")
    return rows


def triangle_violation(rho) -> Number:
    """Max |rho_ik - rho_ij - rho_jk| over i < j < k (0 when n < 3)."""
    mat = _as_matrix(rho)
    n = len(mat)
    worst: Number = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = abs(mat[i][k] - mat[i][j] - mat[j][k])
                if v > worst:
                    worst = v
    return worst


def is_ruler(rho, tol: Number = 0) -> bool:
    """True iff diagonal, skew-symmetry and all triangle equalities hold within tol."""
    mat = _as_matrix(rho)
    n = len(mat)
    for i in range(n):
        if abs(mat[i][i]) > tol:
            return False
        for j in range(i + 1, n):
            if abs(mat[i][j] + mat[j][i]) > tol:
                return False
    return triangle_violation(mat) <= tol


def realize(rho, tol: Number = 0) -> PointSet:
    """Coordinates x with x_1 = 0 and x_i = rho[1][i], for a monotone ruler."""
    mat = _as_matrix(rho)
    if not is_ruler(mat, tol):
        raise ValueError("matrix violates the ruler triangle equalities")
    n = len(mat)
    for i in range(n):
        for j in range(i + 1, n):
            if not mat[i][j] > 0:
                raise ValueError("ruler is not monotone; cannot realize an increasing point set")
    first = mat[0]
    return PointSet(tuple(first[i] - first[0] for i in range(n)))

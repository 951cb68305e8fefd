"""Assignment-first evaluation metrics.

Ground truth for a known point set is the labeling that sends each interval
to the index of its distance value, plus the position permutation obtained
by filling each equal-value block of the sorted distance list with that
value's intervals in lexicographic order (the shared canonical tie rule).
Labeling error and coordinate MAE are reported after minimizing over the
reflection of the ground truth, so a perfectly recovered mirror image
scores zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (
    AssignmentMatrix,
    DistanceMultiset,
    PointSet,
    delta,
    intervals,
)
from .numbers import Number, all_exact

__all__ = [
    "GroundTruth",
    "ground_truth",
    "reflect_assignment",
    "labeling_error",
    "kendall_tau",
    "coordinate_mae",
    "integrality_score",
    "harden",
    "perm_from_assignment",
]


@dataclass(frozen=True)
class GroundTruth:
    coords: PointSet
    assignment: AssignmentMatrix
    perm: Tuple[int, ...]


def _value_index(Y: DistanceMultiset, d: Number) -> int:
    """Index r of the distance value equal to d (1-based)."""
    if Y.exact:
        for r, v in enumerate(Y.values, start=1):
            if v == d:
                return r
        raise ValueError(f"distance {d} not among the values")
    best, best_err = 0, None
    for r, v in enumerate(Y.values, start=1):
        err = abs(float(v) - float(d))
        if best_err is None or err < best_err:
            best, best_err = r, err
    if best_err > 1e-9 * (1 + abs(float(d))):
        raise ValueError(f"distance {d} not among the values")
    return best


def ground_truth(ps: PointSet) -> GroundTruth:
    """The labeling and position permutation induced by known coordinates."""
    Y = delta(ps)
    n = ps.n
    entries: Dict[Tuple[int, int, int], Number] = {}
    by_label: Dict[int, List[Tuple[int, int]]] = {}
    for (i, j) in intervals(n):
        d = ps.coords[j - 1] - ps.coords[i - 1]
        r = _value_index(Y, d)
        entries[(i, j, r)] = 1
        by_label.setdefault(r, []).append((i, j))
    assignment = AssignmentMatrix(n, Y.m_prime, entries)

    # positions 1..m of the sorted expanded list, filled blockwise
    pos_of = {iv: q for q, iv in enumerate(intervals(n), start=1)}
    perm: List[int] = []
    for r in range(1, Y.m_prime + 1):
        for iv in sorted(by_label.get(r, [])):
            perm.append(pos_of[iv])
    return GroundTruth(ps, assignment, tuple(perm))


def reflect_assignment(P: AssignmentMatrix) -> AssignmentMatrix:
    """The labeling of the mirrored point set: (i, j) -> (n+1-j, n+1-i)."""
    n = P.n
    entries = {(n + 1 - j, n + 1 - i, r): w for (i, j, r), w in P.entries.items()}
    return AssignmentMatrix(n, P.m_prime, entries)


def _label_mismatch(A: AssignmentMatrix, B: AssignmentMatrix) -> Number:
    la, lb = A.labels(), B.labels()
    m = len(la)
    bad = sum(1 for iv in la if la[iv] != lb[iv])
    return Fraction(bad, m)


def labeling_error(P_hat: AssignmentMatrix, P_star: AssignmentMatrix) -> Number:
    """Fraction of intervals labeled differently, minimized over reflection."""
    if P_hat.n != P_star.n or P_hat.m_prime != P_star.m_prime:
        raise ValueError("assignments must share n and m'")
    if not P_hat.is_integral(0) or not P_star.is_integral(0):
        raise ValueError("labeling error needs integral assignments")
    direct = _label_mismatch(P_hat, P_star)
    mirrored = _label_mismatch(P_hat, reflect_assignment(P_star))
    return min(direct, mirrored)


def _check_perm(pi: Sequence[int], m: int, name: str) -> None:
    if sorted(pi) != list(range(1, m + 1)):
        raise ValueError(f"{name} is not a permutation of 1..{m}")


def kendall_tau(pi_hat: Sequence[int], pi_star: Sequence[int]) -> Number:
    """Discordant pairs of pi_hat relative to pi_star, over C(m,2)."""
    m = len(pi_hat)
    if len(pi_star) != m:
        raise ValueError("permutations differ in length")
    _check_perm(pi_hat, m, "pi_hat")
    _check_perm(pi_star, m, "pi_star")
    if m < 2:
        return 0
    inv_star = [0] * m
    for p, v in enumerate(pi_star):
        inv_star[v - 1] = p
    sigma = [pi_hat[inv_star[k]] for k in range(m)]
    bad = sum(
        1
        for a in range(m)
        for b in range(a + 1, m)
        if sigma[a] > sigma[b]
    )
    return Fraction(bad, m * (m - 1) // 2)


def coordinate_mae(x_hat: PointSet, x_star: PointSet) -> Number:
    """Mean absolute coordinate error after anchoring, min over reflection."""
    if x_hat.n != x_star.n:
        raise ValueError("point sets differ in size")
    ref = x_star.anchored().coords

    def mae(ps: PointSet) -> Number:
        cs = ps.anchored().coords
        errs = [abs(a - b) for a, b in zip(cs, ref)]
        if all_exact(errs):
            return Fraction(sum(errs), len(errs))
        return float(sum(float(e) for e in errs)) / len(errs)

    return min(mae(x_hat), mae(x_hat.reflected()))


def integrality_score(P_hat: AssignmentMatrix, tol: float = 1e-6) -> Number:
    """Mean over intervals of the largest weight in the row."""
    tops: List[Number] = []
    for iv in intervals(P_hat.n):
        row = P_hat.row(*iv)
        s = sum(row.values())
        if abs(s - 1) > tol:
            raise ValueError(f"row sum {s} at interval {iv}")
        tops.append(max(row.values()))
    if all_exact(tops):
        return Fraction(sum(tops), len(tops))
    return float(sum(float(t) for t in tops)) / len(tops)


def harden(P_hat: AssignmentMatrix,
           multiplicities: Sequence[int]) -> Tuple[AssignmentMatrix, bool]:
    """Per-row argmax rounding; second value flags broken column sums."""
    labels = P_hat.labels()
    entries = {(i, j, r): 1 for (i, j), r in labels.items()}
    hard = AssignmentMatrix(P_hat.n, P_hat.m_prime, entries)
    counts = [0] * P_hat.m_prime
    for r in labels.values():
        counts[r - 1] += 1
    violated = counts != [int(mu) for mu in multiplicities]
    return hard, violated


def perm_from_assignment(P: AssignmentMatrix,
                         multiplicities: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Position permutation of an integral assignment under the tie rule.

    None when column sums break the multiplicities, in which case no
    position permutation is defined.
    """
    if not P.is_integral(0):
        raise ValueError("needs an integral assignment")
    by_label: Dict[int, List[Tuple[int, int]]] = {}
    for (i, j), r in P.labels().items():
        by_label.setdefault(r, []).append((i, j))
    for r in range(1, P.m_prime + 1):
        if len(by_label.get(r, [])) != int(multiplicities[r - 1]):
            return None
    pos_of = {iv: q for q, iv in enumerate(intervals(P.n), start=1)}
    perm: List[int] = []
    for r in range(1, P.m_prime + 1):
        for iv in sorted(by_label.get(r, [])):
            perm.append(pos_of[iv])
    return tuple(perm)

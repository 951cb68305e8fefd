"""Seeded corpora of realizable and certified non-realizable instances.

Realizable instances come straight from integer point sets, so the
generating coordinates are a witness.  Non-realizable instances are made
by nudging one value of a realizable multiset and keeping only those the
backtracking oracle proves infeasible, so both sides carry independent
certificates.
"""
from __future__ import annotations

from collections import Counter
from typing import List, Optional, Tuple

import numpy as np

from ..core import DistanceMultiset, PointSet, delta, group_values
from .oracle import oracle_realizable

__all__ = ["random_points", "build_realizable", "build_nonrealizable"]


def random_points(rng: np.random.Generator, n: int, span: int) -> PointSet:
    """n distinct integer coordinates starting at 0 with range <= span."""
    while True:
        inner = sorted(int(v) for v in rng.choice(span, size=n - 1, replace=False))
        coords = [0] + [v + 1 for v in inner]
        if len(set(coords)) == n:
            return PointSet(tuple(coords))


def build_realizable(count: int, seed: int, n_lo: int = 4, n_hi: int = 7,
                     span: int = 40) -> List[Tuple[PointSet, DistanceMultiset]]:
    """count integer instances with witnesses, n drawn from [n_lo, n_hi]."""
    rng = np.random.default_rng(seed)
    out: List[Tuple[PointSet, DistanceMultiset]] = []
    while len(out) < count:
        n = int(rng.integers(n_lo, n_hi + 1))
        ps = random_points(rng, n, span)
        out.append((ps, delta(ps)))
    return out


def _nudge(rng: np.random.Generator, Y: DistanceMultiset) -> Optional[DistanceMultiset]:
    """Shift one expanded distance by a small integer step; None if invalid."""
    items = Y.expanded()
    k = int(rng.integers(0, len(items)))
    step = int(rng.choice([-2, -1, 1, 2]))
    items[k] = items[k] + step
    if items[k] <= 0:
        return None
    try:
        return group_values(items)
    except ValueError:
        return None


def build_nonrealizable(count: int, seed: int, n_lo: int = 4, n_hi: int = 7,
                        span: int = 40,
                        node_budget: int = 500_000) -> List[DistanceMultiset]:
    """count oracle-certified non-realizable multisets with triangular totals."""
    rng = np.random.default_rng(seed)
    out: List[DistanceMultiset] = []
    seen: Counter = Counter()
    while len(out) < count:
        n = int(rng.integers(n_lo, n_hi + 1))
        ps = random_points(rng, n, span)
        cand = _nudge(rng, delta(ps))
        if cand is None:
            continue
        key = (cand.values, cand.multiplicities)
        if seen[key]:
            continue
        res = oracle_realizable(cand, node_budget)
        if res.realizable is False:
            seen[key] += 1
            out.append(cand)
    return out

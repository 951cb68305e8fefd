"""Backtracking realizability oracle.

Independent of the optimization stack: places the largest unexplained
distance at either end of the ruler and recurses over the remaining
multiset.  Complete for small n within the node budget; over budget it
answers undecided rather than guessing.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import List, Optional

from ..core import DistanceMultiset, PointSet, delta
from ..numbers import Number

__all__ = ["OracleResult", "oracle_realizable"]


class _Budget(Exception):
    pass


@dataclass(frozen=True)
class OracleResult:
    realizable: Optional[bool]
    witness: Optional[PointSet]
    nodes: int
    budget_exceeded: bool


def oracle_realizable(Y: DistanceMultiset, node_budget: int = 500_000) -> OracleResult:
    """Search for a point set with distance multiset Y.

    realizable=None means the budget ran out before the search finished.
    The witness, when present, has been re-checked against Y.
    """
    if not Y.exact:
        raise ValueError("the oracle needs exact distances")
    Y.point_count()
    pool: Counter = Counter(Y.expanded())
    width = max(pool)
    pool[width] -= 1
    if pool[width] == 0:
        del pool[width]
    placed: List[Number] = [0, width]
    nodes = 0

    def consume(p: Number) -> Optional[List[Number]]:
        """Remove |p - q| for every placed q; None when some are missing."""
        removed: List[Number] = []
        for q in placed:
            d = abs(p - q)
            if pool.get(d, 0) == 0:
                for x in removed:
                    pool[x] += 1
                return None
            pool[d] -= 1
            if pool[d] == 0:
                del pool[d]
            removed.append(d)
        return removed

    def restore(removed: List[Number]) -> None:
        for x in removed:
            pool[x] += 1

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        if not pool:
            return True
        d = max(pool)
        candidates = {d, width - d}
        for p in candidates:
            if not 0 < p < width or p in placed:
                continue
            removed = consume(p)
            if removed is None:
                continue
            placed.append(p)
            if search():
                return True
            placed.pop()
            restore(removed)
        return False

    try:
        ok = search()
    except _Budget:
        return OracleResult(None, None, nodes, True)
    if not ok:
        return OracleResult(False, None, nodes, False)
    witness = PointSet(tuple(sorted(placed)))
    if delta(witness) != Y:
        raise AssertionError("oracle produced an invalid witness")
    return OracleResult(True, witness, nodes, False)

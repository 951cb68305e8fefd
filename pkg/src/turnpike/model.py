"""Constraint-system builders for the assignment formulations.

Three formulations are produced as solver-agnostic sparse systems: a
coordinate-coupled mixed-integer model, a triangle/assignment integer model
driven by a two-partition set, and the LP relaxation of either.  Optional
reductions: restricting triangle rows to the refinement basis (1,j,k) and
eliminating assignment variables excluded by containment rank bounds.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Optional, Sequence

from .core import DistanceMultiset, intervals, refinements
from .numbers import Number
from .partitions import TwoPartition, sorted_triples

__all__ = [
    "VarRef",
    "LinearRow",
    "ModelMatrix",
    "ModelStats",
    "build_milp",
    "build_triangle_ilp",
    "relax",
    "basis_refinements",
    "containment_forbidden",
    "model_stats",
]

EQ = "="
LE = "<="
GE = ">="


@dataclass(frozen=True)
class VarRef:
    """A model variable: kind "x" (coordinate), "P" (assignment) or "T" (triangle).

    index is (i,) for x, (i, j, r) for P and (i, j, k, r, s, t) for T,
    all 1-based.  lower/upper of None mean unbounded on that side.
    """

    kind: str
    index: tuple[int, ...]
    lower: Optional[Number]
    upper: Optional[Number]
    integral: bool

    @property
    def name(self) -> str:
        return "_".join([self.kind, *map(str, self.index)])


@dataclass(frozen=True)
class LinearRow:
    """One sparse constraint row: sum of coeff * var (by column) `relation` rhs."""

    coeffs: tuple[tuple[int, Number], ...]
    relation: str
    rhs: Number
    label: str = ""

    def as_dict(self) -> dict[int, Number]:
        return dict(self.coeffs)


@dataclass(frozen=True)
class ModelStats:
    n_vars: int
    n_constraints: int
    n_pruned_assignment_vars: int
    n_refinements: int
    partition_count: int


@dataclass(frozen=True)
class ModelMatrix:
    """Immutable sparse constraint system with bounds and integrality flags."""

    vars: tuple[VarRef, ...]
    rows: tuple[LinearRow, ...]
    objective: tuple[tuple[int, Number], ...] = ()
    form: str = ""
    n: int = 0
    m_prime: int = 0
    basis: bool = False
    prune: bool = False
    approximate_pset: bool = False
    n_pruned: int = 0
    n_refinements: int = 0
    partition_count: int = 0
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ncols = len(self.vars)
        for row in self.rows:
            for col, _ in row.coeffs:
                if not 0 <= col < ncols:
                    raise ValueError(f"row {row.label!r} references unknown column {col}")
            if row.relation not in (EQ, LE, GE):
                raise ValueError(f"bad relation {row.relation!r}")

    @cached_property
    def position(self) -> dict[tuple[str, tuple[int, ...]], int]:
        """Map (kind, index) to column number."""
        return {(v.kind, v.index): c for c, v in enumerate(self.vars)}

    @cached_property
    def name_to_col(self) -> dict[str, int]:
        return {v.name: c for c, v in enumerate(self.vars)}

    def column(self, kind: str, index: tuple[int, ...]) -> Optional[int]:
        return self.position.get((kind, index))

    @property
    def is_relaxed(self) -> bool:
        return not any(v.integral for v in self.vars)


def basis_refinements(n: int) -> list[tuple[int, int, int]]:
    """All refinements anchored at 1: (1,j,k) with 1 < j < k <= n, lexicographic."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [(1, j, k) for j in range(2, n + 1) for k in range(j + 1, n + 1)]


def containment_forbidden(n: int, mu: Sequence[int]) -> set[tuple[int, int, int]]:
    """Assignment triples (i,j,r) excluded by the containment rank bounds.

    With M_r the multiplicity prefix sum, the label-r rank block
    [M_{r-1}+1, M_r] must intersect the feasible rank window of interval
    (i,j), which is [i*(n-j+1), m - C(j-i+1,2) + 1]; triples whose block
    misses the window are forbidden.
    """
    m = sum(mu)
    if m != comb(n, 2):
        raise ValueError("multiplicities do not total n(n-1)/2")
    prefix = [0]
    for w in mu:
        prefix.append(prefix[-1] + w)
    forbidden: set[tuple[int, int, int]] = set()
    for i, j in intervals(n):
        rank_lo = i * (n - j + 1)
        rank_hi = m - comb(j - i + 1, 2) + 1
        for r in range(1, len(mu) + 1):
            if prefix[r] < rank_lo or prefix[r - 1] + 1 > rank_hi:
                forbidden.add((i, j, r))
    return forbidden


def build_milp(Y: DistanceMultiset) -> ModelMatrix:
    """Coordinate-coupled mixed-integer feasibility model.

    Free coordinates x_1..x_n and binary assignment variables P, tied by
    per-interval linking rows x_j - x_i = sum_r y_r P^r_ij, with the
    translation ray removed by anchoring x_1 = 0.
    """
    n = Y.point_count()
    m_prime = Y.m_prime
    ivs = intervals(n)

    vars_: list[VarRef] = [VarRef("x", (i,), None, None, False) for i in range(1, n + 1)]
    pcol: dict[tuple[int, int, int], int] = {}
    for i, j in ivs:
        for r in range(1, m_prime + 1):
            pcol[(i, j, r)] = len(vars_)
            vars_.append(VarRef("P", (i, j, r), 0, 1, True))

    rows: list[LinearRow] = []
    for i, j in ivs:
        coeffs = tuple((pcol[(i, j, r)], 1) for r in range(1, m_prime + 1))
        rows.append(LinearRow(coeffs, EQ, 1, f"cover_{i}_{j}"))
    for r in range(1, m_prime + 1):
        coeffs = tuple((pcol[(i, j, r)], 1) for i, j in ivs)
        rows.append(LinearRow(coeffs, EQ, Y.multiplicities[r - 1], f"mult_{r}"))
    for i, j in ivs:
        coeffs = [(j - 1, 1), (i - 1, -1)]
        coeffs.extend((pcol[(i, j, r)], -Y.values[r - 1]) for r in range(1, m_prime + 1))
        rows.append(LinearRow(tuple(coeffs), EQ, 0, f"link_{i}_{j}"))
    rows.append(LinearRow(((0, 1),), EQ, 0, "anchor"))

    return ModelMatrix(
        vars=tuple(vars_),
        rows=tuple(rows),
        form="milp",
        n=n,
        m_prime=m_prime,
        partition_count=0,
    )


def build_triangle_ilp(
    Y: DistanceMultiset,
    pset: Iterable[TwoPartition],
    *,
    basis: bool = False,
    prune: bool = False,
    approximate: bool = False,
) -> ModelMatrix:
    """Triangle/assignment integer model over a two-partition set.

    Binary P assigns a value index to every interval (multi-matching rows);
    for each refinement i<j<k one binary T selects a compatible two-partition,
    and three marginalization families tie the T choice to the P labels of the
    edges (i,j), (j,k) and (i,k).  With basis=True triangle rows are emitted
    only for refinements (1,j,k); with prune=True containment-forbidden P
    variables and any T variable touching one are eliminated.
    """
    n = Y.point_count()
    m_prime = Y.m_prime
    ivs = intervals(n)
    triples = sorted_triples(pset)
    refs = basis_refinements(n) if basis else refinements(n)

    forbidden = containment_forbidden(n, Y.multiplicities) if prune else set()

    vars_: list[VarRef] = []
    pcol: dict[tuple[int, int, int], int] = {}
    for i, j in ivs:
        for r in range(1, m_prime + 1):
            if (i, j, r) in forbidden:
                continue
            pcol[(i, j, r)] = len(vars_)
            vars_.append(VarRef("P", (i, j, r), 0, 1, True))
    n_pruned = len(ivs) * m_prime - len(pcol)

    tcol: dict[tuple[int, int, int, TwoPartition], int] = {}
    for i, j, k in refs:
        for tp in triples:
            r, s, t = tp
            if (i, j, r) in forbidden or (j, k, s) in forbidden or (i, k, t) in forbidden:
                continue
            tcol[(i, j, k, tp)] = len(vars_)
            vars_.append(VarRef("T", (i, j, k, r, s, t), 0, 1, True))

    rows: list[LinearRow] = []
    for i, j in ivs:
        coeffs = tuple(
            (pcol[(i, j, r)], 1) for r in range(1, m_prime + 1) if (i, j, r) in pcol
        )
        rows.append(LinearRow(coeffs, EQ, 1, f"cover_{i}_{j}"))
    for r in range(1, m_prime + 1):
        coeffs = tuple((pcol[(i, j, r)], 1) for i, j in ivs if (i, j, r) in pcol)
        rows.append(LinearRow(coeffs, EQ, Y.multiplicities[r - 1], f"mult_{r}"))

    for i, j, k in refs:
        coeffs = tuple(
            (tcol[(i, j, k, tp)], 1) for tp in triples if (i, j, k, tp) in tcol
        )
        rows.append(LinearRow(coeffs, EQ, 1, f"select_{i}_{j}_{k}"))

    # Value indices absent from a coordinate of the partition set make the
    # matching marginalization sum empty, so the row degenerates to P = 0;
    # the same degenerate row recurs for every refinement sharing the edge
    # and is kept once.
    fixed_zero: set[int] = set()

    def marginal_rows(coord: int, edge_of, tag: str) -> None:
        for i, j, k in refs:
            i2, j2 = edge_of(i, j, k)
            for v in range(1, m_prime + 1):
                p = pcol.get((i2, j2, v))
                tcols = [
                    tcol[(i, j, k, tp)]
                    for tp in triples
                    if tp[coord] == v and (i, j, k, tp) in tcol
                ]
                if p is None:
                    # Any surviving T has all three P endpoints alive, so a
                    # pruned P leaves nothing to constrain.
                    continue
                if not tcols:
                    if p not in fixed_zero:
                        fixed_zero.add(p)
                        rows.append(
                            LinearRow(((p, 1),), EQ, 0, f"fix0_P_{i2}_{j2}_{v}")
                        )
                    continue
                coeffs = [(p, 1)] + [(c, -1) for c in tcols]
                rows.append(
                    LinearRow(tuple(coeffs), EQ, 0, f"marg{tag}_{i}_{j}_{k}_{v}")
                )

    marginal_rows(0, lambda i, j, k: (i, j), "A")
    marginal_rows(1, lambda i, j, k: (j, k), "B")
    marginal_rows(2, lambda i, j, k: (i, k), "C")

    warnings: tuple[str, ...] = ()
    if not triples and n >= 3:
        warnings = ("empty two-partition set with n >= 3: model is trivially infeasible",)

    return ModelMatrix(
        vars=tuple(vars_),
        rows=tuple(rows),
        form="triangle_ilp",
        n=n,
        m_prime=m_prime,
        basis=basis,
        prune=prune,
        approximate_pset=approximate,
        n_pruned=n_pruned,
        n_refinements=len(refs),
        partition_count=len(triples),
        warnings=warnings,
    )


_RELAXED_FORM = {"triangle_ilp": "triangle_lp", "milp": "milp_lp"}


def relax(model: ModelMatrix) -> ModelMatrix:
    """LP relaxation: identical rows and bounds, all integrality flags cleared."""
    if model.is_relaxed:
        return model
    vars_ = tuple(
        replace(v, integral=False) if v.integral else v for v in model.vars
    )
    return replace(model, vars=vars_, form=_RELAXED_FORM.get(model.form, model.form))


def model_stats(model: ModelMatrix) -> ModelStats:
    return ModelStats(
        n_vars=len(model.vars),
        n_constraints=len(model.rows),
        n_pruned_assignment_vars=model.n_pruned,
        n_refinements=model.n_refinements,
        partition_count=model.partition_count,
    )

"""Assignment-first reconstruction pipeline.

Enumerate the two-partition relation, build and solve the triangle program,
extract the assignment, and classify the outcome.  A run claims
``realizable`` only when it holds an integral witness that passes exact
re-checks against an exactly enumerated relation; ``not_realizable`` only
follows from an exact-arithmetic infeasibility certificate.  Everything
else is ``undecided`` or, when the relation was approximated, a
``diagnostic_only`` report.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .core import (
    AssignmentMatrix,
    DistanceMultiset,
    PointSet,
    Ruler,
    delta,
    is_ruler,
    realize,
    ruler_from_assignment,
    triangle_violation,
)
from .model import build_triangle_ilp, relax
from .numbers import Number, all_exact
from .partitions import approximate_two_partitions, enumerate_two_partitions
from .solver import FEASIBLE, INFEASIBLE, SolverConfig, extract_assignment, solve

__all__ = [
    "REALIZABLE",
    "NOT_REALIZABLE",
    "UNDECIDED",
    "DIAGNOSTIC_ONLY",
    "PipelineOptions",
    "PipelineResult",
    "VerifyReport",
    "run",
    "coords_vector",
    "coords_least_squares",
    "verify_certificate",
]

REALIZABLE = "realizable"
NOT_REALIZABLE = "not_realizable"
UNDECIDED = "undecided"
DIAGNOSTIC_ONLY = "diagnostic_only"

FORMS = ("tri_ilp", "tri_lp")


@dataclass(frozen=True)
class PipelineOptions:
    form: str = "tri_ilp"
    basis: bool = False
    prune: bool = True
    tau: Optional[float] = None
    coords: bool = False
    exact: bool = False
    feasibility_tol: float = 1e-9
    integrality_tol: float = 1e-6
    node_limit: int = 100_000
    iteration_limit: int = 200_000
    time_limit: Optional[float] = None
    pivot_rule: str = "dantzig_with_bland_fallback"

    def __post_init__(self) -> None:
        if self.form not in FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be nonnegative")


@dataclass(frozen=True)
class PipelineResult:
    assignment: Optional[AssignmentMatrix]
    integral: bool
    certificate: str
    coords: Optional[PointSet]
    induced_ruler_residual: Optional[Number]
    provenance: Dict[str, Any]


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


def _matrix_rows(rho) -> List[List[Number]]:
    if isinstance(rho, Ruler):
        return [list(row) for row in rho.entries]
    rows = [list(row) for row in rho]
    if any(len(row) != len(rows) for row in rows):
        raise ValueError("matrix must be square")
    return rows


def coords_vector(rho) -> List[Number]:
    """Minimizer of sum_{i,j} (x_j - x_i - rho_ij)^2 with x_1 = 0.

    Over the complete difference graph the unique minimizer (up to
    translation) is the column mean x_k = (1/n) sum_i rho[i][k]; the shift
    anchors x_1 = 0.  Works for inconsistent inputs too.
    """
    rows = _matrix_rows(rho)
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    exact = all(all_exact(row) for row in rows)
    means: List[Number] = []
    for k in range(n):
        s = sum(rows[i][k] for i in range(n))
        means.append(Fraction(s, n) if exact else float(s) / n)
    x0 = means[0]
    return [m - x0 for m in means]


def coords_least_squares(rho) -> PointSet:
    """coords_vector wrapped as a point set (input must order the points)."""
    return PointSet(tuple(coords_vector(rho)))


def _same_multiset(A: DistanceMultiset, B: DistanceMultiset, rtol: float) -> bool:
    if A.multiplicities != B.multiplicities:
        return False
    if A.exact and B.exact:
        return A.values == B.values
    scale = max(abs(float(v)) for v in list(A.values) + list(B.values))
    return all(
        abs(float(a) - float(b)) <= rtol * (1 + scale)
        for a, b in zip(A.values, B.values)
    )


def _witness_ok(assignment: AssignmentMatrix, Y: DistanceMultiset,
                res_tol: Number) -> bool:
    """True when the integral assignment provably reproduces Y."""
    try:
        assignment.check_multimatching(Y.multiplicities, tol=0)
        rho = ruler_from_assignment(assignment, Y)
        tol = 0 if Y.exact else res_tol
        if not is_ruler(rho, tol):
            return False
        x = realize(rho, tol)
        return _same_multiset(delta(x), Y, rtol=1e-9)
    except ValueError:
        return False


def run(Y: DistanceMultiset, opts: PipelineOptions = PipelineOptions()) -> PipelineResult:
    """Execute the four pipeline steps and classify the outcome."""
    pset_exact = opts.tau is None
    if pset_exact:
        pset = enumerate_two_partitions(Y)
    else:
        pset = approximate_two_partitions(Y, opts.tau)
    model = build_triangle_ilp(
        Y, pset, basis=opts.basis, prune=opts.prune, approximate=not pset_exact)
    if opts.form == "tri_lp":
        model = relax(model)
    cfg = SolverConfig(
        feasibility_tol=opts.feasibility_tol,
        integrality_tol=opts.integrality_tol,
        pivot_rule=opts.pivot_rule,
        iteration_limit=opts.iteration_limit,
        node_limit=opts.node_limit,
        exact=opts.exact,
        time_limit=opts.time_limit,
    )
    sol = solve(model, cfg)

    assignment: Optional[AssignmentMatrix] = None
    integral = False
    residual: Optional[Number] = None
    coords: Optional[PointSet] = None
    warnings: List[str] = list(model.warnings)
    max_y = max(abs(float(v)) for v in Y.values)
    res_tol = opts.feasibility_tol * (1 + max_y)

    if sol.status == FEASIBLE:
        assignment = extract_assignment(sol, model.n, model.m_prime,
                                        opts.integrality_tol)
        integral = assignment.is_integral(opts.integrality_tol)
        if integral:
            assignment = assignment.rounded()
        rho = ruler_from_assignment(assignment, Y)
        residual = triangle_violation(rho)

    if not pset_exact:
        certificate = DIAGNOSTIC_ONLY
    elif sol.status == FEASIBLE:
        if integral and _witness_ok(assignment, Y, res_tol):
            certificate = REALIZABLE
        elif integral:
            # solver called it integral-feasible but the witness re-check failed
            certificate = UNDECIDED
            warnings.append("integral solution failed the exact witness check")
        else:
            certificate = DIAGNOSTIC_ONLY
    elif sol.status == INFEASIBLE:
        if sol.stats.certified:
            certificate = NOT_REALIZABLE
        else:
            certificate = UNDECIDED
    else:
        certificate = UNDECIDED

    if opts.coords and assignment is not None:
        rho = ruler_from_assignment(assignment, Y)
        if certificate == REALIZABLE:
            coords = realize(rho, 0 if Y.exact else res_tol)
        else:
            try:
                coords = coords_least_squares(rho)
            except ValueError as exc:
                warnings.append(f"coordinate extraction failed: {exc}")

    provenance = {
        "options": dataclasses.asdict(opts),
        "pset": {"count": len(pset), "exact": pset_exact, "tau": opts.tau},
        "model": {
            "form": model.form,
            "rows": len(model.rows),
            "cols": len(model.vars),
            "basis": model.basis,
            "prune": model.prune,
            "n_pruned": model.n_pruned,
        },
        "solver": {
            "status": sol.status,
            "iterations": sol.stats.simplex_iterations,
            "nodes": sol.stats.bb_nodes,
            "wall_time": sol.stats.wall_time,
            "certified": sol.stats.certified,
        },
        "warnings": warnings,
    }
    return PipelineResult(assignment, integral, certificate, coords, residual,
                          provenance)


def verify_certificate(result: PipelineResult, Y: DistanceMultiset) -> VerifyReport:
    """Independently re-check a realizable claim from its artifacts alone."""
    if result.certificate != REALIZABLE:
        return VerifyReport(False, "certificate_not_realizable")
    if result.assignment is None:
        return VerifyReport(False, "no_assignment")
    P = result.assignment
    if not P.is_integral(0):
        return VerifyReport(False, "not_integral")
    try:
        P.check_multimatching(Y.multiplicities, tol=0)
        rho = ruler_from_assignment(P, Y)
        tol: Number = 0 if Y.exact else 1e-7 * (1 + max(abs(float(v)) for v in Y.values))
        if not is_ruler(rho, tol):
            return VerifyReport(False, "multiplicity_or_triangle")
        x = realize(rho, tol)
    except ValueError:
        return VerifyReport(False, "multiplicity_or_triangle")
    if not _same_multiset(delta(x), Y, rtol=1e-9):
        return VerifyReport(False, "distance_mismatch")
    return VerifyReport(True, None)

"""Feasibility solving for ModelMatrix systems.

solve_lp runs a bounded-variable phase-one simplex; solve_ilp wraps it in a
depth-first branch-and-bound over the binary variables.  The default engine
works in float64.  With ``exact=True`` every claim that decides the outcome
is certified in rational arithmetic: integral candidates are re-verified
exactly against the rows, and every infeasibility pruning carries a Farkas
certificate checked in Fractions (falling back to a fully rational simplex
for the rare node whose float certificate does not validate).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import simplex
from .lpfile import read_solution_values, write_model
from .model import EQ, GE, LE, ModelMatrix, VarRef
from .numbers import Number, as_fraction, is_exact

__all__ = [
    "SolverConfig",
    "Solution",
    "SolveStats",
    "solve_lp",
    "solve_ilp",
    "solve",
    "extract_assignment",
    "verify_solution",
    "SolutionCheck",
    "export_model",
    "import_solution",
]

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"
NODE_LIMIT = "node_limit"
TIME_LIMIT = "time_limit"


@dataclass(frozen=True)
class SolverConfig:
    feasibility_tol: float = 1e-9
    integrality_tol: float = 1e-6
    pivot_rule: str = "dantzig_with_bland_fallback"
    iteration_limit: int = 200_000
    node_limit: int = 100_000
    branch_rule: str = "most_fractional"
    exact: bool = False
    time_limit: Optional[float] = None

    def __post_init__(self) -> None:
        if self.feasibility_tol < 0 or self.integrality_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.pivot_rule not in ("bland", "dantzig_with_bland_fallback"):
            raise ValueError(f"unknown pivot rule {self.pivot_rule!r}")
        if self.branch_rule not in ("most_fractional", "first_fractional"):
            raise ValueError(f"unknown branch rule {self.branch_rule!r}")


@dataclass
class SolveStats:
    simplex_iterations: int = 0
    bb_nodes: int = 0
    wall_time: float = 0.0
    pivot_rule: str = ""
    certified: bool = False


@dataclass
class Solution:
    """Solver outcome; values map each model variable to its value."""

    status: str
    values: dict[VarRef, Number]
    stats: SolveStats

    def by_name(self) -> dict[str, Number]:
        return {v.name: x for v, x in self.values.items()}

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


class _Deadline:
    def __init__(self, limit: Optional[float]):
        self.t0 = time.perf_counter()
        self.limit = limit

    def expired(self) -> bool:
        return self.limit is not None and time.perf_counter() - self.t0 > self.limit

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0


def _pow2_row_scale(maxabs: float) -> float:
    """Power-of-two factor bringing the row's largest coefficient near 1."""
    if maxabs == 0:
        return 1.0
    import math

    return float(2.0 ** round(math.log2(maxabs)))


class _Standard:
    """Equality standard form of a model: slacks appended, rows equilibrated.

    Row scaling uses powers of two so the float data and the parallel exact
    (Fraction) data describe exactly the same system.
    """

    def __init__(self, model: ModelMatrix):
        self.model = model
        nm = len(model.vars)
        nslack = sum(1 for r in model.rows if r.relation != EQ)
        ns = nm + nslack
        m = len(model.rows)
        self.nm = nm
        self.ns = ns
        self.m = m

        self.A = np.zeros((m, ns))
        self.b = np.zeros(m)
        self.lo = np.full(ns, -np.inf)
        self.hi = np.full(ns, np.inf)
        self.scale: list[Fraction] = []

        for c, v in enumerate(model.vars):
            self.lo[c] = -np.inf if v.lower is None else float(v.lower)
            self.hi[c] = np.inf if v.upper is None else float(v.upper)

        self.rows_exact: list[dict[int, Fraction]] = []
        self.b_exact: list[Fraction] = []
        k = nm
        for i, row in enumerate(model.rows):
            coeffs = dict(row.coeffs)
            slack: Optional[tuple[int, int]] = None
            if row.relation == LE:
                slack = (k, 1)
            elif row.relation == GE:
                slack = (k, -1)
            maxabs = max((abs(float(c)) for c in coeffs.values()), default=0.0)
            if slack:
                maxabs = max(maxabs, 1.0)
            f = _pow2_row_scale(maxabs)
            # powers of two convert exactly in both arithmetics
            fF = Fraction(f)
            self.scale.append(fF)
            ex: dict[int, Fraction] = {}
            for c, coef in coeffs.items():
                self.A[i, c] = float(coef) / f
                ex[c] = as_fraction(coef) / fF
            if slack:
                sc, sgn = slack
                self.A[i, sc] = sgn / f
                ex[sc] = Fraction(sgn) / fF
                self.lo[sc] = 0.0
                k += 1
            self.b[i] = float(row.rhs) / f
            self.rows_exact.append(ex)
            self.b_exact.append(as_fraction(row.rhs) / fF)

        self.lo_exact: list[Optional[Number]] = []
        self.hi_exact: list[Optional[Number]] = []
        for c in range(ns):
            if c < nm:
                v = model.vars[c]
                self.lo_exact.append(v.lower)
                self.hi_exact.append(v.upper)
            else:
                self.lo_exact.append(0)
                self.hi_exact.append(None)

    def node_bounds(self, fix: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo = self.lo.copy()
        hi = self.hi.copy()
        for c, v in fix.items():
            lo[c] = hi[c] = float(v)
        return lo, hi

    def solve_node(self, fix: dict[int, int], cfg: SolverConfig) -> simplex.PhaseOneResult:
        lo, hi = self.node_bounds(fix)
        return simplex.phase_one(
            self.A, self.b, lo, hi,
            pivot_rule=cfg.pivot_rule,
            iteration_limit=cfg.iteration_limit,
            tol=cfg.feasibility_tol if cfg.feasibility_tol > 0 else 1e-9,
        )

    def solve_node_exact(self, fix: dict[int, int],
                         cfg: SolverConfig) -> simplex.ExactResult:
        A = [[Fraction(0)] * self.ns for _ in range(self.m)]
        for i, row in enumerate(self.rows_exact):
            for c, coef in row.items():
                A[i][c] = coef
        lo = list(self.lo_exact)
        hi = list(self.hi_exact)
        for c, v in fix.items():
            lo[c] = hi[c] = v
        return simplex.phase_one_exact(A, self.b_exact, lo, hi,
                                       iteration_limit=cfg.iteration_limit)

    def refine_basic(self, res: simplex.PhaseOneResult) -> np.ndarray:
        """Re-solve the final basis against pristine data to remove drift."""
        x = res.x.copy()
        struct = res.basis[res.basis < self.ns]
        if struct.size == 0:
            return x
        nb_mask = np.ones(self.ns, dtype=bool)
        nb_mask[struct] = False
        rhs = self.b - self.A[:, nb_mask] @ x[nb_mask]
        B = self.A[:, struct]
        try:
            if B.shape[0] == B.shape[1]:
                xb = np.linalg.solve(B, rhs)
            else:
                xb, *_ = np.linalg.lstsq(B, rhs, rcond=None)
        except np.linalg.LinAlgError:
            return x
        cand = x.copy()
        cand[struct] = xb
        old = float(np.max(np.abs(self.A @ x - self.b))) if self.m else 0.0
        new = float(np.max(np.abs(self.A @ cand - self.b))) if self.m else 0.0
        return cand if new <= old else x

    # exact-side helpers ---------------------------------------------------

    def farkas_valid_exact(self, y: Sequence[Number],
                           fix: dict[int, int]) -> bool:
        """Check a Farkas vector against the exact data: y^T b must fall
        outside the range of (y^T A) x over the (possibly fixed) box."""
        yR = [v if is_exact(v) else Fraction(float(v)).limit_denominator(10**9)
              for v in y]
        d: dict[int, Fraction] = {}
        yb = Fraction(0)
        for i, row in enumerate(self.rows_exact):
            yi = yR[i]
            if not yi:
                continue
            yb += yi * self.b_exact[i]
            for c, a in row.items():
                d[c] = d.get(c, Fraction(0)) + yi * a
        lo_s: Optional[Fraction] = Fraction(0)
        hi_s: Optional[Fraction] = Fraction(0)
        for c, dc in d.items():
            if not dc:
                continue
            if c in fix:
                l: Optional[Number] = fix[c]
                u: Optional[Number] = fix[c]
            else:
                l = self.lo_exact[c]
                u = self.hi_exact[c]
            lF = None if l is None else as_fraction(l)
            uF = None if u is None else as_fraction(u)
            if dc > 0:
                lo_s = None if (lo_s is None or lF is None) else lo_s + dc * lF
                hi_s = None if (hi_s is None or uF is None) else hi_s + dc * uF
            else:
                lo_s = None if (lo_s is None or uF is None) else lo_s + dc * uF
                hi_s = None if (hi_s is None or lF is None) else hi_s + dc * lF
        return (hi_s is not None and yb > hi_s) or (lo_s is not None and yb < lo_s)

    def rows_satisfied_exact(self, values: dict[int, Number]) -> bool:
        for i, row in enumerate(self.rows_exact):
            acc = Fraction(0)
            for c, a in row.items():
                v = values.get(c, 0)
                if v:
                    acc += a * as_fraction(v)
            if acc != self.b_exact[i]:
                return False
        return True

    def complete_candidate_exact(
            self, binvals: dict[int, int]) -> Optional[dict[int, Number]]:
        """Given exact 0/1 values for all integral columns, solve the
        remaining continuous columns exactly; None when inconsistent."""
        cont = [c for c in range(self.ns)
                if c not in binvals
                and (c >= self.nm or not self.model.vars[c].integral)]
        values: dict[int, Number] = dict(binvals)
        if cont:
            col_pos = {c: k for k, c in enumerate(cont)}
            rows = []
            rhs = []
            for i, row in enumerate(self.rows_exact):
                r = [Fraction(0)] * len(cont)
                acc = self.b_exact[i]
                for c, a in row.items():
                    if c in col_pos:
                        r[col_pos[c]] = a
                    else:
                        acc -= a * Fraction(binvals.get(c, 0))
                rows.append(r)
                rhs.append(acc)
            sol = _gauss_exact(rows, rhs)
            if sol is None:
                return None
            for c, k in col_pos.items():
                values[c] = sol[k]
                l = self.lo_exact[c]
                u = self.hi_exact[c]
                if l is not None and sol[k] < as_fraction(l):
                    return None
                if u is not None and sol[k] > as_fraction(u):
                    return None
        if not self.rows_satisfied_exact(values):
            return None
        return values


def _gauss_exact(rows: list[list[Fraction]], rhs: list[Fraction]
                 ) -> Optional[list[Fraction]]:
    """Exact Gaussian elimination; free columns pinned to 0; None if
    inconsistent."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if A[i][c]), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        pv = A[r][c]
        A[r] = [v / pv for v in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * p for a, p in zip(A[i], A[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if A[i][n]:
            return None
    x = [Fraction(0)] * n
    for pr, pc in pivots:
        x[pc] = A[pr][n]
    return x


def _values_dict(model: ModelMatrix, x: Sequence[Number]) -> dict[VarRef, Number]:
    return {v: x[c] for c, v in enumerate(model.vars)}


def solve_lp(model: ModelMatrix, cfg: SolverConfig = SolverConfig()) -> Solution:
    """Phase-one feasibility for the linear relaxation (integral flags ignored).

    Feasible results return a basic solution with basic values re-solved
    from pristine data.  In exact mode, feasible results are certified when
    the vertex rationalizes cleanly, and infeasible results are certified by
    an exact Farkas check (with a rational simplex fallback).
    """
    deadline = _Deadline(cfg.time_limit)
    std = _Standard(model)
    stats = SolveStats(pivot_rule=cfg.pivot_rule)
    res = std.solve_node({}, cfg)
    stats.simplex_iterations = res.iterations
    if res.status == simplex.ITER_LIMIT:
        stats.wall_time = deadline.elapsed()
        return Solution(ITERATION_LIMIT, {}, stats)
    if res.feasible:
        x = std.refine_basic(res)
        values = _values_dict(model, x[: std.nm].tolist())
        if cfg.exact:
            rat = {c: Fraction(float(x[c])).limit_denominator(10**9)
                   for c in range(std.ns)}
            ok = std.rows_satisfied_exact(rat)
            if ok:
                ok = all(
                    (std.lo_exact[c] is None or rat[c] >= as_fraction(std.lo_exact[c]))
                    and (std.hi_exact[c] is None or rat[c] <= as_fraction(std.hi_exact[c]))
                    for c in range(std.ns))
            if ok:
                values = _values_dict(model, [rat[c] for c in range(std.nm)])
                stats.certified = True
        stats.wall_time = deadline.elapsed()
        return Solution(FEASIBLE, values, stats)
    # infeasible
    if cfg.exact:
        certified = res.farkas_y is not None and std.farkas_valid_exact(
            res.farkas_y.tolist(), {})
        if not certified:
            eres = std.solve_node_exact({}, cfg)
            stats.simplex_iterations += eres.iterations
            if eres.feasible:
                values = _values_dict(model, eres.x[: std.nm])
                stats.certified = True
                stats.wall_time = deadline.elapsed()
                return Solution(FEASIBLE, values, stats)
            if eres.feasible is None:
                stats.wall_time = deadline.elapsed()
                return Solution(ITERATION_LIMIT, {}, stats)
        stats.certified = True
    stats.wall_time = deadline.elapsed()
    return Solution(INFEASIBLE, {}, stats)


def solve_ilp(model: ModelMatrix, cfg: SolverConfig = SolverConfig()) -> Solution:
    """Depth-first branch-and-bound over the binary variables.

    Branching prefers assignment (P) variables; triangle (T) variables are
    branched only when every P is integral.  In exact mode every accepted
    solution and every pruned subtree is certified in rational arithmetic.
    """
    deadline = _Deadline(cfg.time_limit)
    std = _Standard(model)
    stats = SolveStats(pivot_rule=cfg.pivot_rule)
    int_cols = [c for c, v in enumerate(model.vars) if v.integral]
    p_cols = set(c for c in int_cols if model.vars[c].kind == "P")

    stack: list[dict[int, int]] = [{}]
    while stack:
        if deadline.expired():
            stats.wall_time = deadline.elapsed()
            return Solution(TIME_LIMIT, {}, stats)
        if stats.bb_nodes >= cfg.node_limit:
            stats.wall_time = deadline.elapsed()
            return Solution(NODE_LIMIT, {}, stats)
        fix = stack.pop()
        stats.bb_nodes += 1
        res = std.solve_node(fix, cfg)
        stats.simplex_iterations += res.iterations
        if res.status == simplex.ITER_LIMIT:
            stats.wall_time = deadline.elapsed()
            return Solution(ITERATION_LIMIT, {}, stats)

        if not res.feasible:
            if cfg.exact:
                ok = res.farkas_y is not None and std.farkas_valid_exact(
                    res.farkas_y.tolist(), fix)
                if not ok:
                    outcome = _exact_node(std, fix, cfg, stats, int_cols,
                                          p_cols, stack, model, deadline)
                    if outcome is not None:
                        return outcome
            continue

        x = res.x
        frac = [c for c in int_cols
                if c not in fix and abs(x[c] - round(x[c])) > cfg.integrality_tol]
        if not frac:
            binvals = {c: int(fix[c]) if c in fix else int(round(x[c]))
                       for c in int_cols}
            if cfg.exact:
                exact_vals = std.complete_candidate_exact(binvals)
                if exact_vals is None:
                    outcome = _exact_node(std, fix, cfg, stats, int_cols,
                                          p_cols, stack, model, deadline)
                    if outcome is not None:
                        return outcome
                    continue
                xs = [exact_vals.get(c, 0) for c in range(std.nm)]
                stats.certified = True
                stats.wall_time = deadline.elapsed()
                return Solution(FEASIBLE, _values_dict(model, xs), stats)
            xr = std.refine_basic(res)
            vals = [binvals[c] if c in binvals else float(xr[c])
                    for c in range(std.nm)]
            stats.wall_time = deadline.elapsed()
            return Solution(FEASIBLE, _values_dict(model, vals), stats)

        c = _pick_branch(frac, x, p_cols, cfg.branch_rule, model)
        preferred = 1 if x[c] >= 0.5 else 0
        other = dict(fix)
        other[c] = 1 - preferred
        near = dict(fix)
        near[c] = preferred
        stack.append(other)
        stack.append(near)

    stats.certified = cfg.exact
    stats.wall_time = deadline.elapsed()
    return Solution(INFEASIBLE, {}, stats)


def _pick_branch(frac: list[int], x: np.ndarray, p_cols: set[int],
                 rule: str, model: ModelMatrix) -> int:
    """Choose the branching column.

    Fractional assignment variables are layered by value index and only the
    layer of the largest value (smallest index) is considered: settling long
    distances first collapses the geometry the way largest-first backtracking
    does, and cuts the search by orders of magnitude on coordinate-coupled
    models.  The configured rule picks within the layer.
    """
    pool = [c for c in frac if c in p_cols] or frac
    if pool[0] in p_cols:
        top = min(model.vars[c].index[2] for c in pool)
        pool = [c for c in pool if model.vars[c].index[2] == top]
    if rule == "first_fractional":
        return pool[0]
    return min(pool, key=lambda c: (abs(x[c] - 0.5), c))


def _exact_node(std: _Standard, fix: dict[int, int], cfg: SolverConfig,
                stats: SolveStats, int_cols: list[int], p_cols: set[int],
                stack: list[dict[int, int]], model: ModelMatrix,
                deadline: _Deadline) -> Optional[Solution]:
    """Resolve one node in rational arithmetic.

    Returns a final Solution when the node decides the whole solve (exact
    integral point found), otherwise pushes children / prunes and returns
    None to continue the search.
    """
    eres = std.solve_node_exact(fix, cfg)
    stats.simplex_iterations += eres.iterations
    if eres.feasible is None:
        stats.wall_time = deadline.elapsed()
        return Solution(ITERATION_LIMIT, {}, stats)
    if not eres.feasible:
        return None
    frac = [c for c in int_cols if c not in fix and eres.x[c] not in (0, 1)]
    if not frac:
        binvals = {c: int(fix[c]) if c in fix else int(eres.x[c])
                   for c in int_cols}
        exact_vals = std.complete_candidate_exact(binvals)
        if exact_vals is None:
            # LP vertex is integral on the flags yet not completable; the
            # continuous part from the exact LP itself is the completion
            values = {c: eres.x[c] for c in range(std.ns)}
            if std.rows_satisfied_exact(values):
                stats.certified = True
                stats.wall_time = deadline.elapsed()
                return Solution(FEASIBLE,
                                _values_dict(model, eres.x[: std.nm]), stats)
            return None
        xs = [exact_vals.get(c, 0) for c in range(std.nm)]
        stats.certified = True
        stats.wall_time = deadline.elapsed()
        return Solution(FEASIBLE, _values_dict(model, xs), stats)
    vals = np.array([float(v) for v in eres.x[: std.ns]])
    c = _pick_branch(frac, vals, p_cols, cfg.branch_rule, model)
    preferred = 1 if vals[c] >= 0.5 else 0
    other = dict(fix)
    other[c] = 1 - preferred
    near = dict(fix)
    near[c] = preferred
    stack.append(other)
    stack.append(near)
    return None


def solve(model: ModelMatrix, cfg: SolverConfig = SolverConfig()) -> Solution:
    """Dispatch on integrality: branch-and-bound when integral flags exist."""
    if any(v.integral for v in model.vars):
        return solve_ilp(model, cfg)
    return solve_lp(model, cfg)


def extract_assignment(sol: Solution, n: int, m_prime: int,
                       integrality_tol: float = 1e-6):
    """Collect P-variable values into an AssignmentMatrix.

    Pruned (absent) variables contribute weight 0; rounding is NOT applied,
    the matrix reports integrality per the tolerance.
    """
    from .core import AssignmentMatrix

    if sol.status != FEASIBLE:
        raise ValueError(f"cannot extract assignment from status {sol.status!r}")
    entries = {}
    for var, val in sol.values.items():
        if var.kind != "P":
            continue
        w = val
        if not is_exact(w):
            w = min(max(float(w), 0.0), 1.0)
        if w:
            entries[var.index] = w
    return AssignmentMatrix(n, m_prime, entries)


@dataclass
class SolutionCheck:
    max_row_violation: float
    max_bound_violation: float
    max_integrality_violation: float
    ok: bool


def verify_solution(model: ModelMatrix, sol: Solution,
                    feasibility_tol: float = 1e-7,
                    integrality_tol: float = 1e-6) -> SolutionCheck:
    """Re-evaluate every row, bound and integrality flag of a solution."""
    vals = {c: sol.values.get(v, 0) for c, v in enumerate(model.vars)}
    row_v = 0.0
    for row in model.rows:
        acc = 0.0
        for c, a in row.coeffs:
            acc += float(a) * float(vals[c])
        diff = acc - float(row.rhs)
        if row.relation == EQ:
            row_v = max(row_v, abs(diff))
        elif row.relation == LE:
            row_v = max(row_v, max(diff, 0.0))
        else:
            row_v = max(row_v, max(-diff, 0.0))
    bound_v = 0.0
    int_v = 0.0
    for c, var in enumerate(model.vars):
        x = float(vals[c])
        if var.lower is not None:
            bound_v = max(bound_v, float(var.lower) - x)
        if var.upper is not None:
            bound_v = max(bound_v, x - float(var.upper))
        if var.integral:
            int_v = max(int_v, abs(x - round(x)))
    ok = (row_v <= feasibility_tol and bound_v <= feasibility_tol
          and int_v <= integrality_tol)
    return SolutionCheck(row_v, bound_v, int_v, ok)


def export_model(model: ModelMatrix, path: Union[str, Path]) -> None:
    write_model(model, path)


def import_solution(path: Union[str, Path], model: ModelMatrix) -> Solution:
    """Load an externally produced solution file onto a model's variables."""
    status, by_name = read_solution_values(path, model)
    values: dict[VarRef, Number] = {}
    for name, val in by_name.items():
        values[model.vars[model.name_to_col[name]]] = val
    if status not in (FEASIBLE, INFEASIBLE, ITERATION_LIMIT, NODE_LIMIT, TIME_LIMIT):
        raise ValueError(f"unknown status {status!r} in solution file")
    return Solution(status, values, SolveStats())

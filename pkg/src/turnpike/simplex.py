"""Phase-one simplex for bounded-variable linear feasibility.

Input is the equality system A x = b with box bounds l <= x <= u (entries
may be infinite).  One artificial variable per row gives a trivially feasible
start; minimizing the artificial sum either drives it to zero (feasible basic
solution) or terminates positive, in which case the duals of the artificial
columns form a Farkas certificate of infeasibility.

Two engines share the algorithm: a dense float64 tableau (default) and a
Fraction tableau with Bland's rule and zero tolerances for certification
runs.  Both are deterministic for a fixed input and configuration.  Callers
are expected to equilibrate rows to O(1) magnitude; tolerances here are
absolute.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .numbers import Number

__all__ = ["PhaseOneResult", "ExactResult", "phase_one", "phase_one_exact"]

LOWER, UPPER, BASIC, FREE, EXCLUDED = 0, 1, 2, 3, 4

OPTIMAL = "optimal"
ITER_LIMIT = "iteration_limit"


@dataclass
class PhaseOneResult:
    """Outcome of one float phase-one run.

    feasible is None when the iteration limit was hit.  x holds structural
    values (basic from the tableau, nonbasic at their bound).  For infeasible
    runs farkas_y holds row multipliers whose validity the caller must verify
    before trusting.  basis/vstat describe the final basis for refinement.
    """

    status: str
    feasible: Optional[bool]
    objective: float
    x: np.ndarray
    basis: np.ndarray
    vstat: np.ndarray
    farkas_y: Optional[np.ndarray]
    iterations: int
    degenerate_fallback: bool = False


def _initial_point(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nonbasic start: lower bound when finite, else upper, else free at 0."""
    n = lo.shape[0]
    x0 = np.zeros(n)
    stat = np.full(n, FREE, dtype=np.int8)
    has_lo = np.isfinite(lo)
    has_hi = np.isfinite(hi) & ~has_lo
    x0[has_lo] = lo[has_lo]
    stat[has_lo] = LOWER
    x0[has_hi] = hi[has_hi]
    stat[has_hi] = UPPER
    return x0, stat


def phase_one(
    A: np.ndarray,
    b: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    *,
    pivot_rule: str = "dantzig_with_bland_fallback",
    iteration_limit: int = 200_000,
    tol: float = 1e-9,
    refresh_every: int = 1024,
) -> PhaseOneResult:
    """Minimize the artificial sum for A x = b, l <= x <= u (float64)."""
    m, ns = A.shape
    if b.shape != (m,) or lo.shape != (ns,) or hi.shape != (ns,):
        raise ValueError("inconsistent dimensions")
    if m == 0:
        x0, stat0 = _initial_point(lo, hi)
        return PhaseOneResult(OPTIMAL, True, 0.0, x0, np.empty(0, dtype=np.int64),
                              stat0, None, 0)

    piv_eps = 1e-10
    x0, stat0 = _initial_point(lo, hi)
    resid = b - A @ x0
    sigma = np.where(resid >= 0, 1.0, -1.0)

    ntot = ns + m
    T0 = np.empty((m, ntot))
    T0[:, :ns] = sigma[:, None] * A
    T0[:, ns:] = np.eye(m)
    b0 = sigma * b
    T = T0.copy()
    xB = np.abs(resid)
    basis = np.arange(ns, ntot, dtype=np.int64)

    vstat = np.empty(ntot, dtype=np.int8)
    vstat[:ns] = stat0
    vstat[ns:] = BASIC

    lo_t = np.concatenate([lo, np.zeros(m)])
    hi_t = np.concatenate([hi, np.full(m, np.inf)])

    # cost vector is (0,...,0, 1,...,1), so initially d = -sigma^T A on
    # structural columns and 0 on artificial ones
    d = np.empty(ntot)
    d[:ns] = -(sigma @ A)
    d[ns:] = 0.0

    feas_tol = tol * (1.0 + float(np.max(np.abs(b))))

    use_bland = pivot_rule == "bland"
    fellback = False
    degen_run = 0
    degen_limit = 100 + 2 * (m + ns)

    def refresh() -> bool:
        """Rebuild T, xB and d from pristine data for the current basis.

        A dense tableau drifts under long degenerate runs and near-tiny
        pivots; termination decisions are only trusted after a rebuild.
        """
        nonlocal T, xB, d
        xN = np.zeros(ntot)
        at_lo = vstat == LOWER
        at_hi = vstat == UPPER
        xN[at_lo] = lo_t[at_lo]
        xN[at_hi] = hi_t[at_hi]
        rhs = b0 - T0 @ xN
        try:
            sol = np.linalg.solve(T0[:, basis],
                                  np.concatenate([T0, rhs[:, None]], axis=1))
        except np.linalg.LinAlgError:
            return False
        if not np.isfinite(sol).all():
            return False
        T = sol[:, :ntot]
        xB = sol[:, ntot]
        T[:, basis] = 0.0
        T[np.arange(m), basis] = 1.0
        d = _recompute_d(T, basis, ns, ntot)
        return True

    def candidates() -> np.ndarray:
        viol = np.zeros(ntot)
        mask_lo = vstat == LOWER
        mask_up = vstat == UPPER
        mask_fr = vstat == FREE
        viol[mask_lo] = -np.minimum(d[mask_lo], 0.0)
        viol[mask_up] = np.maximum(d[mask_up], 0.0)
        viol[mask_fr] = np.abs(d[mask_fr])
        return viol

    iterations = 0
    confirmed = False
    while True:
        if iterations >= iteration_limit:
            return PhaseOneResult(
                ITER_LIMIT, None, float(xB[basis >= ns].sum()),
                _extract(ns, vstat, lo_t, hi_t, basis, xB),
                basis, vstat, None, iterations, fellback)

        viol = candidates()
        cand = viol > tol
        if not cand.any():
            if confirmed or not refresh():
                break
            confirmed = True
            viol = candidates()
            cand = viol > tol
            if not cand.any():
                break
        confirmed = False

        if use_bland or fellback:
            q = int(np.nonzero(cand)[0][0])
        else:
            q = int(np.argmax(viol))

        increasing = vstat[q] == LOWER or (vstat[q] == FREE and d[q] < 0)
        tq = T[:, q].copy()
        lo_b = lo_t[basis]
        hi_b = hi_t[basis]
        with np.errstate(divide="ignore", invalid="ignore"):
            if increasing:
                lim_dn = np.where(tq > piv_eps, (xB - lo_b) / tq, np.inf)
                lim_up = np.where(tq < -piv_eps, (hi_b - xB) / (-tq), np.inf)
            else:
                lim_dn = np.where(tq < -piv_eps, (xB - lo_b) / (-tq), np.inf)
                lim_up = np.where(tq > piv_eps, (hi_b - xB) / tq, np.inf)
        lim_dn = np.where(np.isnan(lim_dn), np.inf, lim_dn)
        lim_up = np.where(np.isnan(lim_up), np.inf, lim_up)
        row_lim = np.maximum(np.minimum(lim_dn, lim_up), 0.0)
        t_row = float(row_lim.min())

        span = hi_t[q] - lo_t[q]
        t_bound = float(span) if np.isfinite(span) else np.inf

        t = min(t_row, t_bound)
        if not np.isfinite(t):
            raise ArithmeticError("phase-one step unbounded; numerical breakdown")

        if vstat[q] == LOWER:
            start_q = lo_t[q]
        elif vstat[q] == UPPER:
            start_q = hi_t[q]
        else:
            start_q = 0.0
        delta_q = t if increasing else -t
        if t > 0:
            xB -= delta_q * tq

        if t_bound <= t_row:
            vstat[q] = UPPER if vstat[q] == LOWER else LOWER
        else:
            ties = np.nonzero(row_lim <= t_row + 1e-12 * (1.0 + t_row))[0]
            if use_bland or fellback:
                p = int(ties[np.argmin(basis[ties])])
            else:
                p = int(ties[np.argmax(np.abs(tq[ties]))])
            leaving = int(basis[p])
            piv = float(tq[p])

            prow = T[p] / piv
            factor = T[:, q].copy()
            factor[p] = 0.0
            T -= np.multiply.outer(factor, prow)
            T[p] = prow
            T[:, q] = 0.0
            T[p, q] = 1.0
            xB[p] = start_q + delta_q
            d -= d[q] * prow
            d[q] = 0.0
            basis[p] = q
            vstat[q] = BASIC
            if leaving >= ns:
                vstat[leaving] = EXCLUDED
            elif increasing:
                vstat[leaving] = LOWER if piv > 0 else UPPER
            else:
                vstat[leaving] = LOWER if piv < 0 else UPPER
        iterations += 1

        if t <= 1e-12:
            degen_run += 1
            if degen_run > degen_limit and not use_bland and not fellback:
                fellback = True
        else:
            degen_run = 0

        if iterations % refresh_every == 0:
            refresh()
        elif iterations % 128 == 0:
            d = _recompute_d(T, basis, ns, ntot)

    art_rows = np.nonzero(basis >= ns)[0]
    obj = float(xB[art_rows].sum()) if art_rows.size else 0.0
    x = _extract(ns, vstat, lo_t, hi_t, basis, xB)
    if obj <= feas_tol:
        return PhaseOneResult(OPTIMAL, True, obj, x, basis, vstat, None,
                              iterations, fellback)
    # artificial column i carries sign sigma_i and cost 1, so its reduced
    # cost 1 - sigma_i * y_i inverts to the Farkas multipliers
    y = sigma * (1.0 - d[ns:])
    return PhaseOneResult(OPTIMAL, False, obj, x, basis, vstat, y,
                          iterations, fellback)


def _recompute_d(T: np.ndarray, basis: np.ndarray, ns: int, ntot: int) -> np.ndarray:
    d = np.zeros(ntot)
    d[ns:] = 1.0
    art_rows = np.nonzero(basis >= ns)[0]
    if art_rows.size:
        d -= T[art_rows].sum(axis=0)
    return d


def _extract(ns: int, vstat: np.ndarray, lo_t: np.ndarray, hi_t: np.ndarray,
             basis: np.ndarray, xB: np.ndarray) -> np.ndarray:
    x = np.zeros(ns)
    at_lo = vstat[:ns] == LOWER
    at_hi = vstat[:ns] == UPPER
    x[at_lo] = lo_t[:ns][at_lo]
    x[at_hi] = hi_t[:ns][at_hi]
    struct = basis < ns
    x[basis[struct]] = xB[struct]
    return x


# exact engine -------------------------------------------------------------


@dataclass
class ExactResult:
    """Outcome of a rational phase-one run; fields mirror PhaseOneResult."""

    status: str
    feasible: Optional[bool]
    objective: Fraction
    x: list
    farkas_y: Optional[list]
    iterations: int


def _exact_initial(lo: Sequence, hi: Sequence) -> tuple[list, list]:
    x0 = []
    stat = []
    for l, h in zip(lo, hi):
        if l is not None:
            x0.append(Fraction(l))
            stat.append(LOWER)
        elif h is not None:
            x0.append(Fraction(h))
            stat.append(UPPER)
        else:
            x0.append(Fraction(0))
            stat.append(FREE)
    return x0, stat


def phase_one_exact(
    A: Sequence[Sequence[Number]],
    b: Sequence[Number],
    lo: Sequence[Optional[Number]],
    hi: Sequence[Optional[Number]],
    *,
    iteration_limit: int = 500_000,
) -> ExactResult:
    """Rational phase-one with Bland's rule; exact and terminating.

    Bounds use None for infinity.  Slower than the float engine by orders
    of magnitude; intended for certification fallback on small systems.
    """
    m = len(b)
    ns = len(lo)
    if m == 0:
        x0, _ = _exact_initial(lo, hi)
        return ExactResult(OPTIMAL, True, Fraction(0), x0, None, 0)

    x0, stat0 = _exact_initial(lo, hi)
    resid = []
    for i in range(m):
        acc = Fraction(b[i])
        row = A[i]
        for j in range(ns):
            if row[j]:
                acc -= Fraction(row[j]) * x0[j]
        resid.append(acc)
    sigma = [1 if r >= 0 else -1 for r in resid]

    ntot = ns + m
    T = []
    for i in range(m):
        row = [Fraction(A[i][j]) * sigma[i] for j in range(ns)]
        row.extend(Fraction(1) if k == i else Fraction(0) for k in range(m))
        T.append(row)
    xB = [abs(r) for r in resid]
    basis = list(range(ns, ntot))
    vstat = list(stat0) + [BASIC] * m

    lo_t: list = list(lo) + [Fraction(0)] * m
    hi_t: list = list(hi) + [None] * m

    d = [Fraction(0)] * ntot
    for j in range(ns):
        acc = Fraction(0)
        for i in range(m):
            if A[i][j]:
                acc += sigma[i] * Fraction(A[i][j])
        d[j] = -acc

    iterations = 0
    while True:
        if iterations >= iteration_limit:
            obj = sum((xB[p] for p in range(m) if basis[p] >= ns), Fraction(0))
            return ExactResult(ITER_LIMIT, None, obj, [], None, iterations)

        q = -1
        for j in range(ntot):
            s = vstat[j]
            if s == LOWER and d[j] < 0:
                q = j
                break
            if s == UPPER and d[j] > 0:
                q = j
                break
            if s == FREE and d[j] != 0:
                q = j
                break
        if q < 0:
            break

        increasing = vstat[q] == LOWER or (vstat[q] == FREE and d[q] < 0)
        t_row = None
        p_best = -1
        for i in range(m):
            a = T[i][q] if increasing else -T[i][q]
            if a > 0:
                l = lo_t[basis[i]]
                if l is None:
                    continue
                lim = (xB[i] - l) / a
            elif a < 0:
                h = hi_t[basis[i]]
                if h is None:
                    continue
                lim = (h - xB[i]) / (-a)
            else:
                continue
            if lim < 0:
                lim = Fraction(0)
            if t_row is None or lim < t_row or (lim == t_row and basis[i] < basis[p_best]):
                t_row = lim
                p_best = i

        if hi_t[q] is not None and lo_t[q] is not None:
            t_bound: Optional[Fraction] = Fraction(hi_t[q]) - Fraction(lo_t[q])
        else:
            t_bound = None

        if t_row is None and t_bound is None:
            raise ArithmeticError("exact phase-one step unbounded")
        flip = t_bound is not None and (t_row is None or t_bound <= t_row)
        t = t_bound if flip else t_row

        if vstat[q] == LOWER:
            start_q = Fraction(lo_t[q])
        elif vstat[q] == UPPER:
            start_q = Fraction(hi_t[q])
        else:
            start_q = Fraction(0)
        delta_q = t if increasing else -t
        if t:
            for i in range(m):
                if T[i][q]:
                    xB[i] -= delta_q * T[i][q]

        if flip:
            vstat[q] = UPPER if vstat[q] == LOWER else LOWER
        else:
            p = p_best
            leaving = basis[p]
            piv = T[p][q]
            prow = [v / piv for v in T[p]]
            for i in range(m):
                if i == p:
                    continue
                f = T[i][q]
                if f:
                    Ti = T[i]
                    for k in range(ntot):
                        if prow[k]:
                            Ti[k] -= f * prow[k]
            T[p] = prow
            for i in range(m):
                T[i][q] = Fraction(0)
            T[p][q] = Fraction(1)
            xB[p] = start_q + delta_q
            dq = d[q]
            if dq:
                for k in range(ntot):
                    if prow[k]:
                        d[k] -= dq * prow[k]
            d[q] = Fraction(0)
            basis[p] = q
            vstat[q] = BASIC
            if leaving >= ns:
                vstat[leaving] = EXCLUDED
            elif increasing:
                vstat[leaving] = LOWER if piv > 0 else UPPER
            else:
                vstat[leaving] = LOWER if piv < 0 else UPPER
        iterations += 1

    obj = sum((xB[p] for p in range(m) if basis[p] >= ns), Fraction(0))
    x = [Fraction(0)] * ns
    for j in range(ns):
        if vstat[j] == LOWER:
            x[j] = Fraction(lo_t[j])
        elif vstat[j] == UPPER:
            x[j] = Fraction(hi_t[j])
    for p2, col in enumerate(basis):
        if col < ns:
            x[col] = xB[p2]
    if obj == 0:
        return ExactResult(OPTIMAL, True, obj, x, None, iterations)
    y = [sigma[i] * (1 - d[ns + i]) for i in range(m)]
    return ExactResult(OPTIMAL, False, obj, x, y, iterations)

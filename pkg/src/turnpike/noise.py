"""Bounded noise plus grid rounding, and the recovery condition.

The observation model perturbs each distance by at most r, rounds to the
grid of spacing R (R=0 meaning no rounding), and aggregates equal values.
per_value mode draws one perturbation per distinct value, which is the
representative model the recovery statement reasons about; per_element mode
perturbs every copy independently and can split or merge values.

Recovery condition: when 6(r+R) < gap_star, scanning the observed values
with threshold tau = gap_star/2 reproduces the exact two-partition set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import DistanceMultiset, group_values
from .numbers import Number, is_exact
from .partitions import TwoPartition, enumerate_two_partitions, gaps

__all__ = [
    "NoiseSpec",
    "RecoveryCheck",
    "Observation",
    "perturb",
    "perturb_representatives",
    "round_to_grid",
    "aggregate",
    "observe",
    "check_recovery",
    "representative_triples",
    "recovery_holds",
    "triple_margins",
]

MODES = ("per_element", "per_value")
DISTRIBUTIONS = ("uniform_pm_r", "adversarial_pm_r")


@dataclass(frozen=True)
class NoiseSpec:
    r: float
    R: float
    seed: int = 0
    mode: str = "per_value"
    distribution: str = "uniform_pm_r"

    def __post_init__(self) -> None:
        if self.r < 0 or self.R < 0:
            raise ValueError("noise radii must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")


@dataclass(frozen=True)
class RecoveryCheck:
    gap_star: Number
    threshold: float
    tau: Number
    satisfied: bool


@dataclass(frozen=True)
class Observation:
    """Full perturb-round-aggregate outcome with provenance counts.

    representatives is the per-distinct-value observed vector (per_value
    mode only), indexed like the input values.  splits counts input values
    whose copies landed on several observed values; merges counts observed
    values fed by several input values (per_element mode only).
    """

    multiset: DistanceMultiset
    observed: tuple[Number, ...]
    representatives: Optional[tuple[Number, ...]]
    resampled: int
    clamped: int
    splits: int
    merges: int


def _draw(rng: np.random.Generator, value: Number, spec: NoiseSpec) -> tuple[Number, int, int]:
    """One noisy observation of value; returns (observed, resampled, clamped)."""
    if spec.r == 0:
        return value, 0, 0
    if spec.distribution == "uniform_pm_r":
        resampled = 0
        while True:
            eps = rng.uniform(-spec.r, spec.r)
            out = float(value) + eps
            if out > 0:
                return out, resampled, 0
            resampled += 1
    # adversarial: endpoint noise, clamped to the feasible endpoint
    sign = 1.0 if rng.integers(0, 2) else -1.0
    out = float(value) + sign * spec.r
    if out <= 0:
        return float(value) + spec.r, 0, 1
    return out, 0, 0


def perturb_representatives(Y: DistanceMultiset, spec: NoiseSpec) -> tuple[list[Number], int, int]:
    """Per-distinct-value observations (the representative model).

    Returns (values indexed like Y.values, resample count, clamp count).
    Deterministic for a given spec.
    """
    rng = np.random.default_rng(spec.seed)
    out: list[Number] = []
    res = cl = 0
    for v in Y.values:
        o, a, b = _draw(rng, v, spec)
        out.append(o)
        res += a
        cl += b
    return out, res, cl


def perturb(Y: DistanceMultiset, spec: NoiseSpec) -> list[Number]:
    """Observed values for every copy, in decreasing-source order.

    per_value mode gives all copies of a value the same observation;
    per_element mode draws independently per copy.  With r=0 the expanded
    multiset is returned unchanged (exact values preserved).
    """
    if spec.mode == "per_value":
        reps, _, _ = perturb_representatives(Y, spec)
        out: list[Number] = []
        for rep, mu in zip(reps, Y.multiplicities):
            out.extend([rep] * mu)
        return out
    rng = np.random.default_rng(spec.seed)
    out = []
    for v, mu in zip(Y.values, Y.multiplicities):
        for _ in range(mu):
            o, _, _ = _draw(rng, v, spec)
            out.append(o)
    return out


def round_to_grid(vals: Sequence[Number], R: Number) -> list[Number]:
    """Round each value to the nearest multiple of R, ties away from zero.

    R=0 is the identity and preserves exact values.  With an exact R the
    outputs are exact multiples (integers when R is an integer), so rounded
    data can feed the exact enumeration and certificate paths.
    """
    if R < 0:
        raise ValueError("grid spacing must be nonnegative")
    if R == 0:
        return list(vals)
    out: list[Number] = []
    for v in vals:
        if is_exact(v) and is_exact(R):
            q: Number = Fraction(v) / Fraction(R)
            half: Number = Fraction(1, 2)
        else:
            q = float(v) / float(R)
            half = 0.5
        k = math.floor(q + half) if q >= 0 else math.ceil(q - half)
        out.append(k * R)
    return out


def aggregate(rounded: Sequence[Number]) -> DistanceMultiset:
    """Group equal observed values into a multiset; all must be positive."""
    if any((v if is_exact(v) else float(v)) <= 0 for v in rounded):
        raise ValueError(
            "degenerate instance: a rounded distance is nonpositive "
            "(noise or grid too large for the smallest distance)")
    return group_values(rounded)


def observe(Y: DistanceMultiset, spec: NoiseSpec) -> Observation:
    """Run perturb, round_to_grid and aggregate; collect provenance counts."""
    resampled = clamped = 0
    reps: Optional[tuple[Number, ...]] = None
    if spec.mode == "per_value":
        rep_vals, resampled, clamped = perturb_representatives(Y, spec)
        rep_rounded = round_to_grid(rep_vals, spec.R)
        reps = tuple(rep_rounded)
        observed: list[Number] = []
        for rep, mu in zip(rep_rounded, Y.multiplicities):
            observed.extend([rep] * mu)
        splits = merges = 0
    else:
        rng = np.random.default_rng(spec.seed)
        raw: list[Number] = []
        sources: list[int] = []
        for k, (v, mu) in enumerate(zip(Y.values, Y.multiplicities)):
            for _ in range(mu):
                o, a, b = _draw(rng, v, spec)
                raw.append(o)
                sources.append(k)
                resampled += a
                clamped += b
        observed = round_to_grid(raw, spec.R)
        by_source: dict[int, set] = {}
        by_output: dict[Number, set] = {}
        for src, o in zip(sources, observed):
            by_source.setdefault(src, set()).add(o)
            by_output.setdefault(o, set()).add(src)
        splits = sum(1 for s in by_source.values() if len(s) > 1)
        merges = sum(1 for s in by_output.values() if len(s) > 1)
    multiset = aggregate(observed)
    return Observation(multiset, tuple(observed), reps, resampled, clamped,
                       splits, merges)


def check_recovery(Y: DistanceMultiset, r: float, R: float) -> RecoveryCheck:
    """Evaluate the separation condition 6(r+R) < gap_star for Y."""
    gap_star = gaps(Y).gap_star
    threshold = 6.0 * (r + R)
    if gap_star == math.inf:
        tau: Number = math.inf
        satisfied = True
    else:
        # keep tau exact when the gap is exact so the test stays sharp
        tau = Fraction(gap_star) / 2 if is_exact(gap_star) else gap_star / 2
        satisfied = threshold < gap_star
    return RecoveryCheck(gap_star, threshold, tau, satisfied)


def representative_triples(yhat: Sequence[Number], mu: Sequence[int],
                           tau: Number) -> set[TwoPartition]:
    """All (r,s,t) whose observed values satisfy the tau test.

    Indices refer to positions in yhat (the representative vector); the
    diagonal r=s requires multiplicity at least 2, mirroring the exact
    two-partition rule.
    """
    m = len(yhat)
    out: set[TwoPartition] = set()
    for t in range(1, m + 1):
        for r in range(1, m + 1):
            for s in range(1, m + 1):
                if r == s and mu[r - 1] < 2:
                    continue
                if abs(yhat[r - 1] + yhat[s - 1] - yhat[t - 1]) <= tau:
                    out.add(TwoPartition(r, s, t))
    return out


def recovery_holds(Y: DistanceMultiset, yhat: Sequence[Number],
                   tau: Number) -> bool:
    """True when the tau-test on yhat reproduces the exact relation of Y."""
    exact = enumerate_two_partitions(Y)
    return representative_triples(yhat, Y.multiplicities, tau) == exact


def triple_margins(Y: DistanceMultiset,
                   yhat: Sequence[Number]) -> tuple[Optional[float], Optional[float]]:
    """(worst valid margin, best invalid margin) of the observed sums.

    Valid triples are the exact two-partition set; invalid triples are all
    index triples whose true sums differ (no multiplicity restriction, as
    in the gap definition).  Either entry is None when the class is empty.
    """
    m = Y.m_prime
    y = Y.values
    valid = enumerate_two_partitions(Y)
    worst_valid: Optional[float] = None
    best_invalid: Optional[float] = None
    for t in range(1, m + 1):
        for r in range(1, m + 1):
            for s in range(1, m + 1):
                dev = abs(float(yhat[r - 1]) + float(yhat[s - 1]) - float(yhat[t - 1]))
                if TwoPartition(r, s, t) in valid:
                    if worst_valid is None or dev > worst_valid:
                        worst_valid = dev
                elif y[r - 1] + y[s - 1] != y[t - 1]:
                    if best_invalid is None or dev < best_invalid:
                        best_invalid = dev
    return worst_valid, best_invalid

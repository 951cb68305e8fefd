"""Experiment harnesses: noisy-recovery phase grid, LP integrality sweep,
and the noisy partial-digest sweep.  Each harness returns plain rows for
the CSV writer and is deterministic for a given spec (timing columns can
be disabled to make output byte-stable).

Trials are independent; set TURNPIKE_WORKERS to fan the solver-heavy
sweeps out over processes.  Rows are collected in spec order regardless
of completion order, so parallel runs emit identical CSVs."""
from __future__ import annotations

import os
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core import DistanceMultiset, PointSet, intervals
from ..metrics import integrality_score
from ..model import build_triangle_ilp, relax
from ..noise import NoiseSpec, observe, representative_triples, round_to_grid
from ..numbers import Number
from ..partitions import enumerate_two_partitions, gaps
from ..pipeline import PipelineOptions, run
from ..solver import FEASIBLE, INFEASIBLE, SolverConfig, extract_assignment, solve
from .generators import gen_partial_digest, gen_synthetic

__all__ = [
    "ExperimentSpec",
    "PhaseCell",
    "phase_instances",
    "phase_experiment",
    "phase_rows",
    "integrality_experiment",
    "integrality_rows",
    "digest_experiment",
    "digest_rows",
]

GENERATORS = ("uniform01", "normal", "cauchy", "beltway",
              "digest_linear", "digest_circular")
TAU_RULES = ("half_gap_star", "fixed")


@dataclass(frozen=True)
class ExperimentSpec:
    generator: str = "uniform01"
    n_values: Tuple[int, ...] = (5,)
    trials: int = 3
    seed: int = 0
    quantum: Union[Number, str] = Fraction(1, 10**6)
    genome_length: int = 500
    basis: bool = False
    prune: bool = True
    exact: bool = False
    node_limit: int = 100_000
    time_limit: Optional[float] = None
    r_grid: Tuple[float, ...] = ()
    R_grid: Tuple[float, ...] = ()
    tau_rule: str = "half_gap_star"
    tau_fixed: float = 0.0
    mode: str = "per_value"
    noise_r: float = 5.0
    noise_R: Number = 1
    record_time: bool = True

    def __post_init__(self) -> None:
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_values:
            raise ValueError("need at least one n")
        if self.tau_rule not in TAU_RULES:
            raise ValueError(f"unknown tau rule {self.tau_rule!r}")


@dataclass(frozen=True)
class PhaseCell:
    r: float
    R: float
    recovery_rate: float
    false_positive_rate: float
    false_negative_rate: float
    regime_rate: float
    threshold: float
    trials: int
    discarded: int


def _seed(base: int, *parts: int) -> int:
    ss = np.random.SeedSequence(entropy=base, spawn_key=tuple(parts))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _instance(spec: ExperimentSpec, n: int,
              seed: int) -> Tuple[PointSet, DistanceMultiset]:
    if spec.generator == "digest_linear":
        return gen_partial_digest(n, spec.genome_length, False, seed)
    if spec.generator == "digest_circular":
        return gen_partial_digest(n, spec.genome_length, True, seed)
    return gen_synthetic(spec.generator, n, seed, spec.quantum)


def phase_instances(spec: ExperimentSpec) -> List[Tuple[PointSet, DistanceMultiset]]:
    """The seed family a phase run evaluates, one instance per trial.

    Exposed so callers can inspect gaps of the exact instances behind the
    grid; phase_experiment reuses these same instances for every cell.
    """
    n = spec.n_values[0]
    return [_instance(spec, n, _seed(spec.seed, 101, t))
            for t in range(spec.trials)]


def phase_experiment(spec: ExperimentSpec) -> List[PhaseCell]:
    """Recovery/FP/FN rates over the (r, R) grid.

    The same seeded instances are reused across all cells so the grid is
    comparable; rates are fractions of trials.  A trial whose noise draw
    degenerates (nonpositive rounded distance) is redrawn a bounded number
    of times and counted in ``discarded``.
    """
    if not spec.r_grid or not spec.R_grid:
        raise ValueError("phase runs need nonempty r and R grids")
    prepared = []
    for ps, Y in phase_instances(spec):
        prepared.append((Y, enumerate_two_partitions(Y), gaps(Y).gap_star))
    cells: List[PhaseCell] = []
    for ci, r in enumerate(spec.r_grid):
        for cj, R in enumerate(spec.R_grid):
            rec = fp = fn = regime = discarded = 0
            for t, (Y, exact_set, gap_star) in enumerate(prepared):
                if 6 * (r + float(R)) < gap_star:
                    regime += 1
                obs = None
                for attempt in range(20):
                    nspec = NoiseSpec(
                        r=r, R=float(R), mode=spec.mode,
                        seed=_seed(spec.seed, 202, ci, cj, t, attempt))
                    try:
                        obs = observe(Y, nspec)
                        break
                    except ValueError:
                        discarded += 1
                if obs is None:
                    fn += 1
                    continue
                if spec.tau_rule == "half_gap_star":
                    tau: Number = gap_star / 2
                else:
                    tau = spec.tau_fixed
                if spec.mode == "per_value":
                    reps: Sequence[Number] = obs.representatives
                elif obs.multiset.multiplicities == Y.multiplicities:
                    # identify by descending position when profiles match
                    reps = obs.multiset.values
                else:
                    fn += 1
                    continue
                approx = representative_triples(reps, Y.multiplicities, tau)
                if approx == exact_set:
                    rec += 1
                if approx - exact_set:
                    fp += 1
                if exact_set - approx:
                    fn += 1
            T = spec.trials
            cells.append(PhaseCell(
                r=float(r), R=float(R),
                recovery_rate=rec / T,
                false_positive_rate=fp / T,
                false_negative_rate=fn / T,
                regime_rate=regime / T,
                threshold=6 * (float(r) + float(R)),
                trials=T,
                discarded=discarded,
            ))
    return cells


def phase_rows(cells: Sequence[PhaseCell]) -> Tuple[List[str], List[List[Any]]]:
    header = ["r", "R", "threshold", "recovery_rate", "false_positive_rate",
              "false_negative_rate", "regime_rate", "trials", "discarded"]
    rows = [[c.r, c.R, c.threshold, c.recovery_rate, c.false_positive_rate,
             c.false_negative_rate, c.regime_rate, c.trials, c.discarded]
            for c in cells]
    return header, rows


def _solver_config(spec: ExperimentSpec) -> SolverConfig:
    return SolverConfig(exact=spec.exact, node_limit=spec.node_limit,
                        time_limit=spec.time_limit)


def _worker_count() -> int:
    raw = os.environ.get("TURNPIKE_WORKERS", "1")
    try:
        return max(int(raw), 1)
    except ValueError:
        raise ValueError(f"TURNPIKE_WORKERS must be an integer, got {raw!r}")


def _map_trials(fn, spec: ExperimentSpec, tasks: Sequence[Tuple[int, int]]):
    workers = _worker_count()
    if workers == 1 or len(tasks) <= 1:
        return [fn(spec, *task) for task in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, spec, *task) for task in tasks]
        return [f.result() for f in futures]


def _integrality_trial(spec: ExperimentSpec, n: int, t: int) -> Dict[str, Any]:
    s = _seed(spec.seed, 301, n, t)
    ps, Y = _instance(spec, n, s)
    model = relax(build_triangle_ilp(
        Y, enumerate_two_partitions(Y),
        basis=spec.basis, prune=spec.prune))
    t0 = time.perf_counter()
    sol = solve(model, _solver_config(spec))
    ms = (time.perf_counter() - t0) * 1000.0
    if sol.status == FEASIBLE:
        P = extract_assignment(sol, model.n, model.m_prime)
        score: Optional[float] = round(float(integrality_score(P)), 9)
        status = "feasible"
    elif sol.status == INFEASIBLE:
        score, status = None, "infeasible"
    else:
        score, status = None, "undecided"
    return {
        "generator": spec.generator,
        "n": n,
        "seed": s,
        "status": status,
        "int_score": score,
        "time_ms": round(ms, 3) if spec.record_time else None,
    }


def integrality_experiment(spec: ExperimentSpec) -> List[Dict[str, Any]]:
    """Triangle-LP integrality score per (n, trial)."""
    tasks = [(n, t) for n in spec.n_values for t in range(spec.trials)]
    return _map_trials(_integrality_trial, spec, tasks)


def integrality_rows(rows: Sequence[Dict[str, Any]]) -> Tuple[List[str], List[List[Any]]]:
    header = ["generator", "n", "seed", "status", "int_score", "time_ms"]
    return header, [[row[k] for k in header] for row in rows]


def _true_labels(ps: PointSet, Y: DistanceMultiset, circular: bool,
                 L: int) -> Dict[Tuple[int, int], int]:
    """Interval -> index of its true distance value in Y."""
    idx = {v: r for r, v in enumerate(Y.values, start=1)}
    out: Dict[Tuple[int, int], int] = {}
    for (i, j) in intervals(ps.n):
        d = ps.coords[j - 1] - ps.coords[i - 1]
        if circular:
            d = min(d, L - d)
        out[(i, j)] = idx[d]
    return out


def _reflect_labels(labels: Dict[Tuple[int, int], int],
                    n: int) -> Dict[Tuple[int, int], int]:
    return {(n + 1 - j, n + 1 - i): r for (i, j), r in labels.items()}


def _digest_trial(spec: ExperimentSpec, sites: int, t: int) -> Dict[str, Any]:
    circular = spec.generator == "digest_circular"
    s = _seed(spec.seed, 401, sites, t)
    ps, Y = gen_partial_digest(sites, spec.genome_length, circular, s)
    nspec = NoiseSpec(r=spec.noise_r, R=spec.noise_R, mode="per_value",
                      seed=_seed(spec.seed, 402, sites, t))
    row: Dict[str, Any] = {
        "method": "tri_ilp",
        "circular": int(circular),
        "sites": sites,
        "n": ps.n,
        "genome_length": spec.genome_length,
        "seed": s,
        "r": spec.noise_r,
        "R": float(spec.noise_R),
        "status": None,
        "labeling_error": None,
        "fragment_recovery": None,
        "time_ms": None,
    }
    try:
        obs = observe(Y, nspec)
    except ValueError:
        row["status"] = "degenerate"
        return row
    Yhat = obs.multiset
    t0 = time.perf_counter()
    result = run(Yhat, PipelineOptions(
        form="tri_ilp", prune=True, exact=spec.exact,
        node_limit=spec.node_limit, time_limit=spec.time_limit))
    ms = (time.perf_counter() - t0) * 1000.0
    row["status"] = result.certificate
    if spec.record_time:
        row["time_ms"] = round(ms, 3)
    if result.assignment is not None:
        truth = _true_labels(ps, Y, circular, spec.genome_length)
        truth_r = _reflect_labels(truth, ps.n)
        got_labels = result.assignment.labels()
        got = {iv: Yhat.values[r - 1] for iv, r in got_labels.items()}
        m = len(got)
        # labeling: against the noisy image of the true labeling
        image = {iv: obs.representatives[k - 1] for iv, k in truth.items()}
        image_r = {iv: obs.representatives[k - 1] for iv, k in truth_r.items()}
        err = min(
            sum(1 for iv in got if got[iv] != image[iv]),
            sum(1 for iv in got if got[iv] != image_r[iv]),
        )
        row["labeling_error"] = round(err / m, 9)
        # value accuracy: against the rounded noise-free distance
        true_val = {
            iv: round_to_grid([Y.values[k - 1]], spec.noise_R)[0]
            for iv, k in truth.items()
        }
        true_val_r = {
            iv: round_to_grid([Y.values[k - 1]], spec.noise_R)[0]
            for iv, k in truth_r.items()
        }
        hits = max(
            sum(1 for iv in got if got[iv] == true_val[iv]),
            sum(1 for iv in got if got[iv] == true_val_r[iv]),
        )
        row["fragment_recovery"] = round(hits / m, 9)
    return row


def digest_experiment(spec: ExperimentSpec) -> List[Dict[str, Any]]:
    """Noisy partial-digest sweep over site counts.

    Per trial: generate a digest instance, perturb per value with radius
    noise_r, round to the noise_R grid, aggregate, then run the exact
    assignment pipeline on the observed multiset.  Labeling error compares
    recovered labels against the noisy image of the true labeling
    (minimized over reflection); fragment recovery is the fraction of
    intervals whose recovered observed value equals the observed value of
    their true distance.
    """
    if spec.generator not in ("digest_linear", "digest_circular"):
        raise ValueError("digest runs need a digest generator")
    tasks = [(sites, t) for sites in spec.n_values
             for t in range(spec.trials)]
    return _map_trials(_digest_trial, spec, tasks)


def digest_rows(rows: Sequence[Dict[str, Any]]) -> Tuple[List[str], List[List[Any]]]:
    header = ["method", "circular", "sites", "n", "genome_length", "seed",
              "r", "R", "status", "labeling_error", "fragment_recovery",
              "time_ms"]
    return header, [[row[k] for k in header] for row in rows]

"""Instance generators, the backtracking realizability oracle, and
experiment harnesses that emit CSV."""
from .generators import gen_partial_digest, gen_synthetic
from .oracle import OracleResult, oracle_realizable
from .corpus import build_nonrealizable, build_realizable
from .experiments import (
    ExperimentSpec,
    PhaseCell,
    digest_experiment,
    digest_rows,
    integrality_experiment,
    integrality_rows,
    phase_experiment,
    phase_instances,
    phase_rows,
)

__all__ = [
    "gen_synthetic",
    "gen_partial_digest",
    "OracleResult",
    "oracle_realizable",
    "build_realizable",
    "build_nonrealizable",
    "ExperimentSpec",
    "PhaseCell",
    "phase_experiment",
    "phase_instances",
    "phase_rows",
    "integrality_experiment",
    "integrality_rows",
    "digest_experiment",
    "digest_rows",
]

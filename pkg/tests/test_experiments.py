"""Experiment harnesses: phase grid, integrality sweep, digest sweep."""
import pytest

from turnpike.bench import (
    ExperimentSpec,
    digest_experiment,
    digest_rows,
    integrality_experiment,
    integrality_rows,
    phase_experiment,
    phase_instances,
    phase_rows,
)

PHASE_SPEC = ExperimentSpec(
    generator="uniform01", n_values=(5,), trials=4, seed=123,
    quantum="0.01", r_grid=(0.0, 0.05), R_grid=(0.0,), record_time=False)

INT_SPEC = ExperimentSpec(
    generator="uniform01", n_values=(2, 4), trials=2, seed=55,
    quantum="0.01", record_time=False)

DIGEST_SPEC = ExperimentSpec(
    generator="digest_linear", n_values=(2,), trials=3, seed=77,
    genome_length=40, noise_r=0.0, noise_R=1, record_time=False)


# -- spec validation ----------------------------------------------------------

def test_spec_rejects_bad_fields():
    with pytest.raises(ValueError):
        ExperimentSpec(generator="bogus")
    with pytest.raises(ValueError):
        ExperimentSpec(trials=0)
    with pytest.raises(ValueError):
        ExperimentSpec(n_values=())
    with pytest.raises(ValueError):
        ExperimentSpec(tau_rule="thirds")


# -- phase grid ---------------------------------------------------------------

def test_phase_instances_deterministic():
    a = phase_instances(PHASE_SPEC)
    b = phase_instances(PHASE_SPEC)
    assert a == b
    assert len(a) == PHASE_SPEC.trials


def test_phase_noise_free_cell_recovers_everything():
    cells = phase_experiment(PHASE_SPEC)
    clean = cells[0]
    assert (clean.r, clean.R) == (0.0, 0.0)
    assert clean.recovery_rate == 1.0
    assert clean.false_positive_rate == 0.0
    assert clean.false_negative_rate == 0.0
    assert clean.regime_rate == 1.0
    assert clean.threshold == 0.0
    assert clean.discarded == 0


def test_phase_covers_grid_once_in_order():
    cells = phase_experiment(PHASE_SPEC)
    assert [(c.r, c.R) for c in cells] == [(0.0, 0.0), (0.05, 0.0)]
    assert all(c.trials == PHASE_SPEC.trials for c in cells)


def test_phase_deterministic():
    assert phase_experiment(PHASE_SPEC) == phase_experiment(PHASE_SPEC)


def test_phase_requires_grids():
    with pytest.raises(ValueError):
        phase_experiment(ExperimentSpec(r_grid=(), R_grid=(0.0,)))


def test_phase_rows_header():
    header, rows = phase_rows(phase_experiment(PHASE_SPEC))
    assert header == ["r", "R", "threshold", "recovery_rate",
                      "false_positive_rate", "false_negative_rate",
                      "regime_rate", "trials", "discarded"]
    assert len(rows) == 2 and len(rows[0]) == len(header)


# -- integrality sweep --------------------------------------------------------

def test_integrality_columns_and_statuses():
    rows = integrality_experiment(INT_SPEC)
    header, table = integrality_rows(rows)
    assert header == ["generator", "n", "seed", "status", "int_score", "time_ms"]
    assert len(table) == len(INT_SPEC.n_values) * INT_SPEC.trials
    for row in rows:
        assert row["status"] == "feasible"
        assert row["time_ms"] is None


def test_integrality_trivial_instance_is_integral():
    rows = integrality_experiment(INT_SPEC)
    for row in rows:
        if row["n"] == 2:
            # one interval, one distance: the relaxation has a unique vertex
            assert row["int_score"] == 1.0


def test_integrality_deterministic_without_timing():
    assert integrality_experiment(INT_SPEC) == integrality_experiment(INT_SPEC)


# -- digest sweep -------------------------------------------------------------

def test_digest_noise_free_control():
    rows = digest_experiment(DIGEST_SPEC)
    assert len(rows) == DIGEST_SPEC.trials
    for row in rows:
        assert row["status"] == "realizable"
        assert row["labeling_error"] == 0.0
        assert row["fragment_recovery"] == 1.0
        assert row["circular"] == 0
        assert row["n"] == 4  # two cut sites plus both genome ends


def test_digest_rows_header():
    header, table = digest_rows(digest_experiment(DIGEST_SPEC))
    assert header == ["method", "circular", "sites", "n", "genome_length",
                      "seed", "r", "R", "status", "labeling_error",
                      "fragment_recovery", "time_ms"]
    assert all(len(r) == len(header) for r in table)


def test_digest_requires_digest_generator():
    with pytest.raises(ValueError):
        digest_experiment(ExperimentSpec(generator="uniform01"))


def test_digest_deterministic_without_timing():
    assert digest_experiment(DIGEST_SPEC) == digest_experiment(DIGEST_SPEC)


# -- worker fan-out -----------------------------------------------------------

def test_parallel_rows_match_serial(monkeypatch):
    serial = integrality_experiment(INT_SPEC)
    monkeypatch.setenv("TURNPIKE_WORKERS", "2")
    assert integrality_experiment(INT_SPEC) == serial


def test_worker_env_must_be_integer(monkeypatch):
    monkeypatch.setenv("TURNPIKE_WORKERS", "two")
    with pytest.raises(ValueError):
        integrality_experiment(INT_SPEC)

"""Assignment-first pipeline: solve, certify, realize coordinates."""
import dataclasses
from fractions import Fraction

import pytest

from turnpike.core import AssignmentMatrix, DistanceMultiset, PointSet, delta, ruler_from_points
from turnpike.metrics import coordinate_mae, ground_truth
from turnpike.pipeline import (
    PipelineOptions,
    coords_least_squares,
    coords_vector,
    run,
    verify_certificate,
)

NONREALIZABLE = DistanceMultiset((9, 7, 5, 4, 3, 1), (1, 1, 1, 1, 1, 1))


# -- end to end on realizable input -------------------------------------------

def test_run_recovers_points_up_to_reflection(multiset_0259, points_0259):
    res = run(multiset_0259, PipelineOptions(form="tri_ilp", coords=True))
    assert res.certificate == "realizable"
    assert res.integral
    assert coordinate_mae(res.coords, points_0259) == 0


def test_run_repeated_distances(multiset_0246, points_0246):
    res = run(multiset_0246, PipelineOptions(coords=True))
    assert res.certificate == "realizable"
    assert coordinate_mae(res.coords, points_0246) == 0


def test_run_certificate_checks_back(multiset_0259):
    res = run(multiset_0259, PipelineOptions(coords=True))
    report = verify_certificate(res, multiset_0259)
    assert report.ok, report.reason


def test_run_basis_reduction_agrees(multiset_0259, points_0259):
    res = run(multiset_0259, PipelineOptions(basis=True, coords=True))
    assert res.certificate == "realizable"
    assert coordinate_mae(res.coords, points_0259) == 0


def test_run_residual_zero_on_exact_witness(multiset_0259):
    res = run(multiset_0259, PipelineOptions(coords=True))
    assert res.induced_ruler_residual == 0


def test_run_provenance_names_form_and_prune(multiset_0259):
    res = run(multiset_0259, PipelineOptions(form="tri_ilp", prune=True))
    assert res.provenance["model"]["form"] == "triangle_ilp"
    assert res.provenance["model"]["prune"] is True
    assert res.provenance["options"]["form"] == "tri_ilp"
    assert res.provenance["pset"]["exact"] is True


def test_options_reject_unknown_form():
    with pytest.raises(ValueError):
        PipelineOptions(form="milp")


def test_options_reject_negative_tau():
    with pytest.raises(ValueError):
        PipelineOptions(tau=-0.1)


# -- nonrealizable input ------------------------------------------------------

def test_run_exact_certifies_nonrealizable():
    res = run(NONREALIZABLE, PipelineOptions(exact=True))
    assert res.certificate == "not_realizable"
    assert res.provenance["solver"]["certified"] is True


def test_run_float_infeasible_is_undecided():
    # a float infeasibility claim alone never certifies absence
    res = run(NONREALIZABLE, PipelineOptions(exact=False))
    assert res.certificate == "undecided"
    assert res.provenance["solver"]["certified"] is False


# -- relaxed and approximate routes -------------------------------------------

def test_run_tri_lp_realizable_or_diagnostic(multiset_0259):
    res = run(multiset_0259, PipelineOptions(form="tri_lp", coords=True))
    assert res.certificate in ("realizable", "diagnostic_only")
    if res.certificate == "realizable":
        assert res.integral
    else:
        assert not res.integral


def test_run_with_tau_is_diagnostic_only(multiset_0259):
    res = run(multiset_0259, PipelineOptions(tau=0.25))
    assert res.certificate == "diagnostic_only"
    assert res.provenance["pset"]["exact"] is False
    assert res.provenance["pset"]["tau"] == 0.25


# -- coordinate realization ---------------------------------------------------

def test_coords_least_squares_exact_ruler(points_0259):
    rho = ruler_from_points(points_0259)
    ps = coords_least_squares(rho)
    assert ps.coords == (0, 2, 5, 9)


def test_coords_least_squares_two_points():
    ps = coords_least_squares(((0, 7), (-7, 0)))
    assert ps.coords == (0, 7)


def test_coords_vector_inconsistent_matrix():
    # rho(1,3) disagrees with rho(1,2) + rho(2,3); column means still defined
    rho = ((0, 2, 9), (-2, 0, 3), (-9, -3, 0))
    assert coords_vector(rho) == [0, Fraction(10, 3), Fraction(23, 3)]


def test_coords_vector_float_input_stays_float():
    x = coords_vector(((0.0, 2.0), (-2.0, 0.0)))
    assert x[0] == 0.0 and abs(x[1] - 2.0) < 1e-12
    assert isinstance(x[1], float)


def test_coords_anchor_first_point_at_zero(multiset_0259):
    res = run(multiset_0259, PipelineOptions(coords=True))
    assert res.coords.coords[0] == 0


# -- certificate verification edge cases --------------------------------------

def test_verify_rejects_tampered_assignment(multiset_0259, points_0259):
    res = run(multiset_0259, PipelineOptions(coords=True))
    P = ground_truth(points_0259).assignment
    bad = dict(P.entries)
    del bad[(1, 3, 3)], bad[(2, 3, 5)]
    bad[(1, 3, 5)] = 1  # labels swapped; multimatching holds, triangle breaks
    bad[(2, 3, 3)] = 1
    tampered = dataclasses.replace(res, assignment=AssignmentMatrix(4, 6, bad))
    report = verify_certificate(tampered, multiset_0259)
    assert not report.ok


def test_verify_rejects_wrong_instance(multiset_0259, multiset_0246):
    res = run(multiset_0259, PipelineOptions(coords=True))
    assert not verify_certificate(res, multiset_0246).ok


def test_verify_rejects_non_realizable_claims():
    res = run(NONREALIZABLE, PipelineOptions(exact=True))
    report = verify_certificate(res, NONREALIZABLE)
    assert not report.ok
    assert report.reason == "certificate_not_realizable"


def test_verify_reports_fractional_reason(multiset_0259, points_0259):
    res = run(multiset_0259, PipelineOptions())
    P = ground_truth(points_0259).assignment
    entries = dict(P.entries)
    entries[(1, 2, 6)] = Fraction(1, 2)
    entries[(1, 2, 5)] = Fraction(1, 2)
    frac = dataclasses.replace(res, assignment=AssignmentMatrix(4, 6, entries))
    report = verify_certificate(frac, multiset_0259)
    assert not report.ok
    assert report.reason == "not_integral"


# -- scale robustness ---------------------------------------------------------

@pytest.mark.parametrize("scale", [1, 7, Fraction(1, 3)])
def test_run_scale_invariance(scale):
    base = PointSet((0, 2, 5, 9))
    scaled = PointSet(tuple(c * scale for c in base.coords))
    Y = delta(scaled)
    res = run(Y, PipelineOptions(coords=True, exact=True))
    assert res.certificate == "realizable"
    assert coordinate_mae(res.coords, scaled) == 0

"""Core data structures: point sets, multisets, rulers, assignments.

Expected values for the worked instances were computed by hand from the
coordinate differences and cross-checked with itertools before being
frozen here.
"""
from fractions import Fraction

import pytest

from turnpike.core import (
    AssignmentMatrix,
    DistanceMultiset,
    PointSet,
    beltway_delta,
    delta,
    group_values,
    intervals,
    is_ruler,
    realize,
    refinements,
    ruler_from_assignment,
    ruler_from_points,
    triangle_violation,
)


# -- point sets and multisets -------------------------------------------------

def test_point_set_requires_two_points():
    with pytest.raises(ValueError):
        PointSet((3,))


def test_point_set_requires_strict_increase():
    with pytest.raises(ValueError):
        PointSet((0, 2, 2, 5))


def test_delta_distinct_distances(points_0259):
    Y = delta(points_0259)
    assert Y.values == (9, 7, 5, 4, 3, 2)
    assert Y.multiplicities == (1, 1, 1, 1, 1, 1)
    assert Y.total == 6


def test_delta_with_multiplicities(points_0246):
    Y = delta(points_0246)
    assert Y.values == (6, 4, 2)
    assert Y.multiplicities == (1, 2, 3)


def test_delta_single_interval():
    Y = delta(PointSet((0, 1)))
    assert Y.values == (1,)
    assert Y.multiplicities == (1,)


def test_delta_translation_invariant(points_0259):
    shifted = PointSet(tuple(c + 17 for c in points_0259.coords))
    assert delta(shifted) == delta(points_0259)


def test_delta_reflection_invariant(points_0259):
    assert delta(points_0259.reflected()) == delta(points_0259)


def test_delta_total_is_triangular():
    for n in range(2, 8):
        ps = PointSet(tuple(k * k + k for k in range(n)))
        assert delta(ps).total == n * (n - 1) // 2


def test_multiset_rejects_nondecreasing_values():
    with pytest.raises(ValueError):
        DistanceMultiset((4, 4, 2), (1, 1, 1))
    with pytest.raises(ValueError):
        DistanceMultiset((2, 4), (1, 1))


def test_multiset_rejects_nonpositive():
    with pytest.raises(ValueError):
        DistanceMultiset((4, 0), (1, 1))
    with pytest.raises(ValueError):
        DistanceMultiset((4, 2), (1, 0))


def test_group_values_merges_exact_duplicates():
    Y = group_values([2, 4, 2, 6, 4, 2])
    assert Y.values == (6, 4, 2)
    assert Y.multiplicities == (1, 2, 3)


def test_group_values_exact_fractions_not_merged_by_epsilon():
    a = Fraction(1, 3)
    b = Fraction(1, 3) + Fraction(1, 10**15)
    Y = group_values([a, b])
    assert Y.m_prime == 2


def test_point_count_requires_triangular_total():
    Y = DistanceMultiset((3, 2, 1), (1, 1, 1))
    assert Y.point_count() == 3
    with pytest.raises(ValueError):
        DistanceMultiset((3, 2), (1, 1)).point_count()


def test_expanded_preserves_order_and_total(multiset_0246):
    assert multiset_0246.expanded() == [6, 4, 4, 2, 2, 2]


# -- interval and refinement indexing -----------------------------------------

def test_intervals_lexicographic():
    assert intervals(3) == [(1, 2), (1, 3), (2, 3)]
    assert len(intervals(5)) == 10


def test_refinements_lexicographic():
    assert refinements(4) == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    assert refinements(2) == []


# -- beltway distances --------------------------------------------------------

def test_beltway_shortest_arcs():
    Y = beltway_delta(PointSet((0, 1, 2)), 4)
    assert Y.values == (2, 1)
    assert Y.multiplicities == (1, 2)


def test_beltway_antipodal_pair():
    Y = beltway_delta(PointSet((0, 5)), 10)
    assert Y.values == (5,)
    assert Y.multiplicities == (1,)


def test_beltway_matches_linear_when_arcs_short(points_0259):
    assert beltway_delta(points_0259, 100) == delta(points_0259)


def test_beltway_rejects_out_of_range():
    with pytest.raises(ValueError):
        beltway_delta(PointSet((0, 4)), 4)


def test_beltway_rejects_coincident_arc():
    # antipodal copies at distance L/2 are fine; a zero arc is not
    with pytest.raises(ValueError):
        beltway_delta(PointSet((0, 2, 4)), 4)


# -- rulers -------------------------------------------------------------------

def test_ruler_from_points_round_trip(points_0259):
    rho = ruler_from_points(points_0259)
    assert realize(rho).coords == (0, 2, 5, 9)


def test_realize_anchors_translation():
    rho = ruler_from_points(PointSet((3, 5, 8, 12)))
    assert realize(rho).coords == (0, 2, 5, 9)


def test_realize_two_points():
    assert realize(((0, 7), (-7, 0))).coords == (0, 7)


def test_is_ruler_accepts_coordinate_matrix(points_0259):
    rho = ruler_from_points(points_0259)
    assert is_ruler(rho, 0)


def test_is_ruler_rejects_perturbed_entry(points_0259):
    rows = [list(r) for r in ruler_from_points(points_0259).entries]
    rows[0][2] += 1
    rows[2][0] -= 1
    assert not is_ruler(rows, 0)
    assert triangle_violation(rows) == 1


def test_is_ruler_vacuous_singleton():
    assert is_ruler(((0,),), 0)


def test_realize_rejects_non_ruler():
    with pytest.raises(ValueError):
        realize(((0, 1, 5), (-1, 0, 1), (-5, -1, 0)))


# -- assignments --------------------------------------------------------------

def _truth_entries_0259():
    # interval -> value index for x=(0,2,5,9) against values (9,7,5,4,3,2)
    return {
        (1, 2, 6): 1, (1, 3, 3): 1, (1, 4, 1): 1,
        (2, 3, 5): 1, (2, 4, 2): 1, (3, 4, 4): 1,
    }


def test_assignment_row_sums_checked():
    P = AssignmentMatrix(2, 1, {(1, 2, 1): Fraction(1, 2)})
    with pytest.raises(ValueError):
        P.check_multimatching((1,), tol=0)


def test_assignment_weight_bounds_enforced():
    with pytest.raises(ValueError):
        AssignmentMatrix(2, 1, {(1, 2, 1): 2})


def test_assignment_integrality_flag():
    P = AssignmentMatrix(4, 6, _truth_entries_0259())
    assert P.is_integral(0)
    half = {(1, 2, 5): Fraction(1, 2), (1, 2, 6): Fraction(1, 2),
            (1, 3, 3): 1, (1, 4, 1): 1, (2, 3, 5): 1, (2, 4, 2): 1,
            (3, 4, 4): 1}
    Q = AssignmentMatrix(4, 6, half)
    assert not Q.is_integral(0)
    assert not Q.is_integral(1e-6)


def test_ruler_from_assignment_ground_truth(points_0259, multiset_0259):
    P = AssignmentMatrix(4, 6, _truth_entries_0259())
    rho = ruler_from_assignment(P, multiset_0259)
    assert rho.diff(1, 4) == 9
    assert rho.diff(2, 3) == 3
    assert rho.entries == ruler_from_points(points_0259).entries


def test_ruler_from_assignment_uniform_rows(multiset_0246):
    # every interval spread evenly over the expanded list of (6,4,2)
    w = {(i, j, r): Fraction(mu, 6)
         for (i, j) in intervals(4)
         for r, mu in enumerate(multiset_0246.multiplicities, start=1)}
    P = AssignmentMatrix(4, 3, w)
    rho = ruler_from_assignment(P, multiset_0246)
    assert rho.diff(1, 2) == Fraction(10, 3)
    assert rho.diff(2, 4) == Fraction(10, 3)


def test_ruler_diagonal_zero(multiset_0259):
    P = AssignmentMatrix(4, 6, _truth_entries_0259())
    rho = ruler_from_assignment(P, multiset_0259)
    assert all(rho.entries[i][i] == 0 for i in range(4))


def test_assignment_multimatching_check(multiset_0259):
    P = AssignmentMatrix(4, 6, _truth_entries_0259())
    P.check_multimatching(multiset_0259.multiplicities, tol=0)
    with pytest.raises(ValueError):
        P.check_multimatching((2, 1, 1, 1, 1, 0), tol=0)

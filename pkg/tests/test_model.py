"""Model construction: MILP, triangle ILP/LP, basis reduction, pruning.

Row and variable counts for the worked n=4 instance were tallied from the
constraint families by hand before freezing: 6 cover + 6 multiplicity +
6 link + 1 anchor = 19 MILP rows; C(4,3)=4 refinements x 10 partitions =
40 triangle variables, C(3,2)=3 under the anchored basis.
"""
from fractions import Fraction

import pytest

from turnpike.core import DistanceMultiset, PointSet, delta, intervals
from turnpike.metrics import ground_truth
from turnpike.model import (
    basis_refinements,
    build_milp,
    build_triangle_ilp,
    containment_forbidden,
    model_stats,
    relax,
)
from turnpike.partitions import enumerate_two_partitions


@pytest.fixture
def pset_0259(multiset_0259):
    return enumerate_two_partitions(multiset_0259)


# -- coordinate-coupled MILP --------------------------------------------------

def test_milp_counts_on_worked_instance(multiset_0259):
    m = build_milp(multiset_0259)
    kinds = [v.kind for v in m.vars]
    assert kinds.count("x") == 4
    assert kinds.count("P") == 36
    assert len(m.rows) == 19


def test_milp_smallest_instance():
    m = build_milp(DistanceMultiset((7,), (1,)))
    assert [v.kind for v in m.vars] == ["x", "x", "P"]
    labels = [row.label.split("_")[0] for row in m.rows]
    assert labels == ["cover", "mult", "link", "anchor"]


def test_milp_rejects_nontriangular_total():
    with pytest.raises(ValueError):
        build_milp(DistanceMultiset((3, 1), (1, 1)))


def test_milp_coordinates_unbounded_continuous(multiset_0259):
    m = build_milp(multiset_0259)
    for v in m.vars:
        if v.kind == "x":
            assert v.lower is None and v.upper is None
            assert not v.integral
        else:
            assert (v.lower, v.upper) == (0, 1)
            assert v.integral


def test_milp_link_rows_carry_distance_coefficients(multiset_0259):
    m = build_milp(multiset_0259)
    link = [row for row in m.rows if row.label.startswith("link")]
    assert len(link) == 6
    coefs = {a for row in link for _, a in row.coeffs}
    assert not coefs <= {1, -1}  # the y values appear


# -- triangle ILP -------------------------------------------------------------

def test_triangle_counts_unpruned(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=False)
    kinds = [v.kind for v in m.vars]
    assert kinds.count("P") == 36
    assert kinds.count("T") == 40
    assert m.n_refinements == 4
    assert m.partition_count == 10


def test_triangle_counts_basis(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=True, prune=False)
    assert [v.kind for v in m.vars].count("T") == 30
    assert m.n_refinements == 3


def test_triangle_smallest_instance():
    Y = DistanceMultiset((7,), (1,))
    m = build_triangle_ilp(Y, set(), basis=False, prune=False)
    assert [v.kind for v in m.vars] == ["P"]
    assert not any(row.label.startswith("select") for row in m.rows)
    assert not m.warnings


def test_triangle_empty_pset_warns(multiset_0259):
    m = build_triangle_ilp(multiset_0259, set(), basis=False, prune=False)
    assert m.warnings
    select = [row for row in m.rows if row.label.startswith("select")]
    assert select and all(not row.coeffs and row.rhs == 1 for row in select)


def test_triangle_coefficients_are_unit(multiset_0259, pset_0259):
    for basis in (False, True):
        for prune in (False, True):
            m = build_triangle_ilp(multiset_0259, pset_0259,
                                   basis=basis, prune=prune)
            for row in m.rows:
                assert all(a in (1, -1) for _, a in row.coeffs), row.label


def test_triangle_var_count_formulas(multiset_0246):
    pset = enumerate_two_partitions(multiset_0246)
    m = build_triangle_ilp(multiset_0246, pset, basis=False, prune=True)
    kinds = [v.kind for v in m.vars]
    assert kinds.count("P") == 6 * 3 - m.n_pruned
    p_alive = {v.index for v in m.vars if v.kind == "P"}
    expected_t = sum(
        1
        for (i, j, k) in [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
        for (r, s, t) in pset
        if (i, j, r) in p_alive and (j, k, s) in p_alive and (i, k, t) in p_alive
    )
    assert kinds.count("T") == expected_t


def test_triangle_marginal_rows_fix_absent_indices(multiset_0259, pset_0259):
    # value index 4 never appears in the r slot of any partition triple,
    # so marginal rows for r=4 degenerate to P = 0
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=False)
    fix0 = [row for row in m.rows if row.label.startswith("fix0")]
    assert fix0
    for row in fix0:
        assert len(row.coeffs) == 1 and row.rhs == 0


def test_approximate_pset_flag(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=False,
                           approximate=True)
    assert m.approximate_pset


# -- relaxation ---------------------------------------------------------------

def test_relax_clears_integrality_keeps_shape(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=True)
    r = relax(m)
    assert len(r.vars) == len(m.vars)
    assert len(r.rows) == len(m.rows)
    assert not any(v.integral for v in r.vars)
    assert all(v.lower == 0 and v.upper == 1 for v in r.vars)


def test_relax_idempotent(multiset_0259, pset_0259):
    m = relax(build_triangle_ilp(multiset_0259, pset_0259,
                                 basis=True, prune=True))
    assert relax(m) == m


def test_relax_milp_keeps_coordinates_free(multiset_0259):
    r = relax(build_milp(multiset_0259))
    xs = [v for v in r.vars if v.kind == "x"]
    assert xs and all(v.lower is None and v.upper is None for v in xs)
    assert not any(v.integral for v in r.vars)


# -- basis refinements --------------------------------------------------------

def test_basis_refinements_enumeration():
    assert basis_refinements(4) == [(1, 2, 3), (1, 2, 4), (1, 3, 4)]
    assert basis_refinements(3) == [(1, 2, 3)]
    assert basis_refinements(2) == []


def test_basis_refinement_count():
    for n in range(2, 9):
        assert len(basis_refinements(n)) == (n - 1) * (n - 2) // 2


# -- containment pruning ------------------------------------------------------

def test_containment_distinct_distances_extremes():
    forbidden = containment_forbidden(4, (1, 1, 1, 1, 1, 1))
    # the full interval (1,4) holds the largest distance and nothing else
    assert {(1, 4, r) for r in (2, 3, 4, 5, 6)} <= forbidden
    assert (1, 4, 1) not in forbidden
    # the middle interval (2,3) is contained in three intervals, so only
    # the three smallest values remain admissible
    assert {(2, 3, r) for r in (1, 2, 3)} <= forbidden
    for r in (4, 5, 6):
        assert (2, 3, r) not in forbidden


def test_containment_nothing_forbidden_at_two_points():
    assert containment_forbidden(2, (1,)) == set()


def test_containment_never_hits_ground_truth():
    for coords in [(0, 2, 5, 9), (0, 2, 4, 6), (0, 1, 4, 9, 11),
                   (0, 3, 7, 12, 20, 21)]:
        ps = PointSet(coords)
        Y = delta(ps)
        forbidden = containment_forbidden(ps.n, Y.multiplicities)
        truth = ground_truth(ps).assignment
        assert not set(truth.entries) & forbidden


def test_pruned_model_drops_forbidden_vars(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=True)
    p_alive = {v.index for v in m.vars if v.kind == "P"}
    assert (1, 4, 1) in p_alive
    assert all((1, 4, r) not in p_alive for r in (2, 3, 4, 5, 6))
    forbidden = containment_forbidden(4, multiset_0259.multiplicities)
    assert m.n_pruned == len(forbidden)
    # T variables never reference a pruned endpoint
    for v in m.vars:
        if v.kind == "T":
            i, j, k, r, s, t = v.index
            assert (i, j, r) in p_alive
            assert (j, k, s) in p_alive
            assert (i, k, t) in p_alive


# -- stats --------------------------------------------------------------------

def test_model_stats_counts(multiset_0259, pset_0259):
    m = build_triangle_ilp(multiset_0259, pset_0259, basis=False, prune=True)
    st = model_stats(m)
    assert st.n_vars == len(m.vars)
    assert st.n_constraints == len(m.rows)
    assert st.n_refinements == 4
    assert st.partition_count == 10
    assert st.n_pruned_assignment_vars >= 1

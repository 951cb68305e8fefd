"""Phase-one engines on small hand-checkable systems.

Bounds use +-inf (float engine) or None (exact engine) for free sides.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from turnpike.simplex import phase_one, phase_one_exact

INF = math.inf


def test_feasible_two_by_two():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    b = np.array([1.0, 0.0])
    res = phase_one(A, b, np.array([0.0, 0.0]), np.array([INF, INF]))
    assert res.status == "optimal" and res.feasible
    assert np.allclose(res.x, [0.5, 0.5])


def test_infeasible_parallel_rows():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 2.0])
    res = phase_one(A, b, np.zeros(2), np.full(2, INF))
    assert res.feasible is False
    assert res.objective > 1e-6


def test_infeasible_by_bounds():
    # x1 + x2 = 3 with both variables in [0, 1]
    A = np.array([[1.0, 1.0]])
    b = np.array([3.0])
    res = phase_one(A, b, np.zeros(2), np.ones(2))
    assert res.feasible is False


def test_empty_system_is_feasible():
    res = phase_one(np.empty((0, 2)), np.empty(0),
                    np.zeros(2), np.ones(2))
    assert res.feasible


def test_free_variables_absorb_any_rhs():
    A = np.array([[1.0, -1.0]])
    b = np.array([-7.5])
    res = phase_one(A, b, np.full(2, -INF), np.full(2, INF))
    assert res.feasible
    x = res.x
    assert abs((x[0] - x[1]) - (-7.5)) < 1e-9


def test_iteration_limit_reported():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((8, 14))
    b = rng.standard_normal(8)
    res = phase_one(A, b, np.zeros(14), np.full(14, INF), iteration_limit=1)
    assert res.status == "iteration_limit"
    assert res.feasible is None


def test_bland_rule_supported():
    A = np.array([[1.0, 1.0, 1.0]])
    b = np.array([2.0])
    res = phase_one(A, b, np.zeros(3), np.ones(3), pivot_rule="bland")
    assert res.feasible
    assert abs(res.x.sum() - 2.0) < 1e-9


def test_exact_feasible_point_is_rational():
    A = [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(-1)]]
    b = [Fraction(1), Fraction(1, 3)]
    res = phase_one_exact(A, b, [Fraction(0)] * 2, [None, None])
    assert res.feasible
    assert res.x[0] + res.x[1] == 1
    assert res.x[0] - res.x[1] == Fraction(1, 3)
    assert all(isinstance(v, Fraction) for v in res.x)


def test_exact_infeasibility_has_positive_objective():
    A = [[1, 1], [2, 2]]
    b = [1, 3]
    res = phase_one_exact(A, b, [0, 0], [None, None])
    assert res.feasible is False
    assert res.objective > 0
    assert res.farkas_y is not None


def test_exact_bounded_infeasible():
    res = phase_one_exact([[1, 1]], [3], [0, 0], [1, 1])
    assert res.feasible is False


def test_engines_agree_on_random_systems():
    rng = np.random.default_rng(99)
    for _ in range(25):
        m, ns = int(rng.integers(1, 5)), int(rng.integers(1, 7))
        A = rng.integers(-3, 4, size=(m, ns))
        b = rng.integers(-4, 5, size=m)
        lo = np.zeros(ns)
        hi = np.ones(ns) * int(rng.integers(1, 4))
        f = phase_one(A.astype(float), b.astype(float), lo, hi)
        e = phase_one_exact(A.tolist(), b.tolist(),
                            [0] * ns, [int(h) for h in hi])
        assert f.feasible == e.feasible

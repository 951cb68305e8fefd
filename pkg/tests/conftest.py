"""Shared fixtures: the two worked instances used throughout the suite.

``points_0259`` is the distinct-distance instance x=(0,2,5,9) with
multiset (9,7,5,4,3,2), all multiplicities 1.  ``points_0246`` is the
arithmetic progression x=(0,2,4,6) with multiset (6,4,2) and
multiplicities (1,2,3).
"""
import pytest

from turnpike.core import DistanceMultiset, PointSet, delta


@pytest.fixture
def points_0259() -> PointSet:
    return PointSet((0, 2, 5, 9))


@pytest.fixture
def multiset_0259(points_0259) -> DistanceMultiset:
    return delta(points_0259)


@pytest.fixture
def points_0246() -> PointSet:
    return PointSet((0, 2, 4, 6))


@pytest.fixture
def multiset_0246(points_0246) -> DistanceMultiset:
    return delta(points_0246)

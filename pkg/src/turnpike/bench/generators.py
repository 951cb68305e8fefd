"""Seeded instance generators on exact coordinate grids.

Continuous draws are quantized to a declared grid unit before any distance
is formed, so every generated instance supports exact two-partition
arithmetic.  Collisions introduced by quantization are resolved by
redrawing, with a hard retry cap.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Tuple, Union

import numpy as np

from ..core import DistanceMultiset, PointSet, beltway_delta, delta
from ..numbers import Number, parse_grid_unit

__all__ = ["DISTRIBUTIONS", "gen_synthetic", "gen_partial_digest"]

DISTRIBUTIONS = ("uniform01", "normal", "cauchy", "beltway")

_RETRY_CAP = 1000


def _draw(rng: np.random.Generator, dist: str, n: int) -> np.ndarray:
    if dist in ("uniform01", "beltway"):
        return rng.random(n)
    if dist == "normal":
        return rng.standard_normal(n)
    if dist == "cauchy":
        return rng.standard_cauchy(n)
    raise ValueError(f"unknown distribution {dist!r}")


def gen_synthetic(dist: str, n: int, seed: int,
                  quantum: Union[Number, str] = Fraction(1, 10**6),
                  ) -> Tuple[PointSet, DistanceMultiset]:
    """Sample n coordinates, quantize to the grid, return (x*, distances).

    ``beltway`` places the points on a circle of circumference 1 and
    returns the shortest-arc multiset; the other distributions are linear.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    unit = parse_grid_unit(quantum)
    rng = np.random.default_rng(seed)
    for _ in range(_RETRY_CAP):
        z = _draw(rng, dist, n)
        ks = [round(float(v) / float(unit)) for v in z]
        if len(set(ks)) != n:
            continue
        coords = sorted(k * unit for k in ks)
        coords = [int(c) if c.denominator == 1 else c for c in coords]
        ps = PointSet(tuple(coords))
        if dist == "beltway":
            # wrap onto [0, 1): shift so the minimum sits at 0
            lo = ps.coords[0]
            ps = PointSet(tuple(c - lo for c in ps.coords))
            if not ps.coords[-1] < 1:
                continue
            return ps, beltway_delta(ps, 1)
        return ps, delta(ps)
    raise ValueError(
        f"could not draw {n} distinct grid points after {_RETRY_CAP} tries; "
        "grid too coarse")


def gen_partial_digest(sites: int, genome_length: int, circular: bool,
                       seed: int) -> Tuple[PointSet, DistanceMultiset]:
    """Integer cut-site instance over a linear or circular genome.

    Linear genomes include both endpoints, so n = sites + 2; circular
    genomes use the sites alone (n = sites) with shortest-arc distances.
    """
    if sites < 2:
        raise ValueError("need at least 2 sites")
    L = int(genome_length)
    if L < 1:
        raise ValueError("genome length must be positive")
    rng = np.random.default_rng(seed)
    if circular:
        if sites > L:
            raise ValueError("sites exceed genome length")
        pos = sorted(int(p) for p in rng.choice(L, size=sites, replace=False))
        ps = PointSet(tuple(pos))
        return ps, beltway_delta(ps, L)
    if sites > L - 1:
        raise ValueError("sites exceed genome length")
    interior = sorted(int(p) + 1 for p in rng.choice(L - 1, size=sites, replace=False))
    ps = PointSet((0, *interior, L))
    return ps, delta(ps)

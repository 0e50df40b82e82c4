"""Brute-force oracles and hypothesis strategies for planar geometry."""

import math

import numpy as np
from hypothesis import assume
from hypothesis import strategies as st

from systolic_finsler.errors import InvalidBodyError
from systolic_finsler.types import ConvexBody, Lattice2


def brute_force_shortest(lattice: Lattice2, radius: int = 12) -> float:
    """Smallest squared length over all nonzero ``a·u + b·v`` with ``|a|, |b| <= radius``."""
    a, b = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1), indexing="ij")
    coefficients = np.column_stack((a.ravel(), b.ravel()))
    coefficients = coefficients[np.any(coefficients != 0, axis=1)]
    vectors = coefficients @ np.array(lattice.basis)
    return float(np.min(np.sum(vectors**2, axis=1)))


@st.composite
def convex_bodies(draw: st.DrawFn, *, symmetric: bool = False) -> ConvexBody:
    """Bodies with one vertex per angular sector, so the origin is inside."""
    n = draw(st.integers(min_value=4, max_value=12))
    jitter = draw(st.lists(st.floats(0.0, 0.5), min_size=n, max_size=n))
    radii = draw(st.lists(st.floats(0.5, 2.0), min_size=n, max_size=n))
    angles = [2 * math.pi * (k + j) / n for k, j in enumerate(jitter)]
    points = np.array([(r * math.cos(t), r * math.sin(t)) for r, t in zip(radii, angles)])
    if symmetric:
        points = np.vstack((points, -points))
    try:
        return ConvexBody(vertices=points)
    except InvalidBodyError:
        assume(False)
        raise


@st.composite
def lattices(draw: st.DrawFn) -> Lattice2:
    entries = draw(st.lists(st.floats(-3.0, 3.0), min_size=4, max_size=4))
    u1, u2, v1, v2 = entries
    assume(abs(u1 * v2 - u2 * v1) > 0.5)
    return Lattice2(basis=((u1, u2), (v1, v2)))

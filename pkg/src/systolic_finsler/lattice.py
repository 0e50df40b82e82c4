"""Planar geometry of numbers: determinants, Lagrange reduction, Hermite invariant."""

import math

import numpy as np
from numpy.typing import NDArray

from systolic_finsler.constants import Constants, Defaults
from systolic_finsler.types import ConvexBody, Lattice2

HERMITE_CONSTANT_2 = Constants.HERMITE_2
LOEWNER_CONSTANT = Constants.LOEWNER


def square_lattice() -> Lattice2:
    return Lattice2(basis=((1.0, 0.0), (0.0, 1.0)))


def hexagonal_lattice() -> Lattice2:
    return Lattice2(basis=((1.0, 0.0), (0.5, math.sqrt(3) / 2)))


def determinant(lattice: Lattice2) -> float:
    (u1, u2), (v1, v2) = lattice.basis
    return abs(u1 * v2 - u2 * v1)


def gram_matrix(lattice: Lattice2) -> NDArray[np.float64]:
    a = lattice.matrix
    return a.T @ a


def gauss_reduce(lattice: Lattice2) -> Lattice2:
    """
    Lagrange reduction.

    The result satisfies ``|u| <= |v|`` and ``|<u, v>| <= |u|² / 2``, which in
    the plane makes ``u`` a shortest nonzero vector.
    """
    u, v = lattice.u, lattice.v
    while True:
        if u @ u > v @ v:
            u, v = v, u
        mu = round(float(u @ v) / float(u @ u))
        if mu == 0:
            break
        v = v - mu * u
    return Lattice2(basis=((float(u[0]), float(u[1])), (float(v[0]), float(v[1]))))


def shortest_vector(lattice: Lattice2) -> tuple[tuple[float, float], float]:
    """Shortest nonzero lattice vector and its squared norm ``N(L)``."""
    u = gauss_reduce(lattice).u
    return (float(u[0]), float(u[1])), float(u @ u)


def hermite_invariant(lattice: Lattice2) -> float:
    """``N(L) / det(L)``; at most ``2/√3`` in the plane."""
    _, n = shortest_vector(lattice)
    return n / determinant(lattice)


def flat_riemannian_ratio(lattice: Lattice2) -> float:
    """``area / sys²`` of the flat torus ``R²/L``; at least ``√3/2``."""
    _, n = shortest_vector(lattice)
    return determinant(lattice) / n


def reduce_to_fundamental_domain(lattice: Lattice2) -> Lattice2:
    """
    Similar lattice with basis ``(1, 0), (v1, v2)``.

    The second vector lands in ``|v1| <= 1/2, v2 > 0, v1² + v2² >= 1``. The
    map is the rotation-scaling sending the shortest vector to ``(1, 0)``,
    followed by the reflection ``v2 -> -v2`` when needed.
    """
    reduced = gauss_reduce(lattice)
    u, v = reduced.u, reduced.v
    uu = float(u @ u)
    w1 = float(u @ v) / uu
    w2 = float(u[0] * v[1] - u[1] * v[0]) / uu
    return Lattice2(basis=((1.0, 0.0), (w1, abs(w2))))


def unit_disk(lattice: Lattice2, vertices: int = Defaults.CONFORMAL_VERTICES) -> ConvexBody:
    """
    Polygonal unit ball, in Z² coordinates, of the flat metric ``|w| = |A w|``.

    ``A`` has columns ``u`` and ``v``, so the flat torus ``R²/L`` becomes
    ``R²/Z²`` with this norm. The polygon is the image of the inscribed
    regular ``vertices``-gon under ``A⁻¹``.
    """
    angles = 2 * math.pi * np.arange(vertices) / vertices
    circle = np.column_stack((np.cos(angles), np.sin(angles)))
    return ConvexBody(vertices=np.linalg.solve(lattice.matrix, circle.T).T)

"""Enumeration helpers for integer vectors."""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from systolic_finsler.types import IntVector


def integer_box(lo: ArrayLike, hi: ArrayLike) -> NDArray[np.int64]:
    """All integer points of the box ``[floor(lo), ceil(hi)]``, x-major."""
    lo_i = np.floor(np.asarray(lo, dtype=float)).astype(np.int64)
    hi_i = np.ceil(np.asarray(hi, dtype=float)).astype(np.int64)
    xs, ys = np.meshgrid(np.arange(lo_i[0], hi_i[0] + 1), np.arange(lo_i[1], hi_i[1] + 1), indexing="ij")
    return np.column_stack((xs.ravel(), ys.ravel()))


def angle_key(z: IntVector) -> float:
    return math.atan2(z[1], z[0]) % (2 * math.pi)


def primitive_vectors(radius: int) -> list[IntVector]:
    """Primitive ``(p, q)`` with ``max(|p|, |q|) <= radius``, counterclockwise from ``(1, 0)``."""
    found = [(p, q) for p in range(-radius, radius + 1) for q in range(-radius, radius + 1) if math.gcd(p, q) == 1]
    return sorted(found, key=angle_key)


def primitive_directions(count: int) -> list[IntVector]:
    """Smallest box of primitive vectors with at least ``count`` members."""
    radius = 1
    while True:
        found = primitive_vectors(radius)
        if len(found) >= count:
            return found
        radius += 1


def primitive_within(radius: float) -> list[IntVector]:
    """Primitive vectors of Euclidean length at most ``radius``, shortest first then by angle."""
    r = math.floor(radius + 1e-12)
    found = [z for z in primitive_vectors(max(r, 1)) if math.hypot(*z) <= radius + 1e-12]
    return sorted(found, key=lambda z: (round(math.hypot(*z), 12), angle_key(z)))


def integer_line_normals(bound: int) -> list[IntVector]:
    """Nonzero ``m`` with ``m1² + m2² <= bound``."""
    r = math.isqrt(bound)
    return [(p, q) for p in range(-r, r + 1) for q in range(-r, r + 1) if (p, q) != (0, 0) and p * p + q * q <= bound]

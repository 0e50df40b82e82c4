"""
Planar convex geometry kernel.

Bodies are polygons with the origin strictly inside (see ``ConvexBody``).
Every edge lies on a line ``a_e · x = 1``; the vectors ``a_e`` are the polar
vertices and turn the gauge into a single matrix product, so most of the
functions below are thin numpy expressions over ``body.normals`` and
``body.points``.
"""

import math
from collections.abc import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from systolic_finsler.constants import Defaults, Tolerance
from systolic_finsler.errors import InvalidBodyError, NotLatticePolygonError, NotSymmetricError
from systolic_finsler.types import ConvexBody
from systolic_finsler.utils.integer_points import integer_box


def _vector(v: ArrayLike | Iterable[float]) -> NDArray[np.float64]:
    return np.asarray(v, dtype=float).reshape(2)


def area(body: ConvexBody) -> float:
    """Lebesgue measure by the shoelace formula."""
    pts = body.points
    nxt = np.roll(pts, -1, axis=0)
    return 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - pts[:, 1] * nxt[:, 0]))


def polar(body: ConvexBody) -> ConvexBody:
    """
    Polar body ``{x : <x, y> <= 1 for all y in body}``.

    Each edge on the line ``a · x = 1`` contributes the vertex ``a``.
    """
    return ConvexBody(vertices=body.normals)


def gauge_values(body: ConvexBody, vectors: ArrayLike) -> NDArray[np.float64]:
    """
    Vectorised gauge ``min{t >= 0 : v in t·body}`` over the last axis of ``vectors``.

    The ray through ``v`` leaves the body across the edge maximising
    ``a_e · v``, so the gauge is that maximum (clamped at zero for ``v = 0``).
    """
    vs = np.asarray(vectors, dtype=float)
    return np.maximum(np.max(vs @ body.normals.T, axis=-1), 0.0)


def gauge_value(body: ConvexBody, v: ArrayLike | Iterable[float]) -> float:
    return float(gauge_values(body, _vector(v)[None, :])[0])


def support_values(body: ConvexBody, directions: ArrayLike) -> NDArray[np.float64]:
    """Vectorised support function ``max_i <u, v_i>``."""
    us = np.asarray(directions, dtype=float)
    return np.max(us @ body.points.T, axis=-1)


def support_value(body: ConvexBody, u: ArrayLike | Iterable[float]) -> float:
    """Support function; equals ``gauge_value(polar(body), u)`` for ``u != 0``."""
    return float(support_values(body, _vector(u)[None, :])[0])


def is_symmetric(body: ConvexBody) -> bool:
    return body.is_symmetric


def mahler_product(body: ConvexBody) -> float:
    """Volume product ``|K| · |K°|`` of a centrally symmetric body."""
    if not body.is_symmetric:
        msg = "mahler_product requires a centrally symmetric body"
        raise NotSymmetricError(msg)
    return area(body) * area(polar(body))


def circumradius(body: ConvexBody) -> float:
    """Euclidean radius of the smallest origin-centred disk containing the body."""
    return float(np.max(np.linalg.norm(body.points, axis=1)))


def inradius(body: ConvexBody) -> float:
    """Euclidean distance from the origin to the boundary."""
    return float(np.min(1.0 / np.linalg.norm(body.normals, axis=1)))


def contains_strictly(body: ConvexBody, points: ArrayLike, tolerance: float = Tolerance.INTERIOR) -> NDArray[np.bool_]:
    """Whether each point clears every edge line by more than ``tolerance``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    norms = np.linalg.norm(body.normals, axis=1)
    margins = (1.0 - pts @ body.normals.T) / norms
    return np.all(margins > tolerance, axis=1)


def _integer_box(body: ConvexBody) -> NDArray[np.int64]:
    return integer_box(body.points.min(axis=0), body.points.max(axis=0))


def interior_lattice_trivial(body: ConvexBody) -> bool:
    """True iff the origin is the only integer point strictly inside the body."""
    candidates = _integer_box(body)
    candidates = candidates[np.any(candidates != 0, axis=1)]
    if candidates.size == 0:
        return True
    return not bool(np.any(contains_strictly(body, candidates)))


def meets_all_integer_lines(body: ConvexBody) -> bool:
    """
    True iff the body meets every line ``m · x = 1`` with ``m`` in Z² \\ {0}.

    The line misses the body exactly when ``h_K(m) < 1``, that is when ``m``
    lies in the interior of the polar body.
    """
    return interior_lattice_trivial(polar(body))


def integer_vertices(body: ConvexBody, tolerance: float = Tolerance.INTEGER) -> NDArray[np.int64] | None:
    """Rounded vertices if every vertex is within ``tolerance`` of Z², else None."""
    rounded = np.rint(body.points)
    if np.max(np.abs(body.points - rounded)) > tolerance:
        return None
    return rounded.astype(np.int64)


def pick_area(lattice_polygon: ConvexBody) -> float:
    """
    Area of a lattice polygon as ``i + b/2 - 1``.

    ``b`` sums the gcd of the coordinate differences over the edges and ``i``
    is counted directly with exact integer orientation tests.
    """
    verts = integer_vertices(lattice_polygon)
    if verts is None:
        msg = f"pick_area requires integer vertices, got {lattice_polygon.vertices}"
        raise NotLatticePolygonError(msg)
    edges = np.roll(verts, -1, axis=0) - verts
    boundary = sum(math.gcd(int(dx), int(dy)) for dx, dy in edges)

    candidates = _integer_box(lattice_polygon)
    rel = candidates[:, None, :] - verts[None, :, :]
    turns = edges[None, :, 0] * rel[:, :, 1] - edges[None, :, 1] * rel[:, :, 0]
    interior = int(np.count_nonzero(np.all(turns > 0, axis=1)))
    return interior + boundary / 2 - 1


def hausdorff_distance(a: ConvexBody, b: ConvexBody, directions: int = Defaults.HAUSDORFF_DIRECTIONS) -> float:
    """
    Hausdorff distance as ``sup_u |h_a(u) - h_b(u)|`` over unit directions.

    The sample is a uniform fan plus the outer normals of both bodies, where
    the supremum of the difference of two polygon support functions is
    attained.
    """
    angles = np.linspace(0.0, 2 * math.pi, directions, endpoint=False)
    fan = np.column_stack((np.cos(angles), np.sin(angles)))
    normals = np.vstack((a.normals, b.normals))
    normals = normals / np.linalg.norm(normals, axis=1)[:, None]
    us = np.vstack((fan, normals))
    return float(np.max(np.abs(support_values(a, us) - support_values(b, us))))


def scale_body(body: ConvexBody, factor: float) -> ConvexBody:
    if factor <= 0:
        msg = f"scale factor must be positive, got {factor}"
        raise InvalidBodyError(msg)
    return ConvexBody(vertices=body.points * factor)


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> ConvexBody:
    """Regular ``n``-gon inscribed in the origin-centred circle of ``radius``."""
    if n < 3:
        msg = f"a regular polygon needs n >= 3, got {n}"
        raise InvalidBodyError(msg)
    angles = phase + 2 * math.pi * np.arange(n) / n
    return ConvexBody(vertices=radius * np.column_stack((np.cos(angles), np.sin(angles))))


def minkowski_holds(body: ConvexBody) -> tuple[bool, float]:
    """
    Premise and conclusion of Minkowski's first theorem in the plane.

    Returns ``(premise, area)`` where the premise is "symmetric and no
    nonzero integer point inside"; whenever it holds the area is at most 4.
    """
    premise = body.is_symmetric and interior_lattice_trivial(body)
    return premise, area(body)

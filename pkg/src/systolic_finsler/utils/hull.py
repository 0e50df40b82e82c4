"""Polygon normalisation: convex hull, counterclockwise order, collinear merge."""

import math
from collections.abc import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import ConvexHull, QhullError

from systolic_finsler.constants import Tolerance
from systolic_finsler.errors import InvalidBodyError


def as_points(points: ArrayLike | Iterable[Iterable[float]]) -> NDArray[np.float64]:
    """Coerce planar points to an ``(n, 2)`` float array."""
    try:
        array = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        msg = "vertices must be a list of [x, y] pairs"
        raise InvalidBodyError(msg) from exc
    if array.ndim != 2 or array.shape[1] != 2:
        msg = f"vertices must have shape (n, 2), got {array.shape}"
        raise InvalidBodyError(msg)
    if not np.all(np.isfinite(array)):
        msg = "vertices must be finite"
        raise InvalidBodyError(msg)
    return array


def cross2(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row-wise planar cross product."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def merge_collinear(vertices: NDArray[np.float64], tolerance: float) -> NDArray[np.float64]:
    """Drop duplicate vertices and vertices whose turn is below ``tolerance``."""
    verts = vertices
    changed = True
    while changed and len(verts) >= 3:
        changed = False
        prev = np.roll(verts, 1, axis=0)
        nxt = np.roll(verts, -1, axis=0)
        turns = cross2(verts - prev, nxt - verts)
        flat = np.flatnonzero(turns <= tolerance)
        if flat.size:
            # one at a time: removing a vertex changes both neighbours' turns
            verts = np.delete(verts, flat[0], axis=0)
            changed = True
    return verts


def normalize_polygon(points: ArrayLike | Iterable[Iterable[float]]) -> NDArray[np.float64]:
    """Return the hull vertices of ``points`` in counterclockwise order.

    The first vertex is the one with the smallest polar angle in ``[0, 2π)``
    so equal sets always normalise to the same tuple.
    """
    pts = as_points(points)
    if len(pts) < 3:
        msg = f"a convex body needs at least 3 vertices, got {len(pts)}"
        raise InvalidBodyError(msg)
    scale = float(np.max(np.abs(pts)))
    if scale == 0.0:
        msg = "all vertices are at the origin"
        raise InvalidBodyError(msg)
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        msg = "vertices are degenerate (collinear or coincident)"
        raise InvalidBodyError(msg) from exc
    verts = merge_collinear(pts[hull.vertices], Tolerance.VERTEX_MERGE * scale * scale)
    if len(verts) < 3:
        msg = "hull collapses to fewer than 3 vertices"
        raise InvalidBodyError(msg)
    angles = np.mod(np.arctan2(verts[:, 1], verts[:, 0]), 2 * math.pi)
    return np.roll(verts, -int(np.argmin(angles)), axis=0)


def edge_normals(vertices: NDArray[np.float64]) -> NDArray[np.float64]:
    """Vectors ``a_e`` with each edge on the line ``a_e · x = 1``.

    These are the vertices of the polar body, in counterclockwise order.
    """
    nxt = np.roll(vertices, -1, axis=0)
    offsets = cross2(vertices, nxt)
    normals = np.column_stack((nxt[:, 1] - vertices[:, 1], vertices[:, 0] - nxt[:, 0]))
    return normals / offsets[:, None]


def origin_margins(vertices: NDArray[np.float64]) -> NDArray[np.float64]:
    """Signed distance from the origin to every edge line (positive inside)."""
    nxt = np.roll(vertices, -1, axis=0)
    return cross2(vertices, nxt) / np.linalg.norm(nxt - vertices, axis=1)

"""
Constructive reductions with traces.

``mahler_reduce`` removes opposite vertex pairs of a symmetric polygon while
keeping its area and never increasing ``|P| · |P°|``. ``abt_reduce`` shrinks a
polygon meeting every integer line until all its vertices are integer points.
"""

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from systolic_finsler.constants import Defaults, StepKind, Tolerance
from systolic_finsler.convex2d import area, integer_vertices, mahler_product, meets_all_integer_lines, pick_area
from systolic_finsler.errors import AlreadyParallelogramError, InvalidBodyError, NotSymmetricError, PreconditionViolatedError, ReductionStalledError
from systolic_finsler.loggers import logger
from systolic_finsler.types import ConvexBody, ReductionTrace, StepKindName
from systolic_finsler.utils.hull import cross2
from systolic_finsler.utils.integer_points import integer_box

Vec = NDArray[np.float64]


def _first_root(f0: float, f1: float) -> float:
    """First ``t > 0`` where ``f0 + f1 · t`` reaches zero from above."""
    if f1 >= 0 or f0 <= 0:
        return math.inf
    return -f0 / f1


def _affine(fn: Callable[[Vec], float], p: Vec, d: Vec) -> tuple[float, float]:
    f0 = float(fn(p))
    return f0, float(fn(p + d)) - f0


def _turn_functions(points: Vec, i: int) -> list[Callable[[Vec], float]]:
    """Affine-in-``p`` turns at the vertices around ``i`` when vertex ``i`` moves to ``p``."""
    n = len(points)
    a, b = points[(i - 1) % n], points[(i + 1) % n]
    a2, b2 = points[(i - 2) % n], points[(i + 2) % n]
    return [
        lambda p: cross2(a - a2, p - a),  # at the previous vertex
        lambda p: cross2(p - a, b - a),  # at the moving vertex
        lambda p: cross2(b - p, b2 - b),  # at the next vertex
    ]


def _geometric_event(points: Vec, i: int, d: Vec) -> float:
    p = points[i]
    return min(_first_root(*_affine(fn, p, d)) for fn in _turn_functions(points, i))


# Mahler pair removal


def _mahler_option(points: Vec, i: int, sign: float) -> Vec | None:
    n = len(points)
    m = n // 2
    d = sign * (points[(i + 1) % n] - points[(i - 1) % n])
    p = points[i]
    fns = _turn_functions(points, i)
    t_prev = _first_root(*_affine(fns[0], p, d))
    t_next = _first_root(*_affine(fns[2], p, d))
    t = min(t_prev, t_next)
    if not math.isfinite(t):
        return None
    moved = points.copy()
    moved[i] = p + t * d
    moved[(i + m) % n] = -moved[i]
    drop: set[int] = set()
    if t_prev <= t * (1 + 1e-12):
        drop |= {(i - 1) % n, (i - 1 + m) % n}
    if t_next <= t * (1 + 1e-12):
        drop |= {(i + 1) % n, (i + 1 + m) % n}
    return np.delete(moved, sorted(drop), axis=0)


def mahler_reduce_step(p: ConvexBody) -> tuple[ConvexBody, ReductionTrace]:
    """
    Remove one opposite vertex pair without increasing the volume product.

    Each option pushes a pair ``±v_i`` in opposite directions parallel to the
    chord of the neighbours of ``v_i``. Area stays constant and ``1 / |P°|``
    is convex along such a motion, so for every pair one of the two
    directions does not increase ``|P°|``; the best option overall is taken.
    """
    if not p.is_symmetric:
        msg = "mahler reduction requires a centrally symmetric polygon"
        raise NotSymmetricError(msg)
    n = p.vertex_count
    if n <= 4:
        msg = "polygon is already a parallelogram"
        raise AlreadyParallelogramError(msg)

    trace = ReductionTrace(mode="mahler")
    trace.record(StepKind.INITIAL, p, mahler_product(p))

    best: tuple[float, int, ConvexBody] | None = None
    for i in range(n // 2):
        for sign in (1.0, -1.0):
            moved = _mahler_option(p.points, i, sign)
            if moved is None:
                continue
            try:
                candidate = ConvexBody(vertices=moved)
            except InvalidBodyError:
                continue
            if not candidate.is_symmetric:
                continue
            product = mahler_product(candidate)
            if best is None or product < best[0] - 1e-15:
                best = (product, i, candidate)
    if best is None:
        msg = f"no admissible pair move found for {p.vertices}"
        raise ReductionStalledError(msg)

    product, i, reduced = best
    logger.debug("mahler step: moved pair %d, %d -> %d vertices, product %.12f", i, n, reduced.vertex_count, product)
    trace.record(StepKind.MAHLER_PAIR_REMOVAL, reduced, product, vertex=i)
    return reduced, trace


def mahler_reduce(p: ConvexBody) -> tuple[ConvexBody, ReductionTrace]:
    """Repeat ``mahler_reduce_step`` down to a parallelogram."""
    if not p.is_symmetric:
        msg = "mahler reduction requires a centrally symmetric polygon"
        raise NotSymmetricError(msg)
    trace = ReductionTrace(mode="mahler")
    trace.record(StepKind.INITIAL, p, mahler_product(p))
    body = p
    while body.vertex_count > 4:
        body, step_trace = mahler_reduce_step(body)
        trace.extend(step_trace)
    return body, trace


# Integer-line reduction


def _candidate_lines(*bodies: ConvexBody) -> NDArray[np.int64]:
    """Nonzero integer points in the joint bounding box of the polars of ``bodies``."""
    normals = np.vstack([b.normals for b in bodies])
    ms = integer_box(normals.min(axis=0) - 1e-9, normals.max(axis=0) + 1e-9)
    return ms[np.any(ms != 0, axis=1)]


def critical_lines(body: ConvexBody) -> list[list[tuple[int, int]]]:
    """
    Integer lines ``m · x = 1`` supporting the body at each vertex.

    They are the integer points on the edge of the polar body dual to the
    vertex. Returned per vertex, in the body's vertex order.
    """
    ms = _candidate_lines(body)
    values = ms @ body.points.T
    supporting = values.max(axis=1) <= 1 + Tolerance.LINE_HIT
    ms, values = ms[supporting], values[supporting]
    on_line = np.abs(values - 1) <= Tolerance.LINE_HIT
    return [[(int(m[0]), int(m[1])) for m in ms[on_line[:, k]]] for k in range(body.vertex_count)]


def _origin_event(points: Vec, i: int, d: Vec) -> float:
    n = len(points)
    a, b, p = points[(i - 1) % n], points[(i + 1) % n], points[i]
    t0 = min(
        _first_root(*_affine(lambda q: cross2(a, q), p, d)),
        _first_root(*_affine(lambda q: cross2(q, b), p, d)),
    )
    return t0 / 2


def _line_events(points: Vec, i: int, d: Vec, t_end: float, body: ConvexBody) -> tuple[float, list[NDArray[np.int64]]]:
    """First time vertex ``i`` moving along ``d`` reaches a supporting integer line."""
    end = points.copy()
    end[i] = points[i] + t_end * d
    try:
        ms = _candidate_lines(body, ConvexBody(vertices=end))
    except InvalidBodyError:
        ms = _candidate_lines(body)
    others = np.delete(points, i, axis=0)
    ms = ms[(ms @ others.T).max(axis=1) <= 1 + Tolerance.LINE_HIT]
    mv = ms @ points[i] - 1
    md = ms @ d
    crossing = (np.abs(mv) > Tolerance.LINE_HIT) & (mv * md < 0)
    ms, mv, md = ms[crossing], mv[crossing], md[crossing]
    if len(ms) == 0:
        return math.inf, []
    times = -mv / md
    t_hit = float(times.min())
    hits = [ms[k] for k in np.flatnonzero(times <= t_hit * (1 + 1e-12) + 1e-15)]
    return t_hit, hits


def _place_on_lines(p: Vec, lines: list[NDArray[np.int64]]) -> Vec:
    m1 = lines[0].astype(float)
    for other in lines[1:]:
        m2 = other.astype(float)
        if abs(cross2(m1, m2)) > 0.5:
            return np.linalg.solve(np.vstack((m1, m2)), np.ones(2))
    return p + (1 - m1 @ p) * m1 / (m1 @ m1)


def _area_gradient(points: Vec, i: int) -> Vec:
    n = len(points)
    a, b = points[(i - 1) % n], points[(i + 1) % n]
    return 0.5 * np.array([b[1] - a[1], a[0] - b[0]])


def _abt_move(body: ConvexBody, i: int, lines: list[tuple[int, int]]) -> tuple[ConvexBody, StepKindName, list[tuple[int, int]]]:
    points = body.points.copy()
    n = len(points)
    v = points[i]
    a, b = points[(i - 1) % n], points[(i + 1) % n]
    if not lines:
        kind: StepKindName = StepKind.ABT_PUSH_TO_LINE
        chord = b - a
        target = a + ((v - a) @ chord) / (chord @ chord) * chord
        d = target - v
    else:
        kind = StepKind.ABT_SLIDE_ALONG_LINE
        m0 = np.array(lines[0], dtype=float)
        tangent = np.array([-m0[1], m0[0]])
        slope = _area_gradient(points, i) @ tangent
        if abs(slope) <= 1e-14 * float(tangent @ tangent):
            lower = min((i - 1) % n, (i + 1) % n)
            slope = -float(tangent @ (points[lower] - v))
        d = -tangent if slope > 0 else tangent

    t_geom = _geometric_event(points, i, d)
    t_cap = _origin_event(points, i, d)
    t_end = min(t_geom, t_cap)
    if not math.isfinite(t_end):
        msg = f"vertex {i} of {body.vertices} can move indefinitely"
        raise ReductionStalledError(msg)
    t_hit, hits = _line_events(points, i, d, t_end, body)

    if t_hit <= t_end:
        fixed = [np.array(m, dtype=np.int64) for m in lines[:1]]
        points[i] = _place_on_lines(v + t_hit * d, fixed + hits)
        hit_lines = [(int(m[0]), int(m[1])) for m in hits]
        if t_hit >= t_geom * (1 - 1e-12):
            kind = StepKind.VERTEX_MERGE
    else:
        points[i] = v + t_end * d
        hit_lines = []
        if t_geom <= t_cap:
            kind = StepKind.VERTEX_MERGE
    return ConvexBody(vertices=points), kind, hit_lines


def abt_reduce(p: ConvexBody, max_steps: int = Defaults.ABT_MAX_STEPS) -> tuple[ConvexBody, ReductionTrace]:
    """
    Shrink a polygon meeting every integer line to an integer polygon.

    Sweeping vertices in index order, a vertex on no supporting integer line
    is pushed toward the chord of its neighbours, and a vertex on exactly one
    slides along it in the area-decreasing direction. Each move stops at the
    next supporting integer line, at a vertex disappearing, or halfway to the
    origin leaving the polygon. Once every vertex lies on two such lines it is
    an integer point.
    """
    if not meets_all_integer_lines(p):
        msg = f"polygon misses an integer line: {p.vertices}"
        raise PreconditionViolatedError(msg)

    trace = ReductionTrace(mode="abt")
    trace.record(StepKind.INITIAL, p, area(p))
    body = p
    for _ in range(max_steps):
        per_vertex = critical_lines(body)
        free = [k for k, lines in enumerate(per_vertex) if len(lines) < 2]
        if not free:
            break
        i = free[0]
        body, kind, hit_lines = _abt_move(body, i, per_vertex[i])
        logger.debug("abt step %s at vertex %d: lines %s, area %.12f", kind, i, hit_lines, area(body))
        trace.record(kind, body, area(body), vertex=i, lines=hit_lines)
    else:
        msg = f"integer-line reduction did not finish within {max_steps} steps"
        raise ReductionStalledError(msg)

    verts = integer_vertices(body, Tolerance.TERMINAL_INTEGER)
    if verts is None:
        msg = f"terminal polygon has non-integer vertices: {body.vertices}"
        raise ReductionStalledError(msg)
    snapped = ConvexBody(vertices=verts.astype(float))
    if abs(pick_area(snapped) - area(snapped)) > Tolerance.INTEGER:
        logger.warning("pick count %.9f disagrees with shoelace area %.9f", pick_area(snapped), area(snapped))
    return snapped, trace

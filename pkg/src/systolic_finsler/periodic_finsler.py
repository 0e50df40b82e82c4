"""
General Z²-periodic Finsler metrics on the plane.

Distances come from shortest paths on a directed grid graph over ``h·Z²``
whose edges join each node to its primitive stencil neighbours. Edge weights
are Gauss-quadrature lengths of the straight segments, so graph distances
overestimate true distances by at most the factor reported in
``DiscretizationError``.
"""

import math
import threading
from collections import OrderedDict
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from systolic_finsler.constants import AreaKind, Defaults
from systolic_finsler.convex2d import gauge_values, regular_polygon
from systolic_finsler.errors import PatchTooSmallError
from systolic_finsler.fields import MetricField
from systolic_finsler.loggers import logger
from systolic_finsler.types import (
    ConvexBody,
    DiameterEstimate,
    DiscretizationError,
    DistanceEstimate,
    IntVector,
    PeriodicGraph,
    QuadratureEstimate,
    SolverSettings,
    StableNormEstimate,
    StableNormValue,
    SystoleEstimate,
)
from systolic_finsler.utils.hull import cross2
from systolic_finsler.utils.integer_points import angle_key, primitive_directions, primitive_within
from systolic_finsler.utils.patch import GAUSS_NODES, TERMINAL_SHIFT, GridPatch, build_patch, build_torus, edge_weight_table

_PATCH_CACHE_SIZE = 4


def segment_lengths(m: MetricField, starts: NDArray[np.float64], ends: NDArray[np.float64]) -> NDArray[np.float64]:
    """Lengths of the straight segments ``starts[k] -> ends[k]`` by composite 2-point Gauss quadrature."""
    steps = ends - starts
    longest = float(np.max(np.linalg.norm(steps, axis=-1), initial=0.0))
    pieces = max(1, math.ceil(longest / Defaults.CURVE_PIECE))
    step = steps / pieces
    total = np.zeros(len(starts))
    for k in range(pieces):
        for s in GAUSS_NODES:
            total += m.gauge(starts + (k + s) * step, step)
    return 0.5 * total


def curve_length(m: MetricField, polyline: ArrayLike) -> float:
    """Finsler length of a polyline by composite 2-point Gauss quadrature."""
    pts = np.asarray(polyline, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
        msg = "a polyline needs at least two planar points"
        raise ValueError(msg)
    return sum(float(segment_lengths(m, a[None, :], b[None, :])[0]) for a, b in zip(pts[:-1], pts[1:]))


def discretization_error(m: MetricField, g: PeriodicGraph | None = None, samples: int = 8, directions: int = 360) -> DiscretizationError:
    """
    Sampled error model of the grid solver.

    ``stencil`` is the worst relative excess of following a direction by its
    two neighbouring stencil vectors. ``metric`` is the worst relative change
    of the gauge over one grid step; it is a heuristic bound, exact only for
    Lipschitz fields resolved by the grid.
    """
    graph = g or PeriodicGraph()
    offsets = np.array(sorted(graph.offsets, key=angle_key), dtype=float)
    stencil_angles = np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2 * math.pi)

    angles = 2 * math.pi * np.arange(directions) / directions
    units = np.column_stack((np.cos(angles), np.sin(angles)))
    upper = np.searchsorted(stencil_angles, angles, side="right") % len(offsets)
    lower = (upper - 1) % len(offsets)
    sa, sb = offsets[lower], offsets[upper]
    det = cross2(sa, sb)
    alpha = cross2(units, sb) / det
    beta = cross2(sa, units) / det

    ticks = (np.arange(samples) + 0.5) / samples
    xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
    base = np.column_stack((xs.ravel(), ys.ravel()))
    x = np.repeat(base, directions, axis=0)
    u = np.tile(units, (len(base), 1))
    a = np.tile(alpha, len(base))[:, None]
    b = np.tile(beta, len(base))[:, None]
    direct = m.gauge(x, u)
    split = a[:, 0] * m.gauge(x, np.tile(sa, (len(base), 1))) + b[:, 0] * m.gauge(x, np.tile(sb, (len(base), 1)))
    stencil = max(0.0, float(np.max(split / direct)) - 1.0)

    metric = 0.0
    for phi in np.arange(8) * math.pi / 4:
        shift = graph.h * np.array([math.cos(phi), math.sin(phi)])
        moved = m.gauge(x + shift, u)
        metric = max(metric, float(np.max(np.abs(moved - direct) / direct)))
    return DiscretizationError(stencil=stencil, metric=metric)


def area_estimates(m: MetricField, quad_n: int = Defaults.QUAD_N) -> tuple[QuadratureEstimate, QuadratureEstimate]:
    """BH and HT areas by the midpoint rule at ``quad_n`` and ``2·quad_n``."""
    if quad_n < 8:
        msg = f"quad_n must be at least 8, got {quad_n}"
        raise ValueError(msg)

    def midpoint(n: int) -> tuple[float, float]:
        ticks = (np.arange(n) + 0.5) / n
        xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
        bh, ht = m.area_densities(np.column_stack((xs.ravel(), ys.ravel())))
        return float(np.mean(bh)), float(np.mean(ht))

    coarse = midpoint(quad_n)
    fine = midpoint(2 * quad_n)
    return (
        QuadratureEstimate(value=fine[0], error=abs(fine[0] - coarse[0]), n=2 * quad_n),
        QuadratureEstimate(value=fine[1], error=abs(fine[1] - coarse[1]), n=2 * quad_n),
    )


def area_estimate(m: MetricField, kind: str, quad_n: int = Defaults.QUAD_N) -> QuadratureEstimate:
    bh, ht = area_estimates(m, quad_n)
    return bh if kind == AreaKind.BH else ht


def area_bh_field(m: MetricField, quad_n: int = Defaults.QUAD_N) -> float:
    """``∫ π / |K_x| dx`` over the fundamental domain."""
    return area_estimate(m, AreaKind.BH, quad_n).value


def area_ht_field(m: MetricField, quad_n: int = Defaults.QUAD_N) -> float:
    """``∫ |K_x°| / π dx`` over the fundamental domain."""
    return area_estimate(m, AreaKind.HT, quad_n).value


def _outer_polygon(points: NDArray[np.float64]) -> ConvexBody:
    """
    Polygon containing every convex curve through ``points`` (counterclockwise hull vertices).

    Between two consecutive points the curve stays inside the triangle cut
    off by the extended neighbouring chords. When those chords diverge, the
    apex of the right isosceles triangle on the chord stands in.
    """
    hull = ConvexBody(vertices=points).points
    n = len(hull)
    apexes = []
    for j in range(n):
        p_prev, p, q, q_next = hull[(j - 1) % n], hull[j], hull[(j + 1) % n], hull[(j + 2) % n]
        d1, d2 = p - p_prev, q - q_next
        det = float(cross2(d1, -d2))
        apex = None
        if abs(det) > 1e-14:
            s = float(cross2(q - p, -d2)) / det
            r = float(cross2(d1, q - p)) / det
            if s >= 0 and r >= 0:
                apex = p + s * d1
        if apex is None:
            chord = q - p
            apex = (p + q) / 2 + 0.5 * np.array([chord[1], -chord[0]])
        apexes.append(apex)
    return ConvexBody(vertices=np.vstack((hull, np.array(apexes))))


class PeriodicSolver:
    """
    Grid solver bound to one field and one discretisation.

    The edge-weight table, the error model, recent patches and every stable
    norm are cached, so the module-level helpers below are cheapest when
    several queries share a solver.
    """

    def __init__(self, field: MetricField, graph: PeriodicGraph | None = None, settings: SolverSettings | None = None) -> None:
        self.field = field
        self.graph = graph or PeriodicGraph()
        self.settings = settings or SolverSettings()
        self.offsets = self.graph.offsets
        self.resolution = self.graph.resolution
        self._table: NDArray[np.float64] | None = None
        self._torus: csr_matrix | None = None
        self._error: DiscretizationError | None = None
        self._ceiling: float | None = None
        self._floor: float | None = None
        self._norms: dict[IntVector, StableNormValue] = {}
        self._patches: OrderedDict[tuple[IntVector, IntVector], GridPatch] = OrderedDict()
        self._lock = threading.Lock()

    @property
    def table(self) -> NDArray[np.float64]:
        if self._table is None:
            self._table = edge_weight_table(self.field.gauge, self.resolution, self.offsets)
        return self._table

    @property
    def error(self) -> DiscretizationError:
        if self._error is None:
            self._error = discretization_error(self.field, self.graph)
            logger.debug("error model for %s: stencil %.4g, metric %.4g", self.field.label, self._error.stencil, self._error.metric)
        return self._error

    @property
    def ceiling(self) -> float:
        if self._ceiling is None:
            self._ceiling = self.field.gauge_ceiling()
        return self._ceiling

    @property
    def floor(self) -> float:
        if self._floor is None:
            self._floor = self.field.gauge_floor()
        return self._floor

    def _patch(self, lo: IntVector, hi: IntVector) -> GridPatch:
        key = (lo, hi)
        with self._lock:
            if key in self._patches:
                self._patches.move_to_end(key)
                return self._patches[key]
        patch = build_patch(self.table, self.offsets, lo, hi)
        with self._lock:
            self._patches[key] = patch
            while len(self._patches) > _PATCH_CACHE_SIZE:
                self._patches.popitem(last=False)
        return patch

    def pair_distances(self, sources: Sequence[IntVector], targets: Sequence[IntVector]) -> NDArray[np.float64]:
        """Graph distances from ``sources[k]`` to ``targets[k]`` (node indices), expanding the patch on demand."""
        nodes = np.array(list(sources) + list(targets))
        span_lo, span_hi = nodes.min(axis=0), nodes.max(axis=0)
        unique = sorted(set(sources))
        row_of = {s: r for r, s in enumerate(unique)}
        padding = self.settings.padding
        while True:
            pad = math.ceil(padding * self.resolution)
            lo = (int(span_lo[0]) - pad, int(span_lo[1]) - pad)
            hi = (int(span_hi[0]) + pad, int(span_hi[1]) + pad)
            patch = self._patch(lo, hi)
            dist, pred = dijkstra(patch.matrix, directed=True, indices=[patch.node(s) for s in unique], return_predecessors=True)
            values = np.array([dist[row_of[s], patch.node(t)] for s, t in zip(sources, targets)])
            touched = any(
                not math.isfinite(v) or patch.path_touches_border(pred[row_of[s]], patch.node(t)) for s, t, v in zip(sources, targets, values)
            )
            if not touched:
                return values
            if padding >= self.settings.max_padding:
                msg = f"shortest paths touch the patch border at padding {padding}"
                raise PatchTooSmallError(msg)
            padding = min(2 * padding, self.settings.max_padding)
            logger.info("expanding patch padding to %.2f fundamental domains", padding)

    def _endpoint_links(self, point: NDArray[np.float64], *, outgoing: bool) -> tuple[list[IntVector], NDArray[np.float64]]:
        """
        Nodes an off-grid endpoint is joined to, with the lengths of the straight links.

        The links reach every node within one stencil of the enclosing cell;
        a point on a node is joined to that node alone.
        """
        scaled = point * self.resolution
        nearest = np.rint(scaled)
        if np.all(np.abs(scaled - nearest) <= 1e-12):
            return [(int(nearest[0]), int(nearest[1]))], np.zeros(1)
        corner = np.floor(scaled).astype(np.int64)
        reach = np.arange(1 - self.graph.stencil, self.graph.stencil + 1)
        nodes = [(int(corner[0] + i), int(corner[1] + j)) for i in reach for j in reach]
        positions = np.array(nodes, dtype=float) / self.resolution
        ends = np.broadcast_to(point, positions.shape)
        costs = segment_lengths(self.field, ends, positions) if outgoing else segment_lengths(self.field, positions, ends)
        return nodes, costs

    def distance(self, a: ArrayLike, b: ArrayLike) -> DistanceEstimate:
        """Distance between lifted points; off-grid endpoints are linked to the nodes around them by straight segments."""
        pa, pb = np.asarray(a, dtype=float).reshape(2), np.asarray(b, dtype=float).reshape(2)
        sources, out_costs = self._endpoint_links(pa, outgoing=True)
        targets, in_costs = self._endpoint_links(pb, outgoing=False)
        nodes = np.array(sources + targets)
        span_lo, span_hi = nodes.min(axis=0), nodes.max(axis=0)
        padding = self.settings.padding
        while True:
            pad = math.ceil(padding * self.resolution)
            patch = self._patch((int(span_lo[0]) - pad, int(span_lo[1]) - pad), (int(span_hi[0]) + pad, int(span_hi[1]) + pad))
            matrix = patch.with_terminals([patch.node(s) for s in sources], out_costs, [patch.node(t) for t in targets], in_costs)
            dist, pred = dijkstra(matrix, directed=True, indices=patch.size, return_predecessors=True)
            total = float(dist[patch.size + 1])
            path = patch.trace(pred, int(pred[patch.size + 1])) if math.isfinite(total) else []
            if path and not any(patch.on_border(node) for node in path):
                break
            if padding >= self.settings.max_padding:
                msg = f"shortest paths touch the patch border at padding {padding}"
                raise PatchTooSmallError(msg)
            padding = min(2 * padding, self.settings.max_padding)
            logger.info("expanding patch padding to %.2f fundamental domains", padding)

        value = total - 2 * TERMINAL_SHIFT
        first, last = path[-1], path[0]
        na, nb = sources.index(patch.index(first)), targets.index(patch.index(last))
        graph_value = value - float(out_costs[na]) - float(in_costs[nb])
        links = np.linalg.norm(pa - np.array(sources[na]) / self.resolution) + np.linalg.norm(pb - np.array(targets[nb]) / self.resolution)
        err = self.error
        return DistanceEstimate(value=value, lower=max(0.0, graph_value / err.factor - self.ceiling * float(links)), error=err)

    def _base_nodes(self, z: IntVector) -> list[IntVector]:
        """Nodes on the circle ``x2 = 0`` (or ``x1 = 0`` when ``z`` is horizontal); every loop in class ``z`` crosses it."""
        count = min(self.settings.base_points, self.resolution)
        ticks = sorted({round(k * self.resolution / count) % self.resolution for k in range(count)})
        if z[1] != 0:
            return [(t, 0) for t in ticks]
        return [(0, t) for t in ticks]

    def translated_minimum(self, z: IntVector, k: int = 1) -> float:
        """``min_x d(x, x + k·z)`` over the base nodes."""
        base = self._base_nodes(z)
        shift = (k * z[0] * self.resolution, k * z[1] * self.resolution)
        targets = [(i + shift[0], j + shift[1]) for i, j in base]
        return float(np.min(self.pair_distances(base, targets)))

    def stable_norm(self, z: IntVector) -> StableNormValue:
        """
        ``min_x d(x, x + z)`` over the base nodes, bracketed from below.

        The lower bound undoes the error factor and the base-point spacing and
        never drops under ``floor · |z|``, the length of any loop in class ``z``.
        """
        z = (int(z[0]), int(z[1]))
        if z == (0, 0):
            msg = "stable norm needs a nonzero integer vector"
            raise ValueError(msg)
        if z in self._norms:
            return self._norms[z]
        mirror = (-z[0], -z[1])
        if self.field.is_reversible and mirror in self._norms:
            cached = self._norms[mirror]
            return cached.model_copy(update={"z": z})

        value = self.translated_minimum(z)
        err = self.error
        base_count = len(self._base_nodes(z))
        lower = min(value, max(value / err.factor - self.ceiling / base_count, self.floor * math.hypot(*z)))
        homogeneity: dict[int, float] = {}
        homogeneous = True
        if self.settings.homogeneity_check:
            for k in (2, 3):
                homogeneity[k] = self.translated_minimum(z, k) / k
                if abs(homogeneity[k] - value) > value - lower + 1e-12:
                    homogeneous = False
                    logger.warning("stable norm of %s disagrees with min d(x, x+%dz)/%d: %.6f vs %.6f", z, k, k, value, homogeneity[k])
        result = StableNormValue(z=z, value=value, lower=lower, homogeneity=homogeneity, homogeneous=homogeneous)
        self._norms[z] = result
        logger.debug("stable norm %s = %.6f (lower %.6f)", z, value, lower)
        return result

    def stable_unit_ball(self, directions: int | None = None) -> StableNormEstimate:
        zs = primitive_directions(directions or self.settings.directions)
        todo = [z for z in zs if angle_key(z) < math.pi - 1e-12] if self.field.is_reversible else zs
        _ = self.table, self.error, self.ceiling, self.floor
        if self.settings.threads > 1:
            with ThreadPoolExecutor(max_workers=self.settings.threads) as pool:
                list(pool.map(self.stable_norm, todo))
        else:
            for z in todo:
                self.stable_norm(z)
        values = [self.stable_norm(z) for z in zs]
        vectors = np.array(zs, dtype=float)
        inner_pts = vectors / np.array([v.value for v in values])[:, None]
        inner = ConvexBody(vertices=inner_pts)
        lowers = np.array([v.lower for v in values])
        if np.all(lowers > 0):
            outer = _outer_polygon(vectors / lowers[:, None])
        else:
            logger.warning("stable norm lower bounds of %s are not positive; using the gauge-floor disk as outer ball", self.field.label)
            outer = regular_polygon(Defaults.CONFORMAL_VERTICES, 1 / (self.floor * math.cos(math.pi / Defaults.CONFORMAL_VERTICES)))
        gauges = gauge_values(inner, vectors)
        violations = [z for z, v, gz in zip(zs, values, gauges) if gz < v.lower - 1e-12]
        for z in violations:
            logger.warning("stable ball loses convexity at direction %s beyond the error bars", z)
        return StableNormEstimate(
            directions=zs,
            values=values,
            inner=inner,
            outer=outer,
            convexity_violations=violations,
            error=self.error,
        )

    def systole(self) -> SystoleEstimate:
        """Least stable norm over primitive classes, pruned by the sampled gauge floor."""
        axes: list[IntVector] = [(1, 0), (0, 1)] if self.field.is_reversible else [(1, 0), (0, 1), (-1, 0), (0, -1)]
        best = min((self.stable_norm(z) for z in axes), key=lambda v: v.value)
        floor = self.floor
        lower = min(self.stable_norm(z).lower for z in axes)
        for z in primitive_within(best.value / floor):
            if self.field.is_reversible and angle_key(z) >= math.pi - 1e-12:
                continue
            if math.hypot(*z) * floor > best.value:
                continue
            candidate = self.stable_norm(z)
            lower = min(lower, candidate.lower)
            if candidate.value < best.value * (1 - 1e-12):
                best = candidate
        return SystoleEstimate(value=best.value, lower=min(lower, best.lower), z=best.z, error=self.error)

    def diameter(self) -> DiameterEstimate:
        """
        Quotient diameter on the wrap-around torus graph.

        Sources are a sub-grid of at most ``DIAMETER_SAMPLES²`` nodes and
        targets are all nodes. Any two points of the torus lie within ``r`` of a
        source and within ``h·√2/2`` of a node, so the true diameter is at most
        ``value + ceiling · (r + h·√2/2)``.
        """
        if self._torus is None:
            self._torus = build_torus(self.table, self.offsets)
        samples = min(Defaults.DIAMETER_SAMPLES, self.resolution)
        ticks = sorted({round(k * self.resolution / samples) % self.resolution for k in range(samples)})
        ids = [i * self.resolution + j for i in ticks for j in ticks]
        dist = dijkstra(self._torus, directed=True, indices=ids)
        gap = max(b - a for a, b in zip(ticks, [*ticks[1:], ticks[0] + self.resolution])) / self.resolution
        reach = math.hypot(gap, gap) / 2 + self.graph.h * math.sqrt(2) / 2
        return DiameterEstimate(value=float(np.max(dist)), slack=self.ceiling * reach)


def distance(m: MetricField, a: ArrayLike, b: ArrayLike, g: PeriodicGraph | None = None, settings: SolverSettings | None = None) -> DistanceEstimate:
    return PeriodicSolver(m, g, settings).distance(a, b)


def systole_periodic(m: MetricField, g: PeriodicGraph | None = None, settings: SolverSettings | None = None) -> SystoleEstimate:
    return PeriodicSolver(m, g, settings).systole()


def stable_norm(m: MetricField, z: IntVector, g: PeriodicGraph | None = None, settings: SolverSettings | None = None) -> StableNormValue:
    return PeriodicSolver(m, g, settings).stable_norm(z)


def stable_unit_ball(
    m: MetricField,
    g: PeriodicGraph | None = None,
    directions: int = Defaults.DIRECTIONS,
    settings: SolverSettings | None = None,
) -> StableNormEstimate:
    if directions < 8:
        msg = f"stable_unit_ball needs at least 8 directions, got {directions}"
        raise ValueError(msg)
    return PeriodicSolver(m, g, settings).stable_unit_ball(directions)


def diameter_estimate(m: MetricField, g: PeriodicGraph | None = None, settings: SolverSettings | None = None) -> float:
    return PeriodicSolver(m, g, settings).diameter().value

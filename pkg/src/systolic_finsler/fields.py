"""
Runtime metric fields: ``x ↦ K_x`` on the universal cover, Z²-periodic.

``gauge(points, vectors)`` is the workhorse of the grid solver and is
vectorised over any leading shape; ``body_at`` and ``area_densities`` serve
quadrature and rendering.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from systolic_finsler.constants import Defaults
from systolic_finsler.convex2d import area, circumradius, gauge_values, polar, support_values
from systolic_finsler.errors import InvalidFieldError
from systolic_finsler.expressions import Expression, parse_expression
from systolic_finsler.lattice import unit_disk
from systolic_finsler.loggers import logger
from systolic_finsler.types import BodyGridFieldSpec, ConformalFieldSpec, ConvexBody, FlatFieldSpec, Lattice2, MetricSpec

Factor = Callable[[NDArray[np.float64]], NDArray[np.float64]]


def _sample_grid(n: int) -> NDArray[np.float64]:
    ticks = (np.arange(n) + 0.5) / n
    xs, ys = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack((xs.ravel(), ys.ravel()))


class MetricField(ABC):
    """Z²-periodic field of unit bodies."""

    label: str = "field"

    @property
    @abstractmethod
    def is_reversible(self) -> bool: ...

    @abstractmethod
    def gauge(self, points: ArrayLike, vectors: ArrayLike) -> NDArray[np.float64]:
        """``‖v‖_{K_x}`` for matching ``(..., 2)`` arrays of base points and vectors."""

    @abstractmethod
    def body_at(self, point: ArrayLike) -> ConvexBody: ...

    def area_densities(self, points: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """BH and HT densities ``π/|K_x|`` and ``|K_x°|/π`` at ``(k, 2)`` points."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        bodies = [self.body_at(p) for p in pts]
        bh = np.array([math.pi / area(b) for b in bodies])
        ht = np.array([area(polar(b)) / math.pi for b in bodies])
        return bh, ht

    def to_spec(self) -> MetricSpec | None:
        """Metric JSON spec of this field, or ``None`` when it has no JSON form."""
        return None

    def gauge_floor(self, samples: int = 16) -> float:
        """Sampled lower bound ``c`` with ``‖v‖_{K_x} >= c · |v|``."""
        return min(1.0 / circumradius(self.body_at(p)) for p in _sample_grid(samples))

    def gauge_ceiling(self, samples: int = 16, directions: int = 72) -> float:
        """Sampled ``max ‖u‖_{K_x}`` over unit vectors ``u``."""
        pts = _sample_grid(samples)
        angles = 2 * math.pi * np.arange(directions) / directions
        units = np.column_stack((np.cos(angles), np.sin(angles)))
        base = np.repeat(pts, directions, axis=0)
        vecs = np.tile(units, (len(pts), 1))
        return float(np.max(self.gauge(base, vecs)))


class FlatField(MetricField):
    def __init__(self, body: ConvexBody) -> None:
        self.body = body
        self.label = "flat"
        self._bh = math.pi / area(body)
        self._ht = area(polar(body)) / math.pi

    @property
    def is_reversible(self) -> bool:
        return self.body.is_symmetric

    def gauge(self, points: ArrayLike, vectors: ArrayLike) -> NDArray[np.float64]:  # noqa: ARG002
        return gauge_values(self.body, vectors)

    def body_at(self, point: ArrayLike) -> ConvexBody:  # noqa: ARG002
        return self.body

    def area_densities(self, points: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        k = np.asarray(points, dtype=float).reshape(-1, 2).shape[0]
        return np.full(k, self._bh), np.full(k, self._ht)

    def to_spec(self) -> FlatFieldSpec:
        return FlatFieldSpec(body=self.body)

    def gauge_floor(self, samples: int = 16) -> float:  # noqa: ARG002
        return 1.0 / circumradius(self.body)


class ConformalField(MetricField):
    """
    ``F(x, v) = sqrt(f(x)) · ‖v‖_D`` with ``D`` the polygonal ``g0``-unit disk.

    Working with the polygon keeps the solver, the quadrature and the polar
    areas consistent with one and the same Finsler metric.
    """

    def __init__(self, factor: Factor, g0: Lattice2, vertices: int = Defaults.CONFORMAL_VERTICES, label: str = "conformal", source: str | None = None) -> None:
        self.factor = factor
        self.source = source
        self.g0 = g0
        self.disk = unit_disk(g0, vertices)
        self.label = label
        self._disk_area = area(self.disk)
        self._polar_area = area(polar(self.disk))
        sample = self.factor(_sample_grid(64))
        if not np.all(np.isfinite(sample)) or np.min(sample) <= 0:
            msg = f"conformal factor {label!r} must be finite and positive on the torus"
            raise InvalidFieldError(msg)
        self._floor = float(np.min(sample))
        pts = _sample_grid(8)
        for shift in ((1.0, 0.0), (0.0, 1.0)):
            if not np.allclose(self.factor(pts), self.factor(pts + np.array(shift)), rtol=1e-9, atol=1e-12):
                logger.warning("conformal factor %r is not Z²-periodic along %s", label, shift)

    @classmethod
    def from_expression(cls, source: str | Expression, g0: Lattice2, vertices: int = Defaults.CONFORMAL_VERTICES) -> "ConformalField":
        expression = parse_expression(source) if isinstance(source, str) else source
        return cls(expression, g0, vertices, label=expression.source, source=expression.source)

    @property
    def is_reversible(self) -> bool:
        return True

    def gauge(self, points: ArrayLike, vectors: ArrayLike) -> NDArray[np.float64]:
        return np.sqrt(self.factor(np.asarray(points, dtype=float))) * gauge_values(self.disk, vectors)

    def body_at(self, point: ArrayLike) -> ConvexBody:
        f = float(self.factor(np.asarray(point, dtype=float).reshape(1, 2))[0])
        return ConvexBody(vertices=self.disk.points / math.sqrt(f))

    def area_densities(self, points: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        f = self.factor(np.asarray(points, dtype=float).reshape(-1, 2))
        return math.pi * f / self._disk_area, self._polar_area * f / math.pi

    def to_spec(self) -> ConformalFieldSpec | None:
        if self.source is None:
            return None
        return ConformalFieldSpec(f=self.source, g0=self.g0.basis, vertices=self.disk.vertex_count)

    def gauge_floor(self, samples: int = 16) -> float:  # noqa: ARG002
        return math.sqrt(self._floor) / circumradius(self.disk)


class BodyGridField(MetricField):
    """
    Bilinear interpolation of support functions between grid bodies.

    All bodies are described on a common set of unit normals ``U`` (the union
    of their edge normals); a convex combination of support functions is the
    support function of the Minkowski combination, whose normals stay inside
    ``U``, so ``K_x = {y : U · y <= h(x)}`` exactly.
    """

    def __init__(self, n: int, bodies: list[ConvexBody], label: str = "body_grid") -> None:
        if len(bodies) != n * n:
            msg = f"body_grid with n={n} needs {n * n} bodies, got {len(bodies)}"
            raise InvalidFieldError(msg)
        self.n = n
        self.bodies = bodies
        self.label = label
        normals = np.vstack([b.normals for b in bodies])
        angles = np.round(np.mod(np.arctan2(normals[:, 1], normals[:, 0]), 2 * math.pi), 12)
        angles = np.unique(angles)
        self.normals = np.column_stack((np.cos(angles), np.sin(angles)))
        self.heights = np.stack([support_values(b, self.normals) for b in bodies]).reshape(n, n, -1)
        self._reversible = all(b.is_symmetric for b in bodies)

    @property
    def is_reversible(self) -> bool:
        return self._reversible

    def support(self, points: ArrayLike) -> NDArray[np.float64]:
        """Interpolated support values ``h_k(x)`` with shape ``(..., len(U))``."""
        pts = np.asarray(points, dtype=float)
        s = pts[..., 0] * self.n
        t = pts[..., 1] * self.n
        i0 = np.floor(s).astype(np.int64)
        j0 = np.floor(t).astype(np.int64)
        fs = (s - i0)[..., None]
        ft = (t - j0)[..., None]
        n = self.n
        i0, j0 = i0 % n, j0 % n
        i1, j1 = (i0 + 1) % n, (j0 + 1) % n
        h = self.heights
        return (1 - fs) * (1 - ft) * h[i0, j0] + fs * (1 - ft) * h[i1, j0] + (1 - fs) * ft * h[i0, j1] + fs * ft * h[i1, j1]

    def gauge(self, points: ArrayLike, vectors: ArrayLike) -> NDArray[np.float64]:
        vs = np.asarray(vectors, dtype=float)
        ratios = (vs @ self.normals.T) / self.support(points)
        return np.maximum(np.max(ratios, axis=-1), 0.0)

    def body_at(self, point: ArrayLike) -> ConvexBody:
        h = self.support(np.asarray(point, dtype=float).reshape(2))
        return polar(ConvexBody(vertices=self.normals / h[:, None]))

    def to_spec(self) -> BodyGridFieldSpec:
        return BodyGridFieldSpec(n=self.n, bodies=self.bodies)

    def gauge_floor(self, samples: int = 16) -> float:
        return float(np.min(1.0 / self.support(_sample_grid(samples)).max(axis=-1)))


def translation_average(base: ConformalField, translations: int) -> ConformalField:
    """Conformal field with the factor averaged over ``translations²`` torus translations."""
    shifts = np.array([(a / translations, b / translations) for a in range(translations) for b in range(translations)])

    def averaged(points: NDArray[np.float64]) -> NDArray[np.float64]:
        pts = np.asarray(points, dtype=float)
        return np.mean([base.factor(pts + s) for s in shifts], axis=0)

    return ConformalField(averaged, base.g0, base.disk.vertex_count, label=f"mean{translations}({base.label})")


def factor_is_constant(field: ConformalField, samples: int = 16) -> bool:
    values = field.factor(_sample_grid(samples))
    return bool(np.ptp(values) <= 1e-9 * max(1.0, float(np.max(np.abs(values)))))


def build_field(spec: MetricSpec) -> MetricField:
    """Instantiate the runtime field described by a JSON spec."""
    if isinstance(spec, ConformalFieldSpec):
        return ConformalField.from_expression(spec.f, Lattice2(basis=spec.g0), spec.vertices)
    if isinstance(spec, BodyGridFieldSpec):
        return BodyGridField(spec.n, spec.bodies)
    if isinstance(spec, FlatFieldSpec):
        return FlatField(spec.body)
    msg = f"unknown metric spec {spec!r}"
    raise InvalidFieldError(msg)

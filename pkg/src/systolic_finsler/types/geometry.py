from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, PrivateAttr, ValidationError, field_validator, model_validator

from systolic_finsler.constants import Tolerance
from systolic_finsler.errors import InvalidBodyError, InvalidLatticeError, SystolicError
from systolic_finsler.utils.hull import edge_normals, normalize_polygon, origin_margins

Point = tuple[float, float]


def _domain_error(error: ValidationError) -> Exception:
    """The domain error a validator raised, or the validation error itself."""
    for detail in error.errors():
        cause = detail.get("ctx", {}).get("error")
        if isinstance(cause, SystolicError):
            return cause
    return error


class ConvexBody(BaseModel):
    """Convex polygon with the origin strictly inside.

    Doubles as the unit ball of a (possibly asymmetric) norm. Input vertices
    may come in any order and may include interior or collinear points; they
    are normalised to the counterclockwise hull on construction.
    """

    model_config = ConfigDict(frozen=True)

    vertices: tuple[Point, ...]

    _points: NDArray[np.float64] = PrivateAttr()
    _normals: NDArray[np.float64] = PrivateAttr()
    _symmetric: bool = PrivateAttr(default=False)

    def __init__(self, **data: Any) -> None:  # noqa: ANN401
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise _domain_error(e) from None

    @field_validator("vertices", mode="before")
    @classmethod
    def _normalize(cls, value: Any) -> tuple[Point, ...]:  # noqa: ANN401
        verts = normalize_polygon(value)
        margins = origin_margins(verts)
        if np.min(margins) <= Tolerance.INTERIOR:
            msg = f"origin must lie strictly inside the body (margin {float(np.min(margins)):.3e})"
            raise InvalidBodyError(msg)
        return tuple((float(x), float(y)) for x, y in verts)

    def model_post_init(self, context: Any, /) -> None:  # noqa: ANN401
        points = np.array(self.vertices, dtype=float)
        points.flags.writeable = False
        normals = edge_normals(points)
        normals.flags.writeable = False
        self._points = points
        self._normals = normals
        self._symmetric = _vertex_set_symmetric(points)

    @property
    def points(self) -> NDArray[np.float64]:
        """Read-only ``(n, 2)`` vertex array."""
        return self._points

    @property
    def normals(self) -> NDArray[np.float64]:
        """Read-only ``(n, 2)`` array; row ``e`` is the polar vertex of edge ``e``."""
        return self._normals

    @property
    def is_symmetric(self) -> bool:
        return self._symmetric

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConvexBody):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)


def _vertex_set_symmetric(points: NDArray[np.float64]) -> bool:
    if len(points) % 2:
        return False
    tolerance = Tolerance.SYMMETRY * max(1.0, float(np.max(np.abs(points))))
    gaps = np.linalg.norm(points[:, None, :] + points[None, :, :], axis=2)
    return bool(np.all(gaps.min(axis=1) <= tolerance))


class Lattice2(BaseModel):
    """Full-rank planar lattice spanned by the rows of ``basis``."""

    model_config = ConfigDict(frozen=True)

    basis: tuple[Point, Point]

    def __init__(self, **data: Any) -> None:  # noqa: ANN401
        try:
            super().__init__(**data)
        except ValidationError as e:
            raise _domain_error(e) from None

    @model_validator(mode="after")
    def _check_rank(self) -> "Lattice2":
        (u1, u2), (v1, v2) = self.basis
        if abs(u1 * v2 - u2 * v1) <= 1e-12:
            msg = f"lattice basis is degenerate: {self.basis}"
            raise InvalidLatticeError(msg)
        return self

    @property
    def u(self) -> NDArray[np.float64]:
        return np.array(self.basis[0], dtype=float)

    @property
    def v(self) -> NDArray[np.float64]:
        return np.array(self.basis[1], dtype=float)

    @property
    def matrix(self) -> NDArray[np.float64]:
        """Matrix with columns ``u`` and ``v``; maps Z² coordinates into the plane."""
        return np.column_stack((self.u, self.v))


class FlatFinslerTorus(BaseModel):
    """Translation-invariant Finsler structure on R²/Z² with unit ball ``unit_ball``."""

    model_config = ConfigDict(frozen=True)

    unit_ball: ConvexBody

    @property
    def is_reversible(self) -> bool:
        return self.unit_ball.is_symmetric

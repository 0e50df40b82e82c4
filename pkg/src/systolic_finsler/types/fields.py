import math
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator, model_validator

from systolic_finsler.constants import Defaults
from systolic_finsler.types.geometry import ConvexBody, Point

IntVector = tuple[int, int]


class PeriodicGraph(BaseModel):
    """Discretisation of the universal cover: grid spacing ``h`` and stencil order ``stencil``.

    Nodes are ``h·Z²``. Each node is joined to ``node + h·(p, q)`` for every
    primitive offset with ``|p|, |q| <= stencil``.
    """

    model_config = ConfigDict(frozen=True)

    h: PositiveFloat = Defaults.GRID_SPACING
    stencil: PositiveInt = Defaults.STENCIL

    @field_validator("h")
    @classmethod
    def _check_resolution(cls, value: float) -> float:
        n = round(1 / value)
        if n < 2 or abs(n * value - 1) > 1e-9:
            msg = f"grid spacing must be 1/n for an integer n >= 2, got {value}"
            raise ValueError(msg)
        return 1 / n

    @property
    def resolution(self) -> int:
        """Nodes per unit length."""
        return round(1 / self.h)

    @property
    def offsets(self) -> list[IntVector]:
        s = self.stencil
        return [(p, q) for p in range(-s, s + 1) for q in range(-s, s + 1) if (p, q) != (0, 0) and math.gcd(p, q) == 1]


class SolverSettings(BaseModel):
    """Numerical parameters of the periodic solver."""

    model_config = ConfigDict(frozen=True)

    base_points: PositiveInt = Defaults.BASE_POINTS
    padding: PositiveFloat = Defaults.PATCH_PADDING
    max_padding: PositiveFloat = Defaults.MAX_PATCH_PADDING
    directions: Annotated[int, Field(ge=8)] = Defaults.DIRECTIONS
    quad_n: Annotated[int, Field(ge=8)] = Defaults.QUAD_N
    threads: PositiveInt = 1
    homogeneity_check: bool = True

    @model_validator(mode="after")
    def _check_padding(self) -> "SolverSettings":
        if self.max_padding < self.padding:
            msg = "max_padding must be at least padding"
            raise ValueError(msg)
        return self


class ConformalFieldSpec(BaseModel):
    """``F(x, v) = sqrt(f(x)) · |v|_{g0}`` with ``f`` given as an expression in x1, x2."""

    kind: Literal["conformal"] = "conformal"
    f: str
    g0: tuple[Point, Point] = ((1.0, 0.0), (0.0, 1.0))
    vertices: Annotated[int, Field(ge=8)] = Defaults.CONFORMAL_VERTICES


class BodyGridFieldSpec(BaseModel):
    """Bodies sampled on an ``n × n`` grid; ``bodies[i * n + j]`` sits at ``(i / n, j / n)``."""

    kind: Literal["body_grid"] = "body_grid"
    n: PositiveInt
    bodies: list[ConvexBody]

    @model_validator(mode="after")
    def _check_count(self) -> "BodyGridFieldSpec":
        if len(self.bodies) != self.n * self.n:
            msg = f"body_grid with n={self.n} needs {self.n * self.n} bodies, got {len(self.bodies)}"
            raise ValueError(msg)
        return self


class FlatFieldSpec(BaseModel):
    kind: Literal["flat"] = "flat"
    body: ConvexBody


MetricSpec = Annotated[ConformalFieldSpec | BodyGridFieldSpec | FlatFieldSpec, Field(discriminator="kind")]


class DiscretizationError(BaseModel):
    """Relative error model of the grid solver.

    A computed node-to-node distance ``d_h`` satisfies ``d <= d_h <= factor · d``
    where ``factor = (1 + stencil) (1 + metric)``.
    """

    stencil: float
    metric: float

    @property
    def factor(self) -> float:
        return (1 + self.stencil) * (1 + self.metric)

    @property
    def relative(self) -> float:
        return self.factor - 1


class DistanceEstimate(BaseModel):
    value: float
    lower: float
    error: DiscretizationError


class StableNormValue(BaseModel):
    """``‖z‖_st`` bracketed by ``[lower, value]``.

    ``homogeneity[k]`` is ``min_x d(x, x + k·z) / k``; ``homogeneous`` is false
    when one of them leaves the bracket.
    """

    z: IntVector
    value: float
    lower: float
    homogeneity: dict[int, float] = Field(default_factory=dict)
    homogeneous: bool = True

    @property
    def upper(self) -> float:
        return self.value


class DiameterEstimate(BaseModel):
    """Quotient diameter from sampled sources; ``slack`` covers points between the samples."""

    value: float
    slack: float

    @property
    def upper(self) -> float:
        return self.value + self.slack


class StableNormEstimate(BaseModel):
    """Sampled stable norm with an inner and an outer polygon for its unit ball."""

    directions: list[IntVector]
    values: list[StableNormValue]
    inner: ConvexBody
    outer: ConvexBody
    convexity_violations: list[IntVector] = Field(default_factory=list)
    error: DiscretizationError

    @property
    def ball(self) -> ConvexBody:
        return self.inner

    def value_of(self, z: IntVector) -> StableNormValue:
        for item in self.values:
            if item.z == z:
                return item
        msg = f"direction {z} was not sampled"
        raise KeyError(msg)


class SystoleEstimate(BaseModel):
    value: float
    lower: float
    z: IntVector
    error: DiscretizationError


class QuadratureEstimate(BaseModel):
    value: float
    error: float
    n: int

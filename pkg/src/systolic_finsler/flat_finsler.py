"""Flat Finsler tori ``(R²/Z², ‖·‖_K)``: systole, areas, systolic ratios and extremal families."""

import math
from typing import Literal

import numpy as np
from pydantic import BaseModel

from systolic_finsler.constants import AreaKind, Constants
from systolic_finsler.convex2d import area, circumradius, gauge_values, polar, scale_body
from systolic_finsler.types import ConvexBody, FlatFinslerTorus, IntVector

AXES: tuple[IntVector, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


class OptimalConstant(BaseModel):
    """One cell of the table of optimal isosystolic constants on the two-torus."""

    metric_class: str
    area: Literal["riemannian", "bh", "ht"]
    reversible: bool
    value: float
    attribution: str


OPTIMAL_CONSTANTS: list[OptimalConstant] = [
    OptimalConstant(metric_class="flat Riemannian", area="riemannian", reversible=True, value=Constants.LOEWNER, attribution="Hermite"),
    OptimalConstant(metric_class="Riemannian", area="riemannian", reversible=True, value=Constants.LOEWNER, attribution="Loewner"),
    OptimalConstant(metric_class="flat Finsler", area="bh", reversible=True, value=Constants.MINKOWSKI_BH, attribution="Minkowski"),
    OptimalConstant(metric_class="flat Finsler", area="bh", reversible=False, value=0.0, attribution="systolic freedom"),
    OptimalConstant(metric_class="Finsler", area="bh", reversible=True, value=Constants.MINKOWSKI_BH, attribution="BH flattening"),
    OptimalConstant(metric_class="Finsler", area="bh", reversible=False, value=0.0, attribution="systolic freedom"),
    OptimalConstant(metric_class="flat Finsler", area="ht", reversible=True, value=Constants.REVERSIBLE_HT, attribution="Minkowski + Mahler"),
    OptimalConstant(metric_class="flat Finsler", area="ht", reversible=False, value=Constants.ABT_HT, attribution="lattice triangle"),
    OptimalConstant(metric_class="Finsler", area="ht", reversible=True, value=Constants.REVERSIBLE_HT, attribution="Sabourau"),
    OptimalConstant(metric_class="Finsler", area="ht", reversible=False, value=Constants.ABT_HT, attribution="HT flattening"),
]


def systole_flat(t: FlatFinslerTorus) -> tuple[float, IntVector]:
    """
    Least ``‖z‖_K`` over nonzero integer ``z`` and a minimiser.

    ``K`` sits in the disk of radius ``R = circumradius(K)``, so ``‖z‖_K >= |z| / R``
    and only ``|z| <= R · best`` can improve on the incumbent. Ties resolve to
    the first axis vector, then to the lexicographically first candidate.
    """
    body = t.unit_ball
    axes = np.array(AXES, dtype=float)
    axis_values = gauge_values(body, axes)
    k = int(np.argmin(axis_values))
    best, best_z = float(axis_values[k]), AXES[k]

    reach = circumradius(body) * best
    bound = math.floor(reach + 1e-12)
    xs, ys = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
    zs = np.column_stack((xs.ravel(), ys.ravel()))
    norms = np.hypot(zs[:, 0], zs[:, 1])
    zs = zs[(norms > 0) & (norms <= reach + 1e-12)]
    if len(zs):
        values = gauge_values(body, zs.astype(float))
        j = int(np.argmin(values))
        if values[j] < best * (1 - 1e-12):
            best, best_z = float(values[j]), (int(zs[j, 0]), int(zs[j, 1]))
    return best, best_z


def area_bh_flat(t: FlatFinslerTorus) -> float:
    """Busemann-Hausdorff area ``π / |K|``."""
    return math.pi / area(t.unit_ball)


def area_ht_flat(t: FlatFinslerTorus) -> float:
    """Holmes-Thompson area ``|K°| / π``."""
    return area(polar(t.unit_ball)) / math.pi


def systolic_ratio(t: FlatFinslerTorus, which: Literal["bh", "ht"]) -> float:
    sys, _ = systole_flat(t)
    value = area_bh_flat(t) if which == AreaKind.BH else area_ht_flat(t)
    return value / (sys * sys)


def normalize_systole(t: FlatFinslerTorus) -> FlatFinslerTorus:
    """Rescale the unit ball so the systole is 1."""
    sys, _ = systole_flat(t)
    return FlatFinslerTorus(unit_ball=scale_body(t.unit_ball, sys))


def k_epsilon(eps: float) -> ConvexBody:
    """Non-symmetric quadrilateral with systole 1 and BH area ``2πε/(1+ε)²``."""
    if not 0 < eps < 1:
        msg = f"eps must lie in (0, 1), got {eps}"
        raise ValueError(msg)
    half_width = (1 + eps) / (2 * eps)
    height = (1 - eps) / 2
    return ConvexBody(vertices=[(0.0, 1.0), (half_width, height), (0.0, -eps), (-half_width, height)])


def k_epsilon_ratio(eps: float) -> float:
    return 2 * math.pi * eps / (1 + eps) ** 2


def square_body() -> ConvexBody:
    return ConvexBody(vertices=[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])


def abt_triangle() -> ConvexBody:
    """Area-minimising body among those meeting every integer line."""
    return ConvexBody(vertices=[(-1.0, -1.0), (0.0, 1.0), (1.0, 0.0)])


def abt_torus() -> FlatFinslerTorus:
    """Flat torus on the polar of ``abt_triangle``; attains the non-reversible HT constant."""
    return FlatFinslerTorus(unit_ball=polar(abt_triangle()))

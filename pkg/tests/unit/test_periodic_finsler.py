"""Tests for the periodic grid solver on flat and conformal fields."""

import logging
import math

import numpy as np
import pytest

from systolic_finsler.convex2d import area, contains_strictly, gauge_value
from systolic_finsler.fields import ConformalField, FlatField
from systolic_finsler.flat_finsler import k_epsilon
from systolic_finsler.lattice import square_lattice
from systolic_finsler.loggers import logger
from systolic_finsler.periodic_finsler import (
    PeriodicSolver,
    area_bh_field,
    area_estimates,
    area_ht_field,
    curve_length,
    diameter_estimate,
    discretization_error,
    distance,
    stable_norm,
    stable_unit_ball,
    systole_periodic,
)
from systolic_finsler.types import ConvexBody, PeriodicGraph, SolverSettings


@pytest.fixture
def flat_square(square: ConvexBody) -> FlatField:
    return FlatField(square)


@pytest.fixture
def sine_field() -> ConformalField:
    return ConformalField.from_expression("(1+0.5*sin(2*pi*x1))^2", square_lattice())


def test_graph_rejects_non_integral_resolution():
    with pytest.raises(ValueError, match="1/n"):
        PeriodicGraph(h=0.3)


def test_graph_offsets_are_primitive():
    offsets = PeriodicGraph(h=1 / 8, stencil=2).offsets
    assert (1, 0) in offsets
    assert (2, 1) in offsets
    assert (2, 2) not in offsets
    assert len(offsets) == 16


def test_curve_length_on_flat_square(flat_square: FlatField):
    assert curve_length(flat_square, [(0, 0), (1, 0), (1, 2)]) == pytest.approx(3.0)
    assert curve_length(flat_square, [(0, 0), (1, 1)]) == pytest.approx(1.0)
    with pytest.raises(ValueError, match="two planar points"):
        curve_length(flat_square, [(0, 0)])


def test_curve_length_on_conformal_field(sine_field: ConformalField):
    assert curve_length(sine_field, [(0.25, 0.0), (0.25, 1.0)]) == pytest.approx(1.5, rel=1e-9)


def test_flat_distance_is_exact(flat_square: FlatField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    estimate = distance(flat_square, (0, 0), (1, 0), coarse_graph, fast_settings)
    assert estimate.value == pytest.approx(1.0)
    assert estimate.lower <= estimate.value
    off_grid = distance(flat_square, (0.01, 0.0), (1.01, 0.5), coarse_graph, fast_settings)
    assert off_grid.value == pytest.approx(1.0)
    assert off_grid.lower <= off_grid.value


def test_discretization_error_of_flat_field(flat_square: FlatField, coarse_graph: PeriodicGraph):
    error = discretization_error(flat_square, coarse_graph)
    assert error.metric == 0.0
    assert error.stencil == pytest.approx(0.0, abs=1e-9)
    assert error.factor == pytest.approx(1.0, abs=1e-9)


def test_flat_stable_norm_matches_the_gauge(flat_square: FlatField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    solver = PeriodicSolver(flat_square, coarse_graph, fast_settings)
    for z, expected in [((1, 0), 1.0), ((1, 1), 1.0), ((2, 1), 2.0), ((-1, 3), 3.0)]:
        value = solver.stable_norm(z)
        assert value.value == pytest.approx(expected)
        assert value.lower <= value.value
    assert solver.stable_norm((-1, -1)).value == pytest.approx(1.0)


def test_stable_norm_rejects_zero(flat_square: FlatField, coarse_graph: PeriodicGraph):
    with pytest.raises(ValueError, match="nonzero"):
        stable_norm(flat_square, (0, 0), coarse_graph)


def test_flat_systole(flat_square: FlatField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    sys = systole_periodic(flat_square, coarse_graph, fast_settings)
    assert sys.value == pytest.approx(1.0)
    assert sys.z == (1, 0)
    assert 0 < sys.lower <= sys.value


def test_flat_stable_ball_is_the_square(flat_square: FlatField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    estimate = stable_unit_ball(flat_square, coarse_graph, directions=8, settings=fast_settings)
    assert len(estimate.directions) == 8
    assert area(estimate.inner) == pytest.approx(4.0)
    assert area(estimate.outer) > area(estimate.inner)
    assert np.all(contains_strictly(estimate.outer, 0.99 * estimate.inner.points))
    assert estimate.convexity_violations == []
    assert estimate.value_of((0, 1)).value == pytest.approx(1.0)


def test_stable_ball_needs_enough_directions(flat_square: FlatField):
    with pytest.raises(ValueError, match="at least 8"):
        stable_unit_ball(flat_square, directions=4)


def test_sine_field_stable_norms(sine_field: ConformalField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    """Vertical loops hug the slow strip; horizontal loops average the factor."""
    solver = PeriodicSolver(sine_field, coarse_graph, fast_settings)
    assert solver.stable_norm((0, 1)).value == pytest.approx(0.5, rel=1e-3)
    assert solver.stable_norm((1, 0)).value == pytest.approx(1.0, rel=1e-3)
    assert solver.systole().z in {(0, 1), (0, -1)}


def test_flat_areas(flat_square: FlatField):
    assert area_bh_field(flat_square) == pytest.approx(math.pi / 4)
    assert area_ht_field(flat_square) == pytest.approx(2 / math.pi)
    with pytest.raises(ValueError, match="quad_n"):
        area_estimates(flat_square, quad_n=4)


def test_sine_field_areas(sine_field: ConformalField):
    bh, ht = area_estimates(sine_field, quad_n=16)
    assert bh.value == pytest.approx(1.125, rel=5e-3)
    assert ht.value == pytest.approx(1.125, rel=5e-3)
    assert bh.error < 1e-6
    assert bh.n == 32


def test_flat_diameter(flat_square: FlatField, coarse_graph: PeriodicGraph):
    assert diameter_estimate(flat_square, coarse_graph) == pytest.approx(0.5)
    estimate = PeriodicSolver(flat_square, coarse_graph).diameter()
    assert estimate.value == pytest.approx(0.5)
    assert 0 < estimate.slack < 0.2
    assert estimate.upper == pytest.approx(estimate.value + estimate.slack)


def test_threaded_ball_matches_serial(sine_field: ConformalField, coarse_graph: PeriodicGraph):
    serial = stable_unit_ball(sine_field, coarse_graph, directions=8, settings=SolverSettings(base_points=8, padding=0.5))
    threaded = stable_unit_ball(sine_field, coarse_graph, directions=8, settings=SolverSettings(base_points=8, padding=0.5, threads=4))
    assert [v.value for v in serial.values] == pytest.approx([v.value for v in threaded.values])


def _k_epsilon_distance(stencil: int, h: float) -> tuple[float, float]:
    body = k_epsilon(0.3)
    estimate = distance(FlatField(body), (0.3, 0.1), (-1.2, 0.7), PeriodicGraph(h=h, stencil=stencil), SolverSettings(base_points=8, padding=0.5))
    assert estimate.lower <= estimate.value
    return estimate.value, gauge_value(body, (-1.5, 0.6))


@pytest.mark.parametrize(("stencil", "rel"), [(4, 1e-2), (6, 5e-3)])
def test_off_grid_distance_on_k_epsilon(stencil: int, rel: float):
    value, exact = _k_epsilon_distance(stencil, 1 / 32)
    assert exact == pytest.approx(1.05)
    assert value >= exact - 1e-9
    assert value == pytest.approx(exact, rel=rel)


@pytest.mark.slow
@pytest.mark.parametrize("stencil", [4, 6])
def test_off_grid_distance_on_k_epsilon_fine_grid(stencil: int):
    value, exact = _k_epsilon_distance(stencil, 1 / 64)
    assert value == pytest.approx(exact, rel=5e-3)


def test_translated_minimum_converges_to_the_stable_norm(sine_field: ConformalField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    solver = PeriodicSolver(sine_field, coarse_graph, fast_settings)
    for z in [(0, 1), (1, 0)]:
        norm = solver.stable_norm(z).value
        for k in range(1, 5):
            assert solver.translated_minimum(z, k) / k == pytest.approx(norm, rel=1e-3)


def test_homogeneity_is_checked_by_default(flat_square: FlatField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    assert SolverSettings().homogeneity_check
    value = PeriodicSolver(flat_square, coarse_graph, fast_settings).stable_norm((1, 1))
    assert set(value.homogeneity) == {2, 3}
    assert value.homogeneity[2] == pytest.approx(1.0)
    assert value.homogeneous


def test_homogeneity_violation_is_reported(
    flat_square: FlatField,
    coarse_graph: PeriodicGraph,
    fast_settings: SolverSettings,
    monkeypatch: pytest.MonkeyPatch,
    caplog: pytest.LogCaptureFixture,
):
    exact = PeriodicSolver.translated_minimum

    def stretched(self: PeriodicSolver, z: tuple[int, int], k: int = 1) -> float:
        return exact(self, z, k) * (1.0 if k == 1 else 1.5)

    monkeypatch.setattr(PeriodicSolver, "translated_minimum", stretched)
    with caplog.at_level(logging.WARNING, logger=logger.name):
        value = PeriodicSolver(flat_square, coarse_graph, fast_settings).stable_norm((1, 0))
    assert value.value == pytest.approx(1.0)
    assert not value.homogeneous
    assert "disagrees" in caplog.text


def test_homogeneity_check_can_be_disabled(flat_square: FlatField, coarse_graph: PeriodicGraph):
    settings = SolverSettings(base_points=8, padding=0.5, homogeneity_check=False)
    value = PeriodicSolver(flat_square, coarse_graph, settings).stable_norm((1, 0))
    assert value.homogeneity == {}
    assert value.homogeneous


def test_stable_norm_lower_bound_never_drops_below_the_gauge_floor(sine_field: ConformalField, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    solver = PeriodicSolver(sine_field, coarse_graph, fast_settings)
    for z in [(1, 0), (0, 1), (1, 1), (2, 1)]:
        value = solver.stable_norm(z)
        assert value.lower >= min(value.value, solver.floor * math.hypot(*z)) - 1e-12
        assert 0 < value.lower <= value.value

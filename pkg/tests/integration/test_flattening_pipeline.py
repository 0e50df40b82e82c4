"""
Grid solver against analytic answers, and the flattening audits on real fields.
"""

import numpy as np
import pytest

from systolic_finsler.convex2d import circumradius, gauge_value, hausdorff_distance, regular_polygon
from systolic_finsler.fields import ConformalField, FlatField
from systolic_finsler.lattice import square_lattice
from systolic_finsler.periodic_finsler import PeriodicSolver, area_estimates
from systolic_finsler.types import ConvexBody, PeriodicGraph, SolverSettings
from systolic_finsler.verify import (
    PERIODIC_GRAPH,
    PERIODIC_SETTINGS,
    audit_field,
    check_bounded_distance,
    check_flattening,
    check_periodic_inequalities,
    standard_fields,
)

SINE = "(1+0.5*sin(2*pi*x1))^2"


@pytest.fixture(scope="module")
def sine_solver() -> PeriodicSolver:
    field = ConformalField.from_expression(SINE, square_lattice())
    return PeriodicSolver(field, PERIODIC_GRAPH, PERIODIC_SETTINGS)


def test_sine_stable_norms(sine_solver: PeriodicSolver):
    assert sine_solver.stable_norm((0, 1)).value == pytest.approx(0.5, rel=2e-2)
    assert sine_solver.stable_norm((1, 0)).value == pytest.approx(1.0, rel=2e-2)
    systole = sine_solver.systole()
    assert systole.value == pytest.approx(0.5, rel=2e-2)
    assert systole.lower <= systole.value


def test_sine_areas(sine_solver: PeriodicSolver):
    bh, ht = area_estimates(sine_solver.field)
    assert bh.value == pytest.approx(1.125, rel=5e-3)
    assert ht.value == pytest.approx(1.125, rel=5e-3)


def test_sine_stable_ball(sine_solver: PeriodicSolver):
    ball = sine_solver.stable_unit_ball()
    assert ball.value_of((0, 1)).value == pytest.approx(0.5, rel=2e-2)
    assert ball.value_of((1, 0)).value == pytest.approx(1.0, rel=2e-2)
    assert not ball.convexity_violations


def test_flat_hexagon_against_its_gauge():
    hexagon = regular_polygon(6)
    solver = PeriodicSolver(FlatField(hexagon), PERIODIC_GRAPH, PERIODIC_SETTINGS)
    d = solver.distance((0, 0), (2, 1))
    assert d.value == pytest.approx(gauge_value(hexagon, (2, 1)), rel=1e-2)
    assert d.lower <= d.value
    z = (1, 1)
    assert solver.stable_norm(z).value == pytest.approx(gauge_value(hexagon, z), rel=1e-2)


def test_flat_ball_reproduces_the_body(square: ConvexBody):
    solver = PeriodicSolver(FlatField(square), PeriodicGraph(h=1 / 16, stencil=4), SolverSettings(base_points=8, padding=0.5))
    ball = solver.stable_unit_ball()
    assert hausdorff_distance(ball.inner, square) <= 0.02 * circumradius(square)


def test_flat_field_audits_pass(hexagon: ConvexBody):
    field = FlatField(hexagon)
    audit = audit_field(field, PERIODIC_GRAPH, PERIODIC_SETTINGS)
    checks = [
        *check_flattening(field, audit=audit),
        *check_periodic_inequalities(field, audit=audit),
        *check_bounded_distance(field, samples=10, rng=np.random.default_rng(0), audit=audit),
    ]
    failed = [c.theorem_id for c in checks if not c.passed]
    assert failed == []


@pytest.mark.slow
def test_flat_oracle_at_fine_resolution():
    """At h = 1/64 the stencil-6 grid is tighter than the stencil-4 grid."""
    hexagon = regular_polygon(6)
    exact = gauge_value(hexagon, (2, 1))
    coarse = PeriodicSolver(FlatField(hexagon), PeriodicGraph(h=1 / 64, stencil=4)).distance((0, 0), (2, 1)).value
    fine = PeriodicSolver(FlatField(hexagon), PeriodicGraph(h=1 / 64, stencil=6)).distance((0, 0), (2, 1)).value
    assert coarse == pytest.approx(exact, rel=1e-2)
    assert fine == pytest.approx(exact, rel=5e-3)
    assert fine <= coarse + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("index", range(10))
def test_standard_fields_flatten(index: int):
    field = standard_fields()[index]
    audit = audit_field(field, PERIODIC_GRAPH, PERIODIC_SETTINGS)
    checks = [
        *check_flattening(field, audit=audit),
        *check_periodic_inequalities(field, audit=audit),
        *check_bounded_distance(field, samples=20, rng=np.random.default_rng(index), audit=audit),
    ]
    failed = [(c.theorem_id, c.margin, c.tolerance) for c in checks if not c.passed]
    assert failed == []

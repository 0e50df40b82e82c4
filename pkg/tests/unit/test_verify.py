"""Tests for the inequality audits and suite runner."""

import math

import numpy as np
import pytest

from systolic_finsler.constants import Constants
from systolic_finsler.convex2d import polar
from systolic_finsler.errors import CheckFailedError, SystolicError
from systolic_finsler.fields import FlatField
from systolic_finsler.flat_finsler import k_epsilon_ratio
from systolic_finsler.lattice import hexagonal_lattice, square_lattice
from systolic_finsler.periodic_finsler import PeriodicSolver
from systolic_finsler.types import ConvexBody, Lattice2, PeriodicGraph, SolverSettings, TheoremCheck
from systolic_finsler.verify import (
    FREEDOM_EPS,
    audit_field,
    check_bounded_distance,
    check_flat_suite,
    check_flattening,
    check_freedom,
    check_lattice_suite,
    check_periodic_inequalities,
    check_reductions,
    loewner_experiment,
    random_body,
    random_line_meeting_body,
    random_symmetric_polygon,
    run_suite,
    standard_fields,
    systolic_freedom_sweep,
)


def _by_id(checks: list[TheoremCheck]) -> dict[str, TheoremCheck]:
    return {check.theorem_id: check for check in checks}


def test_square_attains_the_reversible_constants(square: ConvexBody):
    checks = _by_id(check_flat_suite([square], ["square"]))
    assert set(checks) == {"minkowski_bh", "reversible_ht", "mahler_lower", "blaschke_upper", "ht_le_bh"}
    assert all(check.passed for check in checks.values())
    assert checks["minkowski_bh"].provenance == "equality"
    assert checks["reversible_ht"].provenance == "equality"
    assert checks["mahler_lower"].provenance == "equality"
    assert checks["blaschke_upper"].provenance is None


def test_polar_triangle_attains_the_non_reversible_constant(triangle: ConvexBody):
    (check,) = check_flat_suite([polar(triangle)], ["polar triangle"])
    assert check.theorem_id == "abt_ht"
    assert check.passed
    assert check.provenance == "equality"
    assert check.lhs == pytest.approx(3 / (2 * math.pi))


def test_random_bodies_pass_the_flat_suite(rng: np.random.Generator):
    bodies = [random_body(rng, symmetric=k % 2 == 0) for k in range(40)]
    checks = check_flat_suite(bodies)
    assert checks
    assert all(check.passed for check in checks)
    assert checks[0].input == "body#0"


def test_lattice_suite_equality_on_hexagonal():
    checks = _by_id(check_lattice_suite([hexagonal_lattice()], ["hexagonal"]))
    assert checks["loewner_flat"].provenance == "equality"
    assert checks["hermite"].provenance == "equality"
    square = check_lattice_suite([square_lattice()])
    assert all(check.passed and check.provenance is None for check in square)


def test_reduction_checks(rng: np.random.Generator, triangle: ConvexBody):
    mahler = check_reductions([random_symmetric_polygon(rng, 4)], "mahler")
    assert [c.theorem_id for c in mahler] == ["mahler_monotone", "mahler_parallelogram", "mahler_terminal"]
    assert all(c.passed for c in mahler)
    abt = check_reductions([triangle, random_line_meeting_body(rng)], "abt", ["triangle", "random"])
    assert len(abt) == 8
    assert all(c.passed for c in abt)


def test_freedom_sweep_matches_the_formula():
    rows = systolic_freedom_sweep(FREEDOM_EPS)
    assert [row.eps for row in rows] == list(FREEDOM_EPS)
    for row in rows:
        assert row.formula == pytest.approx(k_epsilon_ratio(row.eps))
        assert row.difference < 1e-12
    assert all(check.passed for check in check_freedom(rows))
    assert rows[-1].ratio < 0.07


def test_flat_field_passes_periodic_audits(square: ConvexBody, coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    field = FlatField(square)
    audit = audit_field(field, coarse_graph, fast_settings)
    flattening = check_flattening(field, audit=audit)
    assert [c.theorem_id for c in flattening] == ["flattening_ht", "flattening_bh", "flattening_systole"]
    assert all(c.passed for c in flattening)
    assert flattening[2].provenance == "equality"

    inequalities = _by_id(check_periodic_inequalities(field, audit=audit))
    assert set(inequalities) == {"abt_ht_periodic", "sabourau_ht", "minkowski_bh_periodic", "ht_le_bh_periodic"}
    assert all(c.passed for c in inequalities.values())

    bounded = check_bounded_distance(field, samples=5, rng=np.random.default_rng(3), audit=audit)
    assert all(c.passed for c in bounded)
    assert bounded[1].details["diameter"] == pytest.approx(0.5)
    assert bounded[1].lhs == pytest.approx(2 * (0.5 + bounded[1].details["diameter_slack"]))


def test_loewner_experiment_on_the_flat_hexagonal_torus(coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    averaging, bound = loewner_experiment("1", hexagonal_lattice(), 4, coarse_graph, fast_settings)
    assert averaging.passed
    assert bound.passed
    assert bound.lhs == pytest.approx(math.sqrt(3) / 2, rel=2e-2)


def test_run_suite_flat_is_small_and_green():
    report = run_suite("flat", seed=1, count=20)
    assert report.suite == "flat"
    assert report.passed
    assert len({c.input for c in report.checks}) == 45


def test_run_suite_is_deterministic():
    first = run_suite("lattice", seed=7, count=30)
    second = run_suite("lattice", seed=7, count=30)
    assert first.model_dump() == second.model_dump()


def test_run_suite_freedom_fills_the_sweep():
    report = run_suite("freedom")
    assert len(report.sweep) == len(FREEDOM_EPS)
    assert report.passed


def test_run_suite_tolerance_override():
    report = run_suite("lattice", count=3, tolerance=0.5)
    assert all(c.tolerance == 0.5 for c in report.checks)


def test_unknown_suite_is_rejected():
    with pytest.raises(SystolicError, match="unknown suite"):
        run_suite("nope")


def test_triangles_field_has_a_bounded_outer_ball(coarse_graph: PeriodicGraph, fast_settings: SolverSettings):
    field = standard_fields()[6]
    assert field.label == "triangles"
    ball = PeriodicSolver(field, coarse_graph, fast_settings).stable_unit_ball(8)
    assert all(value.lower > 0 for value in ball.values)
    assert np.all(np.isfinite(ball.outer.points))
    assert np.all(np.isfinite(ball.inner.points))


def test_failed_check_stops_the_suite_with_its_input(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setattr(Constants, "LOEWNER", 2.0)
    with pytest.raises(CheckFailedError) as excinfo:
        run_suite("lattice", count=3)
    error = excinfo.value
    assert error.check.theorem_id == "loewner_flat"
    assert error.check.input == "hexagonal"
    assert Lattice2.model_validate_json(error.replay).basis == hexagonal_lattice().basis
    assert not error.report.passed
    assert "replay" not in error.report.model_dump_json()


def test_failed_checks_can_be_collected(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.setattr(Constants, "LOEWNER", 2.0)
    report = run_suite("lattice", count=3, fail_fast=False)
    assert {check.input for check in report.failures} >= {"hexagonal", "square"}
    assert all(check.replay is not None for check in report.checks)


def test_flat_checks_carry_their_body(square: ConvexBody):
    checks = check_flat_suite([square], ["square"])
    assert all(ConvexBody.model_validate_json(check.replay or "").vertices == square.vertices for check in checks)

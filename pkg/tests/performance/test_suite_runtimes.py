"""Runtime budgets of the verification suites."""

import time
from collections.abc import Callable
from typing import TypeVar

import numpy as np
import pytest

from systolic_finsler.constants import Constants
from systolic_finsler.convex2d import area, mahler_product, regular_polygon
from systolic_finsler.polygon_reduce import abt_reduce
from systolic_finsler.types import VerifyReport
from systolic_finsler.verify import check_flat_suite, check_lattice_suite, random_body, random_lattice, random_line_meeting_body, run_suite

T = TypeVar("T")


def _timed(fn: Callable[[], T]) -> tuple[T, float]:
    start = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - start


def test_lattice_suite_runtime():
    rng = np.random.default_rng(1)
    lattices = [random_lattice(rng) for _ in range(1000)]
    checks, elapsed = _timed(lambda: check_lattice_suite(lattices))
    print(f"1000 lattices in {elapsed:.3f}s")
    assert all(c.passed for c in checks)
    assert elapsed < 1.0


def test_flat_suite_runtime():
    rng = np.random.default_rng(2)
    bodies = [random_body(rng, symmetric=True) for _ in range(1000)] + [random_body(rng) for _ in range(1000)]
    checks, elapsed = _timed(lambda: check_flat_suite(bodies))
    print(f"2000 bodies in {elapsed:.3f}s")
    assert all(c.passed for c in checks)
    assert elapsed < 15.0


def test_disk_mahler_product():
    assert mahler_product(regular_polygon(256)) == pytest.approx(Constants.BLASCHKE_MAX, rel=1e-3)


@pytest.mark.slow
def test_integer_line_reductions_runtime():
    rng = np.random.default_rng(3)
    bodies = [random_line_meeting_body(rng) for _ in range(100)]
    start = time.perf_counter()
    for body in bodies:
        reduced, trace = abt_reduce(body)
        assert area(reduced) >= Constants.PICK_MIN_AREA - 1e-6
        assert trace.is_monotone()
    elapsed = time.perf_counter() - start
    print(f"100 integer-line reductions in {elapsed:.3f}s")
    assert elapsed < 30.0


@pytest.mark.slow
def test_flattening_suite_runtime():
    report, elapsed = _timed(lambda: run_suite("flattening"))
    print(f"flattening suite in {elapsed:.1f}s")
    assert report.passed
    assert elapsed < 300.0


@pytest.mark.slow
def test_full_run_is_byte_identical():
    first = run_suite("all", seed=42).model_dump_json()
    second = run_suite("all", seed=42).model_dump_json()
    assert first == second
    report = VerifyReport.model_validate_json(first)
    assert report.passed
    assert "triangles" in {check.input for check in report.checks}

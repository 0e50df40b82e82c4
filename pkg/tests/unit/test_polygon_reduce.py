"""Tests for the Mahler pair removal and the integer-line reduction."""

import numpy as np
import pytest

from systolic_finsler.constants import Constants
from systolic_finsler.convex2d import area, integer_vertices, mahler_product, pick_area, regular_polygon, scale_body
from systolic_finsler.errors import AlreadyParallelogramError, NotSymmetricError, PreconditionViolatedError
from systolic_finsler.polygon_reduce import abt_reduce, critical_lines, mahler_reduce, mahler_reduce_step
from systolic_finsler.types import ConvexBody
from systolic_finsler.verify import random_line_meeting_body, random_symmetric_polygon


def test_mahler_step_removes_one_pair(hexagon: ConvexBody) -> None:
    reduced, trace = mahler_reduce_step(hexagon)
    assert reduced.vertex_count == 4
    assert reduced.is_symmetric
    assert [step.kind for step in trace.steps] == ["initial", "mahler_pair_removal"]
    assert area(reduced) == pytest.approx(area(hexagon), rel=1e-9)
    assert mahler_product(reduced) <= mahler_product(hexagon) + 1e-9


def test_mahler_step_rejects_parallelogram_and_asymmetric(square: ConvexBody, triangle: ConvexBody) -> None:
    with pytest.raises(AlreadyParallelogramError):
        mahler_reduce_step(square)
    with pytest.raises(NotSymmetricError):
        mahler_reduce_step(triangle)


def test_mahler_reduce_reaches_parallelogram() -> None:
    body = regular_polygon(12)
    reduced, trace = mahler_reduce(body)
    assert reduced.vertex_count == 4
    assert mahler_product(reduced) == pytest.approx(Constants.MAHLER_MIN, abs=1e-9)
    assert trace.is_monotone(1e-9)
    assert trace.steps[0].kind == "initial"
    assert len(trace.steps) == 5
    assert all(step.body.is_symmetric for step in trace.steps)


def test_mahler_reduce_on_random_polygons(rng: np.random.Generator) -> None:
    for _ in range(50):
        body = random_symmetric_polygon(rng, int(rng.integers(3, 7)))
        reduced, trace = mahler_reduce(body)
        assert reduced.vertex_count == 4
        assert trace.is_monotone(1e-9)
        assert area(reduced) == pytest.approx(area(body), rel=1e-9)


def test_critical_lines_of_square(square: ConvexBody) -> None:
    lines = critical_lines(square)
    assert [sorted(per_vertex) for per_vertex in lines] == [
        [(0, 1), (1, 0)],
        [(-1, 0), (0, 1)],
        [(-1, 0), (0, -1)],
        [(0, -1), (1, 0)],
    ]


def test_abt_reduce_keeps_integer_triangle(triangle: ConvexBody) -> None:
    reduced, trace = abt_reduce(triangle)
    assert reduced.vertices == triangle.vertices
    assert len(trace.steps) == 1


def test_abt_reduce_requires_all_integer_lines(square: ConvexBody) -> None:
    with pytest.raises(PreconditionViolatedError):
        abt_reduce(scale_body(square, 0.9))


@pytest.mark.parametrize("factor", [1.2, 1.7])
def test_abt_reduce_scaled_square(square: ConvexBody, factor: float) -> None:
    reduced, trace = abt_reduce(scale_body(square, factor))
    assert integer_vertices(reduced) is not None
    assert area(reduced) >= Constants.PICK_MIN_AREA - 1e-6
    assert pick_area(reduced) == pytest.approx(area(reduced))
    assert trace.is_monotone(1e-9)
    assert trace.mode == "abt"


def test_abt_reduce_on_random_bodies(rng: np.random.Generator) -> None:
    for _ in range(20):
        reduced, trace = abt_reduce(random_line_meeting_body(rng))
        last = trace.steps[-1].body
        assert np.max(np.abs(last.points - np.rint(last.points))) <= 1e-6
        assert area(reduced) >= Constants.PICK_MIN_AREA - 1e-6
        assert trace.is_monotone(1e-9)

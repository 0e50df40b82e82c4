"""Shared pytest fixtures for the test suite."""

import json
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from systolic_finsler.convex2d import regular_polygon
from systolic_finsler.flat_finsler import abt_triangle, square_body
from systolic_finsler.loggers import logger
from systolic_finsler.types import ConvexBody, PeriodicGraph, SolverSettings


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so randomized tests are reproducible."""
    return np.random.default_rng(20240607)


@pytest.fixture
def square() -> ConvexBody:
    return square_body()


@pytest.fixture
def triangle() -> ConvexBody:
    return abt_triangle()


@pytest.fixture
def hexagon() -> ConvexBody:
    return regular_polygon(6)


@pytest.fixture
def coarse_graph() -> PeriodicGraph:
    """Coarse grid keeping solver tests fast."""
    return PeriodicGraph(h=1 / 16, stencil=4)


@pytest.fixture
def fast_settings() -> SolverSettings:
    return SolverSettings(base_points=8, padding=0.5)


@pytest.fixture
def square_file(tmp_path: Path, square: ConvexBody) -> Path:
    path = tmp_path / "square.json"
    path.write_text(square.model_dump_json(), encoding="utf-8")
    return path


@pytest.fixture
def sine_metric_file(tmp_path: Path) -> Path:
    path = tmp_path / "sine.json"
    spec = {"kind": "conformal", "f": "(1+0.5*sin(2*pi*x1))^2", "g0": [[1, 0], [0, 1]]}
    path.write_text(json.dumps(spec), encoding="utf-8")
    return path


@pytest.fixture
def flat_metric_file(tmp_path: Path) -> Path:
    path = tmp_path / "flat.json"
    spec = {"kind": "flat", "body": {"vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}}
    path.write_text(json.dumps(spec), encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def reset_package_logger() -> Iterator[None]:
    """The CLI installs its own handler; undo that so caplog keeps working."""
    handlers, level, propagate = logger.handlers[:], logger.level, logger.propagate
    yield
    logger.handlers = handlers
    logger.setLevel(level)
    logger.propagate = propagate

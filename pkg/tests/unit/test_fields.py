"""Tests for runtime metric fields."""

import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from systolic_finsler.convex2d import area, scale_body
from systolic_finsler.errors import InvalidFieldError
from systolic_finsler.fields import (
    BodyGridField,
    ConformalField,
    FlatField,
    build_field,
    factor_is_constant,
    translation_average,
)
from systolic_finsler.lattice import square_lattice
from systolic_finsler.types import BodyGridFieldSpec, ConformalFieldSpec, ConvexBody, FlatFieldSpec


def test_flat_field_gauge_ignores_base_point(square: ConvexBody):
    field = FlatField(square)
    points = np.array([[0.0, 0.0], [0.3, 0.7], [5.0, -2.0]])
    vectors = np.array([[1.0, 0.0], [1.0, 1.0], [2.0, 0.5]])
    np.testing.assert_allclose(field.gauge(points, vectors), [1.0, 1.0, 2.0])
    assert field.is_reversible
    assert field.body_at((0.4, 0.4)) == square


def test_flat_field_densities(square: ConvexBody):
    bh, ht = FlatField(square).area_densities(np.zeros((3, 2)))
    np.testing.assert_allclose(bh, math.pi / 4)
    np.testing.assert_allclose(ht, 2 / math.pi)


def test_conformal_field_scales_the_disk():
    field = ConformalField.from_expression("4", square_lattice())
    assert float(field.gauge([[0.2, 0.2]], [[1.0, 0.0]])[0]) == pytest.approx(2.0)
    body = field.body_at((0.5, 0.5))
    assert area(body) == pytest.approx(area(field.disk) / 4)


@pytest.mark.parametrize("source", ["-1", "sin(2*pi*x1)", "0"])
def test_conformal_factor_must_be_positive(source: str):
    with pytest.raises(InvalidFieldError):
        ConformalField.from_expression(source, square_lattice())


def test_non_periodic_factor_warns(caplog: pytest.LogCaptureFixture):
    with caplog.at_level(logging.WARNING, logger="systolic_finsler"):
        ConformalField.from_expression("2+x1", square_lattice())
    assert "not Z²-periodic" in caplog.text


def test_body_grid_count_mismatch(square: ConvexBody):
    with pytest.raises(InvalidFieldError, match="needs 4 bodies"):
        BodyGridField(2, [square])
    with pytest.raises(ValidationError):
        BodyGridFieldSpec(n=2, bodies=[square])


def test_body_grid_interpolates_support_functions(square: ConvexBody):
    """Halfway between the unit and the doubled square sits the 1.5 square."""
    big = scale_body(square, 2.0)
    field = BodyGridField(2, [square, square, big, big])
    assert float(field.gauge([[0.25, 0.0]], [[1.0, 0.0]])[0]) == pytest.approx(1 / 1.5)
    assert float(field.gauge([[0.0, 0.3]], [[1.0, 0.0]])[0]) == pytest.approx(1.0)
    assert float(field.gauge([[0.5, 0.0]], [[1.0, 0.0]])[0]) == pytest.approx(0.5)
    assert area(field.body_at((0.25, 0.0))) == pytest.approx(9.0)


def test_body_grid_is_periodic(square: ConvexBody):
    big = scale_body(square, 2.0)
    field = BodyGridField(2, [square, big, big, square])
    points = np.array([[0.1, 0.3], [0.8, 0.45]])
    vectors = np.array([[1.0, 2.0], [-0.5, 1.0]])
    np.testing.assert_allclose(field.gauge(points, vectors), field.gauge(points + [3.0, -1.0], vectors))


def test_body_grid_reversibility(square: ConvexBody, triangle: ConvexBody):
    assert BodyGridField(1, [square]).is_reversible
    assert not BodyGridField(1, [triangle]).is_reversible


def test_translation_average_flattens_the_sine():
    base = ConformalField.from_expression("1+0.5*sin(2*pi*x1)", square_lattice())
    assert not factor_is_constant(base)
    averaged = translation_average(base, 4)
    assert factor_is_constant(averaged)
    np.testing.assert_allclose(averaged.factor(np.array([[0.1, 0.2], [0.7, 0.9]])), 1.0)


def test_build_field_dispatches_on_kind(square: ConvexBody):
    assert isinstance(build_field(FlatFieldSpec(body=square)), FlatField)
    assert isinstance(build_field(BodyGridFieldSpec(n=1, bodies=[square])), BodyGridField)
    conformal = build_field(ConformalFieldSpec(f="1"))
    assert isinstance(conformal, ConformalField)
    assert conformal.disk.vertex_count == 64


def test_gauge_floor_and_ceiling(square: ConvexBody):
    field = FlatField(square)
    assert field.gauge_floor() == pytest.approx(1 / math.sqrt(2))
    assert field.gauge_ceiling() == pytest.approx(1.0)


def test_fields_describe_themselves(square: ConvexBody, hexagon: ConvexBody):
    assert FlatField(square).to_spec() == FlatFieldSpec(body=square)
    grid = BodyGridField(1, [hexagon])
    assert build_field(grid.to_spec()).bodies == [hexagon]
    conformal = ConformalField.from_expression("(1+0.5*sin(2*pi*x1))^2", square_lattice(), vertices=32)
    spec = conformal.to_spec()
    assert isinstance(spec, ConformalFieldSpec)
    assert spec.f == "(1+0.5*sin(2*pi*x1))^2"
    assert spec.vertices == 32
    assert translation_average(conformal, 2).to_spec() is None

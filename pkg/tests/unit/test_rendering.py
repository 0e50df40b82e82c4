"""Tests for SVG figure rendering."""

import xml.etree.ElementTree as ET

import pytest

from systolic_finsler.convex2d import scale_body
from systolic_finsler.polygon_reduce import abt_reduce, mahler_reduce
from systolic_finsler.rendering import clip_integer_line, render_body, render_integer_lines, render_trace
from systolic_finsler.types import ConvexBody
from systolic_finsler.utils.integer_points import integer_line_normals

SVG = "{http://www.w3.org/2000/svg}"


def _elements(svg: str, tag: str, cls: str) -> list[ET.Element]:
    root = ET.fromstring(svg)  # noqa: S314
    return [el for el in root.iter(f"{SVG}{tag}") if el.get("class") == cls]


def test_unit_bound_draws_four_lines():
    svg = render_integer_lines(1)
    assert len(_elements(svg, "line", "integer-line")) == 4
    assert "<title>integer lines m1^2 + m2^2 &lt;= 1</title>" in svg


def test_every_line_up_to_bound_is_drawn():
    svg = render_integer_lines(50)
    assert len(_elements(svg, "line", "integer-line")) == len(integer_line_normals(50))


def test_bound_must_be_positive():
    with pytest.raises(ValueError, match="at least 1"):
        render_integer_lines(0)


def test_overlay_outline(triangle: ConvexBody):
    svg = render_integer_lines(5, overlay=triangle)
    (polygon,) = _elements(svg, "polygon", "body")
    assert len(polygon.get("points", "").split()) == 3


def test_clip_integer_line():
    ends = clip_integer_line((1, 0), 2.0)
    assert ends is not None
    start, stop = ends
    assert start[0] == pytest.approx(1.0)
    assert stop[0] == pytest.approx(1.0)
    assert sorted([start[1], stop[1]]) == pytest.approx([-2.0, 2.0])
    assert clip_integer_line((1, 0), 0.5) is None


def test_body_with_polar(square: ConvexBody):
    svg = render_body(square)
    assert len(_elements(svg, "polygon", "body")) == 1
    (dual,) = _elements(svg, "polygon", "polar")
    assert len(dual.get("points", "").split()) == 4


def test_trace_figures(hexagon: ConvexBody, square: ConvexBody):
    _, mahler = mahler_reduce(hexagon)
    svg = render_trace(mahler)
    assert len(_elements(svg, "polygon", "step")) == len(mahler.steps) - 1
    assert not _elements(svg, "circle", "lattice")

    _, abt = abt_reduce(scale_body(square, 1.2))
    svg = render_trace(abt)
    assert _elements(svg, "circle", "lattice")
    assert len(_elements(svg, "polygon", "body")) == 1

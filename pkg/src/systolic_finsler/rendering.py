"""SVG figures: integer lines, bodies with their polars, reduction traces, stable balls."""

import math
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from jinja2 import Environment, FileSystemLoader
from numpy.typing import NDArray

from systolic_finsler.convex2d import circumradius, polar
from systolic_finsler.types import ConvexBody, ReductionTrace, StableNormEstimate
from systolic_finsler.utils.integer_points import integer_box, integer_line_normals

TEMPLATES_DIR = Path(__file__).parent / "templates"
jinja_env = Environment(loader=FileSystemLoader(str(TEMPLATES_DIR)), autoescape=True)

FIGURE_TEMPLATE = jinja_env.get_template("figure.svg.j2")

FIGURE_SIZE = 600
DEFAULT_HALF_WIDTH = 2.5


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _polygon(points: NDArray[np.float64], cls: str) -> dict[str, str]:
    return {"cls": cls, "points": " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)}


def _view(half_width: float) -> dict[str, float]:
    return {"x": -half_width, "y": -half_width, "width": 2 * half_width, "height": 2 * half_width}


def _half_width(bodies: Iterable[ConvexBody], minimum: float = 0.0) -> float:
    return max([minimum, *(1.1 * circumradius(body) for body in bodies)])


def _render(
    title: str,
    half_width: float,
    *,
    lines: Iterable[dict[str, str]] = (),
    polygons: Iterable[dict[str, str]] = (),
    points: Iterable[dict[str, str]] = (),
) -> str:
    return FIGURE_TEMPLATE.render(
        title=title,
        size=FIGURE_SIZE,
        view=_view(half_width),
        radius=_fmt(half_width / 150),
        lines=list(lines),
        polygons=list(polygons),
        points=list(points),
    )


def clip_integer_line(m: tuple[int, int], half_width: float) -> tuple[NDArray[np.float64], NDArray[np.float64]] | None:
    """End points of ``{x : m·x = 1}`` inside the square ``[-w, w]²``, or ``None`` when it misses it."""
    normal = np.array(m, dtype=float)
    base = normal / (normal @ normal)
    direction = np.array([-normal[1], normal[0]])
    lo, hi = -math.inf, math.inf
    for axis in range(2):
        if direction[axis] == 0:
            if abs(base[axis]) > half_width:
                return None
            continue
        t1 = (-half_width - base[axis]) / direction[axis]
        t2 = (half_width - base[axis]) / direction[axis]
        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
    if lo >= hi:
        return None
    return base + lo * direction, base + hi * direction


def render_integer_lines(bound: int, overlay: ConvexBody | None = None, half_width: float = DEFAULT_HALF_WIDTH) -> str:
    """All lines ``m·x = 1`` with ``m1² + m2² <= bound``, plus the outline of ``overlay``."""
    if bound < 1:
        msg = f"bound must be at least 1, got {bound}"
        raise ValueError(msg)
    w = _half_width([overlay] if overlay else [], half_width)
    segments = []
    for m in integer_line_normals(bound):
        clipped = clip_integer_line(m, w)
        if clipped is None:
            continue
        (x1, y1), (x2, y2) = clipped
        segments.append({"cls": "integer-line", "x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2)})
    polygons = [_polygon(overlay.points, "body")] if overlay else []
    return _render(f"integer lines m1^2 + m2^2 <= {bound}", w, lines=segments, polygons=polygons)


def render_body(body: ConvexBody) -> str:
    """The body with its polar, dashed."""
    dual = polar(body)
    return _render("body and polar", _half_width([body, dual]), polygons=[_polygon(body.points, "body"), _polygon(dual.points, "polar")])


def _lattice_points(half_width: float) -> list[dict[str, str]]:
    k = math.floor(half_width)
    return [{"cls": "lattice", "x": _fmt(x), "y": _fmt(y)} for x, y in integer_box(np.array([-k, -k]), np.array([k, k]))]


def render_trace(trace: ReductionTrace) -> str:
    """Every snapshot thin, the terminal body bold; integer-line traces also show Z²."""
    bodies = [step.body for step in trace.steps]
    w = _half_width(bodies, 1.5)
    polygons = [_polygon(body.points, "step") for body in bodies[:-1]]
    if bodies:
        polygons.append(_polygon(bodies[-1].points, "body"))
    points = _lattice_points(w) if trace.mode == "abt" else []
    return _render(f"{trace.mode} reduction, {len(trace.steps)} steps", w, polygons=polygons, points=points)


def render_ball(estimate: StableNormEstimate) -> str:
    """Inner and outer stable-ball polygons with the sampled boundary points ``z/‖z‖``."""
    w = _half_width([estimate.inner, estimate.outer])
    samples = [
        {"cls": "sample", "x": _fmt(value.z[0] / value.value), "y": _fmt(value.z[1] / value.value)} for value in estimate.values
    ]
    return _render(
        "stable unit ball",
        w,
        polygons=[_polygon(estimate.outer.points, "outer"), _polygon(estimate.inner.points, "inner")],
        points=samples,
    )

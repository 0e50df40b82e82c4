"""Command-line front end: ``systolic-finsler <command> [options]``."""

import argparse
import logging
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Annotated, Literal, TypeVar

from pydantic import BaseModel, ConfigDict, Field
from rich.console import Console
from rich.logging import RichHandler

from systolic_finsler.constants import AreaKind, Defaults, Suite
from systolic_finsler.convex2d import (
    area,
    circumradius,
    gauge_value,
    hausdorff_distance,
    inradius,
    interior_lattice_trivial,
    is_symmetric,
    mahler_product,
    meets_all_integer_lines,
    minkowski_holds,
    pick_area,
    polar,
    support_value,
)
from systolic_finsler.display import (
    DisplayConfig,
    build_checks_table,
    build_constants_table,
    build_stable_norm_table,
    build_sweep_table,
    build_trace_table,
    display_report,
)
from systolic_finsler.errors import CheckFailedError
from systolic_finsler.fields import build_field
from systolic_finsler.flat_finsler import area_bh_flat, area_ht_flat, k_epsilon, normalize_systole, systole_flat, systolic_ratio
from systolic_finsler.lattice import determinant, gauss_reduce, gram_matrix, hermite_invariant, reduce_to_fundamental_domain, shortest_vector
from systolic_finsler.loaders import (
    dump_body,
    dump_json,
    dump_replay,
    dump_report,
    dump_sweep,
    dump_trace,
    ensure_output_file,
    load_body,
    load_metric,
    load_report,
    load_trace,
    parse_basis,
    parse_integer_vector,
    parse_sweep,
    parse_vector,
)
from systolic_finsler.loggers import logger
from systolic_finsler.periodic_finsler import PeriodicSolver, area_estimates
from systolic_finsler.polygon_reduce import abt_reduce, mahler_reduce
from systolic_finsler.rendering import render_ball, render_body, render_integer_lines, render_trace
from systolic_finsler.types import ConvexBody, FlatFinslerTorus, PeriodicGraph, ReductionMode, SolverSettings, StableNormEstimate, TheoremCheck
from systolic_finsler.verify import (
    FREEDOM_EPS,
    audit_field,
    check_bounded_distance,
    check_flat_suite,
    check_flattening,
    check_freedom,
    check_lattice_suite,
    check_periodic_inequalities,
    run_suite,
    systolic_freedom_sweep,
)

Command = Literal["body", "lattice", "flat", "periodic", "reduce", "verify", "render"]
Figure = Literal["integer-lines", "body", "trace", "ball"]

COMMANDS: tuple[Command, ...] = ("body", "lattice", "flat", "periodic", "reduce", "verify", "render")
OPS: dict[str, tuple[str, ...]] = {
    "body": ("info", "polar", "area", "mahler", "gauge", "support", "pick", "minkowski", "lines", "hausdorff"),
    "lattice": ("info", "det", "shortest", "hermite", "reduce", "gram"),
    "flat": ("ratio", "sys", "bh", "ht", "normalize", "constants", "freedom"),
    "periodic": ("systole", "sys", "distance", "stable-norm", "stable", "ball", "diameter", "bh", "ht", "area", "flatten"),
}
OP_ALIASES: dict[str, str] = {"sys": "systole", "stable": "stable-norm"}
LATTICE_KEYS: dict[str, tuple[str, ...]] = {
    "det": ("determinant",),
    "shortest": ("shortest_vector", "shortest_norm_squared"),
    "hermite": ("hermite_invariant", "riemannian_ratio"),
    "reduce": ("reduced_basis", "fundamental_domain_basis"),
    "gram": ("gram_matrix",),
}

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INPUT_ERROR = 2

Payload = dict[str, object]
T = TypeVar("T")


class RunConfig(BaseModel):
    """Validated parameters of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    command: Command
    op: str | None = None
    input: Path | None = None
    other: Path | None = None
    metric: Path | None = None
    basis: str | None = None
    vector: str | None = None
    start: str | None = None
    end: str | None = None
    mode: ReductionMode = "mahler"
    suite: str = Suite.ALL
    figure: Figure = "integer-lines"
    bound: Annotated[int, Field(ge=1)] = 50
    eps: list[Annotated[float, Field(gt=0, lt=1)]] = Field(default_factory=lambda: list(FREEDOM_EPS))
    family: Literal["keps"] | None = None
    sweep: str | None = None
    from_report: Path | None = None
    h: Annotated[float, Field(gt=0, le=0.5)] = Defaults.GRID_SPACING
    stencil: Annotated[int, Field(ge=1, le=16)] = Defaults.STENCIL
    quad_n: Annotated[int, Field(ge=8)] = Defaults.QUAD_N
    directions: Annotated[int, Field(ge=8)] = Defaults.DIRECTIONS
    base_points: Annotated[int, Field(ge=1)] = Defaults.BASE_POINTS
    count: Annotated[int, Field(ge=1)] = 1000
    samples: Annotated[int, Field(ge=1)] = 20
    seed: int = Defaults.SEED
    threads: Annotated[int, Field(ge=1)] = 1
    tol: Annotated[float, Field(ge=0)] | None = None
    json_out: Path | None = None
    csv_out: Path | None = None
    svg_out: Path | None = None
    verbose: Annotated[int, Field(ge=0)] = 0

    @property
    def graph(self) -> PeriodicGraph:
        return PeriodicGraph(h=self.h, stencil=self.stencil)

    @property
    def settings(self) -> SolverSettings:
        return SolverSettings(directions=self.directions, quad_n=self.quad_n, base_points=self.base_points, threads=self.threads)


class _Result(BaseModel):
    """Handler output; ``body`` is written with ``dump_body`` when the result is a single convex body."""

    payload: Payload = Field(default_factory=dict)
    checks: list[TheoremCheck] = Field(default_factory=list)
    body: ConvexBody | None = None


def _require(value: T | None, flag: str, command: str) -> T:
    if value is None:
        msg = f"{command} needs {flag}"
        raise ValueError(msg)
    return value


def _vertices(body: ConvexBody) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in body.points]


def _write_svg(config: RunConfig, svg: str, console: Console) -> None:
    if config.svg_out is None:
        console.print(svg, markup=False, highlight=False, soft_wrap=True)
        return
    target = ensure_output_file(config.svg_out)
    target.write_text(svg, encoding="utf-8")


def _body_input(config: RunConfig) -> ConvexBody:
    return load_body(_require(config.input, "--in", config.command))


def run_body(config: RunConfig, console: Console) -> _Result:
    body = _body_input(config)
    op = config.op or "info"
    result = _Result()
    if op == "info":
        result.payload = {
            "vertices": _vertices(body),
            "area": area(body),
            "polar_area": area(polar(body)),
            "symmetric": is_symmetric(body),
            "circumradius": circumradius(body),
            "inradius": inradius(body),
            "interior_lattice_trivial": interior_lattice_trivial(body),
            "meets_all_integer_lines": meets_all_integer_lines(body),
        }
        if is_symmetric(body):
            result.payload["mahler_product"] = mahler_product(body)
    elif op == "polar":
        dual = polar(body)
        result.payload = {"vertices": _vertices(dual), "area": area(dual)}
        result.body = dual
    elif op == "area":
        result.payload = {"area": area(body), "polar_area": area(polar(body))}
    elif op == "mahler":
        result.payload = {"mahler_product": mahler_product(body), "area": area(body), "polar_area": area(polar(body))}
    elif op == "lines":
        result.payload = {"meets_all_integer_lines": meets_all_integer_lines(body), "interior_lattice_trivial": interior_lattice_trivial(body)}
        if config.svg_out is not None:
            _write_svg(config, render_integer_lines(config.bound, overlay=body), console)
            return result
    elif op in {"gauge", "support"}:
        v = parse_vector(_require(config.vector, "--vector", f"body --op {op}"))
        result.payload = {op: gauge_value(body, v) if op == "gauge" else support_value(body, v), "vector": list(v)}
    elif op == "pick":
        result.payload = {"pick_area": pick_area(body), "area": area(body)}
    elif op == "minkowski":
        premise, value = minkowski_holds(body)
        result.payload = {"premise": premise, "area": value, "bound": 4.0}
        if premise:
            result.checks.append(TheoremCheck(theorem_id="minkowski_first", input=str(config.input), lhs=4.0, rhs=value, tolerance=1e-9))
    elif op == "hausdorff":
        other = load_body(_require(config.other, "--other", "body --op hausdorff"))
        result.payload = {"hausdorff": hausdorff_distance(body, other)}
    if config.svg_out is not None:
        _write_svg(config, render_body(body), console)
    return result


def run_lattice(config: RunConfig, console: Console) -> _Result:  # noqa: ARG001
    lattice = parse_basis(_require(config.basis, "--basis", "lattice"))
    op = config.op or "info"
    reduced = gauss_reduce(lattice)
    z, n = shortest_vector(lattice)
    payload: Payload = {
        "determinant": determinant(lattice),
        "shortest_vector": list(z),
        "shortest_norm_squared": n,
        "hermite_invariant": hermite_invariant(lattice),
        "riemannian_ratio": determinant(lattice) / n,
        "reduced_basis": [list(b) for b in reduced.basis],
        "fundamental_domain_basis": [list(b) for b in reduce_to_fundamental_domain(lattice).basis],
        "gram_matrix": gram_matrix(lattice).tolist(),
    }
    result = _Result(payload={key: payload[key] for key in LATTICE_KEYS[op]} if op in LATTICE_KEYS else payload)
    if op in {"info", "hermite"}:
        result.checks = check_lattice_suite([lattice], [config.basis or "lattice"])
    return result


def _run_sweep(config: RunConfig, console: Console) -> _Result:
    rows = systolic_freedom_sweep(parse_sweep(config.sweep) if config.sweep is not None else config.eps)
    console.print(build_sweep_table(rows))
    if config.csv_out is not None:
        dump_sweep(rows, config.csv_out)
    return _Result(payload={"sweep": [row.model_dump() for row in rows]}, checks=check_freedom(rows))


def _flat_input(config: RunConfig) -> tuple[ConvexBody, str]:
    if config.family == "keps":
        return k_epsilon(config.eps[0]), f"k_eps({config.eps[0]:g})"
    return _body_input(config), str(config.input)


def run_flat(config: RunConfig, console: Console) -> _Result:
    op = config.op or "ratio"
    result = _Result()
    if op == "constants":
        console.print(build_constants_table())
        return result
    if op == "freedom" or config.sweep is not None:
        return _run_sweep(config, console)
    body, label = _flat_input(config)
    torus = FlatFinslerTorus(unit_ball=body)
    if op == "normalize":
        normalized = normalize_systole(torus).unit_ball
        result.payload = {"vertices": _vertices(normalized)}
        result.body = normalized
        return result
    sys, z = systole_flat(torus)
    values: Payload = {"systole": sys, "systole_vector": list(z)}
    if op in {"bh", "ratio"}:
        values |= {"area_bh": area_bh_flat(torus), "bh_ratio": systolic_ratio(torus, AreaKind.BH)}
    if op in {"ht", "ratio"}:
        values |= {"area_ht": area_ht_flat(torus), "ht_ratio": systolic_ratio(torus, AreaKind.HT)}
    result.payload = values
    if op == "ratio":
        result.checks = check_flat_suite([body], [label])
    return result


def run_periodic(config: RunConfig, console: Console) -> _Result:
    field = build_field(load_metric(_require(config.metric, "--in", "periodic")))
    solver = PeriodicSolver(field, config.graph, config.settings)
    op = OP_ALIASES.get(config.op or "systole", config.op or "systole")
    result = _Result()
    error = solver.error
    result.payload = {"eps_stencil": error.stencil, "eps_metric": error.metric, "h": config.graph.h, "stencil": config.stencil}
    ball: StableNormEstimate | None = None
    if op == "systole":
        sys = solver.systole()
        result.payload |= {"systole": sys.value, "systole_lower": sys.lower, "systole_vector": list(sys.z)}
    elif op == "distance":
        start = parse_vector(_require(config.start, "--from", "periodic --op distance"))
        end = parse_vector(_require(config.end, "--to", "periodic --op distance"))
        d = solver.distance(start, end)
        result.payload |= {"distance": d.value, "distance_lower": d.lower}
    elif op == "stable-norm":
        z = parse_integer_vector(_require(config.vector, "--z", "periodic --op stable"))
        value = solver.stable_norm(z)
        result.payload |= {"z": list(z), "stable_norm": value.value, "stable_norm_lower": value.lower, "homogeneous": value.homogeneous}
    elif op == "ball":
        ball = solver.stable_unit_ball(config.directions)
        console.print(build_stable_norm_table(ball))
        result.payload |= {
            "inner": _vertices(ball.inner),
            "outer": _vertices(ball.outer),
            "norms": [value.model_dump() for value in ball.values],
            "convexity_violations": [list(z) for z in ball.convexity_violations],
        }
    elif op == "diameter":
        diameter = solver.diameter()
        result.payload |= {"diameter": diameter.value, "diameter_slack": diameter.slack}
    elif op in {"area", "bh", "ht"}:
        bh, ht = area_estimates(field, config.quad_n)
        if op in {"area", "bh"}:
            result.payload |= {"area_bh": bh.value, "area_bh_error": bh.error}
        if op in {"area", "ht"}:
            result.payload |= {"area_ht": ht.value, "area_ht_error": ht.error}
    elif op == "flatten":
        audit = audit_field(field, config.graph, config.settings)
        ball = audit.ball
        result.checks = [
            *check_flattening(field, audit=audit),
            *check_periodic_inequalities(field, audit=audit),
            *check_bounded_distance(field, samples=config.samples, audit=audit),
        ]
    if config.svg_out is not None:
        _write_svg(config, render_ball(ball or solver.stable_unit_ball(config.directions)), console)
    return result


def run_reduce(config: RunConfig, console: Console) -> _Result:
    body = _body_input(config)
    reduced, trace = mahler_reduce(body) if config.mode == "mahler" else abt_reduce(body)
    console.print(build_trace_table(trace))
    if config.json_out is not None:
        dump_trace(trace, config.json_out)
    if config.svg_out is not None:
        _write_svg(config, render_trace(trace), console)
    return _Result(payload={"vertices": _vertices(reduced), "steps": len(trace.steps), "monotone": trace.is_monotone()})


def run_verify(config: RunConfig, console: Console) -> _Result:
    """Run a suite; the first failing suite stops the run and its input is written next to the report."""
    if config.from_report is not None:
        report = load_report(config.from_report)
        display_report(report, config=DisplayConfig(console=console, failures_only=False, show_details=config.verbose > 0))
        return _Result(checks=report.checks)
    try:
        report = run_suite(config.suite, config.seed, count=config.count, threads=config.threads, tolerance=config.tol)
    except CheckFailedError as e:
        report = e.report
        if config.json_out is not None:
            replay = dump_replay(e.replay, config.json_out.with_suffix(".replay.json"))
            logger.error("%s; input written to %s", e, replay)
        else:
            logger.error("%s; input: %s", e, e.replay)
    display_report(report, config=DisplayConfig(console=console, failures_only=True, show_details=config.verbose > 0))
    if config.json_out is not None:
        dump_report(report, config.json_out)
    if config.csv_out is not None and report.sweep:
        dump_sweep(report.sweep, config.csv_out)
    return _Result(checks=report.checks)


def run_render(config: RunConfig, console: Console) -> _Result:
    if config.figure == "integer-lines":
        overlay = load_body(config.input) if config.input is not None else None
        svg = render_integer_lines(config.bound, overlay)
    elif config.figure == "body":
        svg = render_body(_body_input(config))
    elif config.figure == "trace":
        svg = render_trace(load_trace(_require(config.input, "--in", "render --figure trace")))
    else:
        spec = load_metric(_require(config.metric, "--metric", "render --figure ball"))
        solver = PeriodicSolver(build_field(spec), config.graph, config.settings)
        svg = render_ball(solver.stable_unit_ball(config.directions))
    _write_svg(config, svg, console)
    return _Result()


HANDLERS: dict[str, Callable[[RunConfig, Console], _Result]] = {
    "body": run_body,
    "lattice": run_lattice,
    "flat": run_flat,
    "periodic": run_periodic,
    "reduce": run_reduce,
    "verify": run_verify,
    "render": run_render,
}


def _print_payload(payload: Payload, console: Console) -> None:
    for key, value in payload.items():
        if key in {"vertices", "inner", "outer", "norms", "sweep"}:
            continue
        console.print(f"{key} {value!r}", markup=False, highlight=False, soft_wrap=True)


def run(config: RunConfig, *, console: Console | None = None, err_console: Console | None = None) -> int:
    """Execute one command; 0 on success, 1 when a theorem check fails, 2 on input errors."""
    console = console or Console()
    err_console = err_console or Console(stderr=True)
    if config.op is not None and config.command in OPS and config.op not in OPS[config.command]:
        err_console.print(f"error: unknown op {config.op!r} for {config.command}; choose from {', '.join(OPS[config.command])}", markup=False)
        return EXIT_INPUT_ERROR
    try:
        result = HANDLERS[config.command](config, console)
        if config.tol is not None and config.command != "verify":
            result.checks = [c.model_copy(update={"tolerance": max(c.tolerance, config.tol)}) for c in result.checks]
        _print_payload(result.payload, console)
        if config.json_out is not None and result.body is not None:
            dump_body(result.body, config.json_out)
        elif config.json_out is not None and config.command not in {"reduce", "verify"}:
            dump_json({**result.payload, "checks": [c.model_dump() for c in result.checks]}, config.json_out)
    except (ValueError, OSError, KeyError) as e:
        first_line = str(e).splitlines()[0] if str(e) else type(e).__name__
        logger.debug("input error", exc_info=True)
        err_console.print(f"error: {first_line}", markup=False, highlight=False)
        return EXIT_INPUT_ERROR
    failures = [check for check in result.checks if not check.passed]
    if result.checks and config.command != "verify":
        console.print(build_checks_table(result.checks))
    if failures:
        err_console.print(f"{len(failures)} theorem check(s) failed", markup=False)
        return EXIT_FAILED_CHECK
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="minimum tolerance applied to every theorem check")
    common.add_argument("--seed", type=int, default=Defaults.SEED)
    common.add_argument("--threads", default=os.environ.get("SYSTOLIC_THREADS", "1"), help="worker threads (default: $SYSTOLIC_THREADS or 1)")
    common.add_argument("--json", dest="json_out", type=Path, help="write a JSON result")
    common.add_argument("--csv", dest="csv_out", type=Path, help="write a CSV table")
    common.add_argument("--svg", dest="svg_out", type=Path, help="write an SVG figure")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _solver_parser() -> argparse.ArgumentParser:
    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--h", type=float, default=Defaults.GRID_SPACING, help="grid spacing, 1/n")
    solver.add_argument("--stencil", type=int, default=Defaults.STENCIL)
    solver.add_argument("--quad-n", type=int, default=Defaults.QUAD_N)
    solver.add_argument("--directions", type=int, default=Defaults.DIRECTIONS)
    solver.add_argument("--base-points", type=int, default=Defaults.BASE_POINTS)
    return solver


def build_parser() -> argparse.ArgumentParser:
    common, solver = _common_parser(), _solver_parser()
    parser = argparse.ArgumentParser(prog="systolic-finsler", description="Systolic geometry of Finsler two-tori.")
    sub = parser.add_subparsers(dest="command", required=True)

    body = sub.add_parser("body", parents=[common], help="convex body operations")
    body.add_argument("--in", dest="input", type=Path, required=True)
    body.add_argument("--op", default="info")
    body.add_argument("--vector")
    body.add_argument("--other", type=Path)
    body.add_argument("--bound", type=int, default=50, help="integer lines drawn by --op lines --svg")

    lattice = sub.add_parser("lattice", parents=[common], help="planar lattice invariants")
    lattice.add_argument("--basis", required=True, help="'u1,u2;v1,v2'")
    lattice.add_argument("--op", default="info")

    flat = sub.add_parser("flat", parents=[common], help="flat Finsler tori")
    flat.add_argument("--in", dest="input", type=Path)
    flat.add_argument("--op", default="ratio")
    flat.add_argument("--eps", type=float, nargs="+", default=list(FREEDOM_EPS))
    flat.add_argument("--family", choices=("keps",), help="use K_eps(--eps) instead of --in")
    flat.add_argument("--sweep", help="'a:b:n' values of eps for the freedom sweep")

    periodic = sub.add_parser("periodic", parents=[common, solver], help="periodic Finsler metrics")
    periodic.add_argument("--in", "--metric", dest="metric", type=Path, required=True)
    periodic.add_argument("--op", default="systole")
    periodic.add_argument("--from", dest="start")
    periodic.add_argument("--to", dest="end")
    periodic.add_argument("--z", "--vector", dest="vector", help="integer vector 'z1,z2'")
    periodic.add_argument("--samples", type=int, default=20)

    reduce = sub.add_parser("reduce", parents=[common], help="polygon reductions")
    reduce.add_argument("--in", dest="input", type=Path, required=True)
    reduce.add_argument("--mode", choices=("mahler", "abt"), default="mahler")
    reduce.add_argument("--trace", dest="json_out", type=Path, help="alias of --json")

    verify = sub.add_parser("verify", parents=[common], help="audit the isosystolic inequalities")
    verify.add_argument("--suite", choices=(*Suite.ORDER, Suite.ALL), default=Suite.ALL)
    verify.add_argument("--report", dest="json_out", type=Path, help="alias of --json")
    verify.add_argument("--count", type=int, default=1000, help="random inputs per randomized suite")
    verify.add_argument("--from-report", type=Path, help="show a saved report instead of running a suite")

    render = sub.add_parser("render", parents=[common, solver], help="SVG figures")
    render.add_argument("--figure", choices=("integer-lines", "body", "trace", "ball"), default="integer-lines")
    render.add_argument("--bound", type=int, default=50)
    render.add_argument("--in", dest="input", type=Path)
    render.add_argument("--metric", type=Path)
    return parser


def configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    handler = RichHandler(console=Console(stderr=True), show_time=False, show_path=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.handlers = [handler]
    logger.setLevel(level)
    logger.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    options = {key: value for key, value in vars(args).items() if value is not None}
    err_console = Console(stderr=True)
    try:
        config = RunConfig.model_validate(options)
    except ValueError as e:
        err_console.print(f"error: {str(e).splitlines()[0]}", markup=False, highlight=False)
        for line in str(e).splitlines()[1:]:
            err_console.print(f"  {line}", markup=False, highlight=False)
        return EXIT_INPUT_ERROR
    configure_logging(config.verbose)
    return run(config, err_console=err_console)


if __name__ == "__main__":
    sys.exit(main())

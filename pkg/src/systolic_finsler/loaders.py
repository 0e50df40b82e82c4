"""Readers and writers for every file format the CLI consumes or emits."""

import csv
import json
from pathlib import Path

import numpy as np
from pydantic import TypeAdapter

from systolic_finsler.errors import SystolicError
from systolic_finsler.loggers import logger
from systolic_finsler.types import ConvexBody, Lattice2, MetricSpec, ReductionTrace, SweepRow, VerifyReport

SWEEP_COLUMNS = ("eps", "ratio", "formula", "difference")

metric_adapter: TypeAdapter[MetricSpec] = TypeAdapter(MetricSpec)


def ensure_output_file(path: Path | str) -> Path:
    """Resolve an output path, creating its parent directory when missing."""
    target = Path(path)
    if not target.parent.exists():
        logger.warning('Output directory "%s" does not exist, creating it.', target.parent)
        target.parent.mkdir(parents=True, exist_ok=True)
    return target


def _read_text(path: Path | str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: Path | str, text: str) -> Path:
    target = ensure_output_file(path)
    target.write_text(text, encoding="utf-8")
    logger.info("wrote %s", target)
    return target


def load_body(path: Path | str) -> ConvexBody:
    return ConvexBody.model_validate_json(_read_text(path))


def dump_body(body: ConvexBody, path: Path | str) -> Path:
    return _write_text(path, body.model_dump_json(indent=2) + "\n")


def load_metric(path: Path | str) -> MetricSpec:
    return metric_adapter.validate_json(_read_text(path))


def dump_metric(spec: MetricSpec, path: Path | str) -> Path:
    return _write_text(path, metric_adapter.dump_json(spec, indent=2).decode() + "\n")


def load_trace(path: Path | str) -> ReductionTrace:
    return ReductionTrace.model_validate_json(_read_text(path))


def dump_trace(trace: ReductionTrace, path: Path | str) -> Path:
    return _write_text(path, trace.model_dump_json(indent=2) + "\n")


def load_report(path: Path | str) -> VerifyReport:
    return VerifyReport.model_validate_json(_read_text(path))


def dump_report(report: VerifyReport, path: Path | str) -> Path:
    return _write_text(path, report.model_dump_json(indent=2) + "\n")


def dump_replay(replay: str, path: Path | str) -> Path:
    """Input JSON of a failed check, readable by the matching ``load_*``."""
    return _write_text(path, replay + "\n")


def dump_json(payload: dict[str, object], path: Path | str) -> Path:
    """Plain JSON result of a single CLI operation, keys sorted."""
    return _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def dump_sweep(rows: list[SweepRow], path: Path | str) -> Path:
    target = ensure_output_file(path)
    with target.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([repr(getattr(row, column)) for column in SWEEP_COLUMNS])
    logger.info("wrote %s", target)
    return target


def load_sweep(path: Path | str) -> list[SweepRow]:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != SWEEP_COLUMNS:
            msg = f"sweep CSV must have columns {','.join(SWEEP_COLUMNS)}, got {reader.fieldnames}"
            raise SystolicError(msg)
        return [SweepRow.model_validate({column: float(record[column]) for column in SWEEP_COLUMNS}) for record in reader]


def parse_vector(text: str) -> tuple[float, float]:
    """Parse ``"x,y"``."""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2:
        msg = f"expected two comma separated numbers, got {text!r}"
        raise SystolicError(msg)
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        msg = f"expected two comma separated numbers, got {text!r}"
        raise SystolicError(msg) from e


def parse_integer_vector(text: str) -> tuple[int, int]:
    x, y = parse_vector(text)
    if not (x.is_integer() and y.is_integer()):
        msg = f"expected an integer vector, got {text!r}"
        raise SystolicError(msg)
    return int(x), int(y)


def parse_basis(text: str) -> Lattice2:
    """Parse ``"u1,u2;v1,v2"``."""
    halves = text.split(";")
    if len(halves) != 2:
        msg = f"expected a basis as 'u1,u2;v1,v2', got {text!r}"
        raise SystolicError(msg)
    return Lattice2(basis=(parse_vector(halves[0]), parse_vector(halves[1])))


def parse_sweep(text: str) -> list[float]:
    """Parse ``"a:b:n"`` into ``n`` evenly spaced values from ``a`` to ``b`` inside ``(0, 1)``."""
    parts = text.split(":")
    msg = f"expected a sweep as 'a:b:n' with 0 < a, b < 1 and n >= 2, got {text!r}"
    if len(parts) != 3:
        raise SystolicError(msg)
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise SystolicError(msg) from e
    if n < 2 or not (0 < a < 1 and 0 < b < 1):
        raise SystolicError(msg)
    return [float(x) for x in np.linspace(a, b, n)]

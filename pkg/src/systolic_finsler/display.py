"""
Console display of reports and estimates.

Tables are built with rich; the ``*_to_string`` variants render the same
tables onto a plain, colourless console for files and tests.
"""

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from io import StringIO

from rich.console import Console
from rich.table import Table

from systolic_finsler.flat_finsler import OPTIMAL_CONSTANTS
from systolic_finsler.types import ReductionTrace, StableNormEstimate, SweepRow, TheoremCheck, VerifyReport


@dataclass
class DisplayConfig:
    """Report display settings."""

    console: Console | None = None
    failures_only: bool = False
    show_details: bool = False
    max_rows: int = 200


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def build_checks_table(checks: Sequence[TheoremCheck], *, show_details: bool = False, title: str = "Theorem Checks") -> Table:
    table = Table(title=title)
    table.add_column("Theorem", style="cyan")
    table.add_column("Input")
    table.add_column("LHS", justify="right")
    table.add_column("RHS", justify="right")
    table.add_column("Margin", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Status", justify="center")
    if show_details:
        table.add_column("Details")
    for check in checks:
        status = "[green]pass[/green]" if check.passed else "[bold red]FAIL[/bold red]"
        if check.provenance:
            status += f" ({check.provenance})"
        row = [check.theorem_id, check.input, _fmt(check.lhs), _fmt(check.rhs), _fmt(check.margin), _fmt(check.tolerance), status]
        if show_details:
            row.append(", ".join(f"{key}={_fmt(value)}" for key, value in sorted(check.details.items())))
        table.add_row(*row)
    return table


def build_summary_table(report: VerifyReport) -> Table:
    """Pass/fail counts and the smallest margin per theorem."""
    table = Table(title=f"Suite {report.suite} (seed {report.seed})")
    table.add_column("Theorem", style="cyan")
    table.add_column("Checks", justify="right")
    table.add_column("Failed", justify="right", style="red")
    table.add_column("Min margin", justify="right")
    groups: dict[str, list[TheoremCheck]] = {}
    for check in report.checks:
        groups.setdefault(check.theorem_id, []).append(check)
    for theorem_id, group in groups.items():
        failed = sum(not check.passed for check in group)
        table.add_row(theorem_id, str(len(group)), str(failed), _fmt(min(check.margin for check in group)))
    verdict = "[bold green]PASS[/bold green]" if report.passed else "[bold red]FAIL[/bold red]"
    table.add_row("[bold]Total[/bold]", f"[bold]{len(report.checks)}[/bold]", f"[bold]{len(report.failures)}[/bold]", verdict)
    return table


def build_sweep_table(rows: Sequence[SweepRow]) -> Table:
    table = Table(title="Systolic Freedom")
    table.add_column("eps", justify="right", style="cyan")
    table.add_column("BH ratio", justify="right")
    table.add_column("2πε/(1+ε)²", justify="right")
    table.add_column("Difference", justify="right")
    for row in rows:
        table.add_row(_fmt(row.eps), _fmt(row.ratio), _fmt(row.formula), f"{row.difference:.3e}")
    return table


def build_stable_norm_table(estimate: StableNormEstimate) -> Table:
    table = Table(title="Stable Norm")
    table.add_column("z", style="cyan")
    table.add_column("‖z‖_st", justify="right")
    table.add_column("Lower", justify="right")
    table.add_column("Convex", justify="center")
    for value in estimate.values:
        convex = "no" if value.z in estimate.convexity_violations else "yes"
        table.add_row(str(value.z), _fmt(value.value), _fmt(value.lower), convex)
    table.caption = f"ε_s={estimate.error.stencil:.3g}, ε_h={estimate.error.metric:.3g}"
    return table


def build_trace_table(trace: ReductionTrace) -> Table:
    monitored = "|P|·|P°|" if trace.mode == "mahler" else "|P|"
    table = Table(title=f"{trace.mode} reduction")
    table.add_column("#", justify="right")
    table.add_column("Step", style="cyan")
    table.add_column("Vertices", justify="right")
    table.add_column(monitored, justify="right")
    table.add_column("Lines")
    for k, step in enumerate(trace.steps):
        table.add_row(str(k), step.kind, str(step.body.vertex_count), _fmt(step.monitored), " ".join(map(str, step.lines)))
    return table


def build_constants_table() -> Table:
    """Optimal isosystolic constants on the two-torus."""
    table = Table(title="Optimal Constants (area >= C·sys²)")
    table.add_column("Metrics", style="cyan")
    table.add_column("Area")
    table.add_column("Reversible", justify="center")
    table.add_column("C", justify="right")
    table.add_column("Optimal for")
    for row in OPTIMAL_CONSTANTS:
        table.add_row(row.metric_class, row.area, "yes" if row.reversible else "no", _fmt(row.value), row.attribution)
    return table


def display_report(report: VerifyReport, *, config: DisplayConfig | None = None) -> None:
    config = config or DisplayConfig()
    console = config.console or Console()
    console.print(build_summary_table(report))
    if report.sweep:
        console.print(build_sweep_table(report.sweep))
    checks = report.failures if config.failures_only else report.checks
    if checks:
        shown = checks[: config.max_rows]
        title = f"Theorem Checks ({len(shown)} of {len(checks)})" if len(shown) < len(checks) else "Theorem Checks"
        console.print(build_checks_table(shown, show_details=config.show_details, title=title))


def _plain(render: Callable[[Console], None]) -> str:
    string_buffer = StringIO()
    plain_console = Console(file=string_buffer, force_terminal=False, no_color=True, width=120)
    render(plain_console)
    result = string_buffer.getvalue()
    string_buffer.close()
    return "\n".join(line.rstrip() for line in result.split("\n"))


def report_to_string(report: VerifyReport, *, failures_only: bool = True, show_details: bool = False) -> str:
    return _plain(lambda console: display_report(report, config=DisplayConfig(console=console, failures_only=failures_only, show_details=show_details)))


def constants_to_string() -> str:
    return _plain(lambda console: console.print(build_constants_table()))


def stable_norm_to_string(estimate: StableNormEstimate) -> str:
    return _plain(lambda console: console.print(build_stable_norm_table(estimate)))


def trace_to_string(trace: ReductionTrace) -> str:
    return _plain(lambda console: console.print(build_trace_table(trace)))

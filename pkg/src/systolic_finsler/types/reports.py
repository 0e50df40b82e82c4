from typing import Literal

from pydantic import BaseModel, Field, computed_field

from systolic_finsler.types.geometry import ConvexBody

StepKindName = Literal["initial", "mahler_pair_removal", "abt_push_to_line", "abt_slide_along_line", "vertex_merge"]
ReductionMode = Literal["mahler", "abt"]


class ReductionStep(BaseModel):
    """One snapshot of a reduction run."""

    kind: StepKindName
    body: ConvexBody
    monitored: float
    vertex: int | None = None
    lines: list[tuple[int, int]] = Field(default_factory=list)


class ReductionTrace(BaseModel):
    """Ordered snapshots; ``monitored`` is |P|·|P°| for Mahler runs and |P| for integer-line runs."""

    mode: ReductionMode
    steps: list[ReductionStep] = Field(default_factory=list)

    def record(
        self,
        kind: StepKindName,
        body: ConvexBody,
        monitored: float,
        *,
        vertex: int | None = None,
        lines: list[tuple[int, int]] | None = None,
    ) -> ReductionStep:
        step = ReductionStep(kind=kind, body=body, monitored=monitored, vertex=vertex, lines=lines or [])
        self.steps.append(step)
        return step

    def extend(self, other: "ReductionTrace") -> None:
        self.steps.extend(step for step in other.steps if step.kind != "initial")

    @property
    def monitored_values(self) -> list[float]:
        return [step.monitored for step in self.steps]

    def is_monotone(self, tolerance: float = 1e-9) -> bool:
        values = self.monitored_values
        return all(b <= a + tolerance for a, b in zip(values, values[1:]))


class TheoremCheck(BaseModel):
    """A single audited inequality ``lhs >= rhs - tolerance``.

    Equalities are encoded as ``lhs = -|difference|`` against ``rhs = 0``.
    ``replay`` holds the JSON of the audited input and is left out of reports.
    """

    theorem_id: str
    input: str
    lhs: float
    rhs: float
    tolerance: float
    provenance: str | None = None
    details: dict[str, float] = Field(default_factory=dict)
    replay: str | None = Field(default=None, exclude=True)

    @computed_field
    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @computed_field
    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs - self.tolerance


class SweepRow(BaseModel):
    """One row of the systolic freedom table."""

    eps: float
    ratio: float
    formula: float
    difference: float


class VerifyReport(BaseModel):
    suite: str
    seed: int
    checks: list[TheoremCheck] = Field(default_factory=list)
    sweep: list[SweepRow] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[TheoremCheck]:
        return [check for check in self.checks if not check.passed]

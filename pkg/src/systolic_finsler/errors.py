"""Domain errors.

Every error derives from ``ValueError`` through ``SystolicError`` so callers
that only guard against bad values keep working.
"""

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from systolic_finsler.types import TheoremCheck, VerifyReport


class SystolicError(ValueError):
    """Base class for all systolic-finsler errors."""


class InvalidBodyError(SystolicError):
    """Input does not describe a convex polygon with the origin strictly inside."""


class InvalidLatticeError(SystolicError):
    """Basis vectors are (numerically) linearly dependent."""


class NotSymmetricError(SystolicError):
    """Operation requires a centrally symmetric body."""


class NotLatticePolygonError(SystolicError):
    """Operation requires integer vertices."""


class AlreadyParallelogramError(SystolicError):
    """No opposite vertex pair can be removed from a parallelogram."""


class PreconditionViolatedError(SystolicError):
    """Input misses an integer line."""


class ReductionStalledError(SystolicError):
    """Reduction driver hit its step cap or ended on a non-integral vertex."""


class PatchTooSmallError(SystolicError):
    """Shortest paths keep touching the patch border after expansion."""


class InvalidFieldError(SystolicError):
    """Metric field data is malformed or not positive."""


class ExpressionSyntaxError(SystolicError):
    """Conformal factor expression failed to parse."""

    def __init__(self, message: str, *, position: int, source: str) -> None:
        self.position = position
        self.source = source
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {source}\n  {pointer}")


class CheckFailedError(SystolicError):
    """A theorem check failed during a suite; ``replay`` is the JSON of the offending input."""

    def __init__(self, check: "TheoremCheck", report: "VerifyReport") -> None:
        self.check = check
        self.report = report
        self.replay = check.replay or "{}"
        super().__init__(f"{check.theorem_id} failed on {check.input}: margin {check.margin:.6g}, tolerance {check.tolerance:.6g}")

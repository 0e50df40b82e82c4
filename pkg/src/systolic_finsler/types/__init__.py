# Export all types from submodules
from .fields import (
    BodyGridFieldSpec,
    DiameterEstimate,
    ConformalFieldSpec,
    DiscretizationError,
    DistanceEstimate,
    FlatFieldSpec,
    IntVector,
    MetricSpec,
    PeriodicGraph,
    QuadratureEstimate,
    SolverSettings,
    StableNormEstimate,
    StableNormValue,
    SystoleEstimate,
)
from .geometry import ConvexBody, FlatFinslerTorus, Lattice2, Point
from .reports import (
    ReductionMode,
    ReductionStep,
    ReductionTrace,
    StepKindName,
    SweepRow,
    TheoremCheck,
    VerifyReport,
)

__all__ = [
    "BodyGridFieldSpec",
    "ConformalFieldSpec",
    "ConvexBody",
    "DiameterEstimate",
    "DiscretizationError",
    "DistanceEstimate",
    "FlatFieldSpec",
    "FlatFinslerTorus",
    "IntVector",
    "Lattice2",
    "MetricSpec",
    "PeriodicGraph",
    "Point",
    "QuadratureEstimate",
    "ReductionMode",
    "ReductionStep",
    "ReductionTrace",
    "SolverSettings",
    "StableNormEstimate",
    "StableNormValue",
    "StepKindName",
    "SweepRow",
    "SystoleEstimate",
    "TheoremCheck",
    "VerifyReport",
]

"""Systolic Finsler - systolic geometry of Finsler two-tori."""

from .fields import BodyGridField, ConformalField, FlatField, MetricField, build_field
from .flat_finsler import area_bh_flat, area_ht_flat, systole_flat, systolic_ratio
from .periodic_finsler import PeriodicSolver, stable_unit_ball, systole_periodic
from .polygon_reduce import abt_reduce, mahler_reduce
from .types import ConvexBody, FlatFinslerTorus, Lattice2, PeriodicGraph, SolverSettings
from .verify import run_suite

__all__ = [
    "BodyGridField",
    "ConformalField",
    "ConvexBody",
    "FlatField",
    "FlatFinslerTorus",
    "Lattice2",
    "MetricField",
    "PeriodicGraph",
    "PeriodicSolver",
    "SolverSettings",
    "abt_reduce",
    "area_bh_flat",
    "area_ht_flat",
    "build_field",
    "mahler_reduce",
    "run_suite",
    "stable_unit_ball",
    "systole_flat",
    "systole_periodic",
    "systolic_ratio",
]

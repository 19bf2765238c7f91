"""Closure of the values of sigma_{-r}(n) = sum_{d | n} d^-r as a finite
union of intervals with exact natural densities, plus certified numerics
and a brute-force oracle to check it."""

from .closure import ClosureError, ClosureResult, DomainError, LevelState, closure, compute_j0, find_jprime
from .endpoints import ClosedInterval, EndpointExpr, SigmaFactor, closed_form
from .oracle import DensityReport, classify, eta_solve, gap_violations
from .realnum import ComparisonError, Enclosure, Precision, RangeError, zeta_enclosure
from .report import closure_report, load_report

__version__ = "0.1.0"

__all__ = [
    "ClosedInterval",
    "ClosureError",
    "ClosureResult",
    "ComparisonError",
    "DensityReport",
    "DomainError",
    "Enclosure",
    "EndpointExpr",
    "LevelState",
    "Precision",
    "RangeError",
    "SigmaFactor",
    "classify",
    "closed_form",
    "closure",
    "closure_report",
    "compute_j0",
    "eta_solve",
    "find_jprime",
    "gap_violations",
    "load_report",
    "zeta_enclosure",
]

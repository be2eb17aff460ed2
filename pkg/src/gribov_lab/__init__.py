"""Truncated Bargmann-basis laboratory for the regularized trace of ``lambda'' G + H_{mu,lambda}``."""

from .bargmann import (
    DimPolicy,
    GribovParams,
    TridiagonalOperator,
    TruncationSpec,
    build_full_operator,
    build_perturbation,
    eigenvalue_G,
)
from .errors import (
    CountMismatch,
    DomainError,
    GribovLabError,
    InvalidParameter,
    NoConvergence,
    NumericalFailure,
    PoleCollision,
    QuadratureNotConverged,
    StructureMismatch,
)
from .trace_formula import (
    ContourSpec,
    TraceReport,
    correction_count_rule,
    correction_integral,
    radius_sequence,
    regularized_residual,
)

__version__ = "0.1.0"

__all__ = [
    "ContourSpec",
    "CountMismatch",
    "DimPolicy",
    "DomainError",
    "GribovLabError",
    "GribovParams",
    "InvalidParameter",
    "NoConvergence",
    "NumericalFailure",
    "PoleCollision",
    "QuadratureNotConverged",
    "StructureMismatch",
    "TraceReport",
    "TridiagonalOperator",
    "TruncationSpec",
    "build_full_operator",
    "build_perturbation",
    "correction_count_rule",
    "correction_integral",
    "eigenvalue_G",
    "radius_sequence",
    "regularized_residual",
]

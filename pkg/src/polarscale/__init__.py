"""Polarization scaling laboratory.

Dual-scale numerics for Bhattacharyya trajectories, the polarization
process family and its tractable companions, binomial scaling
thresholds, code construction with MAP/SC error bounds, and a
verification harness that checks every claim at desk scale.
"""

from .errors import (
    DomainError,
    InternalCheckError,
    PolarScaleError,
    ReportParseError,
    ResourceLimitError,
    UnsupportedCaseError,
)
from .numerics import BranchRule, DualScaleValue, LogExponent, Regime, bhatt_branch, q_inv
from .processes import ProcessKind, ProcessState, sample_path, step
from .scaling import (
    BoundClaim,
    BoundSpec,
    EnxResult,
    ScalingFit,
    bound_value,
    drift_constant_check,
    e_n_x,
    e_n_x_deviation,
    fixed_point_y,
    scaling_fit,
)
from .codes import (
    BoundKind,
    ErrorBound,
    IndexSelection,
    map_lower_bound,
    overlap_fraction,
    polar_select,
    rm_select,
    sc_simulate_bec,
    sc_union_bound,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PolarScaleError",
    "DomainError",
    "UnsupportedCaseError",
    "ResourceLimitError",
    "InternalCheckError",
    "ReportParseError",
    "Regime",
    "BranchRule",
    "DualScaleValue",
    "LogExponent",
    "bhatt_branch",
    "q_inv",
    "ProcessKind",
    "ProcessState",
    "step",
    "sample_path",
    "EnxResult",
    "e_n_x",
    "e_n_x_deviation",
    "fixed_point_y",
    "BoundClaim",
    "BoundSpec",
    "bound_value",
    "drift_constant_check",
    "ScalingFit",
    "scaling_fit",
    "IndexSelection",
    "BoundKind",
    "ErrorBound",
    "polar_select",
    "rm_select",
    "overlap_fraction",
    "map_lower_bound",
    "sc_union_bound",
    "sc_simulate_bec",
]

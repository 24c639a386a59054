"""Measurement-induced nonlocality and the affinity-based nonbilocal measure."""

from __future__ import annotations

from .config import OptimizerConfig, optimizer_config
from .hilbert import (
    DensityOperator,
    Ket,
    SchmidtForm,
    affinity,
    partial_trace,
    random_ket,
    random_state,
    schmidt,
    sqrt_psd,
    tensor,
)
from .measurements import (
    InvariantMeasurementFamily,
    ProjectiveMeasurement,
    apply,
    eigen_family,
    haar_sample,
    measurement_at,
)
from .measures import affinity_disturbance, affinity_min, geometric_discord, hs_min
from .nonbilocal import (
    BilocalInput,
    BoundReport,
    bound_report,
    bound_thm3,
    bound_thm4,
    nonbilocal,
    nonbilocal_pure,
    thm5_closed,
    verify_thm1,
)
from .optimizer import MeasureResult, optimize

__all__ = [
    "BilocalInput",
    "BoundReport",
    "DensityOperator",
    "InvariantMeasurementFamily",
    "Ket",
    "MeasureResult",
    "OptimizerConfig",
    "ProjectiveMeasurement",
    "SchmidtForm",
    "affinity",
    "affinity_disturbance",
    "affinity_min",
    "apply",
    "bound_report",
    "bound_thm3",
    "bound_thm4",
    "eigen_family",
    "geometric_discord",
    "haar_sample",
    "hs_min",
    "measurement_at",
    "nonbilocal",
    "nonbilocal_pure",
    "optimize",
    "optimizer_config",
    "partial_trace",
    "random_ket",
    "random_state",
    "schmidt",
    "sqrt_psd",
    "tensor",
    "thm5_closed",
    "verify_thm1",
]

"""Measurement-induced nonlocality and geometric discord of bipartite states.

All three measures optimize over rank-1 measurements on the first factor that
leave its marginal invariant. For a nondegenerate marginal that set is the
single eigenbasis measurement and no optimization is needed.
"""

from __future__ import annotations

import logging

from .config import OptimizerConfig
from .exceptions import DimensionMismatchError
from .hilbert import DensityOperator, partial_trace, sqrt_psd
from .measurements import (
    InvariantMeasurementFamily,
    ProjectiveMeasurement,
    disturbance_evaluator,
    eigen_family,
)
from .optimizer import MeasureResult, optimize
from .types import Objective

_LOGGER = logging.getLogger(__name__)

MEASURED_FACTOR = (0,)


def _check_bipartite(rho: DensityOperator) -> None:
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"Expected a bipartite state, got dims {rho.dims}")


def marginal_family(
    rho: DensityOperator, target: tuple[int, ...] = MEASURED_FACTOR
) -> InvariantMeasurementFamily:
    """Return the invariant family of the marginal of rho on target."""
    return eigen_family(partial_trace(rho, target), target)


def _hs_objective(rho: DensityOperator) -> Objective:
    """Return the measurement -> ||rho - Pi(rho)||^2 objective.

    Pi is an orthogonal projection in the Hilbert-Schmidt inner product, so
    the squared distance equals Tr(rho^2) - Tr(rho Pi(rho)).
    """
    overlap = disturbance_evaluator(rho.matrix, rho.dims, MEASURED_FACTOR)
    purity = rho.purity
    return lambda meas: max(purity - overlap(meas), 0.0)


def _affinity_objective(rho: DensityOperator, target: tuple[int, ...]) -> Objective:
    """Return the measurement -> 1 - Tr(sqrt(rho) Pi(sqrt(rho))) objective."""
    overlap = disturbance_evaluator(sqrt_psd(rho), rho.dims, target)
    return lambda meas: max(1.0 - overlap(meas), 0.0)


def affinity_disturbance(rho: DensityOperator, meas: ProjectiveMeasurement) -> float:
    """Return 1 - Tr(sqrt(rho) Pi(sqrt(rho))) for a single measurement."""
    return _affinity_objective(rho, meas.target)(meas)


def hs_min(rho: DensityOperator, config: OptimizerConfig) -> MeasureResult:
    """Return the Hilbert-Schmidt measurement-induced nonlocality of rho."""
    _check_bipartite(rho)
    return optimize(_hs_objective(rho), marginal_family(rho), "max", config)


def geometric_discord(rho: DensityOperator, config: OptimizerConfig) -> MeasureResult:
    """Return the geometric discord, the minimizing dual of ``hs_min``."""
    _check_bipartite(rho)
    return optimize(_hs_objective(rho), marginal_family(rho), "min", config)


def affinity_min(rho: DensityOperator, config: OptimizerConfig) -> MeasureResult:
    """Return the affinity-based measurement-induced nonlocality of rho.

    This is 1 - min Tr(sqrt(rho) Pi(sqrt(rho))) over invariant measurements
    on the first factor, reported as a maximization of the disturbance.
    """
    _check_bipartite(rho)
    objective = _affinity_objective(rho, MEASURED_FACTOR)
    result = optimize(objective, marginal_family(rho), "max", config)
    _LOGGER.debug("Affinity MIN %.12g at %s", result.value, result.best_start.label)
    return result

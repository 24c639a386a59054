"""Affinity-based nonbilocal measure of a pair of bipartite states.

The pair is arranged as (a, b, c, d) with rho_ab on the first two factors and
rho_cd on the last two. Measurements act jointly on the middle pair (b, c)
and must leave the marginal rho^bc invariant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from .config import OptimizerConfig
from .const import BOUND_SLACK, DIMENSION_CAP, THEOREM1_SLACK
from .exceptions import (
    DegenerateMarginalError,
    DimensionCapError,
    DimensionMismatchError,
)
from .hilbert import (
    DensityOperator,
    Ket,
    is_nondegenerate,
    partial_trace,
    schmidt,
    sqrt_psd,
    swap_factors,
    tensor,
)
from .measurements import (
    InvariantMeasurementFamily,
    ProjectiveMeasurement,
    disturbance_evaluator,
    eigen_family,
)
from .measures import affinity_disturbance, affinity_min
from .operator_basis import (
    LambdaKind,
    build_basis,
    joint_lambda,
    lambda_of,
    qubit_gamma,
)
from .optimizer import MeasureResult, optimize
from .types import Objective, RealMatrix

_LOGGER = logging.getLogger(__name__)

MEASURED_PAIR = (1, 2)

# Fixed starting directions for the qubit measurement minimization.
_QUBIT_STARTS = (
    (0.0, 0.0),
    (np.pi / 2, 0.0),
    (np.pi / 2, np.pi / 2),
    (np.pi / 4, np.pi / 4),
)


@dataclass(frozen=True)
class BilocalInput:
    """Two bipartite states shared by (a, b) and (c, d)."""

    rho_ab: DensityOperator
    rho_cd: DensityOperator

    def __post_init__(self) -> None:
        """Check that both states are bipartite."""
        for name, rho in (("rho_ab", self.rho_ab), ("rho_cd", self.rho_cd)):
            if len(rho.dims) != 2:
                raise DimensionMismatchError(
                    f"{name} must have two factors, got dims {rho.dims}"
                )
        if (total := math.prod(self.dims)) > DIMENSION_CAP:
            raise DimensionCapError(
                f"Joint dimension {total} exceeds the cap of {DIMENSION_CAP}"
            )

    @property
    def dims(self) -> tuple[int, ...]:
        """Return (m, n, u, v)."""
        return self.rho_ab.dims + self.rho_cd.dims

    @cached_property
    def joint(self) -> DensityOperator:
        """Return rho_ab (x) rho_cd."""
        return tensor(self.rho_ab, self.rho_cd)

    @cached_property
    def joint_root(self) -> np.ndarray:
        """Return sqrt(rho_ab (x) rho_cd) as the product of the two roots."""
        return np.kron(sqrt_psd(self.rho_ab), sqrt_psd(self.rho_cd))

    @cached_property
    def marginal_bc(self) -> DensityOperator:
        """Return rho^bc = rho^b (x) rho^c."""
        return tensor(
            partial_trace(self.rho_ab, (1,)), partial_trace(self.rho_cd, (0,))
        )

    def family(self) -> InvariantMeasurementFamily:
        """Return the measurements on (b, c) leaving rho^bc invariant."""
        return eigen_family(self.marginal_bc, MEASURED_PAIR)


@dataclass(frozen=True)
class Theorem1Check:
    """Both sides of the inequality between the pair measure and affinity MIN."""

    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self) -> float:
        """Return lhs - rhs."""
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Theorem5Result:
    """Closed-form qubit values next to the directly minimized one.

    ``printed_value`` uses the unsquared norm of the first Lambda_cd row,
    ``corrected_value`` the squared norm. ``direct_min_value`` minimizes over
    every qubit measurement on c and ``invariant_value`` evaluates the
    eigenbasis measurement of rho^c.
    """

    printed_value: float
    corrected_value: float
    direct_min_value: float
    invariant_value: float

    @property
    def discrepancy(self) -> float:
        """Return |printed_value - direct_min_value|."""
        return abs(self.printed_value - self.direct_min_value)


@dataclass(frozen=True)
class BoundReport:
    """The numeric pair measure next to every applicable upper bound."""

    value_numeric: float
    thm3_upper: float
    thm4_upper: float | None
    thm5: Theorem5Result | None
    ordering_ok: bool
    result: MeasureResult | None = None

    @property
    def thm5_closed(self) -> float | None:
        """Return the unsquared-norm closed form when it applies."""
        return None if self.thm5 is None else self.thm5.printed_value


def _pair_objective(pair: BilocalInput) -> Objective:
    overlap = disturbance_evaluator(pair.joint_root, pair.dims, MEASURED_PAIR)
    return lambda meas: max(1.0 - overlap(meas), 0.0)


def pair_disturbance(pair: BilocalInput, meas: ProjectiveMeasurement) -> float:
    """Return 1 - Tr(sqrt(tau) Pi(sqrt(tau))) for one measurement on (b, c)."""
    return _pair_objective(pair)(meas)


def nonbilocal(pair: BilocalInput, config: OptimizerConfig) -> MeasureResult:
    """Return the nonbilocal measure and the optimal measurement on (b, c)."""
    result = optimize(_pair_objective(pair), pair.family(), "max", config)
    if result.value < 0:
        raise AssertionError(f"Nonbilocal value {result.value} is negative")
    _LOGGER.debug(
        "Nonbilocal %.12g for dims %s at %s",
        result.value,
        pair.dims,
        result.best_start.label,
    )
    return result


def nonbilocal_pure(psi_ab: Ket, psi_cd: Ket) -> float:
    """Return 1 - (sum_i s_i^4)(sum_j r_j^4) from the Schmidt amplitudes."""
    s = schmidt(psi_ab).coefficients
    r = schmidt(psi_cd).coefficients
    return max(1.0 - float(np.sum(s**4)) * float(np.sum(r**4)), 0.0)


def verify_thm1(rho: DensityOperator, config: OptimizerConfig) -> Theorem1Check:
    """Compare the measure of (rho_ba, rho_ab) with the affinity MIN of rho.

    In the swapped pair both measured factors are copies of subsystem a.
    """
    pair = BilocalInput(swap_factors(rho), rho)
    lhs = nonbilocal(pair, config).value
    rhs = affinity_min(rho, config).value
    holds = lhs >= rhs - THEOREM1_SLACK
    if not holds:
        _LOGGER.warning("Pair measure %.12g below affinity MIN %.12g", lhs, rhs)
    return Theorem1Check(lhs, rhs, holds)


def product_step(
    rho: DensityOperator, meas: ProjectiveMeasurement
) -> tuple[float, float]:
    """Return the self-pair value of meas (x) meas and the single value of meas.

    The pair value is 1 - A^2 and the single value 1 - A, where A is the
    affinity retained by meas on the first factor of rho.
    """
    if meas.basis is None:
        raise DimensionMismatchError("Product step needs a rank-1 measurement")
    pair = BilocalInput(swap_factors(rho), rho)
    doubled = ProjectiveMeasurement.from_basis(
        MEASURED_PAIR, np.kron(meas.basis, meas.basis), "product"
    )
    return pair_disturbance(pair, doubled), affinity_disturbance(rho, meas)


def bound_thm3(pair: BilocalInput) -> float:
    """Return 1 minus the n*u smallest eigenvalues of the joint Lambda gram."""
    m, n, u, v = pair.dims
    lab = lambda_of(pair.rho_ab, build_basis(m), build_basis(n), LambdaKind.AB)
    lcd = lambda_of(pair.rho_cd, build_basis(u), build_basis(v), LambdaKind.CD)
    values = np.linalg.eigvalsh(joint_lambda(lab, lcd).gram())
    return 1.0 - float(np.sum(values[: n * u]))


def _retained_ab(pair: BilocalInput) -> float:
    """Return Tr(sqrt(rho_ab) Pi^b(sqrt(rho_ab))) for the eigenbasis of rho^b."""
    marginal_b = partial_trace(pair.rho_ab, (1,))
    if not is_nondegenerate(marginal_b):
        raise DegenerateMarginalError("The marginal rho^b is degenerate")
    _, vectors = marginal_b.spectrum
    meas = ProjectiveMeasurement.from_basis((1,), vectors, "eigen-b")
    return 1.0 - affinity_disturbance(pair.rho_ab, meas)


def _lambda_cd_gram(pair: BilocalInput) -> RealMatrix:
    _, _, u, v = pair.dims
    lcd = lambda_of(pair.rho_cd, build_basis(u), build_basis(v), LambdaKind.CD)
    return lcd.gram()


def bound_thm4(pair: BilocalInput) -> float:
    """Return the upper bound available when rho^b is nondegenerate."""
    retained = _retained_ab(pair)
    u = pair.dims[2]
    values = np.linalg.eigvalsh(_lambda_cd_gram(pair))
    return 1.0 - retained * float(np.sum(values[:u]))


def _sphere(angles: np.ndarray) -> np.ndarray:
    theta, phi = angles
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def thm5_closed(pair: BilocalInput) -> Theorem5Result:
    """Return the qubit closed-form values for a nondegenerate rho^b and rho^c.

    Requires u = 2. The Lambda_cd gram splits into its first row norm and the
    gram of the remaining rows; the least eigenvalue of the latter gives the
    minimum over measurement directions.
    """
    if pair.dims[2] != 2:
        raise DimensionMismatchError(
            f"Closed form needs a qubit c, got u={pair.dims[2]}"
        )
    marginal_c = partial_trace(pair.rho_cd, (0,))
    if not is_nondegenerate(marginal_c):
        raise DegenerateMarginalError("The marginal rho^c is degenerate")
    retained = _retained_ab(pair)
    gram = _lambda_cd_gram(pair)
    head = float(gram[0, 0])
    least = float(np.linalg.eigvalsh(gram[1:, 1:])[0])

    def along(direction: np.ndarray) -> float:
        gamma = qubit_gamma(direction)
        return float(np.trace(gamma @ gram @ gamma.T))

    direct = min(
        minimize(
            lambda angles: along(_sphere(angles)),
            np.array(start),
            method="Powell",
            options={"xtol": 1e-12, "ftol": 1e-14},
        ).fun
        for start in _QUBIT_STARTS
    )
    bloch = np.array(
        [
            np.trace(marginal_c.matrix @ element).real
            for element in build_basis(2).elements[1:]
        ]
    )
    result = Theorem5Result(
        printed_value=1.0 - retained * (np.sqrt(head) + least),
        corrected_value=1.0 - retained * (head + least),
        direct_min_value=1.0 - retained * float(direct),
        invariant_value=1.0 - retained * along(bloch),
    )
    if result.discrepancy > BOUND_SLACK:
        _LOGGER.warning(
            "Unsquared closed form %.12g differs from direct minimum %.12g",
            result.printed_value,
            result.direct_min_value,
        )
    return result


def bound_report(pair: BilocalInput, config: OptimizerConfig) -> BoundReport:
    """Compute the pair measure and compare it with every applicable bound."""
    result = nonbilocal(pair, config)
    value = result.value
    thm3 = bound_thm3(pair)
    thm4: float | None = None
    thm5: Theorem5Result | None = None
    if is_nondegenerate(partial_trace(pair.rho_ab, (1,))):
        thm4 = bound_thm4(pair)
        if pair.dims[2] == 2 and is_nondegenerate(partial_trace(pair.rho_cd, (0,))):
            thm5 = thm5_closed(pair)
    ordering_ok = value <= thm3 + BOUND_SLACK and (
        thm4 is None or value <= thm4 + BOUND_SLACK
    )
    if not ordering_ok:
        _LOGGER.warning(
            "Pair measure %.12g exceeds a bound (thm3 %.12g, thm4 %s)",
            value,
            thm3,
            thm4,
        )
    return BoundReport(value, thm3, thm4, thm5, ordering_ok, result)

"""Tests for the multi-start measurement optimizer."""

import dataclasses

import numpy as np
import pytest

from nonbilocality.config import OptimizerConfig
from nonbilocality.hilbert import DensityOperator, random_state
from nonbilocality.measurements import (
    InvariantMeasurementFamily,
    ProjectiveMeasurement,
    eigen_family,
)
from nonbilocality.optimizer import EIGEN_LABEL, optimize
from nonbilocality.types import Objective


@pytest.fixture(name="qubit_family")
def mock_qubit_family() -> InvariantMeasurementFamily:
    """Fixture for every rank-1 measurement of a maximally mixed qubit."""
    return eigen_family(DensityOperator.maximally_mixed((2,)))


def _spread(meas: ProjectiveMeasurement) -> float:
    """Return 1 - sum_h |<h|0>|^4, zero in the computational basis."""
    assert meas.basis is not None
    return 1.0 - float(np.sum(np.abs(meas.basis[0]) ** 4))


def _dephasing(seed: int) -> Objective:
    """Return 1 - sum_h <h|A|h>^2 for a random Hermitian A."""
    a = random_state(4, seed=seed).matrix

    def objective(meas: ProjectiveMeasurement) -> float:
        assert meas.basis is not None
        diagonal = np.einsum("ah,ab,bh->h", meas.basis.conj(), a, meas.basis).real
        return 1.0 - float(np.sum(diagonal**2))

    return objective


def test_constant_objective(qubit_family: InvariantMeasurementFamily) -> None:
    """Test that a constant objective is returned as is in both modes."""
    config = OptimizerConfig(restarts=2, refine_iters=20)
    for mode in ("max", "min"):
        result = optimize(lambda _: 0.3, qubit_family, mode, config)
        assert result.value == 0.3
        assert result.mode == mode
        assert result.best_start.label == EIGEN_LABEL


def test_point_family_single_evaluation() -> None:
    """Test that a nondegenerate marginal is evaluated once."""
    family = eigen_family(random_state(3, seed=1))
    result = optimize(lambda _: 0.1, family, "max", OptimizerConfig(restarts=8))
    assert [record.label for record in result.starts] == [EIGEN_LABEL]
    assert result.restarts == 0
    assert result.starts[0].evaluations == 1


def test_start_order(qubit_family: InvariantMeasurementFamily) -> None:
    """Test eigen, structured then Haar starts."""
    config = OptimizerConfig(restarts=3, refine_iters=20)
    result = optimize(_spread, qubit_family, "max", config)
    assert [record.label for record in result.starts] == [
        EIGEN_LABEL,
        "computational",
        "hadamard",
        "haar-0",
        "haar-1",
        "haar-2",
    ]
    unstructured = dataclasses.replace(config, structured_seeds=False)
    result = optimize(_spread, qubit_family, "max", unstructured)
    assert [record.label for record in result.starts] == [
        EIGEN_LABEL,
        "haar-0",
        "haar-1",
        "haar-2",
    ]


def test_maximize_and_minimize(qubit_family: InvariantMeasurementFamily) -> None:
    """Test both modes on an objective with known extremes."""
    config = OptimizerConfig(restarts=2, refine_iters=100)
    high = optimize(_spread, qubit_family, "max", config)
    assert high.value == pytest.approx(0.5, abs=1e-9)
    assert high.start("hadamard").initial == pytest.approx(0.5, abs=1e-12)
    assert high.start(EIGEN_LABEL).initial == pytest.approx(0.0, abs=1e-12)
    low = optimize(_spread, qubit_family, "min", config)
    assert low.value == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(KeyError):
        high.start("bell")


def test_refined_never_worse_than_initial() -> None:
    """Test that refinement keeps the start when descent does not improve it."""
    family = eigen_family(DensityOperator.maximally_mixed((2, 2)))
    config = OptimizerConfig(restarts=3, refine_iters=5)
    result = optimize(_dephasing(3), family, "max", config)
    for record in result.starts:
        assert record.refined >= record.initial
    assert result.value == max(record.refined for record in result.starts)
    assert _dephasing(3)(result.optimal_measurement) == result.value


def test_more_restarts_never_lower() -> None:
    """Test that extra restarts only add starts."""
    family = eigen_family(DensityOperator.maximally_mixed((2, 2)))
    few = optimize(
        _dephasing(4), family, "max", OptimizerConfig(restarts=2, refine_iters=5)
    )
    many = optimize(
        _dephasing(4), family, "max", OptimizerConfig(restarts=5, refine_iters=5)
    )
    assert many.starts[: len(few.starts)] == few.starts
    assert many.value >= few.value


def test_deterministic_across_workers() -> None:
    """Test that threaded starts give the same result as serial ones."""
    family = eigen_family(DensityOperator.maximally_mixed((2, 2)))
    config = OptimizerConfig(restarts=3, refine_iters=5, seed=11)
    serial = optimize(_dephasing(5), family, "max", config)
    threaded = optimize(
        _dephasing(5), family, "max", dataclasses.replace(config, workers=3)
    )
    assert threaded.value == serial.value
    assert threaded.starts == serial.starts
    assert threaded.seed == 11

"""Tests for the nonbilocal measure, its closed forms and its bounds."""

import numpy as np
import pytest

from nonbilocality.config import OptimizerConfig
from nonbilocality.exceptions import (
    DegenerateMarginalError,
    DimensionCapError,
    DimensionMismatchError,
)
from nonbilocality.hilbert import (
    DensityOperator,
    Ket,
    ket_to_density,
    local_unitary,
    random_ket,
    random_state,
    random_unitary,
    swap_factors,
    tensor,
)
from nonbilocality.measurements import ProjectiveMeasurement
from nonbilocality.nonbilocal import (
    BilocalInput,
    bound_report,
    bound_thm3,
    bound_thm4,
    nonbilocal,
    nonbilocal_pure,
    pair_disturbance,
    product_step,
    thm5_closed,
    verify_thm1,
)
from nonbilocality.optimizer import EIGEN_LABEL
from nonbilocality.state_spec import BUILTINS

BELL_VALUE = 5 / 12


def _ket(name: str) -> Ket:
    state = BUILTINS[name]()
    assert isinstance(state, Ket)
    return state


def _pure_pair(left: Ket, right: Ket) -> BilocalInput:
    return BilocalInput(ket_to_density(left), ket_to_density(right))


def _random_pair(seed: int, dims_cd: tuple[int, int] = (2, 2)) -> BilocalInput:
    rng = np.random.default_rng(seed)
    return BilocalInput(
        random_state((2, 2), seed=rng), random_state(dims_cd, seed=rng)
    )


@pytest.mark.parametrize(
    ("left", "right", "expected"),
    [
        ("ket00", "bell_phi_plus", 0.5),
        ("bell_phi_plus", "bell_phi_plus", 0.75),
        ("bell_psi_minus", "bell_phi_minus", 0.75),
        ("ket00", "ket00", 0.0),
    ],
)
def test_pure_examples(
    left: str, right: str, expected: float, config: OptimizerConfig
) -> None:
    """Test the pure-state examples against the Schmidt closed form."""
    closed = nonbilocal_pure(_ket(left), _ket(right))
    assert closed == pytest.approx(expected, abs=1e-12)
    result = nonbilocal(_pure_pair(_ket(left), _ket(right)), config)
    assert result.value == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("dims_cd", [(2, 2), (2, 3)])
def test_pure_closed_form_matches_optimizer(
    seed: int, dims_cd: tuple[int, int], config: OptimizerConfig
) -> None:
    """Test the Schmidt closed form on random pure pairs."""
    rng = np.random.default_rng(seed)
    psi_ab = random_ket((2, 2), seed=rng)
    psi_cd = random_ket(dims_cd, seed=rng)
    numeric = nonbilocal(_pure_pair(psi_ab, psi_cd), config).value
    assert abs(nonbilocal_pure(psi_ab, psi_cd) - numeric) < 1e-5


@pytest.mark.slow
@pytest.mark.parametrize("dims_cd", [(2, 2), (2, 3)])
def test_pure_closed_form_full_sweep(
    dims_cd: tuple[int, int], config: OptimizerConfig
) -> None:
    """Test the Schmidt closed form on fifty random pure pairs."""
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        psi_ab = random_ket((2, 2), seed=rng)
        psi_cd = random_ket(dims_cd, seed=rng)
        numeric = nonbilocal(_pure_pair(psi_ab, psi_cd), config).value
        assert abs(nonbilocal_pure(psi_ab, psi_cd) - numeric) < 1e-5


def test_nonbilocal_pure_needs_two_factors() -> None:
    """Test that the closed form needs bipartite kets."""
    with pytest.raises(DimensionMismatchError):
        nonbilocal_pure(random_ket((2, 2, 2), seed=0), _ket("ket00"))


def test_product_inputs_are_zero(config: OptimizerConfig) -> None:
    """Test that product inputs with nondegenerate marginals give zero."""
    rng = np.random.default_rng(4)
    pair = BilocalInput(
        tensor(random_state(2, seed=rng), random_state(2, seed=rng)),
        tensor(random_state(2, seed=rng), random_state(3, seed=rng)),
    )
    assert nonbilocal(pair, config).value == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_local_unitary_invariance(seed: int, config: OptimizerConfig) -> None:
    """Test that local unitaries on all four factors leave the value unchanged."""
    pair = _random_pair(seed)
    rng = np.random.default_rng(100 + seed)
    rotated = BilocalInput(
        local_unitary(
            pair.rho_ab, [random_unitary(2, seed=rng), random_unitary(2, seed=rng)]
        ),
        local_unitary(
            pair.rho_cd, [random_unitary(2, seed=rng), random_unitary(2, seed=rng)]
        ),
    )
    assert nonbilocal(rotated, config).value == pytest.approx(
        nonbilocal(pair, config).value, abs=1e-7
    )


def test_superactivation(
    example4_state: DensityOperator, config: OptimizerConfig
) -> None:
    """Test that two classically correlated inputs reach 3/4 together."""
    pair = BilocalInput(example4_state, example4_state)
    result = nonbilocal(pair, config)
    assert result.start(EIGEN_LABEL).initial == pytest.approx(0.0, abs=1e-12)
    assert result.start("hadamard").initial == pytest.approx(0.75, abs=1e-12)
    assert result.value >= 0.75 - 1e-9
    assert result.value <= bound_thm3(pair) + 1e-7


def test_example3_self_pair(
    example3_state: DensityOperator, config: OptimizerConfig
) -> None:
    """Test the Bell-basis value and the inequality for the singlet complement."""
    pair = BilocalInput(swap_factors(example3_state), example3_state)
    bell = ProjectiveMeasurement.from_basis(
        (1, 2),
        np.array(
            [[1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1], [1, -1, 0, 0]]
        )
        / np.sqrt(2),
    )
    assert pair_disturbance(pair, bell) == pytest.approx(BELL_VALUE, abs=1e-12)
    check = verify_thm1(example3_state, config)
    assert check.lhs >= BELL_VALUE - 1e-9
    assert check.rhs == pytest.approx(1 / 6, abs=1e-9)
    assert check.holds
    assert check.margin > 0
    assert bound_thm3(pair) >= check.lhs - 1e-7


@pytest.mark.parametrize("seed", range(5))
def test_thm1_random_states(seed: int, config: OptimizerConfig) -> None:
    """Test the pair measure against affinity MIN on random states."""
    check = verify_thm1(random_state((2, 2), seed=seed), config)
    assert check.holds


def test_thm1_product_state(config: OptimizerConfig) -> None:
    """Test that both sides vanish on a product state."""
    rho = tensor(random_state(2, seed=1), random_state(2, seed=2))
    check = verify_thm1(rho, config)
    assert check.lhs == pytest.approx(0.0, abs=1e-8)
    assert check.rhs == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_product_step(seed: int) -> None:
    """Test that a doubled measurement retains the square of the affinity."""
    rng = np.random.default_rng(seed)
    rho = random_state((2, 3), seed=rng)
    meas = ProjectiveMeasurement.from_basis((0,), random_unitary(2, seed=rng))
    pair_value, single_value = product_step(rho, meas)
    assert pair_value == pytest.approx(1 - (1 - single_value) ** 2, abs=1e-10)
    assert pair_value >= single_value - 1e-12


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("dims_cd", [(2, 2), (2, 3)])
def test_bounds_hold(
    seed: int, dims_cd: tuple[int, int], config: OptimizerConfig
) -> None:
    """Test that both upper bounds dominate the optimized value."""
    pair = _random_pair(seed, dims_cd)
    value = nonbilocal(pair, config).value
    assert value <= bound_thm3(pair) + 1e-7
    assert value <= bound_thm4(pair) + 1e-7


def test_bound_thm4_needs_nondegenerate_b(example4_state: DensityOperator) -> None:
    """Test that a maximally mixed rho^b is rejected."""
    with pytest.raises(DegenerateMarginalError):
        bound_thm4(BilocalInput(example4_state, example4_state))


@pytest.mark.parametrize("seed", range(5))
def test_thm5_closed(seed: int, config: OptimizerConfig) -> None:
    """Test the qubit closed form against direct minimization."""
    pair = _random_pair(seed)
    result = thm5_closed(pair)
    assert result.direct_min_value == pytest.approx(result.corrected_value, abs=1e-8)
    assert result.invariant_value <= result.direct_min_value + 1e-10
    assert result.direct_min_value <= bound_thm4(pair) + 1e-7
    assert result.invariant_value == pytest.approx(
        nonbilocal(pair, config).value, abs=1e-9
    )
    assert result.discrepancy >= 0


def test_thm5_preconditions(bell: DensityOperator) -> None:
    """Test the qubit and nondegeneracy requirements."""
    with pytest.raises(DimensionMismatchError):
        thm5_closed(_random_pair(0, (3, 2)))
    with pytest.raises(DegenerateMarginalError):
        thm5_closed(BilocalInput(random_state((2, 2), seed=0), bell))


def test_bound_report(config: OptimizerConfig) -> None:
    """Test that the report collects every applicable bound."""
    report = bound_report(_random_pair(3), config)
    assert report.ordering_ok
    assert report.thm4_upper is not None
    assert report.thm5 is not None
    assert report.thm5_closed == report.thm5.printed_value
    assert report.result is not None
    assert report.result.value == report.value_numeric
    assert report.value_numeric <= report.thm3_upper + 1e-7


def test_bound_report_degenerate(
    example4_state: DensityOperator, config: OptimizerConfig
) -> None:
    """Test that degenerate marginals skip the nondegenerate bounds."""
    report = bound_report(BilocalInput(example4_state, example4_state), config)
    assert report.thm4_upper is None
    assert report.thm5 is None
    assert report.thm5_closed is None
    assert report.ordering_ok


def test_input_validation() -> None:
    """Test the bipartite and dimension cap checks."""
    with pytest.raises(DimensionMismatchError):
        BilocalInput(random_state((2, 2, 2), seed=0), random_state((2, 2), seed=1))
    large = DensityOperator.maximally_mixed((8, 9))
    with pytest.raises(DimensionCapError):
        BilocalInput(large, large)


def test_joint_root_and_marginal() -> None:
    """Test the cached products of the pair."""
    pair = _random_pair(2, (2, 3))
    assert pair.dims == (2, 2, 2, 3)
    assert pair.joint.dims == pair.dims
    np.testing.assert_allclose(
        pair.joint_root @ pair.joint_root, pair.joint.matrix, atol=1e-10
    )
    assert pair.marginal_bc.dims == (2, 2)
    assert pair.family().target == (1, 2)

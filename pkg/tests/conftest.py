"""Fixtures for the nonbilocality tests."""

import numpy as np
import pytest

from nonbilocality.config import OptimizerConfig
from nonbilocality.const import ENV_SEED
from nonbilocality.hilbert import DensityOperator, Ket
from nonbilocality.state_spec import BUILTINS


@pytest.fixture(autouse=True)
def clear_seed_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep a seed exported in the shell from leaking into the tests."""
    monkeypatch.delenv(ENV_SEED, raising=False)


@pytest.fixture(name="config")
def mock_config() -> OptimizerConfig:
    """Fixture for small optimizer settings."""
    return OptimizerConfig(restarts=2, refine_iters=30)


@pytest.fixture(name="rng")
def mock_rng() -> np.random.Generator:
    """Fixture for a seeded random generator."""
    return np.random.default_rng(20240611)


def builtin_density(name: str) -> DensityOperator:
    """Return a builtin state as a density operator."""
    state = BUILTINS[name]()
    return DensityOperator.from_ket(state) if isinstance(state, Ket) else state


def builtin_ket(name: str) -> Ket:
    """Return a builtin pure state."""
    state = BUILTINS[name]()
    assert isinstance(state, Ket)
    return state


@pytest.fixture(name="bell")
def mock_bell() -> DensityOperator:
    """Fixture for |Phi+><Phi+|."""
    return builtin_density("bell_phi_plus")


@pytest.fixture(name="example3_state")
def mock_example3_state() -> DensityOperator:
    """Fixture for the mixture of the three Bell states orthogonal to the singlet."""
    return builtin_density("example3_mix")


@pytest.fixture(name="example4_state")
def mock_example4_state() -> DensityOperator:
    """Fixture for (|00><00| + |11><11|) / 2."""
    return builtin_density("example4_classical")

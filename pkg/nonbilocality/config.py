"""Optimizer configuration for nonbilocality."""

from __future__ import annotations

import logging
import os
from collections.abc import Mapping
from dataclasses import asdict, dataclass
from typing import Any

import voluptuous as vol

from .const import (
    CONF_REFINE_ITERS,
    CONF_RESTARTS,
    CONF_SEED,
    CONF_STEP_TOLERANCE,
    CONF_STRUCTURED_SEEDS,
    CONF_VALUE_TOLERANCE,
    CONF_WORKERS,
    DEFAULT_REFINE_ITERS,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_STEP_TOLERANCE,
    DEFAULT_VALUE_TOLERANCE,
    DEFAULT_WORKERS,
    ENV_SEED,
)
from .exceptions import InvalidConfigError

_LOGGER = logging.getLogger(__name__)

_POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
_POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))


def _options_schema(seed: int) -> vol.Schema:
    """Return the schema for optimizer options with the given default seed."""
    return vol.Schema(
        {
            vol.Required(CONF_RESTARTS, default=DEFAULT_RESTARTS): _POSITIVE_INT,
            vol.Required(
                CONF_REFINE_ITERS, default=DEFAULT_REFINE_ITERS
            ): _POSITIVE_INT,
            vol.Required(
                CONF_STEP_TOLERANCE, default=DEFAULT_STEP_TOLERANCE
            ): _POSITIVE_FLOAT,
            vol.Required(
                CONF_VALUE_TOLERANCE, default=DEFAULT_VALUE_TOLERANCE
            ): _POSITIVE_FLOAT,
            vol.Required(CONF_SEED, default=seed): vol.Coerce(int),
            vol.Required(CONF_STRUCTURED_SEEDS, default=True): vol.Boolean(),
            vol.Required(CONF_WORKERS, default=DEFAULT_WORKERS): _POSITIVE_INT,
        }
    )


OPTIONS_SCHEMA = _options_schema(DEFAULT_SEED)


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the multi-start measurement optimizer."""

    restarts: int = DEFAULT_RESTARTS
    refine_iters: int = DEFAULT_REFINE_ITERS
    step_tolerance: float = DEFAULT_STEP_TOLERANCE
    value_tolerance: float = DEFAULT_VALUE_TOLERANCE
    seed: int = DEFAULT_SEED
    structured_seeds: bool = True
    workers: int = DEFAULT_WORKERS

    def __post_init__(self) -> None:
        """Validate the fields against the options schema."""
        try:
            OPTIONS_SCHEMA(asdict(self))
        except vol.Invalid as err:
            raise InvalidConfigError(f"Invalid optimizer config: {err}") from err

    def as_dict(self) -> dict[str, Any]:
        """Return the options as a plain mapping for reports."""
        return asdict(self)


def seed_from_env(environ: Mapping[str, str] | None = None) -> int:
    """Return the default seed, taken from NONBILOCAL_SEED when set."""
    environ = os.environ if environ is None else environ
    if (value := environ.get(ENV_SEED)) is None:
        return DEFAULT_SEED
    try:
        seed = int(value)
    except ValueError as err:
        raise InvalidConfigError(f"{ENV_SEED} must be an integer: {value!r}") from err
    _LOGGER.info("Using seed %s from %s", seed, ENV_SEED)
    return seed


def optimizer_config(
    options: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> OptimizerConfig:
    """Validate user options, fill defaults and build an OptimizerConfig.

    Options set to None are treated as missing, so unset CLI flags fall back
    to the defaults.
    """
    provided = {k: v for k, v in (options or {}).items() if v is not None}
    schema = _options_schema(seed_from_env(environ))
    try:
        validated = schema(provided)
    except vol.Invalid as err:
        raise InvalidConfigError(f"Invalid optimizer options: {err}") from err
    return OptimizerConfig(**validated)

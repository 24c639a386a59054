"""Multi-start optimization over invariant measurement families."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .config import OptimizerConfig
from .measurements import (
    InvariantMeasurementFamily,
    ProjectiveMeasurement,
    haar_anchors,
    product_eigenbasis,
    structured_bases,
)
from .types import ComplexMatrix, Mode, Objective

_LOGGER = logging.getLogger(__name__)

EIGEN_LABEL = "eigen"


@dataclass(frozen=True)
class StartRecord:
    """Objective values before and after refining one start."""

    label: str
    initial: float
    refined: float
    evaluations: int


@dataclass(frozen=True)
class MeasureResult:
    """Best value found, its measurement, and per-start diagnostics."""

    value: float
    optimal_measurement: ProjectiveMeasurement
    starts: tuple[StartRecord, ...]
    mode: Mode
    seed: int
    restarts: int

    @property
    def best_start(self) -> StartRecord:
        """Return the start that produced the reported value."""
        label = self.optimal_measurement.label
        return next(s for s in self.starts if s.label == label)

    def start(self, label: str) -> StartRecord:
        """Return the diagnostics of the start with this label."""
        for record in self.starts:
            if record.label == label:
                return record
        raise KeyError(label)


@dataclass(frozen=True)
class _Start:
    label: str
    anchors: Sequence[ComplexMatrix] | None


@dataclass(frozen=True)
class _Outcome:
    record: StartRecord
    measurement: ProjectiveMeasurement
    value: float


def _starts(
    family: InvariantMeasurementFamily, config: OptimizerConfig
) -> list[_Start]:
    """Return the eigenbasis start, admissible structured starts, then Haar starts."""
    starts = [_Start(EIGEN_LABEL, None)]
    if config.structured_seeds:
        candidates = structured_bases(family.marginal.dims)
        if len(family.marginal.dims) > 1:
            product = product_eigenbasis(family.marginal)
            candidates.insert(0, ("product-eigen", product))
        for label, vectors in candidates:
            if (anchors := family.anchors_for(vectors)) is None:
                _LOGGER.debug("Skipping %s start, not block compatible", label)
                continue
            starts.append(_Start(label, anchors))
    # Spawned children depend only on their index, so more restarts only add
    # starts and never change the existing ones.
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    starts.extend(
        _Start(f"haar-{index}", haar_anchors(family, child))
        for index, child in enumerate(children)
    )
    return starts


def _refine(
    objective: Objective,
    family: InvariantMeasurementFamily,
    mode: Mode,
    config: OptimizerConfig,
    start: _Start,
) -> _Outcome:
    """Run Powell's method from the start and re-evaluate the final point."""
    sign = -1.0 if mode == "max" else 1.0
    evaluations = 0

    def loss(params: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        # Trial bases are unitary by construction; the final point is checked.
        trial = family.measurement(params, start.anchors, checked=False)
        return sign * objective(trial)

    origin = np.zeros(family.parameter_count)
    initial = objective(family.measurement(origin, start.anchors, start.label))
    result = minimize(
        loss,
        origin,
        method="Powell",
        options={
            "maxiter": config.refine_iters,
            "xtol": config.step_tolerance,
            "ftol": config.value_tolerance,
        },
    )
    params = result.x if sign * result.fun < sign * initial else origin
    measurement = family.measurement(params, start.anchors, start.label)
    value = objective(measurement)
    record = StartRecord(start.label, initial, value, evaluations + 2)
    _LOGGER.debug(
        "Start %s: initial %.12g refined %.12g after %d evaluations",
        start.label,
        initial,
        value,
        record.evaluations,
    )
    return _Outcome(record, measurement, value)


def optimize(
    objective: Objective,
    family: InvariantMeasurementFamily,
    mode: Mode,
    config: OptimizerConfig,
) -> MeasureResult:
    """Maximize or minimize objective over the family.

    Starts run in a fixed order: the eigenbasis, structured bases that belong
    to the family, then ``config.restarts`` Haar-random block unitaries. Each
    start is refined with derivative-free descent on the block parameters.
    The first start reaching the best value wins ties, so the result does not
    depend on how starts are scheduled across workers. For ``max`` the value
    is a lower bound on the true supremum.
    """
    if family.is_point:
        measurement = family.measurement(
            np.zeros(family.parameter_count), label=EIGEN_LABEL
        )
        value = objective(measurement)
        record = StartRecord(EIGEN_LABEL, value, value, 1)
        return MeasureResult(value, measurement, (record,), mode, config.seed, 0)

    starts = _starts(family, config)

    def run(start: _Start) -> _Outcome:
        return _refine(objective, family, mode, config, start)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(executor.map(run, starts))
    else:
        outcomes = [run(start) for start in starts]

    best = outcomes[0]
    for outcome in outcomes[1:]:
        better = (
            outcome.value > best.value
            if mode == "max"
            else outcome.value < best.value
        )
        if better:
            best = outcome
    return MeasureResult(
        value=best.value,
        optimal_measurement=best.measurement,
        starts=tuple(outcome.record for outcome in outcomes),
        mode=mode,
        seed=config.seed,
        restarts=config.restarts,
    )

"""Worked examples and randomized theorem sweeps."""

from __future__ import annotations

import csv
import dataclasses
import functools
import hashlib
import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np

from .config import OptimizerConfig
from .const import BOUND_SLACK, PRODUCT_ZERO_TOLERANCE, THEOREM1_SLACK
from .exceptions import DimensionMismatchError
from .hilbert import DensityOperator, Ket, random_state, swap_factors, tensor
from .measurements import ProjectiveMeasurement, structured_bases
from .measures import affinity_min
from .nonbilocal import (
    MEASURED_PAIR,
    BilocalInput,
    bound_thm3,
    bound_thm4,
    nonbilocal,
    nonbilocal_pure,
    pair_disturbance,
    verify_thm1,
)
from .optimizer import EIGEN_LABEL
from .report import RunReport, result_payload, round_sig
from .state_spec import BUILTINS
from .types import Dims

_LOGGER = logging.getLogger(__name__)

CSV_COLUMNS = ("trial", "input_hash", "lhs", "rhs", "margin", "passed")

_VALUE_TOLERANCE = 1e-6
_SEED_TOLERANCE = 1e-9


class SweepCheck(StrEnum):
    """Relations a sweep can check on random inputs."""

    THM1 = "thm1"
    THM3 = "thm3"
    THM4 = "thm4"
    PROPS = "props"


@dataclass(frozen=True)
class SweepRow:
    """One trial of a sweep."""

    trial: int
    input_hash: str
    lhs: float
    rhs: float
    margin: float
    passed: bool

    def as_csv(self) -> dict[str, str]:
        """Return the row formatted for CSV output."""
        return {
            "trial": str(self.trial),
            "input_hash": self.input_hash,
            "lhs": repr(round_sig(self.lhs)),
            "rhs": repr(round_sig(self.rhs)),
            "margin": repr(round_sig(self.margin)),
            "passed": str(self.passed).lower(),
        }


def _state(name: str) -> DensityOperator:
    state = BUILTINS[name]()
    return DensityOperator.from_ket(state) if isinstance(state, Ket) else state


def _ket(name: str) -> Ket:
    state = BUILTINS[name]()
    assert isinstance(state, Ket)
    return state


def _structured_measurement(label: str) -> ProjectiveMeasurement:
    """Return a structured two-qubit basis as a measurement on (b, c)."""
    vectors = dict(structured_bases((2, 2)))[label]
    return ProjectiveMeasurement.from_basis(MEASURED_PAIR, vectors, label)


def _pure_example(
    report: RunReport,
    config: OptimizerConfig,
    name: str,
    pair_names: tuple[str, str],
    expected: float,
) -> None:
    left, right = pair_names
    pair = BilocalInput(_state(left), _state(right))
    closed = nonbilocal_pure(_ket(left), _ket(right))
    result = nonbilocal(pair, config)
    report.values[name] = {"numeric": result.value, "thm2": closed}
    report.diagnostics[name] = result_payload(result)
    for path, value in (("numeric", result.value), ("thm2", closed)):
        report.check(
            f"{name}.{path}",
            f"{expected} +/- {_VALUE_TOLERANCE}",
            value,
            abs(value - expected) < _VALUE_TOLERANCE,
        )


def _example3(report: RunReport, config: OptimizerConfig) -> None:
    rho = _state("example3_mix")
    minimum = affinity_min(rho, config)
    pair = BilocalInput(swap_factors(rho), rho)
    result = nonbilocal(pair, config)
    bell = pair_disturbance(pair, _structured_measurement("bell"))
    report.values["example3"] = {
        "affinity_min": minimum.value,
        "pair_numeric": result.value,
        "pair_bell": bell,
    }
    report.diagnostics["example3"] = {
        "affinity_min": result_payload(minimum),
        "pair": result_payload(result),
    }
    report.check(
        "example3.affinity_min",
        f"1/6 +/- {_VALUE_TOLERANCE}",
        minimum.value,
        abs(minimum.value - 1 / 6) < _VALUE_TOLERANCE,
    )
    report.check(
        "example3.pair_numeric",
        f">= 5/12 - {_VALUE_TOLERANCE}",
        result.value,
        result.value >= 5 / 12 - _VALUE_TOLERANCE,
    )
    report.check(
        "example3.pair_bell",
        f"5/12 +/- {_SEED_TOLERANCE}",
        bell,
        abs(bell - 5 / 12) < _SEED_TOLERANCE,
    )
    report.check(
        "example3.thm1",
        ">= affinity_min",
        result.value - minimum.value,
        result.value >= minimum.value - THEOREM1_SLACK,
    )


def _example4(report: RunReport, config: OptimizerConfig) -> None:
    rho = _state("example4_classical")
    pair = BilocalInput(rho, rho)
    result = nonbilocal(pair, config)
    hadamard = pair_disturbance(pair, _structured_measurement("hadamard"))
    minimum = affinity_min(rho, config)
    eigen_start = minimum.start(EIGEN_LABEL).initial
    report.values["example4"] = {
        "pair_numeric": result.value,
        "pair_hadamard": hadamard,
        "pair_eigen_start": result.start(EIGEN_LABEL).initial,
        "affinity_min": minimum.value,
        "affinity_min_eigen_start": eigen_start,
    }
    report.diagnostics["example4"] = {
        "pair": result_payload(result),
        "affinity_min": result_payload(minimum),
    }
    report.check(
        "example4.pair_numeric",
        f">= 3/4 - {_VALUE_TOLERANCE}",
        result.value,
        result.value >= 0.75 - _VALUE_TOLERANCE,
    )
    report.check(
        "example4.pair_hadamard",
        f"3/4 +/- {_SEED_TOLERANCE}",
        hadamard,
        abs(hadamard - 0.75) < _SEED_TOLERANCE,
    )
    report.check(
        "example4.affinity_min_eigen_start",
        f"0 +/- {PRODUCT_ZERO_TOLERANCE}",
        eigen_start,
        abs(eigen_start) < PRODUCT_ZERO_TOLERANCE,
    )


type ExampleRunner = Callable[[RunReport, OptimizerConfig], None]

EXAMPLES: dict[str, ExampleRunner] = {
    "example1": functools.partial(
        _pure_example,
        name="example1",
        pair_names=("ket00", "bell_phi_plus"),
        expected=0.5,
    ),
    "example2": functools.partial(
        _pure_example,
        name="example2",
        pair_names=("bell_phi_plus", "bell_phi_plus"),
        expected=0.75,
    ),
    "example3": _example3,
    "example4": _example4,
}


def reproduce_examples(config: OptimizerConfig) -> RunReport:
    """Run the four worked examples and record every expectation."""
    start = time.perf_counter()
    report = RunReport(
        command="reproduce",
        config=config.as_dict(),
        seed=config.seed,
        inputs={
            "example1": ["builtin:ket00", "builtin:bell_phi_plus"],
            "example2": ["builtin:bell_phi_plus", "builtin:bell_phi_plus"],
            "example3": ["builtin:example3_mix"],
            "example4": [
                "builtin:example4_classical",
                "builtin:example4_classical",
            ],
        },
    )
    for name, run in EXAMPLES.items():
        begin = time.perf_counter()
        run(report, config)
        _LOGGER.info("%s finished in %.1f s", name, time.perf_counter() - begin)
    report.wall_time = time.perf_counter() - start
    return report


def parse_dims(spec: str) -> tuple[Dims, Dims]:
    """Parse ``MxN`` or ``MxN,UxV`` into the dims of the two inputs."""
    parts = [part.strip() for part in spec.split(",") if part.strip()]
    if len(parts) not in (1, 2):
        raise DimensionMismatchError(f"Expected MxN or MxN,UxV, got {spec!r}")
    try:
        parsed = [tuple(int(d) for d in part.lower().split("x")) for part in parts]
    except ValueError as err:
        raise DimensionMismatchError(f"Invalid dims {spec!r}") from err
    for dims in parsed:
        if len(dims) != 2 or min(dims) < 2:
            raise DimensionMismatchError(
                f"Sweep inputs are bipartite with factors >= 2, got {dims}"
            )
    return parsed[0], parsed[-1]


def _input_hash(*states: DensityOperator) -> str:
    """Return a short digest of the input matrices at report precision."""
    digest = hashlib.sha256()
    for state in states:
        digest.update(repr(state.dims).encode())
        digest.update(np.round(state.matrix, 12).tobytes())
    return digest.hexdigest()[:16]


def _product_state(dims: Dims, rng: np.random.Generator) -> DensityOperator:
    """Return rho^x (x) rho^y with full-rank random factors."""
    return tensor(random_state(dims[0], seed=rng), random_state(dims[1], seed=rng))


def _random_pair(
    rng: np.random.Generator, dims_ab: Dims, dims_cd: Dims
) -> BilocalInput:
    """Return a pair of full-rank random states."""
    return BilocalInput(
        random_state(dims_ab, seed=rng), random_state(dims_cd, seed=rng)
    )


type _Trial = Callable[
    [np.random.Generator, Dims, Dims, OptimizerConfig],
    tuple[tuple[DensityOperator, ...], float, float],
]


def _thm1_trial(
    rng: np.random.Generator, dims_ab: Dims, _: Dims, config: OptimizerConfig
) -> tuple[tuple[DensityOperator, ...], float, float]:
    rho = random_state(dims_ab, seed=rng)
    check = verify_thm1(rho, config)
    return (rho,), check.lhs, check.rhs


def _thm3_trial(
    rng: np.random.Generator, dims_ab: Dims, dims_cd: Dims, config: OptimizerConfig
) -> tuple[tuple[DensityOperator, ...], float, float]:
    pair = _random_pair(rng, dims_ab, dims_cd)
    value = nonbilocal(pair, config).value
    return (pair.rho_ab, pair.rho_cd), value, bound_thm3(pair)


def _thm4_trial(
    rng: np.random.Generator, dims_ab: Dims, dims_cd: Dims, config: OptimizerConfig
) -> tuple[tuple[DensityOperator, ...], float, float]:
    pair = _random_pair(rng, dims_ab, dims_cd)
    value = nonbilocal(pair, config).value
    return (pair.rho_ab, pair.rho_cd), value, bound_thm4(pair)


def _props_trial(
    rng: np.random.Generator, dims_ab: Dims, dims_cd: Dims, config: OptimizerConfig
) -> tuple[tuple[DensityOperator, ...], float, float]:
    pair = BilocalInput(_product_state(dims_ab, rng), _product_state(dims_cd, rng))
    return (pair.rho_ab, pair.rho_cd), nonbilocal(pair, config).value, 0.0


_TRIALS: dict[SweepCheck, _Trial] = {
    SweepCheck.THM1: _thm1_trial,
    SweepCheck.THM3: _thm3_trial,
    SweepCheck.THM4: _thm4_trial,
    SweepCheck.PROPS: _props_trial,
}


def _row(
    check: SweepCheck,
    trial: int,
    states: tuple[DensityOperator, ...],
    lhs: float,
    rhs: float,
) -> SweepRow:
    """Turn the two sides of a relation into a row with a signed margin."""
    match check:
        case SweepCheck.THM1:
            margin, passed = lhs - rhs, lhs >= rhs - THEOREM1_SLACK
        case SweepCheck.PROPS:
            margin = PRODUCT_ZERO_TOLERANCE - lhs
            passed = 0.0 <= lhs < PRODUCT_ZERO_TOLERANCE
        case _:
            margin, passed = rhs - lhs, lhs <= rhs + BOUND_SLACK
    return SweepRow(trial, _input_hash(*states), lhs, rhs, margin, passed)


def run_sweep(
    check: SweepCheck,
    count: int,
    dims: tuple[Dims, Dims],
    config: OptimizerConfig,
) -> tuple[RunReport, list[SweepRow]]:
    """Evaluate a relation on ``count`` seeded random inputs.

    Trial i draws its inputs from the i-th child of the config seed, so rows
    are reproducible individually and ordered by trial index even when trials
    run on several workers.
    """
    if count < 1:
        raise ValueError(f"Sweep count must be positive, got {count}")
    start = time.perf_counter()
    trial_fn = _TRIALS[check]
    children = np.random.SeedSequence(config.seed).spawn(count)
    dims_ab, dims_cd = dims
    inner = dataclasses.replace(config, workers=1)

    def run(trial: int) -> SweepRow:
        rng = np.random.default_rng(children[trial])
        states, lhs, rhs = trial_fn(rng, dims_ab, dims_cd, inner)
        row = _row(check, trial, states, lhs, rhs)
        if (trial + 1) % 10 == 0:
            _LOGGER.info("Sweep %s: %d/%d trials done", check, trial + 1, count)
        return row

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as executor:
            rows = list(executor.map(run, range(count)))
    else:
        rows = [run(trial) for trial in range(count)]

    pass_rate = sum(row.passed for row in rows) / count
    _LOGGER.info("Sweep %s pass rate %.4f over %d trials", check, pass_rate, count)
    report = RunReport(
        command="sweep",
        inputs={"check": str(check), "count": count, "dims": [dims_ab, dims_cd]},
        values={
            "pass_rate": pass_rate,
            "min_margin": min(row.margin for row in rows),
        },
        config=config.as_dict(),
        seed=config.seed,
    )
    report.check(
        f"sweep.{check}", "pass rate 1.0", pass_rate, all(r.passed for r in rows)
    )
    report.wall_time = time.perf_counter() - start
    return report, rows


def write_csv(rows: list[SweepRow], path: Path) -> None:
    """Write sweep rows with the fixed column layout."""
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(row.as_csv() for row in rows)

"""Tests for the worked examples and the randomized sweeps."""

import csv
import dataclasses
import time
from pathlib import Path

import pytest
from syrupy.assertion import SnapshotAssertion

from nonbilocality.config import OptimizerConfig
from nonbilocality.examples import (
    CSV_COLUMNS,
    EXAMPLES,
    SweepCheck,
    parse_dims,
    reproduce_examples,
    run_sweep,
    write_csv,
)
from nonbilocality.exceptions import DimensionMismatchError
from nonbilocality.report import RunReport


@pytest.fixture(name="quick_config")
def mock_quick_config() -> OptimizerConfig:
    """Fixture for minimal optimizer settings."""
    return OptimizerConfig(restarts=1, refine_iters=10)


def test_reproduce_examples(quick_config: OptimizerConfig) -> None:
    """Test that every example expectation passes."""
    report = reproduce_examples(quick_config)
    failed = [record.name for record in report.assertions if not record.passed]
    assert not failed
    assert report.passed
    assert report.values["example1"]["thm2"] == pytest.approx(0.5)
    assert report.values["example2"]["thm2"] == pytest.approx(0.75)
    assert report.values["example3"]["pair_bell"] == pytest.approx(5 / 12)
    assert report.values["example4"]["pair_hadamard"] == pytest.approx(0.75)
    assert report.values["example4"]["affinity_min"] == pytest.approx(0.5)
    assert report.values["example4"]["affinity_min_eigen_start"] == pytest.approx(
        0.0, abs=1e-12
    )
    assert {record.name for record in report.assertions} >= {
        "example1.numeric",
        "example1.thm2",
        "example2.numeric",
        "example3.affinity_min",
        "example3.thm1",
        "example4.pair_numeric",
    }


def test_reproduce_is_reproducible(quick_config: OptimizerConfig) -> None:
    """Test that a fixed seed gives the same values to 12 significant digits."""
    first = reproduce_examples(quick_config).to_dict()
    second = reproduce_examples(quick_config).to_dict()
    assert first["values"] == second["values"]
    assert first["assertions"] == second["assertions"]


def test_reproduce_without_structured_seeds(quick_config: OptimizerConfig) -> None:
    """Test that fixed-basis checks do not depend on the optimizer seeds."""
    config = dataclasses.replace(quick_config, structured_seeds=False)
    report = reproduce_examples(config)
    assert report.values["example3"]["pair_bell"] == pytest.approx(5 / 12)
    assert report.values["example4"]["pair_hadamard"] == pytest.approx(0.75)
    assert report.config["structured_seeds"] is False


@pytest.mark.parametrize(
    ("spec", "expected"),
    [
        ("2x2", ((2, 2), (2, 2))),
        ("2x2,2x3", ((2, 2), (2, 3))),
        (" 3X2 , 2x2 ", ((3, 2), (2, 2))),
    ],
)
def test_parse_dims(spec: str, expected: tuple) -> None:
    """Test the sweep dimension syntax."""
    assert parse_dims(spec) == expected


@pytest.mark.parametrize("spec", ["2", "1x2", "2x2,2x2,2x2", "axb", "2x2x2", ""])
def test_parse_dims_invalid(spec: str) -> None:
    """Test malformed sweep dimensions."""
    with pytest.raises(DimensionMismatchError):
        parse_dims(spec)


@pytest.mark.parametrize(
    ("check", "dims"),
    [
        (SweepCheck.THM1, "2x2"),
        (SweepCheck.THM3, "2x2,2x3"),
        (SweepCheck.THM4, "2x2,2x2"),
        (SweepCheck.PROPS, "2x2"),
    ],
)
def test_sweep_passes(
    check: SweepCheck, dims: str, config: OptimizerConfig
) -> None:
    """Test a short sweep of every relation."""
    report, rows = run_sweep(check, 3, parse_dims(dims), config)
    assert report.passed
    assert report.values["pass_rate"] == 1.0
    assert [row.trial for row in rows] == [0, 1, 2]
    assert all(len(row.input_hash) == 16 for row in rows)
    assert report.values["min_margin"] == min(row.margin for row in rows)


def test_sweep_is_reproducible(config: OptimizerConfig) -> None:
    """Test that rows depend only on the seed, not on the worker count."""
    dims = parse_dims("2x2,2x2")
    _, serial = run_sweep(SweepCheck.THM3, 4, dims, config)
    _, again = run_sweep(SweepCheck.THM3, 4, dims, config)
    _, threaded = run_sweep(
        SweepCheck.THM3, 4, dims, dataclasses.replace(config, workers=2)
    )
    assert serial == again
    assert serial == threaded
    _, other = run_sweep(
        SweepCheck.THM3, 4, dims, dataclasses.replace(config, seed=8)
    )
    assert [row.input_hash for row in other] != [row.input_hash for row in serial]


def test_sweep_count_must_be_positive(config: OptimizerConfig) -> None:
    """Test that an empty sweep is rejected."""
    with pytest.raises(ValueError):
        run_sweep(SweepCheck.THM1, 0, parse_dims("2x2"), config)


def test_write_csv(
    tmp_path: Path, config: OptimizerConfig, snapshot: SnapshotAssertion
) -> None:
    """Test the CSV layout of sweep rows."""
    _, rows = run_sweep(SweepCheck.THM4, 2, parse_dims("2x2"), config)
    path = tmp_path / "rows.csv"
    write_csv(rows, path)
    with path.open(encoding="utf-8", newline="") as handle:
        records = list(csv.reader(handle))
    assert tuple(records[0]) == CSV_COLUMNS
    assert records[0] == snapshot
    assert len(records) == 3
    assert records[1][0] == "0"
    assert records[1][-1] == "true"
    assert float(records[1][4]) == pytest.approx(
        float(records[1][3]) - float(records[1][2]), abs=1e-11
    )


@pytest.mark.slow
def test_thm1_full_sweep() -> None:
    """Test the pair inequality on two hundred random two-qubit states."""
    report, _ = run_sweep(
        SweepCheck.THM1, 200, parse_dims("2x2"), OptimizerConfig(restarts=8)
    )
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("check", [SweepCheck.THM3, SweepCheck.THM4])
@pytest.mark.parametrize("dims", ["2x2,2x2", "2x2,2x3"])
def test_bounds_full_sweep(check: SweepCheck, dims: str) -> None:
    """Test both upper bounds on a hundred random pairs."""
    report, _ = run_sweep(check, 100, parse_dims(dims), OptimizerConfig(restarts=8))
    assert report.passed


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_example_runs_within_a_minute(name: str) -> None:
    """Test each worked example at the default optimizer settings."""
    report = RunReport(command="reproduce")
    start = time.perf_counter()
    EXAMPLES[name](report, OptimizerConfig())
    elapsed = time.perf_counter() - start
    assert report.passed
    assert elapsed < 60

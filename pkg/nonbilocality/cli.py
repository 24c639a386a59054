"""Command line interface for nonbilocality."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable, Sequence
from pathlib import Path

from .config import OptimizerConfig, optimizer_config
from .const import (
    CONF_REFINE_ITERS,
    CONF_RESTARTS,
    CONF_SEED,
    CONF_STEP_TOLERANCE,
    CONF_STRUCTURED_SEEDS,
    CONF_VALUE_TOLERANCE,
    CONF_WORKERS,
    ENV_SEED,
    EXIT_ASSERTION,
    EXIT_DIMENSION_CAP,
    EXIT_INPUT,
    EXIT_OK,
)
from .examples import (
    CSV_COLUMNS,
    SweepCheck,
    parse_dims,
    reproduce_examples,
    run_sweep,
    write_csv,
)
from .exceptions import DimensionCapError, NonbilocalError
from .hilbert import DensityOperator
from .measures import affinity_min, geometric_discord, hs_min
from .nonbilocal import BilocalInput, bound_report, nonbilocal_pure
from .optimizer import MeasureResult
from .report import RunReport, measurement_payload, result_payload
from .state_spec import builtin_catalogue, load_state_spec

_LOGGER = logging.getLogger(__name__)

MEASURES: dict[str, Callable[[DensityOperator, OptimizerConfig], MeasureResult]] = {
    "hs": hs_min,
    "gd": geometric_discord,
    "affinity": affinity_min,
}

_SWEEP_EPILOG = (
    "CSV columns: "
    + ", ".join(CSV_COLUMNS)
    + ". margin is positive when the checked relation holds with room to spare;"
    " floats carry 12 significant digits."
)


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    """Add flags shared by every command that runs the optimizer."""
    group = parser.add_argument_group("optimizer")
    group.add_argument("--restarts", dest=CONF_RESTARTS, type=int)
    group.add_argument("--refine-iters", dest=CONF_REFINE_ITERS, type=int)
    group.add_argument("--step-tolerance", dest=CONF_STEP_TOLERANCE, type=float)
    group.add_argument("--value-tolerance", dest=CONF_VALUE_TOLERANCE, type=float)
    group.add_argument(
        "--seed", dest=CONF_SEED, type=int, help=f"default: ${ENV_SEED} or 7"
    )
    group.add_argument(
        "--no-structured-seeds",
        dest=CONF_STRUCTURED_SEEDS,
        action="store_false",
        default=None,
        help="start only from the eigenbasis and Haar samples",
    )
    group.add_argument("--workers", dest=CONF_WORKERS, type=int)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser for the ``nonbilocal`` command."""
    parser = argparse.ArgumentParser(
        prog="nonbilocal",
        description="Measurement-induced nonlocality and nonbilocal measures.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v info, -vv debug"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    min_parser = commands.add_parser("min", help="bipartite measure of one state")
    min_parser.add_argument("state", help="state file or builtin:NAME")
    min_parser.add_argument("--measure", choices=sorted(MEASURES), default="affinity")
    _add_optimizer_flags(min_parser)

    pair_parser = commands.add_parser("pair", help="nonbilocal measure of two states")
    pair_parser.add_argument("state_ab", help="state file or builtin:NAME")
    pair_parser.add_argument("state_cd", help="state file or builtin:NAME")
    _add_optimizer_flags(pair_parser)

    reproduce_parser = commands.add_parser("reproduce", help="run the worked examples")
    _add_optimizer_flags(reproduce_parser)

    sweep_parser = commands.add_parser(
        "sweep", help="check a relation on random inputs", epilog=_SWEEP_EPILOG
    )
    sweep_parser.add_argument("--count", type=int, default=100)
    sweep_parser.add_argument("--dims", default="2x2", help="MxN or MxN,UxV")
    sweep_parser.add_argument(
        "--check", choices=[str(c) for c in SweepCheck], default=str(SweepCheck.THM1)
    )
    sweep_parser.add_argument("--out", type=Path, help="write trial rows as CSV")
    _add_optimizer_flags(sweep_parser)

    commands.add_parser("builtins", help="list builtin states")
    return parser


def _config(args: argparse.Namespace) -> OptimizerConfig:
    keys = (
        CONF_RESTARTS,
        CONF_REFINE_ITERS,
        CONF_STEP_TOLERANCE,
        CONF_VALUE_TOLERANCE,
        CONF_SEED,
        CONF_STRUCTURED_SEEDS,
        CONF_WORKERS,
    )
    return optimizer_config({key: getattr(args, key) for key in keys})


def cmd_min(args: argparse.Namespace) -> tuple[RunReport, int]:
    """Compute one bipartite measure of a single state."""
    config = _config(args)
    spec = load_state_spec(args.state)
    rho = spec.density()
    result = MEASURES[args.measure](rho, config)
    report = RunReport(
        command="min",
        inputs={"state": spec.label, "dims": list(rho.dims), "measure": args.measure},
        values={
            "value": result.value,
            "optimal_measurement": measurement_payload(result.optimal_measurement),
        },
        diagnostics=result_payload(result),
        config=config.as_dict(),
        seed=config.seed,
    )
    return report, EXIT_OK


def cmd_pair(args: argparse.Namespace) -> tuple[RunReport, int]:
    """Compute the nonbilocal measure of two states with its bounds."""
    config = _config(args)
    spec_ab = load_state_spec(args.state_ab)
    spec_cd = load_state_spec(args.state_cd)
    pair = BilocalInput(spec_ab.density(), spec_cd.density())
    bounds = bound_report(pair, config)
    assert bounds.result is not None
    report = RunReport(
        command="pair",
        inputs={
            "state_ab": spec_ab.label,
            "state_cd": spec_cd.label,
            "dims": list(pair.dims),
        },
        values={
            "value": bounds.value_numeric,
            "optimal_measurement": measurement_payload(
                bounds.result.optimal_measurement
            ),
        },
        bounds={
            "thm3_upper": bounds.thm3_upper,
            "thm4_upper": bounds.thm4_upper,
            "thm5": None
            if bounds.thm5 is None
            else {
                "printed_value": bounds.thm5.printed_value,
                "corrected_value": bounds.thm5.corrected_value,
                "direct_min_value": bounds.thm5.direct_min_value,
                "invariant_value": bounds.thm5.invariant_value,
            },
        },
        diagnostics=result_payload(bounds.result),
        config=config.as_dict(),
        seed=config.seed,
    )
    if (ket_ab := spec_ab.ket()) is not None and (ket_cd := spec_cd.ket()) is not None:
        closed = nonbilocal_pure(ket_ab, ket_cd)
        report.values["thm2"] = closed
    report.check(
        "bound_ordering",
        "value <= thm3 and thm4 bounds",
        bounds.value_numeric,
        bounds.ordering_ok,
    )
    return report, EXIT_OK if report.passed else EXIT_ASSERTION


def cmd_reproduce(args: argparse.Namespace) -> tuple[RunReport, int]:
    """Run the worked examples."""
    report = reproduce_examples(_config(args))
    return report, EXIT_OK if report.passed else EXIT_ASSERTION


def cmd_sweep(args: argparse.Namespace) -> tuple[RunReport, int]:
    """Run a randomized check and optionally write the trial rows."""
    config = _config(args)
    if args.count < 1:
        raise NonbilocalError(f"--count must be positive, got {args.count}")
    report, rows = run_sweep(
        SweepCheck(args.check), args.count, parse_dims(args.dims), config
    )
    if args.out is not None:
        write_csv(rows, args.out)
        report.inputs["out"] = str(args.out)
    print(f"pass rate {report.values['pass_rate']:.12g}", file=sys.stderr)
    return report, EXIT_OK if report.passed else EXIT_ASSERTION


def cmd_builtins(args: argparse.Namespace) -> tuple[RunReport, int]:
    """List the builtin states."""
    return RunReport(command="builtins", values=builtin_catalogue()), EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], tuple[RunReport, int]]] = {
    "min": cmd_min,
    "pair": cmd_pair,
    "reproduce": cmd_reproduce,
    "sweep": cmd_sweep,
    "builtins": cmd_builtins,
}


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line tool and return its exit code."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    start = time.perf_counter()
    _LOGGER.debug("Running %s", args.command)
    try:
        report, code = COMMANDS[args.command](args)
    except DimensionCapError as err:
        _LOGGER.debug("Dimension cap exceeded", exc_info=err)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DIMENSION_CAP
    except NonbilocalError as err:
        _LOGGER.debug("Invalid input", exc_info=err)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    if not report.wall_time:
        report.wall_time = time.perf_counter() - start
    print(report.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())

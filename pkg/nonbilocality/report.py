"""Run reports written by the command line tool."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .const import REPORT_DIGITS
from .measurements import ProjectiveMeasurement
from .optimizer import MeasureResult

_LOGGER = logging.getLogger(__name__)


def round_sig(value: float) -> float:
    """Round a float to the report precision in significant digits."""
    return float(f"{value:.{REPORT_DIGITS}g}")


def _rounded(value: Any) -> Any:
    """Recursively round every float in a JSON-compatible value."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float | np.floating):
        return round_sig(float(value))
    if isinstance(value, dict):
        return {key: _rounded(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [_rounded(item) for item in value]
    return value


@dataclass(frozen=True)
class AssertionRecord:
    """One checked expectation."""

    name: str
    expected: str
    observed: float | None
    passed: bool


@dataclass
class RunReport:
    """Everything needed to replay and audit one command run."""

    command: str
    inputs: dict[str, Any] = field(default_factory=dict)
    values: dict[str, Any] = field(default_factory=dict)
    bounds: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    wall_time: float = 0.0
    assertions: list[AssertionRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Return True when every assertion passed."""
        return all(record.passed for record in self.assertions)

    def check(self, name: str, expected: str, observed: float, passed: bool) -> bool:
        """Record an assertion and return whether it passed."""
        self.assertions.append(AssertionRecord(name, expected, observed, passed))
        if not passed:
            _LOGGER.warning("%s: expected %s, observed %.12g", name, expected, observed)
        return passed

    def to_dict(self) -> dict[str, Any]:
        """Return the report as plain data with rounded floats."""
        data = asdict(self)
        data["passed"] = self.passed
        return _rounded(data)

    def to_json(self) -> str:
        """Serialize the report."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        """Parse a report written by ``to_json``."""
        data = json.loads(text)
        data.pop("passed", None)
        data["assertions"] = [
            AssertionRecord(**record) for record in data.get("assertions", [])
        ]
        return cls(**data)


def measurement_payload(meas: ProjectiveMeasurement) -> dict[str, Any]:
    """Describe a measurement with projectors as rows of [re, im] pairs."""
    return {
        "label": meas.label,
        "target": list(meas.target),
        "projectors": [
            [[[float(z.real), float(z.imag)] for z in row] for row in projector]
            for projector in meas.projectors
        ],
    }


def result_payload(result: MeasureResult) -> dict[str, Any]:
    """Describe the optimizer diagnostics of a result."""
    return {
        "mode": result.mode,
        "seed": result.seed,
        "restarts": result.restarts,
        "best_start": result.best_start.label,
        "starts": [asdict(record) for record in result.starts],
    }

"""Types for the nonbilocality package."""

from collections.abc import Callable, Sequence
from typing import TYPE_CHECKING, Literal

import numpy as np
import numpy.typing as npt

if TYPE_CHECKING:
    from .measurements import ProjectiveMeasurement

type ComplexMatrix = npt.NDArray[np.complex128]
type ComplexVector = npt.NDArray[np.complex128]
type RealMatrix = npt.NDArray[np.float64]
type RealVector = npt.NDArray[np.float64]

type Dims = tuple[int, ...]
type SubsystemSet = Sequence[int]

type Mode = Literal["max", "min"]
type Objective = Callable[["ProjectiveMeasurement"], float]

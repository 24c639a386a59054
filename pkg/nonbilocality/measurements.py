"""Von Neumann projective measurements and the marginal-invariant family."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import InitVar, dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import unitary_group

from .const import PROJECTOR_TOLERANCE
from .exceptions import DimensionMismatchError, InvalidMeasurementError
from .hilbert import (
    DensityOperator,
    Seed,
    cluster_eigenvalues,
    group_subsystems,
    partial_trace,
    ungroup_subsystems,
)
from .operator_basis import build_basis
from .types import ComplexMatrix, Dims, RealVector, SubsystemSet

_LOGGER = logging.getLogger(__name__)

# Columns of a basis must stay inside one eigenspace to this tolerance.
_BLOCK_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """A complete set of orthogonal projectors on the target factors.

    ``basis`` holds the measurement vectors as columns when every projector
    has rank one, and is None otherwise. Pass ``checked=False`` only for
    projectors known to be valid by construction.
    """

    target: tuple[int, ...]
    projectors: tuple[ComplexMatrix, ...]
    basis: ComplexMatrix | None = None
    label: str = ""
    checked: InitVar[bool] = True

    def __post_init__(self, checked: bool) -> None:
        """Check idempotence, orthogonality and completeness."""
        if not checked:
            return
        if not self.projectors:
            raise InvalidMeasurementError("A measurement needs at least one projector")
        dim = self.projectors[0].shape[0]
        total = np.zeros((dim, dim), dtype=np.complex128)
        for index, projector in enumerate(self.projectors):
            if projector.shape != (dim, dim):
                raise InvalidMeasurementError(
                    f"Projector {index} has shape {projector.shape}, expected {dim}"
                )
            if np.max(np.abs(projector - projector.conj().T)) > PROJECTOR_TOLERANCE:
                raise InvalidMeasurementError(f"Projector {index} is not Hermitian")
            if np.max(np.abs(projector @ projector - projector)) > PROJECTOR_TOLERANCE:
                raise InvalidMeasurementError(f"Projector {index} is not idempotent")
            for other in range(index):
                product = projector @ self.projectors[other]
                if np.max(np.abs(product)) > PROJECTOR_TOLERANCE:
                    raise InvalidMeasurementError(
                        f"Projectors {other} and {index} are not orthogonal"
                    )
            total += projector
        if np.max(np.abs(total - np.eye(dim))) > PROJECTOR_TOLERANCE:
            raise InvalidMeasurementError("Projectors do not sum to the identity")

    @classmethod
    def from_basis(
        cls,
        target: SubsystemSet,
        vectors: ComplexMatrix,
        label: str = "",
        checked: bool = True,
    ) -> ProjectiveMeasurement:
        """Build the rank-1 measurement whose outcomes are the columns of vectors."""
        vectors = np.asarray(vectors, dtype=np.complex128)
        projectors = tuple(np.einsum("ah,bh->hab", vectors, vectors.conj()))
        return cls(tuple(target), projectors, vectors, label, checked)

    @property
    def dim(self) -> int:
        """Return the dimension of the measured space."""
        return self.projectors[0].shape[0]

    @property
    def rank_profile(self) -> tuple[int, ...]:
        """Return the rank of each projector."""
        return tuple(round(float(np.trace(p).real)) for p in self.projectors)

    def distance(self, other: ProjectiveMeasurement) -> float:
        """Return the Frobenius distance between the projector sums of both sets.

        Outcomes are matched by order, so relabelled outcomes count as distinct.
        """
        return float(
            np.sqrt(
                sum(
                    np.sum(np.abs(p - q) ** 2)
                    for p, q in zip(self.projectors, other.projectors, strict=True)
                )
            )
        )


def _grouped(
    meas: ProjectiveMeasurement, op: ComplexMatrix, dims: Dims
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Group op around the measured factors and check the dimensions agree."""
    grouped, perm, _ = group_subsystems(op, tuple(dims), meas.target)
    if grouped.shape[0] != meas.dim:
        raise DimensionMismatchError(
            f"Measurement on dimension {meas.dim} applied to factors of "
            f"dimension {grouped.shape[0]}"
        )
    return grouped, perm


def apply(meas: ProjectiveMeasurement, op: ComplexMatrix, dims: Dims) -> ComplexMatrix:
    """Return sum_k (1 (x) Pi_k (x) 1) op (1 (x) Pi_k (x) 1)."""
    grouped, perm = _grouped(meas, np.asarray(op), dims)
    result = np.zeros_like(grouped, dtype=np.complex128)
    for projector in meas.projectors:
        result += np.einsum("ab,brcs,cd->ards", projector, grouped, projector)
    return ungroup_subsystems(result, tuple(dims), perm)


def disturbance_evaluator(
    op: ComplexMatrix, dims: Dims, target: SubsystemSet
) -> Callable[[ProjectiveMeasurement], float]:
    """Return a function computing Tr[op Pi(op)] for measurements on target.

    For rank-1 measurements only the diagonal blocks <e_h|op|e_h> are needed,
    which avoids forming the post-measurement operator.
    """
    grouped, _, _ = group_subsystems(np.asarray(op), tuple(dims), target)

    def evaluate(meas: ProjectiveMeasurement) -> float:
        if meas.basis is None:
            post = sum(
                np.einsum("ab,brcs,cd->ards", p, grouped, p) for p in meas.projectors
            )
            return float(np.einsum("arbs,bsar->", grouped, post).real)
        vectors = meas.basis
        blocks = np.einsum("ah,arbs,bh->hrs", vectors.conj(), grouped, vectors)
        return float(np.einsum("hrs,hsr->", blocks, blocks).real)

    return evaluate


def disturbance_overlap(
    op: ComplexMatrix, dims: Dims, meas: ProjectiveMeasurement
) -> float:
    """Return Tr[op Pi(op)]."""
    return disturbance_evaluator(op, dims, meas.target)(meas)


@dataclass(frozen=True)
class EigenBlock:
    """One degenerate eigenspace of a marginal state."""

    eigenvalue: float
    basis: ComplexMatrix

    @property
    def dim(self) -> int:
        """Return the dimension of the eigenspace."""
        return self.basis.shape[1]


@dataclass(frozen=True)
class InvariantMeasurementFamily:
    """Rank-1 measurements that leave a marginal state unchanged.

    Every member is {U|e_h><e_h|U^dagger} with U block-diagonal over the
    eigenspaces of the marginal, so the marginal is invariant.
    """

    marginal: DensityOperator
    target: tuple[int, ...]
    blocks: tuple[EigenBlock, ...]

    @property
    def parameter_count(self) -> int:
        """Return the number of real parameters, sum of squared block sizes."""
        return sum(block.dim**2 for block in self.blocks)

    @property
    def is_point(self) -> bool:
        """Return True when all blocks are one-dimensional."""
        return all(block.dim == 1 for block in self.blocks)

    @property
    def dim(self) -> int:
        """Return the dimension of the measured space."""
        return self.marginal.dim

    def measurement(
        self,
        params: RealVector,
        anchors: Sequence[ComplexMatrix] | None = None,
        label: str = "",
        checked: bool = True,
    ) -> ProjectiveMeasurement:
        """Return the member at params, composed with optional per-block anchors."""
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.parameter_count,):
            raise DimensionMismatchError(
                f"Expected {self.parameter_count} parameters, got {params.shape}"
            )
        columns = []
        offset = 0
        for index, block in enumerate(self.blocks):
            count = block.dim**2
            rotation = _block_unitary(params[offset : offset + count], block.dim)
            if anchors is not None:
                rotation = rotation @ anchors[index]
            columns.append(block.basis @ rotation)
            offset += count
        return ProjectiveMeasurement.from_basis(
            self.target, np.hstack(columns), label, checked
        )

    def anchors_for(self, vectors: ComplexMatrix) -> list[ComplexMatrix] | None:
        """Return per-block anchors reproducing a basis, or None if incompatible.

        A basis belongs to the family when each of its vectors lies inside a
        single eigenspace and each eigenspace receives as many vectors as its
        dimension.
        """
        assigned: list[list[int]] = [[] for _ in self.blocks]
        for h in range(vectors.shape[1]):
            weights = [
                float(np.sum(np.abs(block.basis.conj().T @ vectors[:, h]) ** 2))
                for block in self.blocks
            ]
            best = int(np.argmax(weights))
            if abs(weights[best] - 1.0) > _BLOCK_TOLERANCE:
                return None
            assigned[best].append(h)
        anchors = []
        for block, cols in zip(self.blocks, assigned, strict=True):
            if len(cols) != block.dim:
                return None
            anchors.append(block.basis.conj().T @ vectors[:, cols])
        return anchors


def _block_unitary(params: RealVector, dim: int) -> ComplexMatrix:
    """Return exp(iH) with H assembled from params in the block's Hermitian basis."""
    if dim == 1:
        return np.array([[np.exp(1j * params[0])]])
    generator = build_basis(dim).combine(params)
    return expm(1j * generator)


def eigen_family(
    marginal: DensityOperator, target: SubsystemSet | None = None
) -> InvariantMeasurementFamily:
    """Cluster the spectrum of marginal into degenerate blocks.

    ``target`` names the factors of the full system the measurements act on;
    by default the marginal's own factors.
    """
    values, vectors = marginal.spectrum
    clusters = cluster_eigenvalues(values)
    blocks = tuple(
        EigenBlock(eigenvalue=float(np.mean(values[idx])), basis=vectors[:, idx])
        for idx in clusters
    )
    if target is None:
        target = tuple(range(len(marginal.dims)))
    family = InvariantMeasurementFamily(marginal, tuple(target), blocks)
    _LOGGER.debug(
        "Invariant family on %s: block sizes %s, %d parameters",
        family.target,
        [block.dim for block in blocks],
        family.parameter_count,
    )
    return family


def measurement_at(
    family: InvariantMeasurementFamily, params: RealVector
) -> ProjectiveMeasurement:
    """Return the family member at params, anchored at the eigenbasis."""
    return family.measurement(params, label="params")


def haar_anchors(
    family: InvariantMeasurementFamily, seed: Seed = None
) -> list[ComplexMatrix]:
    """Draw one Haar unitary per block."""
    rng = np.random.default_rng(seed)
    return [
        unitary_group.rvs(block.dim, random_state=rng)
        if block.dim > 1
        else np.ones((1, 1), dtype=np.complex128)
        for block in family.blocks
    ]


def haar_sample(
    family: InvariantMeasurementFamily, seed: Seed = None
) -> ProjectiveMeasurement:
    """Return a family member with Haar-distributed blocks."""
    anchors = haar_anchors(family, seed)
    return family.measurement(np.zeros(family.parameter_count), anchors, "haar")


def structured_bases(dims: Sequence[int]) -> list[tuple[str, ComplexMatrix]]:
    """Return labelled candidate bases for a measured space with factor dims.

    Candidates are the computational basis, the product of per-factor Fourier
    bases (Hadamard on qubits) and, for two qubits, the Bell basis.
    """
    dim = math.prod(dims)
    candidates = [("computational", np.eye(dim, dtype=np.complex128))]
    fourier = np.eye(1, dtype=np.complex128)
    for d in dims:
        fourier = np.kron(fourier, _fourier(d))
    label = "hadamard" if all(d == 2 for d in dims) else "fourier"
    candidates.append((label, fourier))
    if tuple(dims) == (2, 2):
        s = 1 / np.sqrt(2)
        bell = np.array(
            [
                [s, s, 0, 0],
                [0, 0, s, s],
                [0, 0, s, -s],
                [s, -s, 0, 0],
            ],
            dtype=np.complex128,
        )
        candidates.append(("bell", bell))
    return candidates


def product_eigenbasis(marginal: DensityOperator) -> ComplexMatrix:
    """Return the Kronecker product of the eigenbases of each single factor."""
    vectors = np.eye(1, dtype=np.complex128)
    for index in range(len(marginal.dims)):
        _, factor_vectors = partial_trace(marginal, (index,)).spectrum
        vectors = np.kron(vectors, factor_vectors)
    return vectors


def _fourier(d: int) -> ComplexMatrix:
    """Return the unitary discrete Fourier matrix of size d."""
    grid = np.outer(np.arange(d), np.arange(d))
    return np.exp(2j * np.pi * grid / d) / np.sqrt(d)


def is_invariant(
    meas: ProjectiveMeasurement, marginal: DensityOperator, tolerance: float = 1e-9
) -> bool:
    """Return True when the measurement leaves the marginal unchanged."""
    local = ProjectiveMeasurement(
        tuple(range(len(marginal.dims))), meas.projectors, meas.basis, meas.label
    )
    post = apply(local, marginal.matrix, marginal.dims)
    return float(np.linalg.norm(post - marginal.matrix)) < tolerance

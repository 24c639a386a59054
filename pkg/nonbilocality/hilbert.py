"""Finite-dimensional Hilbert-space linear algebra for states and operators.

Subsystems are always ordered left to right in Kronecker order, so a state on
(a, b, c, d) is indexed row-major over that order. All values are immutable
once constructed.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .const import (
    DEGENERACY_GAP,
    DIMENSION_CAP,
    HERMITIAN_TOLERANCE,
    KET_NORM_TOLERANCE,
    PSD_TOLERANCE,
    TRACE_TOLERANCE,
)
from .exceptions import (
    DimensionCapError,
    DimensionMismatchError,
    InvalidStateError,
    NotPositiveError,
)
from .types import ComplexMatrix, ComplexVector, Dims, RealVector, SubsystemSet

type Seed = int | np.random.SeedSequence | np.random.Generator | None


def _frozen(array: np.ndarray) -> np.ndarray:
    """Return the array marked read-only."""
    array.flags.writeable = False
    return array


def _check_dims(dims: Sequence[int], size: int) -> Dims:
    """Validate a subsystem dimension list against an amplitude count."""
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise InvalidStateError(f"Subsystem dimensions must be positive: {dims}")
    if math.prod(dims) != size:
        raise InvalidStateError(
            f"Product of dims {dims} does not match dimension {size}"
        )
    if size > DIMENSION_CAP:
        raise DimensionCapError(
            f"Total dimension {size} exceeds the cap of {DIMENSION_CAP}"
        )
    return dims


@dataclass(frozen=True)
class Ket:
    """A normalized pure state with its subsystem dimensions."""

    amplitudes: ComplexVector
    dims: Dims

    def __post_init__(self) -> None:
        """Validate and freeze the amplitudes."""
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        dims = _check_dims(self.dims, amplitudes.size)
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > KET_NORM_TOLERANCE:
            raise InvalidStateError(f"Ket is not normalized: squared norm {norm}")
        object.__setattr__(self, "amplitudes", _frozen(amplitudes))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex], dims: Sequence[int]) -> Ket:
        """Build a ket after rescaling the amplitudes to unit norm."""
        vector = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise InvalidStateError("Cannot normalize a zero vector")
        return cls(vector / norm, tuple(dims))

    @property
    def dim(self) -> int:
        """Return the total dimension."""
        return self.amplitudes.size


@dataclass(frozen=True)
class DensityOperator:
    """A trace-one positive semidefinite operator with subsystem dimensions."""

    matrix: ComplexMatrix
    dims: Dims

    def __post_init__(self) -> None:
        """Validate Hermiticity, trace and positivity, then freeze."""
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidStateError(f"Density matrix must be square: {matrix.shape}")
        dims = _check_dims(self.dims, matrix.shape[0])
        deviation = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
        if deviation > HERMITIAN_TOLERANCE:
            raise InvalidStateError(f"Matrix is not Hermitian (deviation {deviation})")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise InvalidStateError(f"Trace is {trace}, expected 1")
        # Remove sub-tolerance anti-Hermitian noise before any spectral work.
        matrix = (matrix + matrix.conj().T) / 2
        smallest = float(np.linalg.eigvalsh(matrix)[0])
        if smallest < -PSD_TOLERANCE:
            raise NotPositiveError(f"Minimum eigenvalue {smallest} is negative")
        object.__setattr__(self, "matrix", _frozen(matrix))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_ket(cls, psi: Ket) -> DensityOperator:
        """Return |psi><psi|."""
        return cls(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> DensityOperator:
        """Return the identity over its dimension."""
        dim = math.prod(dims)
        return cls(np.eye(dim, dtype=np.complex128) / dim, tuple(dims))

    @property
    def dim(self) -> int:
        """Return the total dimension."""
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> tuple[RealVector, ComplexMatrix]:
        """Return ascending eigenvalues and the matching eigenvectors."""
        values, vectors = np.linalg.eigh(self.matrix)
        return _frozen(values), _frozen(vectors)

    @property
    def purity(self) -> float:
        """Return Tr(rho^2)."""
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt amplitudes and bases of a bipartite ket.

    Coefficients are amplitudes (their squares sum to one) in nonincreasing
    order; column k of each basis pairs with coefficient k.
    """

    coefficients: RealVector
    left_basis: ComplexMatrix
    right_basis: ComplexMatrix
    dims: Dims

    def reconstruct(self) -> ComplexVector:
        """Return sum_k c_k |l_k> (x) |r_k>."""
        vector = np.zeros(math.prod(self.dims), dtype=np.complex128)
        for k, coefficient in enumerate(self.coefficients):
            vector += coefficient * np.kron(
                self.left_basis[:, k], self.right_basis[:, k]
            )
        return vector

    @property
    def rank(self) -> int:
        """Return the number of coefficients above numerical noise."""
        return int(np.sum(self.coefficients > 1e-12))


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Return a (x) b with concatenated dims."""
    return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def _check_subsystems(indices: SubsystemSet, count: int) -> tuple[int, ...]:
    """Validate a subsystem index set and return it sorted."""
    chosen = tuple(sorted(int(i) for i in indices))
    if len(set(chosen)) != len(chosen):
        raise DimensionMismatchError(f"Duplicate subsystem indices: {indices}")
    if any(i < 0 or i >= count for i in chosen):
        raise DimensionMismatchError(
            f"Subsystem indices {indices} out of range for {count} factors"
        )
    return chosen


def group_subsystems(
    matrix: ComplexMatrix, dims: Dims, target: SubsystemSet
) -> tuple[np.ndarray, tuple[int, ...], tuple[int, ...]]:
    """Reorder an operator as a (T, R, T, R) tensor, target factors first.

    T is the joint dimension of the target factors and R that of the rest.
    Also returns the axis permutation and the sorted target set so callers can
    undo the grouping with ``ungroup_subsystems``.
    """
    count = len(dims)
    chosen = _check_subsystems(target, count)
    rest = tuple(i for i in range(count) if i not in chosen)
    perm = chosen + rest
    t_dim = math.prod(dims[i] for i in chosen)
    r_dim = math.prod(dims[i] for i in rest)
    grouped = (
        np.asarray(matrix)
        .reshape(dims + dims)
        .transpose(perm + tuple(count + p for p in perm))
        .reshape(t_dim, r_dim, t_dim, r_dim)
    )
    return grouped, perm, chosen


def ungroup_subsystems(
    grouped: np.ndarray, dims: Dims, perm: Sequence[int]
) -> ComplexMatrix:
    """Invert ``group_subsystems`` back to a square matrix in Kronecker order."""
    count = len(dims)
    permuted = tuple(dims[p] for p in perm)
    inverse = np.argsort(perm)
    dim = math.prod(dims)
    return (
        grouped.reshape(permuted + permuted)
        .transpose(tuple(inverse) + tuple(count + i for i in inverse))
        .reshape(dim, dim)
    )


def partial_trace(rho: DensityOperator, keep: SubsystemSet) -> DensityOperator:
    """Trace out every factor not in ``keep``; kept factors stay in order."""
    grouped, _, chosen = group_subsystems(rho.matrix, rho.dims, keep)
    reduced = np.einsum("irjr->ij", grouped)
    return DensityOperator(reduced, tuple(rho.dims[i] for i in chosen))


def swap_factors(rho: DensityOperator) -> DensityOperator:
    """Return rho_ba from a bipartite rho_ab."""
    if len(rho.dims) != 2:
        raise DimensionMismatchError(f"Expected two factors, got dims {rho.dims}")
    m, n = rho.dims
    swapped = (
        rho.matrix.reshape(m, n, m, n).transpose(1, 0, 3, 2).reshape(m * n, m * n)
    )
    return DensityOperator(swapped, (n, m))


def local_unitary(
    rho: DensityOperator, unitaries: Sequence[ComplexMatrix]
) -> DensityOperator:
    """Conjugate rho by the tensor product of one unitary per factor."""
    if len(unitaries) != len(rho.dims):
        raise DimensionMismatchError(
            f"Need {len(rho.dims)} unitaries, got {len(unitaries)}"
        )
    total = np.eye(1, dtype=np.complex128)
    for unitary, dim in zip(unitaries, rho.dims, strict=True):
        if np.shape(unitary) != (dim, dim):
            raise DimensionMismatchError(
                f"Unitary of shape {np.shape(unitary)} on a factor of dimension {dim}"
            )
        total = np.kron(total, unitary)
    return DensityOperator(total @ rho.matrix @ total.conj().T, rho.dims)


def sqrt_psd(rho: DensityOperator) -> ComplexMatrix:
    """Return the Hermitian PSD square root via the spectral decomposition."""
    values, vectors = rho.spectrum
    if values[0] < -PSD_TOLERANCE:
        raise NotPositiveError(f"Minimum eigenvalue {values[0]} is negative")
    root = np.sqrt(np.where(values > PSD_TOLERANCE, values, 0.0))
    result = (vectors * root) @ vectors.conj().T
    return _frozen((result + result.conj().T) / 2)


def affinity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Return Tr(sqrt(rho) sqrt(sigma)), clipped to [0, 1]."""
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(
            f"Affinity between dimensions {rho.dim} and {sigma.dim}"
        )
    value = float(np.real(np.vdot(sqrt_psd(rho), sqrt_psd(sigma))))
    return min(max(value, 0.0), 1.0)


def schmidt(psi: Ket) -> SchmidtForm:
    """Return the Schmidt amplitudes and bases of a two-factor ket."""
    if len(psi.dims) != 2:
        raise DimensionMismatchError(
            f"Schmidt decomposition needs exactly two factors, got {psi.dims}"
        )
    left, right = psi.dims
    u, s, vh = np.linalg.svd(psi.amplitudes.reshape(left, right))
    rank = min(left, right)
    return SchmidtForm(
        coefficients=_frozen(s[:rank].astype(np.float64)),
        left_basis=_frozen(u[:, :rank]),
        right_basis=_frozen(vh[:rank].T),
        dims=psi.dims,
    )


def ket_to_density(psi: Ket) -> DensityOperator:
    """Return the projector onto psi."""
    return DensityOperator.from_ket(psi)


def random_ket(dims: int | Sequence[int], seed: Seed = None) -> Ket:
    """Return a Haar-random pure state."""
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    rng = np.random.default_rng(seed)
    dim = math.prod(dims)
    vector = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return Ket.normalized(vector, dims)


def random_state(
    dims: int | Sequence[int], rank: int | None = None, seed: Seed = None
) -> DensityOperator:
    """Return a Ginibre-induced mixed state of the requested rank."""
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    dim = math.prod(dims)
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise InvalidStateError(f"Rank {rank} out of range [1, {dim}]")
    rng = np.random.default_rng(seed)
    ginibre = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    matrix = ginibre @ ginibre.conj().T
    return DensityOperator(matrix / np.trace(matrix).real, dims)


def random_unitary(dim: int, seed: Seed = None) -> ComplexMatrix:
    """Return a Haar-random unitary via QR with phase correction."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def cluster_eigenvalues(values: RealVector) -> list[list[int]]:
    """Group ascending eigenvalues into degenerate blocks of indices."""
    blocks: list[list[int]] = []
    for index, value in enumerate(values):
        if blocks:
            first = values[blocks[-1][0]]
            if abs(value - first) < DEGENERACY_GAP * max(1.0, abs(first)):
                blocks[-1].append(index)
                continue
        blocks.append([index])
    return blocks


def is_nondegenerate(rho: DensityOperator) -> bool:
    """Return True when every eigenvalue of rho is simple."""
    values, _ = rho.spectrum
    return all(len(block) == 1 for block in cluster_eigenvalues(values))

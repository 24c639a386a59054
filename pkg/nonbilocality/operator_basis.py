"""Orthonormal Hermitian operator bases and the coefficient matrices of sqrt(rho)."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from functools import cache
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidLambdaError,
    InvalidMeasurementError,
)
from .hilbert import DensityOperator, sqrt_psd
from .types import ComplexMatrix, RealMatrix

if TYPE_CHECKING:
    from .measurements import ProjectiveMeasurement

_LOGGER = logging.getLogger(__name__)


class LambdaKind(StrEnum):
    """Which factor pair a coefficient matrix describes."""

    AB = "ab"
    CD = "cd"
    JOINT = "joint"


@dataclass(frozen=True)
class HermitianBasis:
    """An orthonormal basis of Hermitian operators, identity element first."""

    dim: int
    elements: np.ndarray

    def __len__(self) -> int:
        """Return the number of basis elements (dim squared)."""
        return self.elements.shape[0]

    def coefficients(self, operator: ComplexMatrix) -> np.ndarray:
        """Return Tr(A X_k) for every element X_k."""
        return np.einsum("ab,kba->k", operator, self.elements)

    def combine(self, coefficients: np.ndarray) -> ComplexMatrix:
        """Return sum_k c_k X_k."""
        return np.einsum("k,kab->ab", coefficients, self.elements)


@cache
def build_basis(d: int) -> HermitianBasis:
    """Return I/sqrt(d) followed by the normalized generalized Gell-Mann matrices.

    Order after the identity: symmetric pairs, antisymmetric pairs, then the
    diagonal matrices, each block in lexicographic index order. Every element
    satisfies Tr(X_k X_l) = delta_kl.
    """
    if d < 2:
        raise DimensionMismatchError(f"Operator basis needs d >= 2, got {d}")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    elements: list[np.ndarray] = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
    for j, k in pairs:
        symmetric = np.zeros((d, d), dtype=np.complex128)
        symmetric[j, k] = symmetric[k, j] = 1 / np.sqrt(2)
        elements.append(symmetric)
    for j, k in pairs:
        antisymmetric = np.zeros((d, d), dtype=np.complex128)
        antisymmetric[j, k] = -1j / np.sqrt(2)
        antisymmetric[k, j] = 1j / np.sqrt(2)
        elements.append(antisymmetric)
    for level in range(1, d):
        diagonal = np.zeros(d, dtype=np.complex128)
        diagonal[:level] = 1
        diagonal[level] = -level
        elements.append(np.diag(diagonal) / np.sqrt(level * (level + 1)))
    stacked = np.array(elements)
    stacked.flags.writeable = False
    return HermitianBasis(dim=d, elements=stacked)


@dataclass(frozen=True)
class LambdaMatrix:
    """Real coefficients of sqrt(rho) in a product operator basis.

    For kinds AB and CD, entry (i, j) is Tr(sqrt(rho) X_i (x) Y_j). For JOINT,
    rows are (j, k) and columns (i, l), both row-major, with entry
    lambda^ab_ij * lambda^cd_kl.
    """

    entries: RealMatrix
    row_labels: tuple[int | tuple[int, int], ...]
    col_labels: tuple[int | tuple[int, int], ...]
    kind: LambdaKind
    dims: tuple[int, ...]

    def gram(self) -> RealMatrix:
        """Return Lambda Lambda^t."""
        return self.entries @ self.entries.T

    @property
    def norm_squared(self) -> float:
        """Return the squared Frobenius norm (equal to Tr rho)."""
        return float(np.sum(self.entries**2))


@dataclass(frozen=True)
class GammaMatrix:
    """Traces of rank-1 measurement projectors against a product operator basis.

    Rows are measurement outcomes, columns the composite index (j, k) in
    row-major order. Rows are orthonormal for a complete rank-1 measurement.
    """

    entries: RealMatrix

    @property
    def outcomes(self) -> int:
        """Return the number of measurement outcomes."""
        return self.entries.shape[0]

    def overlap(self, joint: LambdaMatrix) -> float:
        """Return Tr(Gamma M M^t Gamma^t) for the joint coefficient matrix M."""
        projected = self.entries @ joint.entries
        return float(np.sum(projected**2))


def lambda_of(
    rho: DensityOperator,
    basis_left: HermitianBasis,
    basis_right: HermitianBasis,
    kind: LambdaKind = LambdaKind.AB,
) -> LambdaMatrix:
    """Expand sqrt(rho) of a bipartite state in the product basis."""
    if kind is LambdaKind.JOINT:
        raise InvalidLambdaError("lambda_of builds AB or CD matrices only")
    if rho.dims != (basis_left.dim, basis_right.dim):
        raise DimensionMismatchError(
            f"State dims {rho.dims} do not match bases "
            f"({basis_left.dim}, {basis_right.dim})"
        )
    m, n = rho.dims
    root = sqrt_psd(rho).reshape(m, n, m, n)
    entries = np.einsum(
        "abcd,ica,jdb->ij", root, basis_left.elements, basis_right.elements
    ).real
    _LOGGER.debug("Lambda %s matrix of shape %s", kind, entries.shape)
    return LambdaMatrix(
        entries=entries,
        row_labels=tuple(range(m * m)),
        col_labels=tuple(range(n * n)),
        kind=kind,
        dims=rho.dims,
    )


def joint_lambda(lab: LambdaMatrix, lcd: LambdaMatrix) -> LambdaMatrix:
    """Rearrange the outer product of Lambda_ab and Lambda_cd.

    The result has rows indexed by (j, k), the measured b and c factors, and
    columns by (i, l), the untouched a and d factors.
    """
    if lab.kind is not LambdaKind.AB or lcd.kind is not LambdaKind.CD:
        raise InvalidLambdaError(
            f"Expected kinds (ab, cd), got ({lab.kind}, {lcd.kind})"
        )
    m2, n2 = lab.entries.shape
    u2, v2 = lcd.entries.shape
    entries = np.einsum("ij,kl->jkil", lab.entries, lcd.entries).reshape(
        n2 * u2, m2 * v2
    )
    return LambdaMatrix(
        entries=entries,
        row_labels=tuple((j, k) for j in range(n2) for k in range(u2)),
        col_labels=tuple((i, l) for i in range(m2) for l in range(v2)),
        kind=LambdaKind.JOINT,
        dims=lab.dims + lcd.dims,
    )


def gamma_of(
    meas: ProjectiveMeasurement,
    basis_b: HermitianBasis,
    basis_c: HermitianBasis,
) -> GammaMatrix:
    """Return gamma_{h,(j,k)} = Tr(Pi_h (Y_j (x) P_k)) for a rank-1 measurement."""
    if meas.basis is None:
        raise InvalidMeasurementError("Gamma needs a rank-1 measurement")
    n, u = basis_b.dim, basis_c.dim
    vectors = meas.basis
    if vectors.shape[0] != n * u:
        raise DimensionMismatchError(
            f"Measurement acts on dimension {vectors.shape[0]}, bases on {n * u}"
        )
    grid = vectors.reshape(n, u, -1)
    entries = np.einsum(
        "bch,jbd,kce,deh->hjk",
        grid.conj(),
        basis_b.elements,
        basis_c.elements,
        grid,
    ).real
    return GammaMatrix(entries=entries.reshape(vectors.shape[1], n * n * u * u))


def qubit_gamma(direction: np.ndarray) -> RealMatrix:
    """Return the 2 x 4 Gamma rows of the qubit measurement along a unit vector.

    In the basis I/sqrt(2), sigma_k/sqrt(2) this is (1/sqrt(2)) [[1, n], [1, -n]].
    """
    direction = np.asarray(direction, dtype=np.float64)
    direction = direction / np.linalg.norm(direction)
    return np.array(
        [np.concatenate(([1.0], direction)), np.concatenate(([1.0], -direction))]
    ) / np.sqrt(2)

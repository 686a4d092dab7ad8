"""
Operator and state algebra for small truncated tensor-product spaces.

Conventions:
- Dense complex128 matrices throughout
- Modes ordered as given by the TensorSpace, last mode fastest-varying
- X̃ is unit-normalized: |0⟩⟨2| + |2⟩⟨0|
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    OutOfRangeError,
    UnknownModeError,
)

ComplexMatrix = NDArray[np.complex128]
StateVector = NDArray[np.complex128]


@dataclass(frozen=True)
class TensorSpace:
    """Ordered product of truncated modes."""

    mode_dims: tuple[int, ...]
    mode_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.mode_dims) != len(self.mode_labels):
            raise DimensionMismatchError(
                f"{len(self.mode_dims)} dims for {len(self.mode_labels)} labels"
            )
        if len(set(self.mode_labels)) != len(self.mode_labels):
            raise ValueError(f"Duplicate mode labels: {self.mode_labels}")
        for dim in self.mode_dims:
            if dim < 1:
                raise InvalidDimensionError(f"Mode dimension must be positive, got {dim}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.mode_dims))

    def index_of(self, mode: str) -> int:
        try:
            return self.mode_labels.index(mode)
        except ValueError:
            raise UnknownModeError(
                f"Unknown mode '{mode}', expected one of {self.mode_labels}"
            ) from None

    def dim_of(self, mode: str) -> int:
        return self.mode_dims[self.index_of(mode)]

    def flatten(self, indices: Sequence[int]) -> int:
        """Map per-mode occupations to a flat basis index."""
        if len(indices) != len(self.mode_dims):
            raise DimensionMismatchError(
                f"Expected {len(self.mode_dims)} indices, got {len(indices)}"
            )
        try:
            return int(np.ravel_multi_index(tuple(indices), self.mode_dims))
        except ValueError as e:
            raise OutOfRangeError(str(e)) from None

    def unflatten(self, index: int) -> tuple[int, ...]:
        """Map a flat basis index to per-mode occupations."""
        if not 0 <= index < self.total_dim:
            raise OutOfRangeError(f"Index {index} outside [0, {self.total_dim})")
        return tuple(int(i) for i in np.unravel_index(index, self.mode_dims))


def annihilation(dim: int) -> ComplexMatrix:
    """Truncated bosonic lowering operator."""
    if dim < 2:
        raise InvalidDimensionError(f"annihilation needs dim >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def number_projector(dim: int, n: int) -> ComplexMatrix:
    """Projector onto occupation n."""
    if not 0 <= n < dim:
        raise OutOfRangeError(f"Occupation {n} outside [0, {dim})")
    proj = np.zeros((dim, dim), dtype=np.complex128)
    proj[n, n] = 1.0
    return proj


def number_operator(dim: int) -> ComplexMatrix:
    return np.diag(np.arange(dim, dtype=float)).astype(np.complex128)


def xtilde() -> ComplexMatrix:
    """Two-photon flip |0⟩⟨2| + |2⟩⟨0| on a qutrit."""
    op = np.zeros((3, 3), dtype=np.complex128)
    op[0, 2] = op[2, 0] = 1.0
    return op


def ztilde() -> ComplexMatrix:
    """P² − P⁰ on a qutrit."""
    return number_projector(3, 2) - number_projector(3, 0)


def dag(op: ComplexMatrix) -> ComplexMatrix:
    return op.conj().T


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def embed(op: ComplexMatrix, mode: str, space: TensorSpace) -> ComplexMatrix:
    """Lift a single-mode operator to the full space."""
    position = space.index_of(mode)
    dim = space.mode_dims[position]
    if op.shape != (dim, dim):
        raise DimensionMismatchError(
            f"Operator shape {op.shape} does not match mode '{mode}' of dim {dim}"
        )
    factors = [
        np.asarray(op, dtype=np.complex128) if i == position else identity(d)
        for i, d in enumerate(space.mode_dims)
    ]
    return reduce(np.kron, factors)


def basis(dim: int, n: int) -> StateVector:
    if not 0 <= n < dim:
        raise OutOfRangeError(f"Occupation {n} outside [0, {dim})")
    vec = np.zeros(dim, dtype=np.complex128)
    vec[n] = 1.0
    return vec


def tensor_state(space: TensorSpace, vectors: dict[str, StateVector]) -> StateVector:
    """Product state; modes missing from vectors are left in vacuum."""
    unknown = set(vectors) - set(space.mode_labels)
    if unknown:
        raise UnknownModeError(f"Unknown modes {sorted(unknown)}")
    factors = []
    for label, dim in zip(space.mode_labels, space.mode_dims):
        vec = vectors.get(label, basis(dim, 0))
        if vec.shape != (dim,):
            raise DimensionMismatchError(
                f"State for mode '{label}' has shape {vec.shape}, expected ({dim},)"
            )
        factors.append(np.asarray(vec, dtype=np.complex128))
    return reduce(np.kron, factors)


def ket_to_dm(psi: StateVector) -> ComplexMatrix:
    return np.outer(psi, psi.conj())


def _check_square_pair(a: ComplexMatrix, b: ComplexMatrix) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise DimensionMismatchError(f"Shapes {a.shape} and {b.shape} are incompatible")


def expectation(rho: ComplexMatrix, op: ComplexMatrix) -> complex:
    """Tr(ρ·op)."""
    _check_square_pair(rho, op)
    return complex(np.einsum("ij,ji->", rho, op))


def hermiticity_defect(op: ComplexMatrix) -> float:
    return float(np.max(np.abs(op - dag(op)))) if op.size else 0.0


def purity(rho: ComplexMatrix) -> float:
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def fidelity(rho: ComplexMatrix, psi: StateVector) -> float:
    """Overlap ⟨ψ|ρ|ψ⟩ with a pure target."""
    if rho.shape != (psi.shape[0], psi.shape[0]):
        raise DimensionMismatchError(f"rho {rho.shape} vs psi {psi.shape}")
    return float(np.real(psi.conj() @ rho @ psi))


def random_density_matrix(dim: int, seed: int | np.random.SeedSequence) -> ComplexMatrix:
    """Full-rank random state from a Ginibre matrix."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ dag(g)
    return (rho / np.trace(rho)).astype(np.complex128)

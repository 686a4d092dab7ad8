"""
Lindblad master-equation integration and Liouvillian spectral analysis.

Superoperators use column-stacking vectorization: vec(ρ) = ρ.flatten("F"),
so vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ).
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp

from .errors import (
    CapacityError,
    DimensionMismatchError,
    EigenSolverError,
    IntegrationFailureError,
    InvalidStateError,
    OutOfRangeError,
    StiffnessError,
    UnidentifiableError,
)
from .qalgebra import ComplexMatrix, dag, hermiticity_defect

MAX_LIOUVILLIAN_DIM = 100
DENSE_EIG_LIMIT = 4096

TRACE_TOL = 1e-7
HERMITICITY_TOL = 1e-8
POSITIVITY_TOL = -1e-6

Channels = Sequence[tuple[ComplexMatrix, float]]
Superoperator = ComplexMatrix | scipy.sparse.csr_matrix


@dataclass(frozen=True)
class EvolutionResult:
    """Observable time series from one integration."""

    times: NDArray[np.float64]
    observables: dict[str, NDArray[np.float64]]
    final_rho: ComplexMatrix


@dataclass(frozen=True)
class LiouvillianSpectrum:
    """Eigen-decomposition sorted by ascending |Re λ|; index 0 is the steady state."""

    eigenvalues: NDArray[np.complex128]
    steady_state: ComplexMatrix
    k: int
    right_vectors: NDArray[np.complex128] = field(repr=False)
    left_vectors: NDArray[np.complex128] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.steady_state.shape[0]

    @property
    def rates(self) -> NDArray[np.float64]:
        """−Re λ for the k slowest modes beyond the steady state."""
        return -np.real(self.eigenvalues[1 : self.k + 1])


class ModeLifetime(NamedTuple):
    lifetime: float
    rate: float
    eigenvalue: complex
    weight: float


def _check_channels(H: ComplexMatrix, collapse_list: Channels) -> list[tuple[ComplexMatrix, float]]:
    d = H.shape[0]
    if H.shape != (d, d):
        raise DimensionMismatchError(f"Hamiltonian must be square, got {H.shape}")
    jumps = []
    for op, rate in collapse_list:
        if op.shape != (d, d):
            raise DimensionMismatchError(f"Collapse operator {op.shape} vs H {H.shape}")
        if rate < 0:
            raise OutOfRangeError(f"Negative collapse rate {rate}")
        if rate > 0:
            jumps.append((np.asarray(op, dtype=np.complex128), float(rate)))
    return jumps


def _effective_hamiltonian(H: ComplexMatrix, jumps: list[tuple[ComplexMatrix, float]]) -> ComplexMatrix:
    """H − (i/2) Σ Γ L†L."""
    h_eff = np.array(H, dtype=np.complex128)
    for op, rate in jumps:
        h_eff = h_eff - 0.5j * rate * (dag(op) @ op)
    return h_eff


def lindblad_rhs(rho: ComplexMatrix, H: ComplexMatrix, collapse_list: Channels) -> ComplexMatrix:
    """−i[H,ρ] + Σ (Γ/2)(2LρL† − {L†L, ρ})."""
    jumps = _check_channels(H, collapse_list)
    if rho.shape != H.shape:
        raise DimensionMismatchError(f"rho {rho.shape} vs H {H.shape}")
    h_eff = _effective_hamiltonian(H, jumps)
    out = -1j * (h_eff @ rho - rho @ dag(h_eff))
    for op, rate in jumps:
        out += rate * (op @ rho @ dag(op))
    return out


def _validate_state(rho0: ComplexMatrix) -> None:
    if hermiticity_defect(rho0) > 1e-10:
        raise InvalidStateError("Initial density matrix is not Hermitian")
    if abs(np.trace(rho0) - 1.0) > 1e-10:
        raise InvalidStateError(f"Initial density matrix has trace {np.trace(rho0).real:.12g}")


def _validate_grid(t_grid: ArrayLike) -> NDArray[np.float64]:
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise OutOfRangeError("t_grid needs at least two times")
    if np.any(np.diff(times) <= 0):
        raise OutOfRangeError("t_grid must be strictly increasing")
    return times


def _check_physical(rho: ComplexMatrix, t: float) -> None:
    drift = abs(np.trace(rho) - 1.0)
    if drift > TRACE_TOL:
        raise IntegrationFailureError(f"Trace drift {drift:.3e} at t={t:.6g} µs")
    defect = hermiticity_defect(rho)
    if defect > HERMITICITY_TOL:
        raise IntegrationFailureError(f"Hermiticity defect {defect:.3e} at t={t:.6g} µs")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[0])
    if min_eig < POSITIVITY_TOL:
        raise IntegrationFailureError(f"Negative eigenvalue {min_eig:.3e} at t={t:.6g} µs")


def _series(
    states: Sequence[ComplexMatrix], observables: Mapping[str, ComplexMatrix] | None
) -> dict[str, NDArray[np.float64]]:
    result: dict[str, NDArray[np.float64]] = {}
    for name, op in (observables or {}).items():
        # Tr(ρ O) = Σ_ij ρ_ij O_ji
        result[name] = np.array([np.real(np.sum(rho * op.T)) for rho in states])
    return result


def evolve(
    rho0: ComplexMatrix,
    H: ComplexMatrix,
    collapse_list: Channels,
    t_grid: ArrayLike,
    rtol: float = 1e-8,
    observables: Mapping[str, ComplexMatrix] | None = None,
    atol: float | None = None,
) -> EvolutionResult:
    """Integrate the master equation with an embedded 5(4) Runge-Kutta pair.

    Args:
        rho0: Initial density matrix (Hermitian, unit trace)
        H: Hamiltonian
        collapse_list: (operator, rate) pairs
        t_grid: Output times in µs, strictly increasing; t_grid[0] is the start
        rtol: Relative tolerance in [1e-10, 1e-4]
        observables: Named operators whose expectation values are recorded
        atol: Absolute tolerance, defaults to rtol * 1e-3

    Returns:
        EvolutionResult sampled on t_grid

    Raises:
        StiffnessError: If the step size underflows
        IntegrationFailureError: If trace, Hermiticity or positivity drift
    """
    if not 1e-10 <= rtol <= 1e-4:
        raise OutOfRangeError(f"rtol {rtol} outside [1e-10, 1e-4]")
    jumps = _check_channels(H, collapse_list)
    if rho0.shape != H.shape:
        raise DimensionMismatchError(f"rho0 {rho0.shape} vs H {H.shape}")
    _validate_state(rho0)
    times = _validate_grid(t_grid)

    d = H.shape[0]
    h_eff = _effective_hamiltonian(H, jumps)
    h_eff_dag = dag(h_eff)
    sandwiches = [(op, dag(op), rate) for op, rate in jumps]

    def rhs(_t: float, y: NDArray[np.complex128]) -> NDArray[np.complex128]:
        rho = y.reshape(d, d)
        out = -1j * (h_eff @ rho - rho @ h_eff_dag)
        for op, op_dag, rate in sandwiches:
            out += rate * (op @ rho @ op_dag)
        return out.ravel()

    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        np.asarray(rho0, dtype=np.complex128).ravel(),
        method="RK45",
        t_eval=times,
        rtol=rtol,
        atol=atol if atol is not None else rtol * 1e-3,
    )
    if sol.status < 0:
        if "step size" in sol.message.lower():
            raise StiffnessError(f"Integration stalled: {sol.message}")
        raise IntegrationFailureError(sol.message)

    states = [sol.y[:, i].reshape(d, d) for i in range(sol.y.shape[1])]
    for t, rho in zip(sol.t, states):
        _check_physical(rho, float(t))
    return EvolutionResult(
        times=np.asarray(sol.t, dtype=float),
        observables=_series(states, observables),
        final_rho=states[-1],
    )


def build_liouvillian(H: ComplexMatrix, collapse_list: Channels) -> Superoperator:
    """Superoperator acting on column-stacked density matrices.

    Dense up to DENSE_EIG_LIMIT entries per side, sparse CSR beyond.
    """
    d = H.shape[0]
    if d > MAX_LIOUVILLIAN_DIM:
        raise CapacityError(
            f"Hilbert dimension {d} exceeds {MAX_LIOUVILLIAN_DIM}; superoperator would be {d * d}x{d * d}"
        )
    jumps = _check_channels(H, collapse_list)
    h_eff = _effective_hamiltonian(H, jumps)
    if d * d > DENSE_EIG_LIMIT:
        eye_s = scipy.sparse.identity(d, dtype=np.complex128, format="csr")
        h_s = scipy.sparse.csr_matrix(h_eff)
        sparse = -1j * (scipy.sparse.kron(eye_s, h_s) - scipy.sparse.kron(h_s.conj(), eye_s))
        for op, rate in jumps:
            op_s = scipy.sparse.csr_matrix(op)
            sparse = sparse + rate * scipy.sparse.kron(op_s.conj(), op_s)
        return scipy.sparse.csr_matrix(sparse)
    eye = np.eye(d, dtype=np.complex128)
    liouvillian = -1j * (np.kron(eye, h_eff) - np.kron(h_eff.conj(), eye))
    for op, rate in jumps:
        liouvillian += rate * np.kron(op.conj(), op)
    return liouvillian


def _unvec(vec: NDArray[np.complex128], d: int) -> ComplexMatrix:
    return vec.reshape(d, d, order="F")


def _dense_eig(L: ComplexMatrix) -> tuple[NDArray, NDArray, NDArray]:
    try:
        w, vl, vr = scipy.linalg.eig(L, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(f"Dense eigen-decomposition failed: {e}") from e
    return w, vl, vr


def _shift_invert_eig(L: Superoperator, n_modes: int) -> tuple[NDArray, NDArray, NDArray]:
    # Shift slightly off zero so the factorization of the singular L stays regular
    sigma = -1e-7 * max(1.0, float(abs(L).max()))
    L = scipy.sparse.csc_matrix(L)
    try:
        w, vr = scipy.sparse.linalg.eigs(L, k=n_modes, sigma=sigma, which="LM")
        # Left eigenvectors of L are right eigenvectors of L†; they stay unpaired
        _, vl = scipy.sparse.linalg.eigs(L.conj().T.tocsc(), k=n_modes, sigma=sigma, which="LM")
    except scipy.sparse.linalg.ArpackError as e:
        raise EigenSolverError(f"Shift-invert Arnoldi failed: {e}") from e
    return w, vl, vr


def slowest_decay_rates(L: Superoperator, k: int = 2) -> LiouvillianSpectrum:
    """Steady state plus the k slowest decay modes of a Liouvillian."""
    if k < 1:
        raise OutOfRangeError(f"k must be >= 1, got {k}")
    n = L.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatchError(f"Superoperator size {n} is not a square")
    if n <= DENSE_EIG_LIMIT:
        w, vl, vr = _dense_eig(L)
    else:
        w, vl, vr = _shift_invert_eig(L, min(n - 2, max(4 * (k + 1), 12)))
    if w.size < k + 1:
        raise EigenSolverError(f"Only {w.size} eigenvalues available for k={k}")

    order = np.argsort(np.abs(w.real), kind="stable")
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    if abs(w[0].real) > 1e-9 * max(1.0, float(np.max(np.abs(w.real)))):
        raise EigenSolverError(f"No stationary mode found, slowest eigenvalue {w[0]:.3e}")

    steady = _unvec(vr[:, 0], d)
    steady = steady / np.trace(steady)
    steady = 0.5 * (steady + dag(steady))
    return LiouvillianSpectrum(
        eigenvalues=w, steady_state=steady, k=k, right_vectors=vr, left_vectors=vl
    )


def observable_lifetime(
    spectrum: LiouvillianSpectrum, rho0: ComplexMatrix, op: ComplexMatrix
) -> ModeLifetime:
    """Lifetime of the decaying mode that dominates ⟨op⟩(t) from rho0."""
    d = spectrum.dim
    if op.shape != (d, d) or rho0.shape != (d, d):
        raise DimensionMismatchError(f"Observable {op.shape} or state {rho0.shape} vs spectrum dim {d}")
    vr, vl = spectrum.right_vectors, spectrum.left_vectors
    vec = rho0.flatten(order="F")
    if vr.shape[0] == vr.shape[1]:
        # Full basis: solve directly, left/right pairing is ambiguous inside degenerate clusters
        coeffs = scipy.linalg.solve(vr, vec)
    else:
        # Partial basis: project with the left/right Gram matrix
        gram = vl.conj().T @ vr
        coeffs = np.linalg.lstsq(gram, vl.conj().T @ vec, rcond=None)[0]
    # Tr(op R_k) = vec(opᵀ) · vec(R_k)
    weights = coeffs * (op.T.flatten(order="F") @ vr)
    weights[0] = 0.0
    best = int(np.argmax(np.abs(weights)))
    lam = complex(spectrum.eigenvalues[best])
    rate = -lam.real
    if rate <= 0 or abs(weights[best]) == 0:
        raise UnidentifiableError(f"Dominant mode {lam:.3e} does not decay")
    return ModeLifetime(1.0 / rate, rate, lam, float(abs(weights[best])))


def propagate(
    rho0: ComplexMatrix,
    L: Superoperator,
    t_grid: ArrayLike,
    observables: Mapping[str, ComplexMatrix] | None = None,
) -> EvolutionResult:
    """Exact propagation with matrix exponentials of L between output times."""
    times = _validate_grid(t_grid)
    _validate_state(rho0)
    d = rho0.shape[0]
    if L.shape != (d * d, d * d):
        raise DimensionMismatchError(f"Superoperator {L.shape} vs rho0 {rho0.shape}")
    vec = rho0.flatten(order="F").astype(np.complex128)
    states = [rho0]
    if scipy.sparse.issparse(L):
        sparse_l = scipy.sparse.csc_matrix(L)
        for dt in np.diff(times):
            vec = scipy.sparse.linalg.expm_multiply(sparse_l * float(dt), vec)
            states.append(_unvec(vec, d))
    else:
        cache: dict[float, ComplexMatrix] = {}
        for dt in np.diff(times):
            key = round(float(dt), 12)
            if key not in cache:
                cache[key] = scipy.linalg.expm(L * dt)
            vec = cache[key] @ vec
            states.append(_unvec(vec, d))
    for t, rho in zip(times, states):
        _check_physical(rho, float(t))
    return EvolutionResult(times=times, observables=_series(states, observables), final_rho=states[-1])


def steady_state(L: Superoperator) -> ComplexMatrix:
    """Stationary ρ from L vec(ρ) = 0 with one row replaced by the trace condition."""
    n = L.shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatchError(f"Superoperator size {n} is not a square")
    system = scipy.sparse.lil_matrix(L)
    system[0, :] = np.eye(d).flatten(order="F")
    rhs = np.zeros(n, dtype=np.complex128)
    rhs[0] = 1.0
    try:
        vec = scipy.sparse.linalg.spsolve(system.tocsc(), rhs)
    except RuntimeError as e:
        raise EigenSolverError(f"Steady-state solve failed: {e}") from e
    if not np.all(np.isfinite(vec)):
        raise EigenSolverError("Steady state is not unique")
    rho = _unvec(vec, d)
    return 0.5 * (rho + dag(rho))

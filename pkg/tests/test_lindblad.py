#!/usr/bin/env python3
"""
Unit tests for master-equation integration and Liouvillian spectra.

Tests the right-hand side, RK integration against closed forms,
superoperator vectorization, slow-mode extraction and steady states.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add lib to path for import
sys.path.insert(0, str(Path(__file__).parent.parent / "lib"))

from shadowqec.errors import (
    CapacityError,
    DimensionMismatchError,
    InvalidStateError,
    OutOfRangeError,
)
from shadowqec.hamiltonian import (
    build_hamiltonian,
    build_space,
    collapse_operators,
    logical_states,
    lose_photon,
)
from shadowqec.lindblad import (
    build_liouvillian,
    evolve,
    lindblad_rhs,
    observable_lifetime,
    propagate,
    slowest_decay_rates,
    steady_state,
)
from shadowqec.models import DeviceParams
from shadowqec.qalgebra import (
    annihilation,
    basis,
    fidelity,
    ket_to_dm,
    number_projector,
    purity,
    random_density_matrix,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@pytest.fixture
def damped_qubit() -> tuple[np.ndarray, list]:
    """Two-level mode with amplitude damping at Γ = 1."""
    return np.zeros((2, 2), dtype=np.complex128), [(annihilation(2), 1.0)]


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m + m.conj().T)


class TestRightHandSide:
    """Test the Lindblad generator."""

    def test_ground_state_is_stationary(self, damped_qubit: tuple) -> None:
        """Test decay leaves |0⟩⟨0| unchanged."""
        H, channels = damped_qubit
        rho = ket_to_dm(basis(2, 0))
        np.testing.assert_allclose(lindblad_rhs(rho, H, channels), np.zeros((2, 2)))

    def test_excited_state_decays(self, damped_qubit: tuple) -> None:
        """Test dρ/dt = Γ(|0⟩⟨0| − |1⟩⟨1|) from |1⟩⟨1|."""
        H, channels = damped_qubit
        rho = ket_to_dm(basis(2, 1))
        np.testing.assert_allclose(lindblad_rhs(rho, H, channels), np.diag([1.0, -1.0]))

    def test_trace_preserving(self) -> None:
        """Test Tr(dρ/dt) = 0 for a random state and generator."""
        H = random_hermitian(4, seed=1)
        channels = [(annihilation(4), 0.7), (random_hermitian(4, seed=2), 0.3)]
        rho = random_density_matrix(4, seed=3)
        assert abs(np.trace(lindblad_rhs(rho, H, channels))) < 1e-12

    def test_negative_rate_rejected(self, damped_qubit: tuple) -> None:
        """Test collapse rates must be non-negative."""
        H, _ = damped_qubit
        with pytest.raises(OutOfRangeError):
            lindblad_rhs(ket_to_dm(basis(2, 0)), H, [(annihilation(2), -1.0)])

    def test_shape_mismatch(self, damped_qubit: tuple) -> None:
        """Test state and Hamiltonian dimensions must agree."""
        H, channels = damped_qubit
        with pytest.raises(DimensionMismatchError):
            lindblad_rhs(ket_to_dm(basis(3, 0)), H, channels)


class TestEvolve:
    """Test RK integration against closed forms."""

    def test_exponential_decay(self, damped_qubit: tuple) -> None:
        """Test excited population e^{−Γt}."""
        H, channels = damped_qubit
        t = np.linspace(0.0, 3.0, 31)
        result = evolve(
            ket_to_dm(basis(2, 1)), H, channels, t, rtol=1e-10,
            observables={"P1": number_projector(2, 1)},
        )
        np.testing.assert_allclose(result.observables["P1"], np.exp(-t), atol=1e-8)

    def test_rabi_oscillation(self) -> None:
        """Test ⟨σz(t)⟩ = cos(2Wt) under H = W σx."""
        W = 1.3
        t = np.linspace(0.0, 3.0, 61)
        result = evolve(
            ket_to_dm(basis(2, 0)), W * SIGMA_X, [], t, rtol=1e-10,
            observables={"Z": SIGMA_Z},
        )
        np.testing.assert_allclose(result.observables["Z"], np.cos(2 * W * t), atol=1e-8)

    def test_final_state_trace(self, damped_qubit: tuple) -> None:
        """Test the returned state keeps unit trace."""
        H, channels = damped_qubit
        result = evolve(random_density_matrix(2, seed=5), H, channels, [0.0, 0.5, 1.0])
        assert np.trace(result.final_rho).real == pytest.approx(1.0, abs=1e-9)

    def test_halving_rtol_within_coarse_tolerance(self) -> None:
        """Test rtol / 2 moves every observable by less than rtol."""
        H = 1.3 * SIGMA_X
        channels = [(annihilation(2), 1.0)]
        t = np.linspace(0.0, 3.0, 31)
        obs = {"X": SIGMA_X, "Z": SIGMA_Z}
        coarse = evolve(ket_to_dm(basis(2, 1)), H, channels, t, rtol=1e-6, observables=obs)
        fine = evolve(ket_to_dm(basis(2, 1)), H, channels, t, rtol=5e-7, observables=obs)
        for name in obs:
            assert np.max(np.abs(coarse.observables[name] - fine.observables[name])) < 1e-6

    def test_rtol_range(self, damped_qubit: tuple) -> None:
        """Test tolerance outside [1e-10, 1e-4]."""
        H, channels = damped_qubit
        with pytest.raises(OutOfRangeError):
            evolve(ket_to_dm(basis(2, 1)), H, channels, [0.0, 1.0], rtol=1e-2)

    def test_non_hermitian_initial_state(self, damped_qubit: tuple) -> None:
        """Test initial states are validated."""
        H, channels = damped_qubit
        rho = np.array([[0.5, 0.5], [0.0, 0.5]], dtype=np.complex128)
        with pytest.raises(InvalidStateError):
            evolve(rho, H, channels, [0.0, 1.0])

    def test_unnormalized_initial_state(self, damped_qubit: tuple) -> None:
        """Test trace must be one."""
        H, channels = damped_qubit
        with pytest.raises(InvalidStateError):
            evolve(2 * ket_to_dm(basis(2, 1)), H, channels, [0.0, 1.0])

    def test_decreasing_grid(self, damped_qubit: tuple) -> None:
        """Test output times must increase."""
        H, channels = damped_qubit
        with pytest.raises(OutOfRangeError):
            evolve(ket_to_dm(basis(2, 1)), H, channels, [1.0, 0.0])


class TestLiouvillian:
    """Test superoperator construction and spectra."""

    def test_matches_rhs(self) -> None:
        """Test L vec(ρ) = vec(dρ/dt) with column stacking."""
        H = random_hermitian(3, seed=7)
        channels = [(annihilation(3), 0.4), (random_hermitian(3, seed=8), 0.2)]
        rho = random_density_matrix(3, seed=9)
        L = build_liouvillian(H, channels)
        expected = lindblad_rhs(rho, H, channels).flatten(order="F")
        np.testing.assert_allclose(L @ rho.flatten(order="F"), expected, atol=1e-12)

    def test_amplitude_damping_spectrum(self, damped_qubit: tuple) -> None:
        """Test eigenvalues {0, −Γ/2, −Γ/2, −Γ}."""
        H, channels = damped_qubit
        spectrum = slowest_decay_rates(build_liouvillian(H, channels), k=3)
        np.testing.assert_allclose(np.sort(-spectrum.eigenvalues.real), [0.0, 0.5, 0.5, 1.0], atol=1e-12)
        np.testing.assert_allclose(spectrum.rates, [0.5, 0.5, 1.0], atol=1e-12)

    def test_spectral_steady_state(self, damped_qubit: tuple) -> None:
        """Test the zero mode is the ground state."""
        H, channels = damped_qubit
        spectrum = slowest_decay_rates(build_liouvillian(H, channels), k=1)
        np.testing.assert_allclose(spectrum.steady_state, ket_to_dm(basis(2, 0)), atol=1e-12)

    def test_observable_lifetime(self, damped_qubit: tuple) -> None:
        """Test excited population lives 1/Γ."""
        H, channels = damped_qubit
        spectrum = slowest_decay_rates(build_liouvillian(H, channels), k=3)
        mode = observable_lifetime(spectrum, ket_to_dm(basis(2, 1)), number_projector(2, 1))
        assert mode.lifetime == pytest.approx(1.0)

    def test_capacity_limit(self) -> None:
        """Test Hilbert dimensions above 100 are refused."""
        with pytest.raises(CapacityError):
            build_liouvillian(np.zeros((101, 101), dtype=np.complex128), [])

    def test_propagate_matches_closed_form(self, damped_qubit: tuple) -> None:
        """Test matrix-exponential propagation of the decay."""
        H, channels = damped_qubit
        t = np.linspace(0.0, 2.0, 11)
        result = propagate(
            ket_to_dm(basis(2, 1)), build_liouvillian(H, channels), t,
            observables={"P1": number_projector(2, 1)},
        )
        np.testing.assert_allclose(result.observables["P1"], np.exp(-t), atol=1e-12)

    def test_steady_state_solve(self, damped_qubit: tuple) -> None:
        """Test the linear solve agrees with the zero mode."""
        H, channels = damped_qubit
        rho = steady_state(build_liouvillian(H, channels))
        np.testing.assert_allclose(rho, ket_to_dm(basis(2, 0)), atol=1e-12)

    def test_driven_damped_steady_state_is_physical(self) -> None:
        """Test a driven damped qubit relaxes to a valid mixed state."""
        L = build_liouvillian(0.8 * SIGMA_X, [(annihilation(2), 1.0)])
        rho = steady_state(L)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
        np.testing.assert_allclose(L @ rho.flatten(order="F"), np.zeros(4), atol=1e-12)


class TestCircuitDynamics:
    """Test integration of the full two-transmon model."""

    def test_code_state_survives_without_loss(self) -> None:
        """Test L0 fidelity stays above 0.995 over 10/Ω at W = 10Ω."""
        Omega = 2 * math.pi * 5
        params = DeviceParams(W=10 * Omega, delta=2 * math.pi * 350, Omega=Omega, gamma_S=50.0)
        space = build_space(params)
        H = build_hamiltonian(params, space)
        L0, _ = logical_states(space)
        result = evolve(
            ket_to_dm(L0), H, collapse_operators(params, space),
            np.linspace(0.0, 10.0 / Omega, 21),
        )
        assert fidelity(result.final_rho, L0) >= 0.995

    def test_unitary_without_dissipation(self) -> None:
        """Test a lost-photon state stays pure when Γ_P = Γ_S = 0."""
        Omega = 2 * math.pi * 5
        params = DeviceParams(W=10 * Omega, delta=2 * math.pi * 350, Omega=Omega)
        space = build_space(params)
        L0, _ = logical_states(space)
        psi = lose_photon(L0, "l", space)
        result = evolve(
            ket_to_dm(psi), build_hamiltonian(params, space), collapse_operators(params, space),
            np.linspace(0.0, 10.0 / Omega, 21), rtol=1e-10,
        )
        assert abs(purity(result.final_rho) - 1.0) < 1e-8

    def test_full_liouvillian_trace_row(self) -> None:
        """Test 1ᵀ L = 0 for the circuit superoperator."""
        params = DeviceParams(
            W=2 * math.pi * 35, delta=2 * math.pi * 350, Omega=2 * math.pi * 5,
            gamma_P=0.1, gamma_S=50.0,
        )
        space = build_space(params)
        L = build_liouvillian(build_hamiltonian(params, space), collapse_operators(params, space))
        trace_row = np.eye(space.total_dim).flatten(order="F")
        np.testing.assert_allclose(trace_row @ L, np.zeros(L.shape[0]), atol=1e-9)

"""
Closed-form repair and logical error rates.

- Repair rate: Lorentzian in the error-state energy, peaked at ΔE = −W − δ/2
- Logical error rates Γ_E^X, Γ_E^Y from residual loss and off-resonant repair
- Device-level conversions for dephasing lifetimes
"""

from __future__ import annotations

import numpy as np

from .errors import UndefinedRateError
from .hamiltonian import (
    build_hamiltonian,
    build_space,
    code_observables,
    collapse_operators,
    logical_states,
    lose_photon,
)
from .lindblad import build_liouvillian, observable_lifetime, slowest_decay_rates
from .models import DeviceParams, RatePrediction
from .qalgebra import ket_to_dm
from .types import DephasingKind


def gamma_R(dE: float, params: DeviceParams) -> float:
    """Repair rate 4Ω²Γ_S / (4Ω² + 4(ΔE + W + δ/2)² + Γ_S²) in 1/µs."""
    if params.gamma_S <= 0:
        raise UndefinedRateError("Repair rate needs gamma_S > 0")
    omega2 = 4.0 * params.Omega**2
    detuning = dE + params.W + 0.5 * params.delta
    return omega2 * params.gamma_S / (omega2 + 4.0 * detuning**2 + params.gamma_S**2)


def gamma_E(params: DeviceParams) -> tuple[float, float]:
    """Logical error rates (Γ_E^X, Γ_E^Y).

    Γ_E^Y = 2Γ_P(2Γ_P + Γ_R(W − δ/2)) / Γ_R(−W − δ/2)
    Γ_E^X = 2Γ_R(W + δ/2) + Γ_E^Y
    """
    resonant = gamma_R(-params.W - 0.5 * params.delta, params)
    if resonant <= 0:
        raise UndefinedRateError("Resonant repair rate vanishes (Omega = 0?)")
    loss = 2.0 * params.gamma_P * (
        2.0 * params.gamma_P + gamma_R(params.W - 0.5 * params.delta, params)
    ) / resonant
    off_resonant = 2.0 * gamma_R(params.W + 0.5 * params.delta, params)
    return off_resonant + loss, loss


def predict_lifetimes(params: DeviceParams) -> RatePrediction:
    resonant = gamma_R(-params.W - 0.5 * params.delta, params)
    gamma_EX, gamma_EY = gamma_E(params)
    return RatePrediction(
        gamma_R_resonant=resonant,
        gamma_EX=gamma_EX,
        gamma_EY=gamma_EY,
        T1L_pred=1.0 / gamma_EY if gamma_EY > 0 else None,
        T2L_pred=1.0 / gamma_EX if gamma_EX > 0 else None,
        recapture_P=resonant / (resonant + 2.0 * params.gamma_P),
    )


def device_noise_strength(S0_single: float, photon_number: int = 2) -> float:
    """1/f strength seen by the code states; an n-photon state shifts n times as far."""
    return photon_number**2 * S0_single


def dephasing_device_conversion(
    single_qubit: float,
    kind: DephasingKind,
    n_channels: int = 2,
    photon_number: int = 2,
) -> float:
    """Convert a single-qubit, single-channel dephasing lifetime to the device value.

    Both noise families give T ∝ (shift)⁻², so the photon-number factor enters
    squared; independent channels add their rates.

    Args:
        single_qubit: Lifetime from the single-qubit formula (µs)
        kind: "1/f" or "telegraph"
        n_channels: Independent noise channels (one per transmon)
        photon_number: Photons carried by the code states

    Returns:
        Device lifetime in µs (single_qubit / 8 at the defaults)
    """
    if kind not in ("1/f", "telegraph"):
        raise ValueError(f"Unknown dephasing kind '{kind}'")
    return single_qubit / (photon_number**2 * n_channels)


def leakage_bound(params: DeviceParams) -> float:
    """Off-resonant leakage scale 4(Ω/(2W + δ))²."""
    gap = 2.0 * params.W + params.delta
    if gap <= 0:
        raise UndefinedRateError("Leakage bound needs 2W + delta > 0")
    return 4.0 * (params.Omega / gap) ** 2


def repair_rate(params: DeviceParams) -> float:
    """Spectral rate at which a left-loss error state returns to the code space."""
    lossless = params.model_copy(update={"gamma_P": 0.0, "gamma_up": 0.0})
    space = build_space(lossless)
    liouvillian = build_liouvillian(
        build_hamiltonian(lossless, space), collapse_operators(lossless, space)
    )
    spectrum = slowest_decay_rates(liouvillian, k=2)
    L0, _ = logical_states(space)
    rho0 = ket_to_dm(lose_photon(L0, "l", space))
    mode = observable_lifetime(spectrum, rho0, code_observables(space)["P_L0"])
    return float(np.real(mode.rate))

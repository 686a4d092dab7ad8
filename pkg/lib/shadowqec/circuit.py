"""
Transmon spectrum and drive planning for the two-transmon circuit.

- Charge-basis diagonalization with cos φ / sin φ matrix elements
- Drive amplitude ↔ coupling W through the third-order flux expansion
- Quasiparticle matrix-element ratios from half-angle operators
- Two-tone drive plan with a collision report against circuit transitions
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from rich.console import Console
from scipy import linalg

from .errors import ConvergenceError, InfeasiblePlanError, OutOfRangeError
from .models import TransmonParams
from .types import PlanStatus

console = Console(stderr=True)

N_LEVELS = 5
CUTOFF_RTOL = 1e-8
MIN_PHASE_POINTS = 2048
GRID_RTOL = 0.05
COLLISION_THRESHOLD_GHZ = 0.5
RECOMMENDED_DETUNING_GHZ = 1.0
MIN_QUBIT_SPLITTING_GHZ = 1.0


@dataclass(frozen=True)
class TransmonSpectrum:
    """Lowest levels and phase-operator elements in the eigenbasis."""

    energies: NDArray[np.float64]
    C00: float
    C11: float
    C22: float
    C02: float
    C01: float
    S01: float
    S12: float
    n_cutoff: int

    @property
    def anharmonicity(self) -> float:
        e = self.energies
        return float((e[1] - e[0]) - (e[2] - e[1]))

    @property
    def transition(self) -> float:
        return float(self.energies[1] - self.energies[0])


class DriveCoupling(NamedTuple):
    magnitude: float
    sign: int


class CollisionEntry(NamedTuple):
    product: str
    order: int
    frequency: float
    nearest_transition: str
    detuning: float


@dataclass(frozen=True)
class DrivePlan:
    tones: list[tuple[float, float]]
    targets: dict[str, float]
    min_detuning: float
    min_mixing_detuning: float
    collision_report: list[CollisionEntry]
    status: PlanStatus
    meets_recommended: bool
    notes: list[str] = field(default_factory=list)


def _charge_hamiltonian(p: TransmonParams, n_cutoff: int, offset: float = 0.0) -> NDArray[np.float64]:
    charges = np.arange(-n_cutoff, n_cutoff + 1) + offset
    hop = np.full(charges.size - 1, -0.5 * p.EJ)
    return np.diag(4.0 * p.EC * (charges - p.ng) ** 2) + np.diag(hop, 1) + np.diag(hop, -1)


def _lowest(p: TransmonParams, n_cutoff: int, offset: float = 0.0) -> tuple[NDArray, NDArray]:
    energies, vectors = linalg.eigh(_charge_hamiltonian(p, n_cutoff, offset))
    return energies[:N_LEVELS], vectors[:, :N_LEVELS]


def _check_cutoff(p: TransmonParams, energies: NDArray[np.float64]) -> None:
    doubled, _ = _lowest(p, 2 * p.n_cutoff)
    scale = np.maximum(np.abs(doubled[:4]), p.EC)
    change = float(np.max(np.abs(doubled[:4] - energies[:4]) / scale))
    if change >= CUTOFF_RTOL:
        raise ConvergenceError(
            f"n_cutoff={p.n_cutoff} not converged: doubling moves E0..E3 by {change:.2e} (relative)"
        )


def diagonalize_transmon(p: TransmonParams) -> TransmonSpectrum:
    """Diagonalize 4EC(n − ng)² − (EJ/2)Σ(|n⟩⟨n+1| + h.c.).

    cos φ and sin φ are half-sum and half-difference of the unit charge
    translation, so their elements are exact in the truncated basis.
    """
    energies, vectors = _lowest(p, p.n_cutoff)
    _check_cutoff(p, energies)

    raise_charge = np.diag(np.ones(2 * p.n_cutoff), -1)
    cos_phi = vectors.T @ (0.5 * (raise_charge + raise_charge.T)) @ vectors
    # (T − T†)/2i is i × a real antisymmetric matrix in a real eigenbasis
    sin_phi = vectors.T @ (0.5 * (raise_charge - raise_charge.T)) @ vectors

    return TransmonSpectrum(
        energies=energies,
        C00=float(cos_phi[0, 0]),
        C11=float(cos_phi[1, 1]),
        C22=float(cos_phi[2, 2]),
        C02=float(cos_phi[0, 2]),
        C01=float(cos_phi[0, 1]),
        S01=float(abs(sin_phi[0, 1])),
        S12=float(abs(sin_phi[1, 2])),
        n_cutoff=p.n_cutoff,
    )


def charge_dispersion(p: TransmonParams, ng_values: tuple[float, ...] = (0.0, 0.25, 0.5)) -> NDArray[np.float64]:
    """Spread of each of E0..E3 over offset charges, in units of EC."""
    levels = np.array([_lowest(p.model_copy(update={"ng": ng}), p.n_cutoff)[0][:4] for ng in ng_values])
    return (levels.max(axis=0) - levels.min(axis=0)) / p.EC


def W_from_drive(EJi: float, alpha: float, C02: float) -> DriveCoupling:
    """W = −EJi·α³·|C02|²/4; magnitude and sign returned separately."""
    if not 0.0 <= alpha < 1.0:
        raise OutOfRangeError(f"Drive amplitude alpha={alpha} outside [0, 1)")
    return DriveCoupling(EJi * alpha**3 * C02**2 / 4.0, -1)


def alpha_for_W(W: float, EJi: float, C02: float) -> float:
    """Drive amplitude giving coupling magnitude W."""
    if W < 0 or EJi <= 0 or C02 == 0:
        raise OutOfRangeError("alpha_for_W needs W >= 0, EJi > 0 and C02 != 0")
    alpha = (4.0 * W / (EJi * C02**2)) ** (1.0 / 3.0)
    if alpha >= 1.0:
        raise InfeasiblePlanError(f"W={W} needs alpha={alpha:.3f}, outside the perturbative range")
    return float(alpha)


def _phase_gauge(psi: NDArray[np.complex128], origin: int) -> NDArray[np.complex128]:
    """Fix the global phase: ψ(0) real positive, or ψ'(0) for odd states."""
    anchor = psi[origin]
    if abs(anchor) < 1e-6 * np.max(np.abs(psi)):
        anchor = psi[origin + 1]
    return psi * (abs(anchor) / anchor)


def _sector_wavefunctions(
    p: TransmonParams, phases: NDArray[np.float64], offset: float, origin: int
) -> NDArray[np.complex128]:
    """Columns ψ_k(φ) on a 4π grid, normalized to ∫|ψ|² dφ = 1."""
    _, vectors = _lowest(p, p.n_cutoff, offset)
    charges = np.arange(-p.n_cutoff, p.n_cutoff + 1) + offset
    psi = np.exp(1j * np.outer(phases, charges)) @ vectors / math.sqrt(4.0 * math.pi)
    return np.column_stack([_phase_gauge(psi[:, k], origin) for k in range(3)])


def _half_angle_elements(p: TransmonParams, n_points: int) -> tuple[NDArray, NDArray]:
    """⟨odd_i| sin(φ/2) |even_j⟩ and ⟨odd_i| cos(φ/2) |even_j⟩ for i, j < 3."""
    phases = np.linspace(-2.0 * math.pi, 2.0 * math.pi, n_points, endpoint=False)
    origin = n_points // 2
    even = _sector_wavefunctions(p, phases, 0.0, origin)
    # A quasiparticle tunneling event shifts the island charge by half a pair
    odd = _sector_wavefunctions(p, phases, 0.5, origin)
    weight = 4.0 * math.pi / n_points
    sin_half = odd.conj().T @ (np.sin(phases / 2)[:, None] * even) * weight
    cos_half = odd.conj().T @ (np.cos(phases / 2)[:, None] * even) * weight
    return sin_half, cos_half


def _ratios(partner: TransmonParams, n_points: int) -> tuple[float, float]:
    _, cos_half = _half_angle_elements(partner, n_points)
    mean = 0.5 * (cos_half[0, 0] + cos_half[2, 2])
    diff = 0.5 * (cos_half[2, 2] - cos_half[0, 0])
    return float(abs(diff) ** 2 / abs(mean) ** 2), float(abs(cos_half[0, 2]) ** 2 / abs(mean) ** 2)


def qp_matrix_ratios(
    p: TransmonParams, partner: TransmonParams | None = None, n_points: int = MIN_PHASE_POINTS
) -> tuple[float, float]:
    """Relative weight of loss-with-dephasing and triple-photon quasiparticle terms.

    sin((φ_l − φ_r)/2) = sin(φ_l/2)cos(φ_r/2) − cos(φ_l/2)sin(φ_r/2); with a
    quasiparticle crossing the left junction the single-photon loss term is
    S01 · (C00 + C22)/2 on the partner, the Z̃_r-like term carries (C22 − C00)/2
    and the a_l a_r a_r-like term carries C02. Both ratios are normalized to
    the loss term, so the left S01 cancels.

    Returns:
        (r_loss_dephase, r_triple)
    """
    if p.ratio < 20:
        raise OutOfRangeError(f"EJ/EC={p.ratio:.3g} below 20")
    other = partner or p
    if n_points < MIN_PHASE_POINTS:
        raise OutOfRangeError(f"Phase grid needs >= {MIN_PHASE_POINTS} points")

    coarse = _ratios(other, n_points)
    fine = _ratios(other, 2 * n_points)
    for a, b in zip(coarse, fine):
        if abs(b - a) > GRID_RTOL * abs(b):
            raise ConvergenceError(f"Phase grid not converged: ratio {a:.4g} -> {b:.4g}")
    return fine


def closed_form_tones(omega_h: float, omega_lo: float, delta: float) -> tuple[float, float]:
    """(2ω_h + 6ω_lo − 4δ)/5 and (6ω_h − 2ω_lo − 2δ)/5 for ω_h > ω_lo."""
    return (2 * omega_h + 6 * omega_lo - 4 * delta) / 5, (6 * omega_h - 2 * omega_lo - 2 * delta) / 5


def _transitions(omega_l: float, omega_r: float, delta: float) -> dict[str, float]:
    return {
        "2|wl-wr|": 2 * abs(omega_l - omega_r),
        "2(wl+wr-d)": 2 * (omega_l + omega_r - delta),
        "wl": omega_l,
        "wr": omega_r,
        "wl-d": omega_l - delta,
        "wr-d": omega_r - delta,
        "2wl-d": 2 * omega_l - delta,
        "2wr-d": 2 * omega_r - delta,
    }


def _mixing_products(f1: float, f2: float) -> list[tuple[int, int, float]]:
    wanted = {(2, 1), (-1, 2)}
    seen: set[tuple[int, int]] = set()
    products = []
    for n1, n2 in itertools.product(range(-3, 4), repeat=2):
        if (n1, n2) == (0, 0) or abs(n1) + abs(n2) > 3:
            continue
        freq = n1 * f1 + n2 * f2
        if freq < 0:
            n1, n2, freq = -n1, -n2, -freq
        if freq == 0 or (n1, n2) in seen or (n1, n2) in wanted:
            continue
        seen.add((n1, n2))
        products.append((n1, n2, freq))
    return sorted(products, key=lambda item: item[2])


def _describe(n1: int, n2: int) -> str:
    terms = [f"{n:+d}*f{i}" for i, n in ((1, n1), (2, n2)) if n != 0]
    return " ".join(terms).lstrip("+")


def plan_w_drive(
    omega_l: float,
    omega_r: float,
    delta: float,
    threshold: float = COLLISION_THRESHOLD_GHZ,
    recommended: float = RECOMMENDED_DETUNING_GHZ,
    amplitude: float = 1.0,
    junction_asymmetry: float = 0.0,
) -> DrivePlan:
    """Two flux tones whose cubic mixing produces the W coupling.

    Solves 2f1 + f2 = 2(ω_l + ω_r − δ) and 2f2 − f1 = 2|ω_l − ω_r| and checks
    every other product of order up to three against the circuit transitions.
    All frequencies in GHz.
    """
    if abs(omega_l - omega_r) < MIN_QUBIT_SPLITTING_GHZ:
        raise InfeasiblePlanError(
            f"|omega_l - omega_r| = {abs(omega_l - omega_r):.3g} GHz below {MIN_QUBIT_SPLITTING_GHZ} GHz"
        )
    transitions = _transitions(omega_l, omega_r, delta)
    sum_target = transitions["2(wl+wr-d)"]
    diff_target = transitions["2|wl-wr|"]
    f1 = (2 * sum_target - diff_target) / 5
    f2 = (sum_target + 2 * diff_target) / 5
    if f1 <= 0 or f2 <= 0:
        raise InfeasiblePlanError(f"No positive tone pair: f1={f1:.3g}, f2={f2:.3g} GHz")

    report = []
    for n1, n2, freq in _mixing_products(f1, f2):
        name, value = min(transitions.items(), key=lambda item: abs(freq - item[1]))
        report.append(CollisionEntry(_describe(n1, n2), abs(n1) + abs(n2), freq, name, abs(freq - value)))

    min_detuning = min(entry.detuning for entry in report)
    min_mixing = min(entry.detuning for entry in report if entry.order >= 2)
    status = PlanStatus.OK if min_detuning >= threshold else PlanStatus.WARNING

    notes = [
        "Printed closed forms reproduce the quoted tones only with the qubits swapped and delta positive."
    ]
    if junction_asymmetry > 0:
        notes.append("Junction asymmetry adds (EJ1 - EJ2) sin terms that are not modeled.")
        console.print(
            f"[yellow]Warning:[/yellow] junction asymmetry {junction_asymmetry:.3g} ignored in drive plan"
        )
    if status is PlanStatus.WARNING:
        console.print(
            f"[yellow]Warning:[/yellow] drive product within {min_detuning:.3g} GHz of a transition"
        )

    return DrivePlan(
        tones=[(f1, amplitude), (f2, amplitude)],
        targets={"sum": sum_target, "difference": diff_target},
        min_detuning=min_detuning,
        min_mixing_detuning=min_mixing,
        collision_report=report,
        status=status,
        meets_recommended=min_detuning >= recommended,
        notes=notes,
    )


def shadow_drive_freq(omega_k: float, omega_Sk: float, W: float, delta: float) -> float:
    """ω_k + ω_Sk − W − δ for the qubit-shadow pair drive."""
    if omega_k <= 0 or omega_Sk <= 0 or W < 0 or delta < 0:
        raise OutOfRangeError("shadow_drive_freq needs positive mode frequencies and W, delta >= 0")
    return omega_k + omega_Sk - W - delta

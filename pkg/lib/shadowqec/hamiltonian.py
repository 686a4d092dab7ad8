"""Rotating-frame Hamiltonian, code states and dissipators of the two-transmon circuit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from rich.console import Console

from .models import DeviceParams
from .qalgebra import (
    ComplexMatrix,
    StateVector,
    TensorSpace,
    annihilation,
    basis,
    dag,
    embed,
    number_operator,
    number_projector,
    tensor_state,
    xtilde,
    ztilde,
)

console = Console(stderr=True)

MODE_LABELS = ("l", "r", "Sl", "Sr")

_SQRT_HALF = 1.0 / np.sqrt(2.0)
PLUS = _SQRT_HALF * (basis(3, 0) + basis(3, 2))
MINUS = _SQRT_HALF * (-basis(3, 0) + basis(3, 2))


class CollapseChannel(NamedTuple):
    """Jump operator with its rate."""

    operator: ComplexMatrix
    rate: float


@dataclass(frozen=True)
class LogicalBasis:
    """Code states plus the single-photon error doublets."""

    L0: StateVector
    L1: StateVector
    E0p: StateVector
    E0m: StateVector
    E1p: StateVector
    E1m: StateVector


def build_space(params: DeviceParams) -> TensorSpace:
    shadow = params.n_shadow + 1
    return TensorSpace((3, 3, shadow, shadow), MODE_LABELS)


def build_HP(params: DeviceParams, space: TensorSpace) -> ComplexMatrix:
    """−W X̃_l X̃_r + (δ/2)(P¹_l + P¹_r)."""
    xx = embed(xtilde(), "l", space) @ embed(xtilde(), "r", space)
    p1 = embed(number_projector(3, 1), "l", space) + embed(number_projector(3, 1), "r", space)
    return -params.W * xx + 0.5 * params.delta * p1


def build_HPS_HS(params: DeviceParams, space: TensorSpace) -> ComplexMatrix:
    """(W + δ/2)(n_Sl + n_Sr) + Ω(a_l† a_Sl† + a_r† a_Sr† + h.c.)."""
    shadow_dim = space.dim_of("Sl")
    n_s = embed(number_operator(shadow_dim), "Sl", space) + embed(
        number_operator(shadow_dim), "Sr", space
    )
    pair = np.zeros_like(n_s)
    for qubit, shadow in (("l", "Sl"), ("r", "Sr")):
        a_q = embed(annihilation(3), qubit, space)
        a_s = embed(annihilation(shadow_dim), shadow, space)
        pair += dag(a_q) @ dag(a_s)
    return (params.W + 0.5 * params.delta) * n_s + params.Omega * (pair + dag(pair))


def build_hamiltonian(params: DeviceParams, space: TensorSpace | None = None) -> ComplexMatrix:
    space = space or build_space(params)
    return build_HP(params, space) + build_HPS_HS(params, space)


def logical_states(space: TensorSpace) -> tuple[StateVector, StateVector]:
    L0 = tensor_state(space, {"l": PLUS, "r": PLUS})
    L1 = tensor_state(space, {"l": MINUS, "r": MINUS})
    return L0, L1


def error_states(params: DeviceParams, space: TensorSpace) -> LogicalBasis:
    """Single-photon error doublets on the left transmon, valid for W ≫ Ω."""
    if params.Omega > 0 and params.W < 5 * params.Omega:
        console.print(
            f"[yellow]Warning:[/yellow] W={params.W:.4g} < 5*Omega={5 * params.Omega:.4g}; "
            "error doublets are only approximate eigenstates"
        )
    L0, L1 = logical_states(space)
    one = basis(3, 1)
    shadow_one = basis(space.dim_of("Sl"), 1)

    def doublet(code: StateVector) -> tuple[StateVector, StateVector]:
        lost = tensor_state(space, {"l": one, "r": code})
        repaired = tensor_state(space, {"l": code, "r": code, "Sl": shadow_one})
        return _SQRT_HALF * (lost + repaired), _SQRT_HALF * (lost - repaired)

    E0p, E0m = doublet(PLUS)
    E1p, E1m = doublet(MINUS)
    return LogicalBasis(L0=L0, L1=L1, E0p=E0p, E0m=E0m, E1p=E1p, E1m=E1m)


def collapse_operators(params: DeviceParams, space: TensorSpace) -> list[CollapseChannel]:
    shadow_dim = space.dim_of("Sl")
    a_l = embed(annihilation(3), "l", space)
    a_r = embed(annihilation(3), "r", space)
    channels = [
        CollapseChannel(a_l, params.gamma_P),
        CollapseChannel(a_r, params.gamma_P),
        CollapseChannel(embed(annihilation(shadow_dim), "Sl", space), params.gamma_S),
        CollapseChannel(embed(annihilation(shadow_dim), "Sr", space), params.gamma_S),
    ]
    if params.gamma_up > 0:
        channels.append(CollapseChannel(dag(a_l), params.gamma_up))
        channels.append(CollapseChannel(dag(a_r), params.gamma_up))
    return channels


def code_observables(space: TensorSpace) -> dict[str, ComplexMatrix]:
    """Projector onto L0 and the logical parity Z̃_l Z̃_r."""
    L0, _ = logical_states(space)
    return {
        "P_L0": np.outer(L0, L0.conj()),
        "ZZ": embed(ztilde(), "l", space) @ embed(ztilde(), "r", space),
    }


def lose_photon(psi: StateVector, mode: str, space: TensorSpace) -> StateVector:
    """Normalized a_mode|ψ⟩."""
    out = embed(annihilation(space.dim_of(mode)), mode, space) @ psi
    norm = np.linalg.norm(out)
    if norm == 0:
        raise ValueError(f"State has no photon in mode '{mode}'")
    return out / norm

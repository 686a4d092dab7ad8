#!/usr/bin/env python3
"""Run configuration schema for shadowqec experiments."""

import math
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from . import __version__
from .models import DeviceParams, OneOverFParams, TransmonParams
from .types import ExperimentKind, Method, NoiseKind, UnitConvention


class DeviceSection(BaseModel):
    """Circuit parameters as entered; energies follow the unit convention."""

    W: float = Field(default=35.0, ge=0.0, description="Code coupling (MHz·2π or rad/µs)")
    delta: float = Field(default=350.0, ge=0.0, description="Single-photon detuning")
    Omega: float = Field(default=5.0, ge=0.0, description="Qubit-shadow pair drive")
    gamma_S: float = Field(default=50.0, ge=0.0, description="Shadow decay rate (1/µs)")
    gamma_up: float = Field(default=0.0, ge=0.0, description="Thermal excitation rate (1/µs)")
    n_shadow: Literal[1, 2] = Field(default=1, description="Shadow resonator truncation")


class LifetimesSection(BaseModel):
    """T1P sweep for the logical lifetimes."""

    T1P_grid: list[float] = Field(
        default=[0.3, 1.0, 3.0, 10.0, 30.0, 100.0],
        min_length=1,
        description="Physical lifetimes to sweep (µs)"
    )
    n_times: int = Field(default=400, ge=16, description="Samples per time-domain trace")
    horizon: float = Field(
        default=3.0,
        gt=0.0,
        description="Time-domain window in units of the predicted lifetime"
    )
    rtol: float = Field(default=1e-8, ge=1e-10, le=1e-4, description="Integrator tolerance")
    transient_cut: Optional[float] = Field(
        default=None,
        ge=0.0,
        description="Fit window start (µs); defaults to 3/Omega"
    )
    fit_floor: Literal["steady_state", "fixed"] = Field(
        default="steady_state",
        description="Time-domain fit asymptote: steady-state values, or 1/2 for P_L0 and 0 for ZZ"
    )

    @field_validator('T1P_grid')
    @classmethod
    def positive_grid(cls, v: list[float]) -> list[float]:
        if any(t <= 0 for t in v):
            raise ValueError("T1P values must be positive")
        return v


class OneOverFSection(BaseModel):
    """1/f Rabi-protection run calibrated to an echo lifetime."""

    W_grid: list[float] = Field(default=[0.0, 1.0, 2.0, 3.0, 4.0], min_length=1)
    T2_echo_target: float = Field(default=1.0, gt=0.0, description="Echo 1/e time to match (µs)")
    S0: Optional[float] = Field(default=None, ge=0.0, description="Skip calibration when set")
    t_max: float = Field(default=10.0, gt=0.0, description="Rabi trace length (µs)")
    n_traces: int = Field(default=200, ge=50)
    echo_traces: int = Field(default=300, ge=300)
    n_components: int = Field(default=200, ge=100)


class TelegraphSection(BaseModel):
    """Telegraph power-law sweep; W and Δω follow the unit convention."""

    W_grid: list[float] = Field(default=[10.0, 16.0, 22.0, 28.0], min_length=2)
    delta_omega10_grid: list[float] = Field(default=[0.25, 0.35, 0.45, 0.55], min_length=2)
    gamma_sw_grid: list[float] = Field(default=[4.0, 10.0, 16.0, 22.0], min_length=2)
    n_traces: int = Field(default=200, ge=50)
    shift_fraction: float = Field(default=0.5, gt=0.0, le=1.0)
    max_steps: int = Field(default=100_000, ge=1000, description="Cap on samples per trace")


class PlanSection(BaseModel):
    """Drive planning inputs in GHz."""

    omega_l: float = Field(default=6.5, gt=0.0)
    omega_r: float = Field(default=4.5, gt=0.0)
    delta: float = Field(default=0.35, ge=0.0)
    omega_S: float = Field(default=6.0, gt=0.0, description="Shadow resonator frequency")
    threshold: float = Field(default=0.5, gt=0.0, description="Warning level (GHz)")
    recommended: float = Field(default=1.0, gt=0.0, description="Recommended detuning (GHz)")


class TransmonSection(BaseModel):
    """Transmon design point in GHz."""

    EJ_over_EC: float = Field(default=50.0, ge=20.0)
    EC: float = Field(default=0.3, gt=0.0)
    ng: float = Field(default=0.0)
    n_cutoff: int = Field(default=30, ge=20)
    EJi: float = Field(default=15.0, gt=0.0, description="Coupler junction energy (GHz)")
    W_target: float = Field(default=0.035, ge=0.0, description="Target coupling (GHz)")


class SweepConfig(BaseModel):
    """Complete run document."""

    experiment: ExperimentKind = Field(default="lifetimes")
    units: UnitConvention = Field(default="mhz_2pi")
    seed: Optional[int] = Field(default=None, ge=0, description="Master seed")
    threads: int = Field(default=1, ge=1, le=64)
    method: Method = Field(default="spectral")
    noise: list[NoiseKind] = Field(default=["one_over_f"], min_length=1)
    output: Path = Field(default=Path("results"))

    device: DeviceSection = Field(default_factory=DeviceSection)
    lifetimes: LifetimesSection = Field(default_factory=LifetimesSection)
    one_over_f: OneOverFSection = Field(default_factory=OneOverFSection)
    telegraph: TelegraphSection = Field(default_factory=TelegraphSection)
    plan: PlanSection = Field(default_factory=PlanSection)
    transmon: TransmonSection = Field(default_factory=TransmonSection)

    class Config:
        json_schema_extra = {
            "example": {
                "experiment": "lifetimes",
                "units": "mhz_2pi",
                "method": "both",
                "device": {"W": 35.0, "delta": 350.0, "Omega": 5.0, "gamma_S": 50.0},
                "lifetimes": {"T1P_grid": [0.3, 1.0, 3.0]},
            }
        }

    @model_validator(mode='after')
    def seed_for_stochastic(self) -> "SweepConfig":
        if self.experiment == "dephasing" and self.seed is None:
            raise ValueError("dephasing runs need a master seed")
        return self

    def energy(self, value: float) -> float:
        """Internal rad/µs value of an entered energy."""
        return 2.0 * math.pi * value if self.units == "mhz_2pi" else value

    def device_params(self, T1P: Optional[float] = None) -> DeviceParams:
        d = self.device
        params = DeviceParams(
            W=self.energy(d.W),
            delta=self.energy(d.delta),
            Omega=self.energy(d.Omega),
            gamma_S=d.gamma_S,
            gamma_up=d.gamma_up,
            n_shadow=d.n_shadow,
        )
        return params.with_loss(T1P) if T1P is not None else params

    def one_over_f_params(self, S0: float, f_min: float, f_max: float) -> OneOverFParams:
        return OneOverFParams(S0=S0, f_min=f_min, f_max=f_max, n_components=self.one_over_f.n_components)

    def telegraph_grid(self) -> list[tuple[float, float, float]]:
        t = self.telegraph
        return [
            (self.energy(W), self.energy(dw), g)
            for W in t.W_grid
            for dw in t.delta_omega10_grid
            for g in t.gamma_sw_grid
        ]

    def transmon_params(self) -> TransmonParams:
        t = self.transmon
        return TransmonParams(EJ=t.EJ_over_EC * t.EC, EC=t.EC, ng=t.ng, n_cutoff=t.n_cutoff)

    def echo(self) -> dict[str, Any]:
        """Entered document, resolved internal values, unit flag, seed and version."""
        resolved: dict[str, Any] = {
            "device": self.device_params().model_dump(mode='json'),
            "one_over_f_W_grid": [self.energy(w) for w in self.one_over_f.W_grid],
        }
        if self.experiment == "dephasing" and "telegraph" in self.noise:
            resolved["telegraph_grid"] = [list(point) for point in self.telegraph_grid()]
        return {
            "entered": self.model_dump(mode='json'),
            "resolved": resolved,
            "units": self.units,
            "seed": self.seed,
            "version": __version__,
        }

#!/usr/bin/env python3
"""Shared Pydantic models for shadowqec.

All energies are angular frequencies in rad/µs and all rates are in 1/µs
(ħ = 1). Conversion from lab units happens in the config layer.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DeviceParams(BaseModel):
    """Rotating-frame parameters of the two-transmon circuit."""

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "W": 219.91,
                "delta": 2199.11,
                "Omega": 31.42,
                "gamma_P": 0.1,
                "gamma_S": 50.0,
                "gamma_up": 0.0,
                "n_shadow": 1,
            }
        },
    )

    W: float = Field(..., ge=0.0, description="Two-photon exchange coupling (rad/µs)")
    delta: float = Field(..., ge=0.0, description="Nonlinearity of the 1-photon states (rad/µs)")
    Omega: float = Field(..., ge=0.0, description="Qubit-shadow pair coupling (rad/µs)")
    gamma_P: float = Field(default=0.0, ge=0.0, description="Photon loss rate 1/T1P (1/µs)")
    gamma_S: float = Field(default=0.0, ge=0.0, description="Shadow resonator decay rate (1/µs)")
    gamma_up: float = Field(default=0.0, ge=0.0, description="Incoherent photon addition rate (1/µs)")
    n_shadow: Literal[1, 2] = Field(default=1, description="Shadow truncation (levels - 1)")

    @property
    def T1P(self) -> Optional[float]:
        """Bare photon lifetime in µs, None without loss."""
        return 1.0 / self.gamma_P if self.gamma_P > 0 else None

    def with_loss(self, T1P_us: float) -> "DeviceParams":
        """Copy with gamma_P set from a bare lifetime."""
        return self.model_copy(update={"gamma_P": 1.0 / T1P_us})


class TelegraphParams(BaseModel):
    """Two-state fluctuator shifting the qubit frequency."""

    model_config = ConfigDict(frozen=True)

    delta_omega10: float = Field(..., ge=0.0, description="Frequency shift when on (rad/µs)")
    gamma_sw: float = Field(..., gt=0.0, description="Switching rate (1/µs)")
    shift_fraction: float = Field(
        default=0.5,
        gt=0.0,
        le=1.0,
        description="sigma_z coefficient in the on state, as a fraction of delta_omega10",
    )

    @property
    def on_value(self) -> float:
        return self.shift_fraction * self.delta_omega10


class OneOverFParams(BaseModel):
    """Sum-of-cosines 1/f noise with S(ω) = 2π S0 / ω."""

    model_config = ConfigDict(frozen=True)

    S0: float = Field(..., ge=0.0, description="Noise power normalization (rad²/µs²)")
    f_min: float = Field(..., gt=0.0, description="Lowest synthesized frequency (1/µs)")
    f_max: float = Field(..., gt=0.0, description="Highest synthesized frequency (1/µs)")
    n_components: int = Field(default=200, ge=100, description="Number of cosines")

    @model_validator(mode="after")
    def _check_band(self) -> "OneOverFParams":
        if self.f_min >= self.f_max:
            raise ValueError(f"f_min ({self.f_min}) must be below f_max ({self.f_max})")
        return self

    def scaled(self, factor: float) -> "OneOverFParams":
        """Copy with S0 multiplied by factor."""
        return self.model_copy(update={"S0": self.S0 * factor})


class TransmonParams(BaseModel):
    """Charge-basis transmon."""

    model_config = ConfigDict(frozen=True)

    EJ: float = Field(..., gt=0.0, description="Josephson energy")
    EC: float = Field(..., gt=0.0, description="Charging energy (same units as EJ)")
    ng: float = Field(default=0.0, description="Offset charge")
    n_cutoff: int = Field(default=30, ge=20, description="Charge states kept on each side of 0")

    @property
    def ratio(self) -> float:
        return self.EJ / self.EC


class RatePrediction(BaseModel):
    """Closed-form repair and logical error rates for one device point."""

    gamma_R_resonant: float = Field(..., ge=0.0)
    gamma_EX: float = Field(..., ge=0.0)
    gamma_EY: float = Field(..., ge=0.0)
    T1L_pred: Optional[float] = Field(None, description="1/gamma_EY in µs, None if infinite")
    T2L_pred: Optional[float] = Field(None, description="1/gamma_EX in µs, None if infinite")
    recapture_P: float = Field(..., ge=0.0, le=1.0)

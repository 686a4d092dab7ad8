#!/usr/bin/env python3
"""Shared type definitions for shadowqec."""

from enum import Enum
from typing import Literal


# Spin-noise protocols
Protocol = Literal["free", "rabi", "echo"]

# Noise families
NoiseKind = Literal["one_over_f", "telegraph"]

# Lifetime extraction methods
Method = Literal["spectral", "timedomain", "both"]

# Unit convention for energies entered in configs
UnitConvention = Literal["mhz_2pi", "rad_per_us"]

# Device-level dephasing conversions
DephasingKind = Literal["1/f", "telegraph"]

# Experiments the CLI can run
ExperimentKind = Literal["lifetimes", "dephasing", "rates", "plan", "transmon"]


class PlanStatus(str, Enum):
    """Outcome of a drive-frequency collision check."""
    OK = "ok"
    WARNING = "warning"


class ExitCode(int, Enum):
    """Process exit codes for the CLI."""
    SUCCESS = 0
    VALIDATION = 2
    NUMERICAL = 3

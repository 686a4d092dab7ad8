"""
shadowqec - passively error-corrected two-transmon logical qubit simulator.

Provides:
- Truncated-oscillator operator algebra and the rotating-frame circuit model
- Lindblad integration and Liouvillian spectral lifetimes
- Closed-form repair and logical error rates
- Monte Carlo 1/f and telegraph dephasing under Rabi drive
- Transmon matrix elements and drive-frequency planning
"""

__version__ = "0.1.0"

from .circuit import (
    DrivePlan,
    TransmonSpectrum,
    W_from_drive,
    alpha_for_W,
    diagonalize_transmon,
    plan_w_drive,
    qp_matrix_ratios,
    shadow_drive_freq,
)
from .config import SweepConfig
from .config_loader import ConfigLoader
from .dephasing import (
    NoiseTrace,
    calibrate_S0_to_echo,
    ensemble_average,
    evolve_spin,
    gen_one_over_f,
    gen_telegraph,
    rabi_T2_prediction,
    telegraph_sweep,
)
from .errors import NumericalError, ShadowQECError
from .fitting import DecayFit, fit_exponential, fit_powerlaw_multi
from .hamiltonian import (
    LogicalBasis,
    build_hamiltonian,
    build_HP,
    build_HPS_HS,
    build_space,
    collapse_operators,
    error_states,
    logical_states,
)
from .lindblad import (
    EvolutionResult,
    LiouvillianSpectrum,
    build_liouvillian,
    evolve,
    lindblad_rhs,
    slowest_decay_rates,
)
from .models import (
    DeviceParams,
    OneOverFParams,
    RatePrediction,
    TelegraphParams,
    TransmonParams,
)
from .qalgebra import (
    TensorSpace,
    annihilation,
    embed,
    expectation,
    number_projector,
    xtilde,
    ztilde,
)
from .rates import dephasing_device_conversion, gamma_E, gamma_R, predict_lifetimes

__all__ = [
    "ConfigLoader",
    "DecayFit",
    "DeviceParams",
    "DrivePlan",
    "EvolutionResult",
    "LiouvillianSpectrum",
    "LogicalBasis",
    "NoiseTrace",
    "NumericalError",
    "OneOverFParams",
    "RatePrediction",
    "ShadowQECError",
    "SweepConfig",
    "TelegraphParams",
    "TensorSpace",
    "TransmonParams",
    "TransmonSpectrum",
    "W_from_drive",
    "__version__",
    "alpha_for_W",
    "annihilation",
    "build_HP",
    "build_HPS_HS",
    "build_hamiltonian",
    "build_liouvillian",
    "build_space",
    "calibrate_S0_to_echo",
    "collapse_operators",
    "dephasing_device_conversion",
    "diagonalize_transmon",
    "embed",
    "ensemble_average",
    "error_states",
    "evolve",
    "evolve_spin",
    "expectation",
    "fit_exponential",
    "fit_powerlaw_multi",
    "gamma_E",
    "gamma_R",
    "gen_one_over_f",
    "gen_telegraph",
    "lindblad_rhs",
    "logical_states",
    "number_projector",
    "plan_w_drive",
    "predict_lifetimes",
    "qp_matrix_ratios",
    "rabi_T2_prediction",
    "shadow_drive_freq",
    "slowest_decay_rates",
    "telegraph_sweep",
    "xtilde",
    "ztilde",
]

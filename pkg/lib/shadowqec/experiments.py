#!/usr/bin/env python3
"""
Experiment runners behind the CLI.

- Logical lifetime sweeps over T1P (spectral and time-domain)
- 1/f and telegraph dephasing runs
- Rate, drive-plan and transmon reports

Each runner writes its files into config.output and returns their paths.
CSV files start with a '# config:' line holding the echo block; JSON
reports embed it under "config". Row order follows the grid.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, NamedTuple, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.progress import Progress
from scipy import optimize

from .circuit import (
    W_from_drive,
    alpha_for_W,
    charge_dispersion,
    closed_form_tones,
    diagonalize_transmon,
    plan_w_drive,
    qp_matrix_ratios,
    shadow_drive_freq,
)
from .config import LifetimesSection, SweepConfig
from .dephasing import (
    HEADLINE_TELEGRAPH_FIT,
    PUBLISHED_TELEGRAPH_FIT,
    calibrate_S0_to_echo,
    default_band,
    echo_time,
    ensemble_average,
    fit_rabi_window,
    rabi_T2_prediction,
    telegraph_formula,
    telegraph_sweep,
    white_noise_coherence,
)
from .errors import BracketError, FitError
from .fitting import DecayFit, echo_gaussianity, fit_exponential, loglog_slope
from .hamiltonian import (
    build_hamiltonian,
    build_space,
    code_observables,
    collapse_operators,
    logical_states,
    lose_photon,
)
from .lindblad import (
    build_liouvillian,
    evolve,
    observable_lifetime,
    propagate,
    slowest_decay_rates,
    steady_state,
)
from .models import DeviceParams
from .qalgebra import ComplexMatrix, expectation, fidelity, ket_to_dm
from .rates import (
    dephasing_device_conversion,
    gamma_R,
    leakage_bound,
    predict_lifetimes,
    repair_rate,
)

console = Console(stderr=True)

LIFETIME_COLUMNS = [
    "T1P_us",
    "T1L_us",
    "T2L_us",
    "T1L_over_T1P",
    "T2L_over_T1P",
    "T1L_pred_us",
    "T2L_pred_us",
    "fit_residual",
    "method",
]

# Above this t·‖H‖ the time-domain path switches from Runge-Kutta to exact propagation
RK_WORK_LIMIT = 5e4
# Leakage-free asymptotes of P_L0 and Z̃_l Z̃_r
FIXED_FLOORS = {"P_L0": 0.5, "ZZ": 0.0}
LOSS_WINDOW_US = (0.3, 3.0)
CURVE_POINTS = 401

# Published telegraph operating points: (W/2π MHz, Γ_sw, Δω/2π MHz, quoted device T_LZ µs)
TELEGRAPH_ENDPOINTS = [
    (25.0, 11.9, 0.48, 200.0),
    (35.0, 4.96, 0.2, 6000.0),
]


@dataclass(frozen=True)
class LifetimeRow:
    T1P_us: float
    T1L_us: float
    T2L_us: float
    T1L_pred_us: Optional[float]
    T2L_pred_us: Optional[float]
    fit_residual: float
    method: str

    def as_row(self) -> list[Any]:
        return [
            self.T1P_us,
            self.T1L_us,
            self.T2L_us,
            self.T1L_us / self.T1P_us,
            self.T2L_us / self.T1P_us,
            "" if self.T1L_pred_us is None else self.T1L_pred_us,
            "" if self.T2L_pred_us is None else self.T2L_pred_us,
            self.fit_residual,
            self.method,
        ]


class RecoveryReport(NamedTuple):
    fidelity: float
    ZZ: float
    repair_rate: float
    predicted_rate: float


def _system(params: DeviceParams) -> tuple[Any, ComplexMatrix, list]:
    space = build_space(params)
    return space, build_hamiltonian(params, space), collapse_operators(params, space)


def parity_states(space: Any) -> tuple[np.ndarray, np.ndarray]:
    """(L0 ± L1)/√2, the Z̃_l Z̃_r = ±1 logical states."""
    L0, L1 = logical_states(space)
    return (L0 + L1) / math.sqrt(2.0), (L0 - L1) / math.sqrt(2.0)


def spectral_lifetimes(params: DeviceParams) -> tuple[float, float]:
    """T1L from P_L0 and T2L from Z̃_l Z̃_r via the dominant Liouvillian modes."""
    space, H, channels = _system(params)
    spectrum = slowest_decay_rates(build_liouvillian(H, channels), k=4)
    obs = code_observables(space)
    L0, _ = logical_states(space)
    T1L = observable_lifetime(spectrum, ket_to_dm(L0), obs["P_L0"]).lifetime
    T2L = float(
        np.mean([observable_lifetime(spectrum, ket_to_dm(psi), obs["ZZ"]).lifetime for psi in parity_states(space)])
    )
    return T1L, T2L


def timedomain_lifetimes(
    params: DeviceParams, section: LifetimesSection, estimate: tuple[float, float]
) -> tuple[float, float, float]:
    """Exponential fits to P_L0 and ±Z̃_l Z̃_r over horizon × the estimated lifetimes.

    Floors follow section.fit_floor: the steady-state expectation values, or
    FIXED_FLOORS. Returns (T1L, T2L, worst residual).
    """
    space, H, channels = _system(params)
    L = build_liouvillian(H, channels)
    rho_ss = steady_state(L)
    obs = code_observables(space)
    cut = section.transient_cut if section.transient_cut is not None else 3.0 / params.Omega
    h_norm = float(np.max(np.abs(np.linalg.eigvalsh(H))))

    def fit(psi: np.ndarray, name: str, sign: float, lifetime: float) -> DecayFit:
        t_max = section.horizon * lifetime
        grid = np.linspace(0.0, t_max, section.n_times)
        rho0 = ket_to_dm(psi)
        if t_max * h_norm < RK_WORK_LIMIT:
            result = evolve(rho0, H, channels, grid, rtol=section.rtol, observables={name: obs[name]})
        else:
            result = propagate(rho0, L, grid, observables={name: obs[name]})
        if section.fit_floor == "fixed":
            floor = sign * FIXED_FLOORS[name]
        else:
            floor = sign * expectation(rho_ss, obs[name]).real
        return fit_exponential(result.times, sign * result.observables[name], min(cut, 0.1 * t_max), floor)

    L0, _ = logical_states(space)
    plus, minus = parity_states(space)
    t1 = fit(L0, "P_L0", 1.0, estimate[0])
    t2 = [fit(plus, "ZZ", 1.0, estimate[1]), fit(minus, "ZZ", -1.0, estimate[1])]
    T2L = float(np.mean([f.lifetime for f in t2]))
    residual = max(f.residual_rms for f in [t1, *t2])
    return t1.lifetime, T2L, residual


def lifetime_point(config: SweepConfig, T1P: float) -> list[LifetimeRow]:
    """Rows for one T1P under the configured method(s)."""
    params = config.device_params(T1P)
    prediction = predict_lifetimes(params)
    rows = []
    spectral: Optional[tuple[float, float]] = None
    if config.method in ("spectral", "both"):
        spectral = spectral_lifetimes(params)
        rows.append(
            LifetimeRow(T1P, spectral[0], spectral[1], prediction.T1L_pred, prediction.T2L_pred, 0.0, "spectral")
        )
    if config.method in ("timedomain", "both"):
        if prediction.T1L_pred is not None and prediction.T2L_pred is not None:
            estimate = (prediction.T1L_pred, prediction.T2L_pred)
        else:
            estimate = spectral or spectral_lifetimes(params)
        T1L, T2L, residual = timedomain_lifetimes(params, config.lifetimes, estimate)
        rows.append(
            LifetimeRow(T1P, T1L, T2L, prediction.T1L_pred, prediction.T2L_pred, residual, "timedomain")
        )
    return rows


def breakeven_t1p(rows: Sequence[LifetimeRow]) -> Optional[float]:
    """T1P where T1L/T1P crosses 1, interpolated on log axes; None without a crossing."""
    ordered = sorted(rows, key=lambda r: r.T1P_us)
    for a, b in zip(ordered, ordered[1:]):
        ga = math.log(a.T1L_us / a.T1P_us)
        gb = math.log(b.T1L_us / b.T1P_us)
        if ga == 0:
            return a.T1P_us
        if ga * gb < 0:
            frac = ga / (ga - gb)
            return math.exp(math.log(a.T1P_us) + frac * (math.log(b.T1P_us) - math.log(a.T1P_us)))
    return None


def analytic_breakeven(params: DeviceParams) -> float:
    """T1P at which 1/Γ_E^Y equals T1P."""

    def gap(log_T1P: float) -> float:
        T1P = math.exp(log_T1P)
        T1L = predict_lifetimes(params.with_loss(T1P)).T1L_pred
        return math.log(T1L / T1P) if T1L is not None else math.inf

    lo, hi = math.log(1e-4), math.log(1e4)
    if not gap(lo) < 0 < gap(hi):
        raise BracketError("Predicted T1L/T1P does not cross 1 on [1e-4, 1e4] µs")
    return math.exp(optimize.brentq(gap, lo, hi, xtol=1e-10))


def loss_window_slope(rows: Sequence[LifetimeRow], window: tuple[float, float] = LOSS_WINDOW_US) -> Optional[float]:
    picked = [r for r in rows if window[0] <= r.T1P_us <= window[1]]
    if len({r.T1P_us for r in picked}) < 2:
        return None
    return loglog_slope([r.T1P_us for r in picked], [r.T1L_us for r in picked])


def loss_recovery(params: DeviceParams, periods: float = 10.0, n_times: int = 200) -> RecoveryReport:
    """Evolve a single left-transmon loss without further loss and report the recovery.

    Fidelity is to L0 after a loss from L0; Z̃_l Z̃_r is measured after a
    loss from the (L0 + L1)/√2 superposition.
    """
    lossless = params.model_copy(update={"gamma_P": 0.0, "gamma_up": 0.0})
    space, H, channels = _system(lossless)
    predicted = gamma_R(-lossless.W - 0.5 * lossless.delta, lossless)
    grid = np.linspace(0.0, periods / predicted, n_times)
    obs = code_observables(space)
    L0, _ = logical_states(space)
    plus, _ = parity_states(space)

    from_L0 = evolve(ket_to_dm(lose_photon(L0, "l", space)), H, channels, grid)
    from_plus = evolve(
        ket_to_dm(lose_photon(plus, "l", space)), H, channels, grid, observables={"ZZ": obs["ZZ"]}
    )
    return RecoveryReport(
        fidelity=fidelity(from_L0.final_rho, L0),
        ZZ=float(from_plus.observables["ZZ"][-1]),
        repair_rate=repair_rate(lossless),
        predicted_rate=predicted,
    )


def telegraph_endpoints() -> list[dict[str, Any]]:
    """Formula and device lifetimes at the published operating points, Γ_sw with and without 2π."""
    table = []
    for W_mhz, gamma_sw, dw_mhz, quoted in TELEGRAPH_ENDPOINTS:
        W, dw = 2 * math.pi * W_mhz, 2 * math.pi * dw_mhz
        for convention, gamma in (("as_given", gamma_sw), ("times_2pi", 2 * math.pi * gamma_sw)):
            headline = telegraph_formula(W, dw, gamma, HEADLINE_TELEGRAPH_FIT)
            device = dephasing_device_conversion(headline, "telegraph")
            table.append(
                {
                    "W_over_2pi_MHz": W_mhz,
                    "delta_omega10_over_2pi_MHz": dw_mhz,
                    "gamma_sw": gamma,
                    "gamma_convention": convention,
                    "formula_us": headline,
                    "fitted_formula_us": telegraph_formula(W, dw, gamma, PUBLISHED_TELEGRAPH_FIT),
                    "device_us": device,
                    "quoted_us": quoted,
                    "ratio_to_quoted": device / quoted,
                }
            )
    return table


def device_projection(T2_echo_single: float, W: float, seed: int, threads: int = 1) -> dict[str, float]:
    """Calibrate single-qubit 1/f strength to an echo time and project the logical T_LZ."""
    S0 = calibrate_S0_to_echo(T2_echo_single, seed=seed, threads=threads)
    single = rabi_T2_prediction(S0, W)
    return {
        "T2_echo_single_us": T2_echo_single,
        "S0_single": S0,
        "T2_rabi_single_us": single,
        "T_LZ_us": dephasing_device_conversion(single, "1/f"),
    }


# ============================================================================
# Output
# ============================================================================


def _config_line(config: SweepConfig) -> str:
    return "# config: " + json.dumps(config.echo(), sort_keys=True)


def write_csv(path: Path, config: SweepConfig, header: list[str], rows: Sequence[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(_config_line(config) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_json(path: Path, config: SweepConfig, payload: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"config": config.echo(), **payload}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(document, f, sort_keys=True, indent=2, default=float)
        f.write("\n")
    return path


def _map_in_order(func: Any, items: Sequence[Any], threads: int, label: str) -> list[Any]:
    """Parallel map whose results follow input order, with a progress bar on stderr."""
    results = []
    with ThreadPoolExecutor(max_workers=threads) as pool, Progress(console=console, transient=True) as progress:
        task = progress.add_task(label, total=len(items))
        for result in pool.map(func, items):
            results.append(result)
            progress.advance(task)
    return results


# ============================================================================
# Runners
# ============================================================================


def run_sweep_lifetimes(config: SweepConfig) -> list[Path]:
    start = time.perf_counter()
    grid = config.lifetimes.T1P_grid
    rows = [
        row
        for point in _map_in_order(lambda T1P: lifetime_point(config, T1P), grid, config.threads, "lifetimes")
        for row in point
    ]
    for row in rows:
        if row.T2L_us > row.T1L_us * (1 + 1e-6):
            console.print(
                f"[yellow]Warning:[/yellow] T2L > T1L at T1P={row.T1P_us} ({row.method})"
            )

    summary: dict[str, Any] = {"analytic_breakeven_us": analytic_breakeven(config.device_params())}
    for method in sorted({r.method for r in rows}):
        subset = [r for r in rows if r.method == method]
        summary[method] = {"breakeven_us": breakeven_t1p(subset), "loss_window_slope": loss_window_slope(subset)}

    paths = [
        write_csv(config.output / "lifetimes.csv", config, LIFETIME_COLUMNS, [r.as_row() for r in rows]),
        write_json(config.output / "lifetimes_summary.json", config, summary),
    ]
    console.print(f"[dim]lifetimes: {len(rows)} rows in {time.perf_counter() - start:.1f}s[/dim]")
    return paths


def _run_one_over_f(config: SweepConfig, seed: int) -> list[Path]:
    section = config.one_over_f
    if section.S0 is not None:
        S0 = section.S0
    else:
        S0 = calibrate_S0_to_echo(
            section.T2_echo_target,
            seed=seed,
            n_traces=section.echo_traces,
            n_components=section.n_components,
            threads=config.threads,
        )
    measured_echo, echo_run = echo_time(
        S0, section.T2_echo_target, seed, section.echo_traces, section.n_components, threads=config.threads
    )

    t_out = np.linspace(0.0, section.t_max, CURVE_POINTS)
    curves = []
    lifetimes = []
    for index, W_entered in enumerate(section.W_grid):
        W = config.energy(W_entered)
        f_min, f_max = default_band(section.t_max, W)
        spec = config.one_over_f_params(S0, f_min, f_max)
        result = ensemble_average(
            spec, W, "rabi", section.n_traces, seed + 1 + index, section.t_max, 0.25 / f_max,
            threads=config.threads, fit=False,
        )
        curves.append(np.interp(t_out, result.times, result.curve))
        try:
            fit = fit_rabi_window(result.times, result.curve, W, None)
            T2, residual = fit.lifetime, fit.residual_rms
        except FitError as e:
            console.print(f"[yellow]Warning:[/yellow] no decay fit at W={W_entered}: {e}")
            T2, residual = math.nan, math.nan
        predicted = rabi_T2_prediction(S0, W) if W > 0 else math.nan
        lifetimes.append([W_entered, W, T2, predicted, residual, S0])

    # White dephasing at the echo-matched rate; no drive protects against it
    curves.append(white_noise_coherence(1.0 / section.T2_echo_target, t_out))
    header = ["t_us"] + [f"coherence_W_{w:g}" for w in section.W_grid] + ["white_noise_baseline"]
    curve_rows = [[t, *values] for t, values in zip(t_out, np.column_stack(curves))]
    return [
        write_csv(config.output / "one_over_f_curves.csv", config, header, curve_rows),
        write_csv(
            config.output / "one_over_f_lifetimes.csv",
            config,
            ["W_entered", "W_rad_per_us", "T2_fit_us", "T2_pred_us", "fit_residual", "S0"],
            lifetimes,
        ),
        write_json(
            config.output / "one_over_f_echo.json",
            config,
            {
                "S0": S0,
                "T2_echo_target_us": section.T2_echo_target,
                "T2_echo_measured_us": measured_echo,
                "echo_gaussianity_r2": echo_gaussianity(echo_run.times, echo_run.curve),
            },
        ),
    ]


def _run_telegraph(config: SweepConfig, seed: int) -> list[Path]:
    section = config.telegraph
    sweep = telegraph_sweep(
        config.telegraph_grid(),
        section.n_traces,
        seed,
        threads=config.threads,
        shift_fraction=section.shift_fraction,
        max_steps=section.max_steps,
    )
    points = [[p.W, p.delta_omega10, p.gamma_sw, p.T2, p.residual_rms] for p in sweep.points]
    return [
        write_csv(
            config.output / "telegraph_points.csv",
            config,
            ["W_rad_per_us", "delta_omega10_rad_per_us", "gamma_sw_per_us", "T2_us", "fit_residual"],
            points,
        ),
        write_json(
            config.output / "telegraph_fit.json",
            config,
            {
                "fit": sweep.fit._asdict(),
                "shift_fraction": sweep.shift_fraction,
                "endpoints": telegraph_endpoints(),
            },
        ),
    ]


def run_dephasing(config: SweepConfig) -> list[Path]:
    if config.seed is None:
        raise ValueError("dephasing runs need a master seed")
    start = time.perf_counter()
    paths: list[Path] = []
    if "one_over_f" in config.noise:
        paths += _run_one_over_f(config, config.seed)
    if "telegraph" in config.noise:
        paths += _run_telegraph(config, config.seed)
    console.print(f"[dim]dephasing: {len(paths)} files in {time.perf_counter() - start:.1f}s[/dim]")
    return paths


def run_rates(config: SweepConfig) -> list[Path]:
    base = config.device_params()
    predictions = []
    for T1P in config.lifetimes.T1P_grid:
        params = config.device_params(T1P)
        predictions.append({"T1P_us": T1P, **predict_lifetimes(params).model_dump(mode="json")})
    payload = {
        "predictions": predictions,
        "gamma_R_resonant": gamma_R(-base.W - 0.5 * base.delta, base),
        "gamma_R_W_minus_half_delta": gamma_R(base.W - 0.5 * base.delta, base),
        "gamma_R_W_plus_half_delta": gamma_R(base.W + 0.5 * base.delta, base),
        "repair_rate_spectral": repair_rate(base),
        "leakage_bound": leakage_bound(base),
        "analytic_breakeven_us": analytic_breakeven(base),
    }
    return [write_json(config.output / "rates.json", config, payload)]


def run_plan(config: SweepConfig) -> list[Path]:
    section = config.plan
    plan = plan_w_drive(
        section.omega_l, section.omega_r, section.delta, section.threshold, section.recommended
    )
    W_ghz = config.device_params().W / (2 * math.pi * 1000.0)
    tones = [tone for tone, _ in plan.tones]
    closed = closed_form_tones(
        max(section.omega_l, section.omega_r), min(section.omega_l, section.omega_r), section.delta
    )
    payload = {
        "tones_ghz": tones,
        "tone_amplitudes": [amp for _, amp in plan.tones],
        "targets_ghz": plan.targets,
        "closed_form_tones_ghz": list(closed),
        "closed_form_agrees": bool(np.allclose(closed, tones, atol=0.01)),
        "min_detuning_ghz": plan.min_detuning,
        "min_mixing_detuning_ghz": plan.min_mixing_detuning,
        "status": plan.status.value,
        "meets_recommended": plan.meets_recommended,
        "collision_report": [entry._asdict() for entry in plan.collision_report],
        "notes": plan.notes,
        "shadow_drive_ghz": {
            "l": shadow_drive_freq(section.omega_l, section.omega_S, W_ghz, section.delta),
            "r": shadow_drive_freq(section.omega_r, section.omega_S, W_ghz, section.delta),
        },
    }
    return [write_json(config.output / "plan.json", config, payload)]


def run_transmon(config: SweepConfig) -> list[Path]:
    section = config.transmon
    params = config.transmon_params()
    spectrum = diagonalize_transmon(params)
    r_loss_dephase, r_triple = qp_matrix_ratios(params)
    alpha = alpha_for_W(section.W_target, section.EJi, spectrum.C02)
    coupling = W_from_drive(section.EJi, alpha, spectrum.C02)
    spectrum_dict = asdict(spectrum)
    spectrum_dict["energies"] = [float(e) for e in spectrum.energies]
    payload = {
        "spectrum": spectrum_dict,
        "anharmonicity_ghz": spectrum.anharmonicity,
        "plasma_ratio": spectrum.transition / math.sqrt(8 * params.EJ * params.EC),
        "charge_dispersion_over_EC": [float(x) for x in charge_dispersion(params)],
        "qp_ratios": {"loss_dephase": r_loss_dephase, "triple": r_triple},
        "drive": {"alpha": alpha, "W_ghz": coupling.magnitude, "W_sign": coupling.sign},
    }
    return [write_json(config.output / "transmon.json", config, payload)]


RUNNERS = {
    "lifetimes": run_sweep_lifetimes,
    "dephasing": run_dephasing,
    "rates": run_rates,
    "plan": run_plan,
    "transmon": run_transmon,
}


def run_experiment(config: SweepConfig) -> list[Path]:
    return RUNNERS[config.experiment](config)

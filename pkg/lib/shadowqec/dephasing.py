"""
Stochastic phase-noise simulation for a Rabi-driven two-level system.

- Telegraph and 1/f noise traces δz(t), piecewise constant per sample
- Exact 2×2 propagators for H = W σx + δz(t) σz, batched across traces
- Free (Ramsey), Rabi and echo protocols
- Ensemble averaging with per-trace seeds, echo calibration, power-law sweeps

Spectral convention: S(ω) = (1/π) ∫ C(τ) e^{iωτ} dτ, so the 1/f target is
S(ω) = 2π S0 / ω and the Rabi lifetime is 1 / (π S(W)).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from rich.console import Console
from scipy import signal

from .errors import (
    BandConfigError,
    BracketError,
    FitError,
    OutOfRangeError,
    ResolutionError,
    UnidentifiableError,
)
from .fitting import DecayFit, PowerLawFit, fit_exponential, fit_powerlaw_multi, one_over_e_time
from .models import OneOverFParams, TelegraphParams
from .types import Protocol

console = Console(stderr=True)

NoiseSpec = Union[OneOverFParams, TelegraphParams]
Seed = Union[int, np.random.SeedSequence]

CHUNK_TRACES = 25
MIN_TRACES = 50
MIN_ECHO_TRACES = 300
_SYNTH_BLOCK = 8192

PUBLISHED_TELEGRAPH_FIT = PowerLawFit(2.30, 1.98, -2.0, -1.07)
HEADLINE_TELEGRAPH_FIT = PowerLawFit(2.30, 2.0, -2.0, -1.0)

# Published telegraph box: W/2π and Δω/2π in MHz, Γ_sw in 1/µs
TELEGRAPH_BOX = {
    "W": (2 * math.pi * 10.0, 2 * math.pi * 37.5),
    "delta_omega10": (2 * math.pi * 0.1, 2 * math.pi * 0.55),
    "gamma_sw": (4.0, 22.0),
}


@dataclass(frozen=True)
class NoiseTrace:
    """δz samples; sample i holds on [i·dt, (i+1)·dt)."""

    dt: float
    samples: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ResolutionError(f"dt must be positive, got {self.dt}")
        if self.samples.size == 0:
            raise ResolutionError("Noise trace is empty")

    @property
    def t_max(self) -> float:
        return self.dt * self.samples.size

    @property
    def n_switches(self) -> int:
        return int(np.count_nonzero(np.diff(self.samples)))


class CoherenceSeries(NamedTuple):
    times: NDArray[np.float64]
    values: NDArray[np.complex128]


@dataclass(frozen=True)
class EnsembleResult:
    times: NDArray[np.float64]
    curve: NDArray[np.float64]
    fit: DecayFit | None
    n_traces: int
    protocol: str


@dataclass(frozen=True)
class TelegraphPoint:
    W: float
    delta_omega10: float
    gamma_sw: float
    T2: float
    residual_rms: float


@dataclass(frozen=True)
class TelegraphSweep:
    points: list[TelegraphPoint]
    fit: PowerLawFit
    shift_fraction: float


def trace_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Seed for trace `index`, independent of scheduling."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


def _n_samples(t_max: float, dt: float) -> int:
    if t_max <= 0 or dt <= 0:
        raise ResolutionError(f"t_max and dt must be positive, got {t_max}, {dt}")
    return max(1, int(round(t_max / dt)))


def default_band(t_max: float, W: float) -> tuple[float, float]:
    """(f_min, f_max) in 1/µs for a run of length t_max at drive W."""
    f_min = 1.0 / (10.0 * t_max)
    f_max = 100.0 * W / (2.0 * math.pi) if W > 0 else 100.0 / t_max
    return f_min, f_max


def gen_telegraph(p: TelegraphParams, t_max: float, dt: float, seed: Seed) -> NoiseTrace:
    """Two-state fluctuator with exponential holding times."""
    if dt > 0.1 / p.gamma_sw:
        raise ResolutionError(
            f"dt={dt:.3g} µs too coarse for gamma_sw={p.gamma_sw:.3g}/µs (need <= {0.1 / p.gamma_sw:.3g})"
        )
    n = _n_samples(t_max, dt)
    rng = np.random.default_rng(seed)
    initial = int(rng.integers(2))

    expected = p.gamma_sw * t_max
    block = int(expected + 10.0 * math.sqrt(expected) + 16)
    switch_times = np.cumsum(rng.exponential(1.0 / p.gamma_sw, size=block))
    while switch_times[-1] <= t_max:
        extra = np.cumsum(rng.exponential(1.0 / p.gamma_sw, size=block)) + switch_times[-1]
        switch_times = np.concatenate([switch_times, extra])

    sample_times = np.arange(n) * dt
    flips = np.searchsorted(switch_times, sample_times, side="right")
    on = (initial + flips) % 2
    return NoiseTrace(dt=dt, samples=on * p.on_value)


def gen_one_over_f(p: OneOverFParams, t_max: float, dt: float, seed: Seed) -> NoiseTrace:
    """Sum of cosines at log-uniform jittered frequencies with random phases.

    Each component carries equal power per logarithmic bin, which makes the
    ensemble spectrum 2π S0 / ω inside [f_min, f_max].
    """
    n = _n_samples(t_max, dt)
    if p.f_min > 1.0 / t_max:
        raise BandConfigError(f"f_min={p.f_min:.3g} above 1/t_max={1.0 / t_max:.3g}")
    if p.f_max >= 0.5 / dt:
        raise BandConfigError(f"f_max={p.f_max:.3g} not below the Nyquist frequency {0.5 / dt:.3g}")

    rng = np.random.default_rng(seed)
    log_edges = np.linspace(math.log(p.f_min), math.log(p.f_max), p.n_components + 1)
    freqs = np.exp(rng.uniform(log_edges[:-1], log_edges[1:]))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=p.n_components)
    d_log = (log_edges[-1] - log_edges[0]) / p.n_components
    amplitude = math.sqrt(4.0 * math.pi * p.S0 * d_log)

    omegas = 2.0 * math.pi * freqs
    samples = np.empty(n)
    for start in range(0, n, _SYNTH_BLOCK):
        t = np.arange(start, min(n, start + _SYNTH_BLOCK)) * dt
        samples[start : start + t.size] = np.cos(np.outer(t, omegas) + phases).sum(axis=1)
    return NoiseTrace(dt=dt, samples=amplitude * samples)


def white_noise_coherence(gamma_phi: float, times: ArrayLike) -> NDArray[np.float64]:
    """Coherence under white dephasing; no drive protects against it."""
    return np.exp(-gamma_phi * np.asarray(times, dtype=float))


def _step_elements(z: NDArray[np.float64], W: float, dt: float) -> tuple[NDArray, NDArray, NDArray]:
    """Diagonal pair and off-diagonal of exp(−i(Wσx + zσz)dt)."""
    h = np.sqrt(W * W + z * z)
    cos_part = np.cos(h * dt)
    sin_over_h = dt * np.sinc(h * dt / math.pi)
    u00 = cos_part - 1j * sin_over_h * z
    u11 = cos_part + 1j * sin_over_h * z
    u01 = -1j * sin_over_h * W
    return u00, u11, u01


def _evolve_batch(samples: NDArray[np.float64], dt: float, W: float, protocol: Protocol) -> CoherenceSeries:
    """Coherence for a (traces × steps) block of samples."""
    n_traces, n_steps = samples.shape
    u00, u11, u01 = _step_elements(samples, W, dt)
    amp = 1.0 / math.sqrt(2.0)

    if protocol in ("free", "rabi"):
        alpha = np.full(n_traces, amp, dtype=np.complex128)
        beta = np.full(n_traces, amp, dtype=np.complex128)
        out = np.empty((n_traces, n_steps + 1), dtype=np.complex128)
        out[:, 0] = 2.0 * alpha.conj() * beta
        for i in range(n_steps):
            alpha, beta = u00[:, i] * alpha + u01[:, i] * beta, u01[:, i] * alpha + u11[:, i] * beta
            out[:, i + 1] = 2.0 * alpha.conj() * beta
        times = np.arange(n_steps + 1) * dt
        if protocol == "rabi":
            out = out.real.astype(np.complex128)
        return CoherenceSeries(times, out)

    if protocol != "echo":
        raise ValueError(f"Unknown protocol '{protocol}'")

    # Prefix products P_i = U_{i-1}···U_0 stored as [[a, b], [c, d]]
    a = np.ones((n_steps + 1, n_traces), dtype=np.complex128)
    b = np.zeros_like(a)
    c = np.zeros_like(a)
    d = np.ones_like(a)
    for i in range(n_steps):
        a[i + 1] = u00[:, i] * a[i] + u01[:, i] * c[i]
        b[i + 1] = u00[:, i] * b[i] + u01[:, i] * d[i]
        c[i + 1] = u01[:, i] * a[i] + u11[:, i] * c[i]
        d[i + 1] = u01[:, i] * b[i] + u11[:, i] * d[i]

    m = np.arange(n_steps // 2 + 1)
    # Half-way state P_m|+x⟩, then σx (π about x up to phase), then P_2m P_m†
    x0 = amp * (a[m] + b[m])
    x1 = amp * (c[m] + d[m])
    x0, x1 = x1, x0
    am, bm, cm, dm = a[m], b[m], c[m], d[m]
    y0 = am.conj() * x0 + cm.conj() * x1
    y1 = bm.conj() * x0 + dm.conj() * x1
    a2, b2, c2, d2 = a[2 * m], b[2 * m], c[2 * m], d[2 * m]
    f0 = a2 * y0 + b2 * y1
    f1 = c2 * y0 + d2 * y1
    coherence = (2.0 * f0.conj() * f1).T
    return CoherenceSeries(2.0 * m * dt, coherence)


def evolve_spin(trace: NoiseTrace, W: float, protocol: Protocol) -> CoherenceSeries:
    """Coherence of one trace.

    rabi returns ⟨σx(t)⟩ from σx = +1; free and echo return the complex
    coherence ⟨σx⟩ + i⟨σy⟩, echo sampled at t = 2m·dt with the π pulse at m·dt.
    """
    series = _evolve_batch(trace.samples[np.newaxis, :], trace.dt, W, protocol)
    return CoherenceSeries(series.times, series.values[0])


def _generate(spec: NoiseSpec, t_max: float, dt: float, seed: Seed) -> NoiseTrace:
    if isinstance(spec, TelegraphParams):
        return gen_telegraph(spec, t_max, dt, seed)
    return gen_one_over_f(spec, t_max, dt, seed)


def _default_dt(spec: NoiseSpec) -> float:
    if isinstance(spec, TelegraphParams):
        return 0.05 / spec.gamma_sw
    return 0.25 / spec.f_max


def fit_rabi_window(
    times: NDArray[np.float64], curve: NDArray[np.float64], W: float, transient_cut: float | None
) -> DecayFit:
    cut = transient_cut if transient_cut is not None else (3.0 / W if W > 0 else 0.0)
    cut = min(cut, 0.25 * times[-1])
    below = np.nonzero(curve < 0.1)[0]
    end = int(below[0]) if below.size else curve.size
    keep = (times >= cut) & (np.arange(curve.size) < end)
    return fit_exponential(times[keep], curve[keep], transient_cut=0.0, floor=0.0)


def ensemble_average(
    spec: NoiseSpec,
    W: float,
    protocol: Protocol,
    n_traces: int,
    seed: int,
    t_max: float,
    dt: float | None = None,
    threads: int = 1,
    transient_cut: float | None = None,
    fit: bool = True,
) -> EnsembleResult:
    """Average coherence over independently seeded traces.

    Traces are processed in fixed-size chunks so the averaged curve is bitwise
    identical for any thread count.

    Args:
        spec: Noise generator parameters
        W: Rabi drive (rad/µs)
        protocol: "free", "rabi" or "echo"
        n_traces: Number of traces (>= 50)
        seed: Master seed
        t_max: Trace length (µs)
        dt: Sample step, defaults to the generator's resolution requirement
        threads: Worker threads
        transient_cut: Fit window start, defaults to 3/W
        fit: Fit a decay law to rabi and free curves

    Returns:
        EnsembleResult with the averaged curve and optional DecayFit
    """
    if n_traces < MIN_TRACES:
        raise OutOfRangeError(f"n_traces={n_traces} below minimum {MIN_TRACES}")
    step = dt if dt is not None else _default_dt(spec)

    def run_chunk(start: int) -> CoherenceSeries:
        stop = min(n_traces, start + CHUNK_TRACES)
        block = np.stack(
            [_generate(spec, t_max, step, trace_seed(seed, i)).samples for i in range(start, stop)]
        )
        series = _evolve_batch(block, step, W, protocol)
        return CoherenceSeries(series.times, series.values.sum(axis=0))

    starts = list(range(0, n_traces, CHUNK_TRACES))
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        chunks = list(pool.map(run_chunk, starts))

    times = chunks[0].times
    # Chunk partial sums are added in chunk order
    total = np.zeros_like(chunks[0].values)
    for chunk in chunks:
        total = total + chunk.values
    mean = total / n_traces
    curve = mean.real.copy() if protocol == "rabi" else np.abs(mean)

    decay = None
    if fit and protocol in ("rabi", "free"):
        decay = fit_rabi_window(times, curve, W, transient_cut)
    return EnsembleResult(times=times, curve=curve, fit=decay, n_traces=n_traces, protocol=protocol)


def rabi_T2_prediction(S0: float, W: float) -> float:
    """Lifetime 1/(π S(W)) with S(W) = 2π S0 / W, in µs."""
    if W <= 0:
        raise OutOfRangeError(f"Rabi prediction needs W > 0, got {W}")
    if S0 == 0:
        return math.inf
    return W / (2.0 * math.pi**2 * S0)


def echo_time(
    S0: float,
    T_scale: float,
    seed: int,
    n_traces: int = MIN_ECHO_TRACES,
    n_components: int = 200,
    band: tuple[float, float] | None = None,
    threads: int = 1,
) -> tuple[float, EnsembleResult]:
    """Simulated echo 1/e time for a 1/f strength, on a grid sized by T_scale."""
    t_max = 3.0 * T_scale
    dt = T_scale / 100.0
    f_min, f_max = band or default_band(t_max, 0.0)
    spec = OneOverFParams(S0=S0, f_min=f_min, f_max=f_max, n_components=n_components)
    result = ensemble_average(spec, 0.0, "echo", n_traces, seed, t_max, dt, threads=threads, fit=False)
    try:
        return one_over_e_time(result.times, result.curve), result
    except UnidentifiableError:
        return math.inf, result


def calibrate_S0_to_echo(
    T2_echo_target: float,
    band: tuple[float, float] | None = None,
    seed: int = 0,
    n_traces: int = MIN_ECHO_TRACES,
    n_components: int = 200,
    rel_tol: float = 0.005,
    threads: int = 1,
) -> float:
    """Bisect S0 (in log space) until the echo 1/e time matches the target."""
    if T2_echo_target <= 0:
        raise OutOfRangeError(f"Echo target must be positive, got {T2_echo_target}")
    if n_traces < MIN_ECHO_TRACES:
        raise OutOfRangeError(f"Echo calibration needs >= {MIN_ECHO_TRACES} traces")

    def mismatch(S0: float) -> float:
        measured, _ = echo_time(S0, T2_echo_target, seed, n_traces, n_components, band, threads)
        return math.log(measured / T2_echo_target) if math.isfinite(measured) else math.inf

    # Gaussian echo under S(ω) = 2πS0/ω decays as exp(−4π ln2 S0 t²)
    guess = 1.0 / (4.0 * math.pi * math.log(2.0) * T2_echo_target**2)
    lo, hi = guess / 4.0, guess * 4.0
    g_lo, g_hi = mismatch(lo), mismatch(hi)
    for _ in range(3):
        if g_lo > 0 > g_hi:
            break
        if g_lo <= 0:
            lo /= 4.0
            g_lo = mismatch(lo)
        if g_hi >= 0:
            hi *= 4.0
            g_hi = mismatch(hi)
    if not g_lo > 0 > g_hi:
        raise BracketError(f"Echo time does not straddle {T2_echo_target} µs over S0 in [{lo:.3g}, {hi:.3g}]")

    mid = math.sqrt(lo * hi)
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        g_mid = mismatch(mid)
        if abs(g_mid) < math.log1p(rel_tol):
            break
        if g_mid > 0:
            lo = mid
        else:
            hi = mid
    return mid


def telegraph_T2_estimate(p: TelegraphParams, W: float) -> float:
    """Golden-rule Rabi lifetime for the fluctuating part ±on/2 of the trace."""
    half = 0.5 * p.on_value
    if half == 0:
        return math.inf
    return (W * W + p.gamma_sw**2) / (2.0 * half * half * p.gamma_sw)


def telegraph_formula(
    W: float, delta_omega10: float, gamma_sw: float, fit: PowerLawFit = PUBLISHED_TELEGRAPH_FIT
) -> float:
    """Power-law T2 in µs."""
    a, b, c, d = fit
    return a * W**b * delta_omega10**c * gamma_sw**d


def _outside_box(W: float, delta_omega10: float, gamma_sw: float) -> list[str]:
    values = {"W": W, "delta_omega10": delta_omega10, "gamma_sw": gamma_sw}
    return [
        name
        for name, (lo, hi) in TELEGRAPH_BOX.items()
        if not lo * (1 - 1e-9) <= values[name] <= hi * (1 + 1e-9)
    ]


def telegraph_sweep(
    grid: Sequence[tuple[float, float, float]],
    n_traces: int,
    seed: int,
    threads: int = 1,
    shift_fraction: float = 0.5,
    max_steps: int = 100_000,
) -> TelegraphSweep:
    """Fitted Rabi T2 on each (W, Δω_10, Γ_sw) point plus a power-law regression."""
    points = []
    for index, (W, delta_omega10, gamma_sw) in enumerate(grid):
        outside = _outside_box(W, delta_omega10, gamma_sw)
        if outside:
            console.print(
                f"[yellow]Warning:[/yellow] telegraph point {index} outside the published box in {', '.join(outside)}"
            )
        spec = TelegraphParams(delta_omega10=delta_omega10, gamma_sw=gamma_sw, shift_fraction=shift_fraction)
        dt = 0.05 / gamma_sw
        estimate = telegraph_T2_estimate(spec, W)
        t_max = min(max(0.5 * estimate, 200.0 / gamma_sw), max_steps * dt)
        point_seed = int(np.random.SeedSequence([seed, index]).generate_state(1)[0])
        result = ensemble_average(spec, W, "rabi", n_traces, point_seed, t_max, dt, threads=threads)
        if result.fit is None:
            raise FitError(f"No decay fit for telegraph point {index}")
        points.append(
            TelegraphPoint(W, delta_omega10, gamma_sw, result.fit.lifetime, result.fit.residual_rms)
        )
    fit = fit_powerlaw_multi([(p.W, p.delta_omega10, p.gamma_sw, p.T2) for p in points])
    return TelegraphSweep(points=points, fit=fit, shift_fraction=shift_fraction)


def ensemble_psd(traces: Sequence[NoiseTrace]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Mean Hann-windowed periodogram as (ω, S(ω)) in the 2π S0 / ω convention."""
    if not traces:
        raise OutOfRangeError("Need at least one trace")
    dt = traces[0].dt
    freqs, psd = signal.periodogram(
        np.stack([t.samples for t in traces]), fs=1.0 / dt, window="hann", axis=-1
    )
    # One-sided density P(f) = 2π S(ω)
    return 2.0 * math.pi * freqs, psd.mean(axis=0) / (2.0 * math.pi)

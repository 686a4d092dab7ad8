"""Decay-law fits and log-linear regressions shared by the lifetime extractors."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike
from scipy import optimize, stats

from .errors import (
    NonPositiveSignalError,
    RankDeficientError,
    TooFewPointsError,
    UnidentifiableError,
)

MIN_FIT_POINTS = 8
MIN_POWERLAW_SAMPLES = 8


@dataclass(frozen=True)
class DecayFit:
    """floor + amplitude·exp(−t/lifetime) over the fitted window."""

    amplitude: float
    lifetime: float
    floor: float
    residual_rms: float
    lifetime_stderr: float = float("nan")
    n_points: int = 0

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.floor + self.amplitude * np.exp(-np.asarray(t, dtype=float) / self.lifetime)


class PowerLawFit(NamedTuple):
    """T2 = a · W^b · Δω^c · Γ^d."""

    a: float
    b: float
    c: float
    d: float


def fit_exponential(
    times: ArrayLike,
    values: ArrayLike,
    transient_cut: float = 0.0,
    floor: float = 0.0,
) -> DecayFit:
    """Fit floor + F·exp(−t/T) with the floor held fixed.

    The lifetime is seeded by a straight-line fit of log(values − floor) and
    refined by Levenberg-Marquardt least squares on the linear-domain residual.

    Args:
        times: Sample times (µs)
        values: Observable samples
        transient_cut: Samples with t < transient_cut are dropped
        floor: Asymptotic value the signal decays toward

    Returns:
        DecayFit with residual_rms computed on the window only

    Raises:
        TooFewPointsError: Fewer than 8 samples after the cut
        NonPositiveSignalError: values − floor not strictly positive on the window
        UnidentifiableError: Signal does not decay
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape:
        raise ValueError(f"times {t.shape} and values {y.shape} differ")

    window = t >= transient_cut
    t_w, signal = t[window], y[window] - floor
    if t_w.size < MIN_FIT_POINTS:
        raise TooFewPointsError(
            f"{t_w.size} samples after transient_cut={transient_cut}, need {MIN_FIT_POINTS}"
        )
    if np.any(signal <= 0):
        raise NonPositiveSignalError(
            f"Signal minus floor {floor} reaches {signal.min():.3e} on the fit window"
        )

    slope, intercept = np.polyfit(t_w, np.log(signal), 1)
    span = t_w[-1] - t_w[0]
    if slope >= 0 or -slope * span < 1e-9:
        raise UnidentifiableError(f"No decay on window (log-slope {slope:.3e})")

    def model(tt: np.ndarray, amplitude: float, lifetime: float) -> np.ndarray:
        return amplitude * np.exp(-tt / lifetime)

    p0 = (float(np.exp(intercept)), float(-1.0 / slope))
    try:
        popt, pcov = optimize.curve_fit(model, t_w, signal, p0=p0, method="lm", maxfev=2000)
    except RuntimeError as e:
        raise UnidentifiableError(f"Decay refinement failed: {e}") from e
    amplitude, lifetime = float(popt[0]), float(popt[1])
    if not np.isfinite(lifetime) or lifetime <= 0:
        raise UnidentifiableError(f"Refined lifetime {lifetime} is not positive")

    residual = model(t_w, amplitude, lifetime) - signal
    stderr = float(np.sqrt(pcov[1, 1])) if np.all(np.isfinite(pcov)) else float("nan")
    return DecayFit(
        amplitude=amplitude,
        lifetime=lifetime,
        floor=floor,
        residual_rms=float(np.sqrt(np.mean(residual**2))),
        lifetime_stderr=stderr,
        n_points=int(t_w.size),
    )


def fit_powerlaw_multi(samples: Sequence[Sequence[float]]) -> PowerLawFit:
    """Least squares on logs of (W, Δω_10, Γ_sw, T2) samples."""
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError(f"Expected rows of (W, delta_omega10, gamma_sw, T2), got shape {data.shape}")
    if data.shape[0] < MIN_POWERLAW_SAMPLES:
        raise TooFewPointsError(f"{data.shape[0]} samples, need {MIN_POWERLAW_SAMPLES}")
    if np.any(data <= 0):
        raise NonPositiveSignalError("Power-law samples must be strictly positive")

    logs = np.log(data)
    design = np.column_stack([np.ones(len(logs)), logs[:, :3]])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficientError("Each of W, delta_omega10, gamma_sw needs at least two distinct values")
    coef, *_ = np.linalg.lstsq(design, logs[:, 3], rcond=None)
    return PowerLawFit(float(np.exp(coef[0])), float(coef[1]), float(coef[2]), float(coef[3]))


def one_over_e_time(times: ArrayLike, curve: ArrayLike) -> float:
    """First crossing of 1/e, linearly interpolated."""
    t = np.asarray(times, dtype=float)
    c = np.asarray(curve, dtype=float)
    level = np.exp(-1.0)
    below = np.nonzero(c < level)[0]
    if below.size == 0 or below[0] == 0:
        raise UnidentifiableError("Curve never crosses 1/e after its first sample")
    i = int(below[0])
    frac = (c[i - 1] - level) / (c[i - 1] - c[i])
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))


def echo_gaussianity(times: ArrayLike, curve: ArrayLike, min_signal: float = 0.05) -> float:
    """R² of log-coherence against t², over samples above min_signal."""
    t = np.asarray(times, dtype=float)
    c = np.asarray(curve, dtype=float)
    keep = (t > 0) & (c > min_signal)
    if np.count_nonzero(keep) < 3:
        raise TooFewPointsError("Too few samples above min_signal for a Gaussianity check")
    result = stats.linregress(t[keep] ** 2, np.log(c[keep]))
    return float(result.rvalue**2)


def loglog_slope(x: ArrayLike, y: ArrayLike) -> float:
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.size < 2:
        raise TooFewPointsError("Need two points for a slope")
    return float(stats.linregress(np.log(xs), np.log(ys)).slope)

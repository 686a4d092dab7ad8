#!/usr/bin/env python3
"""
Unit tests for decay fits and power-law regression.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add lib to path for import
sys.path.insert(0, str(Path(__file__).parent.parent / "lib"))

from shadowqec.errors import (
    NonPositiveSignalError,
    RankDeficientError,
    TooFewPointsError,
    UnidentifiableError,
)
from shadowqec.fitting import (
    echo_gaussianity,
    fit_exponential,
    fit_powerlaw_multi,
    loglog_slope,
    one_over_e_time,
)


class TestExponentialFit:
    """Test floor + F·exp(−t/T) fits."""

    def test_exact_decay(self) -> None:
        """Test recovery of a noiseless lifetime."""
        t = np.linspace(0.0, 10.0, 50)
        fit = fit_exponential(t, 0.8 * np.exp(-t / 3.0))
        assert fit.lifetime == pytest.approx(3.0, rel=1e-6)
        assert fit.amplitude == pytest.approx(0.8, rel=1e-6)
        assert fit.residual_rms < 1e-9

    def test_fixed_floor(self) -> None:
        """Test the floor is subtracted before fitting."""
        t = np.linspace(0.0, 20.0, 80)
        fit = fit_exponential(t, 0.5 + 0.5 * np.exp(-t / 4.0), floor=0.5)
        assert fit.lifetime == pytest.approx(4.0, rel=1e-6)
        assert fit.floor == 0.5

    def test_transient_cut(self) -> None:
        """Test samples before the cut are ignored."""
        t = np.linspace(0.0, 10.0, 101)
        values = np.exp(-t / 5.0) + 0.3 * np.exp(-t / 0.05)
        fit = fit_exponential(t, values, transient_cut=1.0)
        assert fit.lifetime == pytest.approx(5.0, rel=1e-4)
        assert fit.n_points == np.count_nonzero(t >= 1.0)

    def test_scale_equivariance(self) -> None:
        """Test scaling values scales the amplitude and scaling time scales the lifetime."""
        rng = np.random.default_rng(17)
        t = np.linspace(0.0, 100.0, 120)
        values = 0.5 * np.exp(-t / 40.0) + 1e-3 * rng.standard_normal(t.size)
        base = fit_exponential(t, values)
        scaled = fit_exponential(t, 3.0 * values)
        assert scaled.amplitude == pytest.approx(3.0 * base.amplitude, rel=1e-6)
        assert scaled.lifetime == pytest.approx(base.lifetime, rel=1e-6)
        stretched = fit_exponential(7.0 * t, values)
        assert stretched.lifetime == pytest.approx(7.0 * base.lifetime, rel=1e-6)
        assert stretched.amplitude == pytest.approx(base.amplitude, rel=1e-6)

    def test_callable(self) -> None:
        """Test the fit evaluates its model."""
        t = np.linspace(0.0, 5.0, 20)
        fit = fit_exponential(t, 2.0 * np.exp(-t))
        np.testing.assert_allclose(fit(t), 2.0 * np.exp(-t), rtol=1e-6)

    def test_too_few_points(self) -> None:
        """Test fewer than eight samples."""
        t = np.linspace(0.0, 1.0, 5)
        with pytest.raises(TooFewPointsError):
            fit_exponential(t, np.exp(-t))

    def test_signal_below_floor(self) -> None:
        """Test non-positive signal on the window."""
        t = np.linspace(0.0, 1.0, 20)
        with pytest.raises(NonPositiveSignalError):
            fit_exponential(t, np.exp(-t) - 0.5)

    def test_flat_signal(self) -> None:
        """Test a constant is not a decay."""
        t = np.linspace(0.0, 1.0, 20)
        with pytest.raises(UnidentifiableError):
            fit_exponential(t, np.ones_like(t))


class TestPowerLaw:
    """Test T2 = a W^b Δω^c Γ^d regression."""

    def test_exact_recovery(self) -> None:
        """Test noiseless samples on a 2×2×2 grid."""
        samples = [
            (W, dw, g, 2.3 * W**2 * dw**-2 * g**-1)
            for W in (10.0, 40.0)
            for dw in (0.5, 2.0)
            for g in (3.0, 20.0)
        ]
        fit = fit_powerlaw_multi(samples)
        assert fit.a == pytest.approx(2.3, rel=1e-9)
        assert fit.b == pytest.approx(2.0, abs=1e-9)
        assert fit.c == pytest.approx(-2.0, abs=1e-9)
        assert fit.d == pytest.approx(-1.0, abs=1e-9)

    def test_multiplicative_noise(self) -> None:
        """Test 10% multiplicative scatter on a 3×3×3 grid keeps exponents within 0.1."""
        rng = np.random.default_rng(2015)
        samples = [
            (W, dw, g, 2.3 * W**2 * dw**-2 * g**-1 * (1.0 + 0.1 * rng.standard_normal()))
            for W in (1.0, 10.0, 100.0)
            for dw in (0.1, 1.0, 10.0)
            for g in (0.5, 5.0, 50.0)
        ]
        fit = fit_powerlaw_multi(samples)
        assert fit.b == pytest.approx(2.0, abs=0.1)
        assert fit.c == pytest.approx(-2.0, abs=0.1)
        assert fit.d == pytest.approx(-1.0, abs=0.1)

    def test_too_few_samples(self) -> None:
        """Test fewer than eight rows."""
        with pytest.raises(TooFewPointsError):
            fit_powerlaw_multi([(1.0, 1.0, 1.0, 1.0)] * 7)

    def test_constant_axis(self) -> None:
        """Test one distinct W leaves b unidentifiable."""
        samples = [(10.0, dw, g, 1.0 + dw + g) for dw in (0.5, 1.0, 2.0) for g in (3.0, 6.0, 9.0)]
        with pytest.raises(RankDeficientError):
            fit_powerlaw_multi(samples)

    def test_non_positive_sample(self) -> None:
        """Test logs need positive values."""
        samples = [(W, 1.0 + W, 2.0 + W, 1.0) for W in range(1, 9)]
        samples[3] = (4.0, 5.0, 6.0, 0.0)
        with pytest.raises(NonPositiveSignalError):
            fit_powerlaw_multi(samples)


class TestCurveDiagnostics:
    """Test 1/e times, Gaussianity and log-log slopes."""

    def test_one_over_e_time(self) -> None:
        """Test interpolated crossing of exp(−t/2)."""
        t = np.linspace(0.0, 6.0, 601)
        assert one_over_e_time(t, np.exp(-t / 2.0)) == pytest.approx(2.0, rel=1e-4)

    def test_no_crossing(self) -> None:
        """Test curve that stays above 1/e."""
        t = np.linspace(0.0, 1.0, 11)
        with pytest.raises(UnidentifiableError):
            one_over_e_time(t, np.ones_like(t))

    def test_gaussian_echo(self) -> None:
        """Test exp(−t²) is perfectly Gaussian and exp(−t) is less so."""
        t = np.linspace(0.0, 2.0, 101)
        assert echo_gaussianity(t, np.exp(-(t**2))) == pytest.approx(1.0)
        assert echo_gaussianity(t, np.exp(-t)) < 0.99

    def test_loglog_slope(self) -> None:
        """Test slope of y = 3x²."""
        x = np.array([0.3, 1.0, 3.0])
        assert loglog_slope(x, 3 * x**2) == pytest.approx(2.0)

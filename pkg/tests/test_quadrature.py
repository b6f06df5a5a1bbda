"""Adaptive Simpson and the off-center disc mean."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mms.quadrature import adaptive_simpson, disc_mean


def test_simpson_exact_on_cubics():
    # Simpson integrates cubics exactly, so adaptivity never subdivides.
    value = adaptive_simpson(lambda t: t**3 - 2 * t + 1, 0.0, 2.0)
    assert value == pytest.approx(4.0 - 4.0 + 2.0, abs=1e-12)


def test_simpson_meets_absolute_tolerance():
    value = adaptive_simpson(math.exp, 0.0, 1.0, abs_tol=1e-10)
    assert value == pytest.approx(math.e - 1.0, abs=1e-9)


def test_simpson_handles_sharp_peak():
    # A narrow bump forces deep subdivision near the peak only.
    value = adaptive_simpson(lambda t: 1.0 / (1e-4 + (t - 0.3) ** 2),
                             0.0, 1.0, abs_tol=1e-8)
    exact = (math.atan(0.7 / 1e-2) + math.atan(0.3 / 1e-2)) / 1e-2
    assert value == pytest.approx(exact, rel=1e-7)


def test_simpson_breakpoints_isolate_a_kink():
    split = adaptive_simpson(abs, -1.0, 2.0, breakpoints=[0.0])
    assert split == pytest.approx(2.5, abs=1e-10)


def test_disc_mean_constant_weight():
    assert disc_mean(lambda r: np.ones(len(r)), (3.0, -1.0), 2.0) == (
        pytest.approx(1.0, rel=1e-6))


def test_disc_mean_linear_weight_centered_average():
    # mean of |x|^2 over a disc of radius R centered at the origin
    # is R^2/2; the midpoint grid should be close at 256 x 256.
    mean = disc_mean(lambda pts: np.sum(pts * pts, axis=1), (0.0, 0.0), 1.0)
    assert mean == pytest.approx(0.5, rel=5e-3)

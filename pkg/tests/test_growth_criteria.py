"""Growth functionals: the dyadic series and the weighted integral."""

from __future__ import annotations

import math

import pytest

import oracles
from mms.growth_criteria import (DIVERGENT, FINITE, R_weight, compare_R,
                                 script_R)
from mms.model_spaces import (AhlforsModel, AsymptoticClass,
                              PowerWeightedEuclidean, RadialPower,
                              RadialProfile, WeightedHalfLine, annulus_masses)

Q_TABLE = (1.0, 1.5, 2.0, 3.0)
P_TABLE = (1.0, 1.25, 1.5, 2.0, 2.5, 3.0)


def test_dichotomy_on_exact_ahlfors_profiles():
    for q in Q_TABLE:
        for p in P_TABLE:
            profile = annulus_masses(AhlforsModel(Q=q), j_max=8)
            report = script_R(profile, p)
            expected = oracles.dichotomy_expected(q, p)
            assert oracles.ahlfors_series_finite(q, p) == expected
            assert report.is_finite == expected, (q, p, report.verdict)


def test_halfline_finite_exactly_at_p_one():
    profile = annulus_masses(WeightedHalfLine.power(1.0, 0.0), j_max=12)
    at_one = script_R(profile, 1.0)
    assert at_one.verdict == FINITE
    assert at_one.value == pytest.approx(1.0)
    for p in (1.5, 2.0):
        assert script_R(profile, p).verdict == DIVERGENT


def test_partials_non_decreasing():
    profile = annulus_masses(AhlforsModel(Q=2.0), j_max=10)
    for p in (1.0, 1.5, 2.0, 3.0):
        partial = script_R(profile, p).partial
        assert all(b >= a for a, b in zip(partial[:-1], partial[1:]))


def test_finite_value_dominates_last_partial():
    profile = annulus_masses(AhlforsModel(Q=3.0), j_max=6)
    report = script_R(profile, 2.0)
    assert report.verdict == FINITE
    assert report.value >= report.partial[-1]


def test_doubling_masses_scales_each_term():
    profile = annulus_masses(AhlforsModel(Q=2.0), j_max=6)
    doubled = profile.scaled(2.0)
    for p in (1.5, 2.0, 3.0):
        base = script_R(profile, p).terms
        new = script_R(doubled, p).terms
        factor = 2.0 ** (1.0 / (1.0 - p))
        for t_new, t_old in zip(new, base):
            assert t_new == pytest.approx(factor * t_old, rel=1e-12)


def test_scale_covariance_of_the_value():
    profile = annulus_masses(AhlforsModel(Q=3.0), j_max=6)
    c = 5.0
    for p in (2.0, 2.5):
        base = script_R(profile, p)
        scaled = script_R(profile.scaled(c), p)
        assert scaled.value == pytest.approx(
            c ** (1.0 / (1.0 - p)) * base.value, rel=1e-12)
    base1 = script_R(profile, 1.0)
    scaled1 = script_R(profile.scaled(c), 1.0)
    assert scaled1.value == pytest.approx(base1.value / c, rel=1e-12)


def test_ahlfors_q2_p3_terms_grow_like_sqrt2_powers():
    profile = annulus_masses(AhlforsModel(Q=2.0), j_max=8)
    report = script_R(profile, 3.0)
    assert report.verdict == DIVERGENT
    for j in range(1, 8):
        assert report.terms[j] / report.terms[j - 1] == pytest.approx(
            math.sqrt(2.0), rel=1e-12)


def test_unknown_class_stays_prefix_only():
    profile = RadialProfile((1.0, 2.0, 4.0), 0, AsymptoticClass.unknown())
    report = script_R(profile, 2.0)
    assert report.verdict == "inconclusive"
    assert report.basis == "prefix-only"


def test_r_weight_closed_form_two_pi():
    plane = PowerWeightedEuclidean(n=2, alpha=0.0)
    report = R_weight(plane, RadialPower(1.0, 1.0), 1.5, 2.0**14)
    assert report.verdict == FINITE
    assert report.value == pytest.approx(2.0 * math.pi, rel=1e-6)


def test_r_weight_vanishing_h_diverges_for_p_above_one():
    plane = PowerWeightedEuclidean(n=2, alpha=0.0)
    report = R_weight(plane, RadialPower(0.0, 0.0), 2.0, 16.0)
    assert report.verdict == DIVERGENT


def test_r_weight_p_one_sup_of_inverse():
    plane = PowerWeightedEuclidean(n=2, alpha=0.0)
    report = R_weight(plane, RadialPower(4.0, 1.0), 1.0, 2.0**10)
    assert report.verdict == FINITE
    assert report.value == pytest.approx(0.25, rel=1e-9)


def test_compare_r_band_tight_for_flat_weight():
    plane = PowerWeightedEuclidean(n=2, alpha=0.0)
    report = compare_R(plane, RadialPower(1.0, 1.0), 1.5, 8, 5)
    assert report.band <= 1.0 + 1e-9


def test_compare_r_homogeneity_in_h():
    plane = PowerWeightedEuclidean(n=2, alpha=0.0)
    p = 1.5
    base = compare_R(plane, RadialPower(1.0, 1.0), p, 8, 5)
    scaled = compare_R(plane, RadialPower(7.0, 1.0), p, 8, 5)
    assert scaled.ratio_max / base.ratio_max == pytest.approx(
        7.0 ** (p / (1.0 - p)), rel=1e-6)


def test_rejects_p_below_one():
    profile = annulus_masses(AhlforsModel(Q=2.0), j_max=4)
    with pytest.raises(ValueError):
        script_R(profile, 0.5)

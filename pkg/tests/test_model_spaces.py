"""Model spaces: profiles, ball measures, Muckenhoupt estimates."""

from __future__ import annotations

import math

import pytest

from mms.model_spaces import (AhlforsModel, AsymptoticClass, KRegularTree,
                              GenerationWeight, NonIntegrableWeightError,
                              PowerWeightedEuclidean, RadialPower,
                              RadialProfile, WeightedHalfLine, annulus_masses,
                              model_from_json, model_to_json,
                              muckenhoupt_constant, standard_ball_sample)


def test_ahlfors_masses_difference_of_powers():
    profile = annulus_masses(AhlforsModel(Q=2.0), j_max=3)
    assert profile.mass(3) == pytest.approx(2.0**8 - 2.0**6)


def test_halfline_unit_weight_masses():
    profile = annulus_masses(WeightedHalfLine.power(1.0, 0.0), j_max=5)
    for j in range(6):
        assert profile.mass(j) == pytest.approx(2.0**j, rel=1e-12)


def test_power_euclidean_flat_annulus_area():
    profile = annulus_masses(PowerWeightedEuclidean(n=2, alpha=0.0), j_max=2)
    assert profile.mass(0) == pytest.approx(3.0 * math.pi, rel=1e-9)


def test_annulus_masses_additive_telescope():
    space = PowerWeightedEuclidean(n=2, alpha=0.7)
    profile = annulus_masses(space, j_max=6)
    total = sum(profile.mass(j) for j in range(7))
    expected = space.ball_measure(2.0**7) - space.ball_measure(1.0)
    assert total == pytest.approx(expected, rel=1e-9)


def test_ahlfors_regularity_band():
    model = AhlforsModel(Q=1.5)
    profile = annulus_masses(model, j_max=10)
    ratios = [profile.mass(j) / 2.0 ** (1.5 * j) for j in range(11)]
    assert max(ratios) / min(ratios) <= model.constant**2 + 1e-12


def test_profile_rejects_negative_and_non_finite():
    with pytest.raises(Exception):
        RadialProfile((1.0, -2.0))
    with pytest.raises(Exception):
        RadialProfile((1.0, math.inf))


def test_asymptotic_class_validation():
    assert AsymptoticClass.polynomial(2.0).value == 2.0
    with pytest.raises(ValueError):
        AsymptoticClass.geometric(-1.0)
    with pytest.raises(ValueError):
        AsymptoticClass("nonsense")


def test_muckenhoupt_constant_weight_is_one():
    space = PowerWeightedEuclidean(n=2, alpha=0.0)
    sample = standard_ball_sample(2, stages=1)
    for p in (1.0, 2.0):
        est = muckenhoupt_constant(space, p, sample)
        assert est.value == pytest.approx(1.0, rel=1e-6)


def test_muckenhoupt_monotone_in_sample():
    space = PowerWeightedEuclidean(n=2, alpha=1.0)
    small = standard_ball_sample(2, stages=1)
    large = standard_ball_sample(2, stages=2)
    assert set(small) <= set(large)
    lo = muckenhoupt_constant(space, 2.0, small).value
    hi = muckenhoupt_constant(space, 2.0, large).value
    assert hi >= lo - 1e-12
    assert lo >= 1.0


def test_muckenhoupt_non_integrable_weight_refused():
    space = PowerWeightedEuclidean(n=2, alpha=-3.0)
    with pytest.raises(NonIntegrableWeightError):
        muckenhoupt_constant(space, 2.0, [((0.0, 0.0), 1.0)])


def test_muckenhoupt_estimate_is_flagged_lower_bound():
    space = PowerWeightedEuclidean(n=2, alpha=1.0)
    est = muckenhoupt_constant(space, 2.0, standard_ball_sample(2, stages=1))
    assert est.lower_bound
    assert math.isfinite(est.value)


def test_tree_model_profile_positive():
    tree = KRegularTree(K=2,
                        edge_length=GenerationWeight(1.0, 1.0),
                        edge_measure=GenerationWeight(1.0, 1.0))
    profile = annulus_masses(tree, j_max=4)
    assert all(m > 0 for m in profile.masses)


def test_model_json_round_trip():
    models = [
        AhlforsModel(Q=2.5),
        WeightedHalfLine.power(2.0, 1.0),
        PowerWeightedEuclidean(n=3, alpha=-0.5),
    ]
    for model in models:
        doc = model_to_json(model)
        again = model_from_json(doc)
        assert model_to_json(again) == doc


def test_model_json_rejects_bad_documents():
    doc = model_to_json(AhlforsModel(Q=2.0))
    doc["surplus"] = True
    with pytest.raises(ValueError):
        model_from_json(doc)

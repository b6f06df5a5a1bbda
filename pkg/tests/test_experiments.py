"""End-to-end pipelines: trends, probes, sandwiches, and sweeps."""

from __future__ import annotations

import math

import pytest

from mms.experiments import (TREND_BOUNDED, TREND_DECAYING,
                             TREND_INCONCLUSIVE, classify_trend,
                             example43_sweep, thm12_probe, thm13_sandwich,
                             two_ends_demo)
from mms.graph_space import (grid_graph, halfline_graph, line_graph,
                             profile_from_graph)
from mms.growth_criteria import DIVERGENT, FINITE
from mms.model_spaces import AsymptoticClass, RadialPower, WeightedHalfLine


def test_trend_bounded_below_when_the_tail_levels_off():
    report = classify_trend((4, 8, 16, 32, 64),
                            (1.0, 0.9, 0.85, 0.84, 0.839))
    assert report.kind == TREND_BOUNDED
    assert report.floor == pytest.approx(1e-5)
    assert math.isfinite(report.slope)


def test_trend_decaying_for_a_reciprocal_schedule():
    radii = (4.0, 8.0, 16.0, 32.0)
    report = classify_trend(radii, tuple(1.0 / r for r in radii))
    assert report.kind == TREND_DECAYING
    assert report.slope == pytest.approx(-1.0, rel=1e-9)


def test_trend_decaying_when_a_value_hits_zero():
    report = classify_trend((4, 8, 16), (1.0, 0.5, 0.0))
    assert report.kind == TREND_DECAYING
    assert math.isnan(report.slope)


def test_trend_inconclusive_on_wobbly_values():
    report = classify_trend((4, 8, 16, 32), (1.0, 1.3, 1.0, 1.31))
    assert report.kind == TREND_INCONCLUSIVE


def test_trend_needs_three_schedule_points():
    with pytest.raises(ValueError):
        classify_trend((4, 8), (1.0, 0.5))


def test_probe_is_consistent_on_the_half_line():
    g = halfline_graph(160)
    profile = profile_from_graph(g, AsymptoticClass.geometric(2.0))
    rows = thm12_probe(g, profile, (1.0, 2.0), (4.0, 8.0, 16.0, 32.0, 64.0),
                       label="halfline")
    by_p = {row.p: row for row in rows}
    assert by_p[1.0].growth_verdict == FINITE
    assert by_p[1.0].trend.kind == TREND_BOUNDED
    assert by_p[1.0].blocks == "refused"
    assert by_p[2.0].growth_verdict == DIVERGENT
    assert by_p[2.0].trend.kind == TREND_DECAYING
    assert by_p[2.0].blocks == "constructed"
    assert by_p[2.0].block_count >= 1
    assert all(row.consistent for row in rows)
    # blocks against a finite series would disprove the equivalence
    assert not any(row.blocks == "constructed"
                   and row.growth_verdict == FINITE for row in rows)


def test_probe_flags_inconclusive_growth_instead_of_guessing():
    g = halfline_graph(160)
    profile = profile_from_graph(g)
    rows = thm12_probe(g, profile, (2.0,), (4.0, 8.0, 16.0))
    assert not rows[0].consistent
    assert "inconclusive" in rows[0].note


def test_sandwich_is_consistent_on_the_half_line():
    g = halfline_graph(160)
    rows = thm13_sandwich(WeightedHalfLine.constant(), RadialPower(1.0, 0.0),
                          (1.0, 2.0), g, (4.0, 8.0, 16.0, 32.0, 64.0))
    by_p = {row.p: row for row in rows}
    assert by_p[1.0].weighted_verdict == FINITE
    assert by_p[1.0].trend.kind == TREND_BOUNDED
    assert by_p[1.0].series_verdict == FINITE
    assert by_p[2.0].weighted_verdict == DIVERGENT
    assert by_p[2.0].trend.kind == TREND_DECAYING
    assert all(row.consistent for row in rows)
    assert all(row.violations == () for row in rows)


def test_two_ends_construction_on_the_line():
    g = line_graph(64)
    built = two_ends_demo(g, 2.0)
    assert set(built.tail_values) == {0.0, 1.0}
    assert set(built.ends) == {-64, 64}
    assert sorted(built.zone) == [-1, 0, 1]
    assert built.energy == pytest.approx(0.75)
    assert built.upper_gradient_ok
    assert two_ends_demo(g, 1.0).energy == pytest.approx(1.5)


def test_two_ends_energy_is_finite_for_large_p():
    g = line_graph(32)
    built = two_ends_demo(g, 7.0)
    assert math.isfinite(built.energy)
    assert built.energy == pytest.approx(3.0 * 0.5**7)


def test_two_ends_requires_a_disconnected_complement():
    with pytest.raises(ValueError, match="connected"):
        two_ends_demo(halfline_graph(16), 2.0)
    with pytest.raises(ValueError, match="connected"):
        two_ends_demo(grid_graph(2, 4), 2.0)


def test_two_ends_rejects_p_below_one():
    with pytest.raises(ValueError):
        two_ends_demo(line_graph(8), 0.5)


def test_sweep_reports_a_tight_band_for_the_unweighted_plane():
    rows = example43_sweep(2, (0.0,), (1.5,), j_max=6, levels=3)
    row = rows[0]
    assert not row.skipped
    assert row.muckenhoupt == pytest.approx(1.0)
    assert row.band == pytest.approx(1.0, abs=1e-6)
    assert len(row.ratios) == 3
    assert len(row.levels) == 3


def test_sweep_skips_weights_outside_the_muckenhoupt_class():
    rows = example43_sweep(2, (-3.0, 0.5), (1.0,), j_max=6, levels=3)
    by_alpha = {row.alpha: row for row in rows}
    nonintegrable = by_alpha[-3.0]
    assert nonintegrable.skipped
    assert "integrable" in nonintegrable.reason
    assert math.isnan(nonintegrable.band)
    outside = by_alpha[0.5]
    assert outside.skipped
    assert "Muckenhoupt" in outside.reason
    assert outside.ratios == ()

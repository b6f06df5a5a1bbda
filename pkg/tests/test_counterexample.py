"""Divergent-function construction: blocks, density, distance function."""

from __future__ import annotations

import math

import numpy as np
import pytest

from mms.counterexample import (AnnulusMismatchError, BlockShortfallError,
                                PreconditionError, budget_bound,
                                build_density, distance_function,
                                divergence_check, greedy_blocks)
from mms.graph_space import grid_graph, halfline_graph, profile_from_graph
from mms.model_spaces import (AsymptoticClass, RadialProfile, annulus_masses,
                              WeightedHalfLine)

GEOMETRIC_DOUBLING = AsymptoticClass.geometric(2.0)


def _halfline_profile(j_max: int = 16):
    return annulus_masses(WeightedHalfLine.power(1.0, 0.0), j_max=j_max)


def test_blocks_clear_thresholds_strictly():
    profile = _halfline_profile()
    blocks = greedy_blocks(profile, 2.0, 4)
    assert blocks.count == 4
    terms = [2.0 ** (2 * j) / profile.mass(j) for j in profile.j_values]
    for k in range(1, 5):
        lo, hi = blocks.starts[k - 1], blocks.starts[k]
        recomputed = sum(terms[lo - profile.j_min:hi + 1 - profile.j_min])
        assert recomputed == pytest.approx(blocks.sums[k - 1], rel=1e-12)
        assert recomputed > 2.0**k


def test_budget_matches_exact_block_contributions():
    profile = _halfline_profile()
    blocks = greedy_blocks(profile, 2.0, 5)
    density = build_density(profile, blocks)
    exact = sum(s ** (1.0 - 2.0) for s in blocks.sums)
    assert density.budget == pytest.approx(exact, rel=1e-12)
    assert density.budget <= budget_bound(2.0) + 1e-12


def test_budget_bound_closed_forms():
    assert budget_bound(2.0) == pytest.approx(1.0)
    assert budget_bound(3.0) == pytest.approx(1.0 / 3.0)
    assert budget_bound(1.0) == pytest.approx(1.0)
    assert budget_bound(2.0, count=3) == pytest.approx(0.875)


def test_p_one_blocks_use_single_annuli():
    # constant annulus masses make 2^j / mass grow without bound,
    # which licenses the p = 1 single-annulus selection
    profile = RadialProfile(tuple(math.log(2.0) for _ in range(21)), 0,
                            AsymptoticClass.geometric(1.0))
    blocks = greedy_blocks(profile, 1.0, 4)
    assert blocks.count == 4
    for k, (i, s) in enumerate(zip(blocks.starts, blocks.sums), start=1):
        term = 2.0**i / profile.mass(i)
        assert s == pytest.approx(term, rel=1e-12)
        assert s > 2.0**k
    density = build_density(profile, blocks)
    assert density.budget <= 1.0 + 1e-12


def test_refuses_when_series_is_finite():
    profile = _halfline_profile()
    with pytest.raises(PreconditionError):
        greedy_blocks(profile, 1.0, 2)


def test_shortfall_reports_achieved_count():
    grid = grid_graph(2, 32)
    profile = profile_from_graph(grid, AsymptoticClass.polynomial(2.0))
    with pytest.raises(BlockShortfallError) as err:
        greedy_blocks(profile, 2.0, 6)
    assert err.value.achieved < 6
    assert err.value.achieved >= 0


def test_distance_function_is_one_lipschitz_in_weighted_metric():
    g = halfline_graph(600)
    profile = profile_from_graph(g, GEOMETRIC_DOUBLING)
    blocks = greedy_blocks(profile, 2.0, 3)
    density = build_density(profile, blocks)
    u = distance_function(g, profile, density)
    per_node = np.array([density.value_at(int(math.log2(max(d, 1.0))))
                         if d >= 1.0 else 0.0
                         for d in g.base_distances()])
    for (a, b), ell in zip(g.edges, g.lengths):
        w = ell * 0.5 * (per_node[a] + per_node[b])
        assert abs(u[a] - u[b]) <= w + 1e-12


def test_distance_function_monotone_along_the_ray():
    g = halfline_graph(600)
    profile = profile_from_graph(g, GEOMETRIC_DOUBLING)
    density = build_density(profile, greedy_blocks(profile, 2.0, 3))
    u = distance_function(g, profile, density)
    order = np.argsort(g.base_distances())
    assert np.all(np.diff(u[order]) >= -1e-12)


def test_annulus_mismatch_is_detected():
    g = halfline_graph(600)
    profile = profile_from_graph(g, GEOMETRIC_DOUBLING).scaled(1.5)
    density = build_density(profile, greedy_blocks(profile, 2.0, 3))
    with pytest.raises(AnnulusMismatchError):
        distance_function(g, profile, density)


def test_divergence_check_records_crossings():
    g = halfline_graph(1100)
    profile = profile_from_graph(g, GEOMETRIC_DOUBLING)
    density = build_density(profile, greedy_blocks(profile, 2.0, 4))
    u = distance_function(g, profile, density)
    ray = list(range(1101))
    report = divergence_check(g, u, [ray], [1.0, 2.0, 3.0])
    assert report.passed
    crossing = report.crossings[0]
    assert crossing.complete
    assert all(b > a for a, b in zip(crossing.radii[:-1], crossing.radii[1:]))
    assert all(math.isfinite(r) for r in crossing.radii)


def test_divergence_check_flags_short_rays():
    g = halfline_graph(1100)
    profile = profile_from_graph(g, GEOMETRIC_DOUBLING)
    density = build_density(profile, greedy_blocks(profile, 2.0, 4))
    u = distance_function(g, profile, density)
    report = divergence_check(g, u, [list(range(8))], [1.0, 50.0])
    assert not report.passed
    assert not report.crossings[0].complete
    assert math.isinf(report.crossings[0].radii[-1])


def test_divergence_check_rejects_unsorted_thresholds():
    g = halfline_graph(16)
    with pytest.raises(ValueError):
        divergence_check(g, np.zeros(17), [[0, 1]], [2.0, 1.0])

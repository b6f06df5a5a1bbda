"""Space graphs: generators, balls, integrals, chains, Poincaré probe."""

from __future__ import annotations

import numpy as np
import pytest

from mms.graph_space import (AllBallsSkippedError, MalformedPathError,
                             build_graph, chain_check, graph_from_json,
                             graph_to_json, grid_graph, halfline_graph,
                             line_graph, poincare_probe, profile_from_graph,
                             tree_graph, verify_chain_report)
from mms.serialize import canonical_json


def test_grid_shape_and_base():
    g = grid_graph(2, 3)
    assert g.node_count == 49
    assert np.all(g.mass == 1.0)
    assert g.base_distances()[g.base] == 0.0
    # base sits at the lattice origin: four neighbours at distance 1
    assert np.sum(g.base_distances() == 1.0) == 4


def test_tree_counts_nodes_per_generation():
    g = tree_graph(3, 2)
    assert g.node_count == 1 + 3 + 9
    d0 = g.base_distances()
    assert np.sum(d0 == 2.0) == 9


def test_ball_is_open():
    g = build_graph([(0, 1.0), (1, 1.0), (2, 1.0)],
                    [(0, 1, 1.0), (1, 2, 1.0)], 0)
    assert sorted(g.ball(g.index(0), 1.5)) == [0, 1]
    assert g.ball(g.index(0), 0.0).size == 0
    grid = grid_graph(2, 2)
    assert len(grid.ball(grid.base, 1.1)) == 5


def test_ball_monotone_in_radius():
    g = grid_graph(2, 4)
    small = set(g.ball(g.base, 2.5))
    large = set(g.ball(g.base, 4.0))
    assert small <= large


def test_line_integral_trapezoid_convention():
    g = build_graph([(7, 1.0), (8, 1.0)], [(7, 8, 2.0)], 7)
    values = np.array([1.0, 3.0])
    assert g.line_integral(values, [0, 1]) == pytest.approx(4.0)


def test_line_integral_unit_integrand_gives_length():
    g = halfline_graph(5)
    path = [g.index(v) for v in range(6)]
    assert g.line_integral(np.ones(6), path) == pytest.approx(5.0)
    assert g.line_integral(np.zeros(6), path) == 0.0


def test_line_integral_additive_under_concatenation():
    g = halfline_graph(9)
    values = np.linspace(0.0, 2.0, 10) ** 2
    whole = g.line_integral(values, list(range(10)))
    parts = (g.line_integral(values, list(range(5)))
             + g.line_integral(values, list(range(4, 10))))
    assert whole == parts


def test_line_integral_rejects_non_edges():
    g = halfline_graph(4)
    with pytest.raises(MalformedPathError):
        g.line_integral(np.ones(5), [0, 2])


def test_distance_is_a_metric_on_samples():
    g = grid_graph(2, 3)
    idx = [g.base, 0, g.node_count - 1, 10]
    d = {i: g.distances(i) for i in idx}
    for i in idx:
        assert d[i][i] == 0.0
        for j in idx:
            assert d[i][j] == pytest.approx(d[j][i])
            for k in idx:
                assert d[i][k] <= d[i][j] + d[j][k] + 1e-12


def test_graph_json_round_trip_is_byte_identical():
    g = tree_graph(2, 3)
    doc = graph_to_json(g)
    text = canonical_json(doc)
    again = canonical_json(graph_to_json(graph_from_json(doc)))
    assert text == again


def test_graph_json_rejects_unknown_keys():
    doc = graph_to_json(halfline_graph(2))
    doc["extra"] = 1
    with pytest.raises(ValueError):
        graph_from_json(doc)


def test_profile_from_graph_halfline_masses():
    profile = profile_from_graph(halfline_graph(64))
    assert profile.masses == (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    assert profile.j_min == 0


def test_profile_from_graph_needs_one_full_annulus():
    with pytest.raises(ValueError):
        profile_from_graph(halfline_graph(1))


def test_chain_check_halfline_passes_with_single_balls():
    g = halfline_graph(64)
    report = chain_check(g, 1.0, [8.0, 16.0])
    assert report.passed
    assert report.links >= 1
    assert verify_chain_report(g, report)


def test_chain_check_line_fails_with_antipodal_witness():
    g = line_graph(32)
    report = chain_check(g, 1.0, [16.0])
    assert not report.passed
    witness = report.failing_witness
    assert witness is not None
    d0 = g.base_distances()
    # the witness pair straddles the base: one node per end
    x, y = witness.x, witness.y
    assert d0[x] >= 8.0 and d0[y] >= 8.0
    cx = g.coords[int(g.ids[x])][0]
    cy = g.coords[int(g.ids[y])][0]
    assert cx * cy < 0


def test_chain_check_small_grid_passes_and_reverifies():
    g = grid_graph(2, 16)
    report = chain_check(g, 2.0, [8.0])
    assert report.passed
    assert verify_chain_report(g, report)


def test_poincare_constant_u_gives_zero():
    g = halfline_graph(16)
    probe = poincare_probe(g, np.zeros(17) + 3.0, np.ones(17), 2.0,
                           [(8, 4.0)])
    assert probe.value == 0.0


def test_poincare_scale_invariance_exact():
    g = grid_graph(2, 6)
    u = g.base_distances()
    rho = np.ones(g.node_count)
    sample = [(int(g.ids[g.base]), 3.0), (int(g.ids[0]), 2.0)]
    base = poincare_probe(g, u, rho, 2.0, sample)
    # exact identity in real arithmetic; float rounding differs between
    # the two evaluation orders, so compare at epsilon scale
    scaled = poincare_probe(g, -2.5 * u + 7.0, 2.5 * rho, 2.0, sample)
    assert scaled.value == pytest.approx(base.value, rel=1e-12)


def test_poincare_halfline_interval_balls():
    g = halfline_graph(32)
    u = g.base_distances()
    probe = poincare_probe(g, u, np.ones(33), 1.0, [(8, 4.0), (16, 8.0)])
    assert probe.value <= 0.5 + 1e-12


def test_poincare_all_skipped_raises():
    g = build_graph([(0, 1.0), (1, 1.0)], [(0, 1, 1.0)], 0)
    with pytest.raises(AllBallsSkippedError):
        poincare_probe(g, np.array([0.0, 1.0]), np.zeros(2), 1.0,
                       [(0, 2.0)])

"""Discrete p-modulus: closed forms, invariants, oracle agreement."""

from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from mms.graph_space import build_graph, grid_graph, halfline_graph
from mms.modulus import (Condenser, ExplicitPaths, FamilyError, TruncatedRays,
                         condenser_sequence, modulus, overflow_bound)


def _chain(k: int, mass: float = 1.0, first_id: int = 0):
    """Unit path graph with k+2 nodes: two plates around k interior."""
    ids = list(range(first_id, first_id + k + 2))
    nodes = [(v, mass) for v in ids]
    edges = [(u, v, 1.0) for u, v in zip(ids[:-1], ids[1:])]
    return ids, nodes, edges


def test_single_path_lagrange_closed_form():
    for k in (3, 10):
        ids, nodes, edges = _chain(k)
        g = build_graph(nodes, edges, ids[0])
        family = ExplicitPaths([ids])
        for p in (1.0, 1.5, 2.0, 3.0):
            res = modulus(g, family, p, support=ids[1:-1])
            assert res.converged
            assert res.value == pytest.approx(float(k) ** (1.0 - p), rel=1e-6)


def test_disjoint_copies_add():
    ids1, nodes1, edges1 = _chain(5)
    ids2, nodes2, edges2 = _chain(5, first_id=100)
    g = build_graph(nodes1 + nodes2, edges1 + edges2, 0)
    family = ExplicitPaths([ids1, ids2])
    support = ids1[1:-1] + ids2[1:-1]
    for p in (1.0, 2.0):
        res = modulus(g, family, p, support=support)
        assert res.value == pytest.approx(2.0 * 5.0 ** (1.0 - p), rel=1e-6)


def test_monotone_in_the_family():
    ids, nodes, edges = _chain(6)
    g = build_graph(nodes, edges, 0)
    sub = modulus(g, ExplicitPaths([ids]), 2.0)
    # adding a second (shorter) constraint can only grow the modulus
    full = modulus(g, ExplicitPaths([ids, ids[:4]]), 2.0)
    assert sub.value <= full.value + 1e-8


def test_subadditive_on_unions():
    g = grid_graph(2, 4)
    west = [v for v, c in zip(g.ids, g.coords) if c[0] == -4.0]
    east = [v for v, c in zip(g.ids, g.coords) if c[0] == 4.0]
    base = int(g.ids[g.base])
    m1 = modulus(g, Condenser([base], west), 2.0).value
    m2 = modulus(g, Condenser([base], east), 2.0).value
    union = modulus(g, Condenser([base], sorted(set(west + east))), 2.0).value
    assert union <= m1 + m2 + 1e-8
    assert union >= max(m1, m2) - 1e-8


def test_measure_scaling_is_linear():
    for c in (0.5, 3.0):
        ids, nodes, edges = _chain(4)
        g1 = build_graph(nodes, edges, 0)
        g2 = build_graph([(v, c) for v, _ in nodes], edges, 0)
        v1 = modulus(g1, ExplicitPaths([ids]), 2.0).value
        v2 = modulus(g2, ExplicitPaths([ids]), 2.0).value
        assert v2 == pytest.approx(c * v1, rel=1e-9)


def test_empty_family_and_disconnected_plates_are_infinite():
    g = halfline_graph(4)
    empty = modulus(g, ExplicitPaths([]), 2.0)
    assert math.isinf(empty.value)
    assert empty.reason == "empty family"
    two = build_graph([(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0)],
                      [(0, 1, 1.0), (2, 3, 1.0)], 0)
    cut = modulus(two, Condenser([0], [3]), 2.0)
    assert math.isinf(cut.value)
    assert cut.reason != ""


def test_result_certificates_hold():
    g = grid_graph(2, 6)
    d0 = g.base_distances()
    far = [v for v, d in zip(g.ids, d0) if d >= 6.0]
    res = modulus(g, Condenser([int(g.ids[g.base])], far), 2.0)
    assert res.converged
    assert res.shortest_length >= 1.0 - 1e-6
    rho = res.optimal_density.values
    assert np.all(rho >= 0)
    for path in res.active_paths:
        idx = [g.index(v) for v in path]
        assert g.line_integral(rho, idx) >= 1.0 - 1e-8


def test_halfline_condenser_p1_is_unit_cut():
    g = halfline_graph(64)
    sweep = condenser_sequence(g, 1.0, (4.0, 8.0, 16.0))
    for res in sweep.results:
        assert res.value == pytest.approx(1.0, rel=1e-9)
    # at R = 2 the plates share their only edge, so the trapezoid
    # convention prices the cut at 2 (the edge sees half of each node)
    single = condenser_sequence(g, 1.0, (2.0,))
    assert single.results[0].value == pytest.approx(2.0, rel=1e-9)


def test_halfline_condenser_p2_matches_series_resistance():
    g = halfline_graph(64)
    d0 = g.base_distances()
    for r in (8, 16, 32):
        plates = Condenser(
            [0, 1], [v for v, d in zip(g.ids, d0) if d >= r])
        got = modulus(g, plates, 2.0).value
        want = oracles.path_condenser_value(r - 2, 2.0)
        assert got == pytest.approx(want, rel=1e-6), r


def test_condenser_sequence_monotone_and_products():
    g = halfline_graph(200)
    sweep = condenser_sequence(g, 2.0, (4.0, 8.0, 16.0, 32.0))
    values = [res.value for res in sweep.results]
    assert all(b <= a * (1.0 + 1e-9) for a, b in zip(values[:-1], values[1:]))
    assert all(v > 0 for v in sweep.products)
    # series resistance halves the value per doubled radius, roughly
    assert values[-1] < values[0]


def test_truncated_rays_validation():
    with pytest.raises(FamilyError):
        TruncatedRays([1.0, 2.0])
    with pytest.raises(FamilyError):
        TruncatedRays([4.0, 2.0])
    assert TruncatedRays([2.0, 4.0]).radii == (2.0, 4.0)


def test_enumeration_oracle_on_a_theta_graph():
    # two plates joined by three internal routes of different lengths
    nodes = [(v, 1.0) for v in range(8)]
    edges = [(0, 1, 1.0), (1, 7, 1.0),          # short route
             (0, 2, 1.0), (2, 3, 1.0), (3, 7, 1.0),   # middle route
             (0, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 7, 1.0)]
    g = build_graph(nodes, edges, 0)
    raw_edges = [(u, v) for u, v, _ in edges]
    lengths = [1.0] * len(edges)
    paths = oracles.simple_plate_paths(8, raw_edges, [0], [7])
    assert len(paths) == 3
    for p in (1.0, 2.0):
        want = oracles.modulus_by_enumeration(
            [1.0] * 8, raw_edges, lengths, paths, p)
        got = modulus(g, Condenser([0], [7]), p).value
        assert got == pytest.approx(want, rel=1e-6), p


def test_overflow_bound_formula_and_homogeneity():
    ids, nodes, edges = _chain(9)
    family = ExplicitPaths([ids])
    # four nodes of mass 2: region mass 8, crossed over length exactly 4
    region = ids[3:7]
    g8 = build_graph([(v, 2.0 if v in region else 1.0) for v in ids],
                     edges, 0)
    bound = overflow_bound(g8, family, region, 4.0, 2.0)
    assert bound == pytest.approx(0.5)
    halved = overflow_bound(g8, family, region, 2.0, 2.0)
    assert halved == pytest.approx(0.5 * 2.0**2)


def test_overflow_bound_dominates_solver_on_halfline():
    g = halfline_graph(64)
    d0 = g.base_distances()
    for r in (8, 16, 32):
        plates = Condenser([0, 1],
                           [v for v, d in zip(g.ids, d0) if d >= r])
        region = [v for v, d in zip(g.ids, d0) if 2 <= d <= r]
        bound = overflow_bound(g, plates, region, float(r - 3), 2.0)
        solved = modulus(g, plates, 2.0).value
        assert solved <= bound + 1e-9


def test_overflow_bound_refuses_fast_crossings():
    from mms.modulus import OverflowHypothesisError
    ids, nodes, edges = _chain(5)
    g = build_graph(nodes, edges, 0)
    with pytest.raises(OverflowHypothesisError):
        overflow_bound(g, ExplicitPaths([ids]), ids[2:4], 10.0, 2.0)

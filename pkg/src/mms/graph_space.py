"""Weighted graphs as discrete metric measure spaces.

A :class:`SpaceGraph` is a finite undirected graph with positive node
masses, positive edge lengths, and a distinguished base node.  Node
masses play the role of the measure, shortest-path length the role of
the metric, and all balls are open (strict inequality).  Line integrals
along node paths use the trapezoid convention: an edge of length ``l``
contributes ``l * (f(u) + f(v)) / 2``.

The module also houses the discrete annular chain checker and a
Poincaré-quotient probe, both of which consume graphs through balls and
distances only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

# Fixed search grids for the chain checker: candidate ball-scale and
# annulus-widening constants, the cap on chain length, and the dyadic
# ladder of overlap radii r / (2**m * lambda * c1).
CHAIN_C1_GRID = (1, 2, 4, 8, 16)
CHAIN_C2_GRID = (1, 2, 4, 8, 16)
CHAIN_MAX_LINKS = 64
CHAIN_DELTA_EXPONENTS = range(7)

DEFAULT_PAIR_BUDGET = 6


class MalformedPathError(ValueError):
    """A node sequence uses a pair that is not an edge."""


class AllBallsSkippedError(RuntimeError):
    """Every sampled ball was skipped (zero denominator)."""


@dataclass
class SpaceGraph:
    """Finite weighted graph with a base node.

    ``ids`` are the external integer node labels; all arrays are indexed
    by internal position (ids sorted ascending).  ``coords`` is an
    optional embedding used by generators; it is not serialized.
    """

    ids: list[int]
    mass: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    base: int
    coords: np.ndarray | None = None

    _index: dict[int, int] = field(init=False, repr=False)
    _adj: csr_matrix = field(init=False, repr=False)
    _edge_len: dict[tuple[int, int], float] = field(init=False, repr=False)
    _base_dist: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self) -> None:
        n = len(self.ids)
        if n == 0:
            raise ValueError("graph must have at least one node")
        if len(set(self.ids)) != n:
            raise ValueError("node ids must be unique")
        if sorted(self.ids) != list(self.ids):
            raise ValueError("node ids must be sorted ascending")
        self.mass = np.asarray(self.mass, dtype=float)
        if self.mass.shape != (n,) or np.any(self.mass <= 0) or not np.all(np.isfinite(self.mass)):
            raise ValueError("node masses must be positive finite, one per node")
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.lengths = np.asarray(self.lengths, dtype=float)
        if self.lengths.shape != (self.edges.shape[0],):
            raise ValueError("one length per edge required")
        if np.any(self.lengths <= 0) or not np.all(np.isfinite(self.lengths)):
            raise ValueError("edge lengths must be positive finite")
        if self.edges.size and (self.edges.min() < 0 or self.edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(self.edges[:, 0] == self.edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        if not 0 <= self.base < n:
            raise ValueError("base index out of range")
        self._index = {v: i for i, v in enumerate(self.ids)}
        self._edge_len = {}
        for (u, v), l in zip(self.edges, self.lengths):
            key = (min(int(u), int(v)), max(int(u), int(v)))
            if key in self._edge_len:
                raise ValueError(f"duplicate edge {key}")
            self._edge_len[key] = float(l)
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.concatenate([self.lengths, self.lengths])
        self._adj = csr_matrix((data, (rows, cols)), shape=(n, n))

    # -- basic views ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.ids)

    def index(self, node_id: int) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise KeyError(f"unknown node id {node_id}") from None

    def edge_length(self, u: int, v: int) -> float:
        key = (min(u, v), max(u, v))
        try:
            return self._edge_len[key]
        except KeyError:
            raise MalformedPathError(
                f"nodes {u} and {v} are not joined by an edge") from None

    def adjacency(self, data: np.ndarray | None = None) -> csr_matrix:
        """Symmetric CSR adjacency; ``data`` substitutes edge weights."""
        if data is None:
            return self._adj
        weights = np.concatenate([data, data])
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        return csr_matrix((weights, (rows, cols)), shape=self._adj.shape)

    # -- metric --------------------------------------------------------

    def distances(self, source: int, limit: float = np.inf) -> np.ndarray:
        """Shortest-path distances from an internal index."""
        return _csgraph_dijkstra(self._adj, directed=False, indices=source,
                                 limit=limit)

    def base_distances(self) -> np.ndarray:
        if self._base_dist is None:
            self._base_dist = self.distances(self.base)
        return self._base_dist

    def ball(self, center: int, radius: float) -> np.ndarray:
        """Internal indices of the open ball around ``center``."""
        if center == self.base:
            d = self.base_distances()
        else:
            d = self.distances(center, limit=radius)
        return np.nonzero(d < radius)[0]

    def approx_diameter(self) -> float:
        """Double-sweep lower bound on the diameter (exact on trees)."""
        d0 = self.base_distances()
        finite = np.isfinite(d0)
        a = int(np.argmax(np.where(finite, d0, -1.0)))
        da = self.distances(a)
        return float(np.max(da[np.isfinite(da)]))

    # -- integration ---------------------------------------------------

    def line_integral(self, values: np.ndarray, path: Sequence[int]) -> float:
        """Trapezoid line integral of node values along a node path.

        ``path`` lists internal indices of consecutive nodes; every
        consecutive pair must be an edge, otherwise the offending pair
        is named in the error.
        """
        total = 0.0
        for u, v in zip(path[:-1], path[1:]):
            l = self.edge_length(int(u), int(v))
            total += l * (values[u] + values[v]) / 2.0
        return total


# -- construction and serialization -------------------------------------


def build_graph(nodes: Iterable[tuple[int, float]],
                edges: Iterable[tuple[int, int, float]], base: int,
                coords: dict[int, tuple[float, ...]] | None = None) -> SpaceGraph:
    """Assemble a :class:`SpaceGraph` from id-labelled nodes and edges."""
    node_list = sorted(nodes)
    ids = [int(i) for i, _ in node_list]
    mass = np.array([m for _, m in node_list], dtype=float)
    index = {v: i for i, v in enumerate(ids)}
    edge_rows = []
    lens = []
    for u, v, l in edges:
        if u not in index or v not in index:
            raise ValueError(f"edge ({u}, {v}) references an unknown node")
        a, b = index[u], index[v]
        edge_rows.append((min(a, b), max(a, b)))
        lens.append(float(l))
    order = sorted(range(len(edge_rows)), key=lambda k: edge_rows[k])
    edges_arr = np.array([edge_rows[k] for k in order], dtype=np.int64).reshape(-1, 2)
    lens_arr = np.array([lens[k] for k in order], dtype=float)
    if base not in index:
        raise ValueError(f"base node {base} is not in the graph")
    coord_arr = None
    if coords is not None:
        dim = len(next(iter(coords.values())))
        coord_arr = np.zeros((len(ids), dim))
        for i, node_id in enumerate(ids):
            coord_arr[i] = coords[node_id]
    return SpaceGraph(ids, mass, edges_arr, lens_arr, index[base], coord_arr)


def graph_to_json(space: SpaceGraph) -> dict:
    """Canonical JSON document: nodes by id, edges by (u, v), u < v."""
    nodes = [{"id": int(i), "mass": float(m)} for i, m in zip(space.ids, space.mass)]
    edges = []
    for (a, b), l in zip(space.edges, space.lengths):
        u, v = space.ids[int(a)], space.ids[int(b)]
        u, v = min(u, v), max(u, v)
        edges.append({"len": float(l), "u": int(u), "v": int(v)})
    edges.sort(key=lambda e: (e["u"], e["v"]))
    return {"base": int(space.ids[space.base]), "edges": edges, "nodes": nodes}


def graph_from_json(doc: dict) -> SpaceGraph:
    """Parse and validate the graph JSON schema."""
    if not isinstance(doc, dict):
        raise ValueError("graph document must be a JSON object")
    if set(doc) != {"nodes", "edges", "base"}:
        raise ValueError("graph document keys must be exactly "
                         "['base', 'edges', 'nodes']")
    nodes = []
    for entry in doc["nodes"]:
        if set(entry) != {"id", "mass"}:
            raise ValueError("node entries must have exactly keys ['id', 'mass']")
        if not isinstance(entry["id"], int):
            raise ValueError("node ids must be integers")
        nodes.append((entry["id"], float(entry["mass"])))
    edges = []
    for entry in doc["edges"]:
        if set(entry) != {"u", "v", "len"}:
            raise ValueError("edge entries must have exactly keys ['len', 'u', 'v']")
        edges.append((int(entry["u"]), int(entry["v"]), float(entry["len"])))
    if not isinstance(doc["base"], int):
        raise ValueError("base must be an integer node id")
    return build_graph(nodes, edges, doc["base"])


# -- generators ----------------------------------------------------------


def grid_graph(n: int, half_width: int) -> SpaceGraph:
    """Unit lattice graph on ``{-W..W}^n`` based at the origin."""
    if n < 1 or half_width < 1:
        raise ValueError("need dimension >= 1 and half_width >= 1")
    side = 2 * half_width + 1
    points = np.stack(np.meshgrid(*[np.arange(-half_width, half_width + 1)] * n,
                                  indexing="ij"), axis=-1).reshape(-1, n)
    nodes = [(i, 1.0) for i in range(len(points))]
    strides = [side ** (n - 1 - k) for k in range(n)]

    def lin(pt) -> int:
        return int(sum((c + half_width) * s for c, s in zip(pt, strides)))

    edges = []
    for i, pt in enumerate(points):
        for axis in range(n):
            if pt[axis] < half_width:
                nb = pt.copy()
                nb[axis] += 1
                edges.append((i, lin(nb), 1.0))
    coords = {i: tuple(float(c) for c in pt) for i, pt in enumerate(points)}
    return build_graph(nodes, edges, lin(np.zeros(n, dtype=int)), coords)


def halfline_graph(length: int, node_mass: Callable[[int], float] | None = None
                   ) -> SpaceGraph:
    """Path graph ``0 - 1 - ... - length`` based at 0, unit cells."""
    if length < 1:
        raise ValueError("length must be at least 1")
    massf = node_mass or (lambda v: 1.0)
    nodes = [(v, float(massf(v))) for v in range(length + 1)]
    edges = [(v, v + 1, 1.0) for v in range(length)]
    coords = {v: (float(v),) for v in range(length + 1)}
    return build_graph(nodes, edges, 0, coords)


def line_graph(half_length: int) -> SpaceGraph:
    """Two-ended unit path ``-N .. N`` based at 0."""
    if half_length < 1:
        raise ValueError("half_length must be at least 1")
    nodes = [(v, 1.0) for v in range(-half_length, half_length + 1)]
    edges = [(v, v + 1, 1.0) for v in range(-half_length, half_length)]
    coords = {v: (float(v),) for v in range(-half_length, half_length + 1)}
    return build_graph(nodes, edges, 0, coords)


def tree_graph(k: int, depth: int,
               node_mass: Callable[[int], float] | None = None) -> SpaceGraph:
    """Rooted tree where every vertex has ``k`` children, unit edges.

    ``node_mass`` maps a generation to the mass of each of its nodes.
    Ids follow breadth-first order from the root.
    """
    if k < 2 or depth < 1:
        raise ValueError("need k >= 2 and depth >= 1")
    massf = node_mass or (lambda gen: 1.0)
    nodes = [(0, float(massf(0)))]
    edges = []
    frontier = [0]
    next_id = 1
    for gen in range(1, depth + 1):
        new_frontier = []
        for parent in frontier:
            for _ in range(k):
                nodes.append((next_id, float(massf(gen))))
                edges.append((parent, next_id, 1.0))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return build_graph(nodes, edges, 0)


def profile_from_graph(space: SpaceGraph, asymptotic_class=None,
                       j_min: int = 0):
    """Dyadic annulus masses around the base node as a profile.

    Only annuli entirely within the graph's eccentricity are kept, so a
    finite truncation never reports a boundary-clipped annulus.
    """
    from .model_spaces import AsymptoticClass, RadialProfile

    d0 = space.base_distances()
    ecc = float(np.max(d0[np.isfinite(d0)]))
    masses = []
    j = j_min
    while 2.0 ** (j + 1) <= ecc + 1e-12:
        sel = (d0 >= 2.0 ** j) & (d0 < 2.0 ** (j + 1))
        masses.append(float(np.sum(space.mass[sel])))
        j += 1
    if not masses:
        raise ValueError("graph too small for even one complete annulus")
    return RadialProfile(tuple(masses), j_min,
                         asymptotic_class or AsymptoticClass.unknown())


# -- annular chain condition ---------------------------------------------


@dataclass(frozen=True)
class ChainWitness:
    """One verified (or refuted) chain task at radius ``r``."""

    r: float
    x: int
    y: int
    ok: bool
    centers: tuple[int, ...]
    overlaps: tuple[int, ...]
    reason: str = ""


@dataclass(frozen=True)
class ChainReport:
    """Outcome of the annular chain search.

    On a pass, ``(c1, c2, delta, links)`` are uniform constants verified
    for every sampled task: balls of radius ``r / (lambda * c1)`` stay
    in the annulus ``B(O, c2 r) - B(O, r / c2)``, consecutive balls
    share a sub-ball of radius ``delta * r``, and chains use at most
    ``links`` balls.  Witness chains are stored and re-checkable.
    """

    lam: float
    passed: bool
    c1: int | None
    c2: int | None
    delta: float | None
    links: int | None
    tasks: tuple[ChainWitness, ...]
    radii: tuple[float, ...]
    pair_budget: int

    @property
    def failing_witness(self) -> ChainWitness | None:
        for task in self.tasks:
            if not task.ok:
                return task
        return None


def _annulus_pairs(space: SpaceGraph, r: float, budget: int
                   ) -> list[tuple[int, int]]:
    """Deterministic farthest-pair-first sample of annulus node pairs."""
    d0 = space.base_distances()
    members = np.nonzero((d0 >= r / 2.0) & (d0 < r))[0]
    if len(members) < 2:
        return []
    a = int(members[np.argmax(d0[members])])
    da = space.distances(a)
    finite = members[np.isfinite(da[members])]
    if len(finite) == 0:
        return []
    order = sorted(finite, key=lambda v: (-da[v], v))
    b = int(order[0])
    pairs: list[tuple[int, int]] = []
    if b != a:
        pairs.append((a, b))
    for y in order[1:]:
        if len(pairs) >= budget:
            break
        if int(y) != a:
            pairs.append((a, int(y)))
    return pairs[:budget]


def _subgraph_path(space: SpaceGraph, allowed: np.ndarray, x: int, y: int
                   ) -> list[int] | None:
    """Shortest path from x to y through ``allowed`` nodes only."""
    if not (allowed[x] and allowed[y]):
        return None
    keep = np.nonzero(allowed)[0]
    remap = -np.ones(space.node_count, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    sub = space._adj[keep][:, keep]
    dist, pred = _csgraph_dijkstra(sub, directed=False, indices=remap[x],
                                   return_predecessors=True)
    if not np.isfinite(dist[remap[y]]):
        return None
    path = [int(remap[y])]
    while path[-1] != remap[x]:
        path.append(int(pred[path[-1]]))
    return [int(keep[i]) for i in reversed(path)]


def _greedy_chain(space: SpaceGraph, path: list[int], rho: float, dr: float
                  ) -> tuple[list[int], list[int]] | None:
    """Centers along ``path`` whose balls pairwise share a ``dr``-ball.

    Uses cumulative path length and the triangle inequality: a shared
    node ``z`` with ``d(c_i, z) + dr <= rho`` and ``d(z, c_{i+1}) + dr
    <= rho`` certifies that the ball around ``z`` lies in both balls.
    """
    cum = [0.0]
    for u, v in zip(path[:-1], path[1:]):
        cum.append(cum[-1] + space.edge_length(int(u), int(v)))
    reach = rho - dr
    if reach < 0:
        return None
    centers = [0]
    overlaps: list[int] = []
    while path[centers[-1]] != path[-1]:
        cur = centers[-1]
        best = None
        for nxt in range(len(path) - 1, cur, -1):
            lo, hi = cum[cur], cum[nxt]
            for z in range(cur, nxt + 1):
                if cum[z] - lo <= reach and hi - cum[z] <= reach:
                    best = (nxt, z)
                    break
            if best is not None:
                break
        if best is None:
            return None
        centers.append(best[0])
        overlaps.append(best[1])
        if len(centers) > CHAIN_MAX_LINKS:
            return None
    return [path[i] for i in centers], [path[i] for i in overlaps]


def _verify_chain(space: SpaceGraph, r: float, lam: float, c1: int, c2: int,
                  dr: float, centers: Sequence[int], overlaps: Sequence[int]
                  ) -> bool:
    """Re-check the four chain properties directly from ball node sets."""
    d0 = space.base_distances()
    rho = r / (lam * c1)
    balls = [set(space.ball(c, rho).tolist()) for c in centers]
    for ball_nodes in balls:
        for v in ball_nodes:
            if not (r / c2 <= d0[v] < c2 * r):
                return False
    if len(centers) > CHAIN_MAX_LINKS:
        return False
    for i, z in enumerate(overlaps):
        shared = set(space.ball(z, dr).tolist())
        if not shared or not shared <= (balls[i] & balls[i + 1]):
            return False
    return True


def chain_check(space: SpaceGraph, lam: float, radii: Sequence[float],
                pair_budget: int = DEFAULT_PAIR_BUDGET) -> ChainReport:
    """Search for uniform annular chain constants at scale ``lam``.

    For each radius ``r`` and each sampled pair ``x, y`` in the annulus
    ``B(O, r) - B(O, r/2)``, the checker looks for a chain of at most
    ``CHAIN_MAX_LINKS`` balls of radius ``r / (lam * c1)`` from ``x`` to
    ``y``, contained in ``B(O, c2 r) - B(O, r / c2)``, with consecutive
    balls sharing a ball of radius ``delta * r``.  Constants are drawn
    from fixed grids, smallest first, and must be uniform across all
    sampled tasks.  Pairs are ordered farthest-first so adversarial
    antipodal pairs are tried immediately.

    Returns a :class:`ChainReport`; on failure the report carries the
    first failing witness at the most permissive constants attempted.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    diam = space.approx_diameter()
    for r in radii:
        if r <= 0:
            raise ValueError("radii must be positive")
        if r > diam / 2.0:
            raise ValueError(f"radius {r} exceeds half the graph diameter {diam / 2.0}")
    tasks = [(float(r), x, y) for r in radii
             for x, y in _annulus_pairs(space, float(r), pair_budget)]
    if not tasks:
        return ChainReport(lam, True, None, None, None, 0, (), tuple(radii),
                           pair_budget)
    d0 = space.base_distances()

    last_failure: tuple[float, int, int, str] | None = None
    for c1 in CHAIN_C1_GRID:
        for c2 in CHAIN_C2_GRID:
            paths = {}
            feasible = True
            for r, x, y in tasks:
                rho = r / (lam * c1)
                allowed = (d0 >= r / c2 + rho) & (d0 <= c2 * r - rho)
                path = _subgraph_path(space, allowed, x, y)
                if path is None:
                    reason = ("no corridor path inside the annulus at "
                              f"c1={c1}, c2={c2}")
                    last_failure = (r, x, y, reason)
                    feasible = False
                    break
                paths[(r, x, y)] = path
            if not feasible:
                continue
            for m in CHAIN_DELTA_EXPONENTS:
                witnesses = []
                max_links = 0
                ok_all = True
                for r, x, y in tasks:
                    rho = r / (lam * c1)
                    dr = r / (2 ** m * lam * c1)
                    built = _greedy_chain(space, paths[(r, x, y)], rho, dr)
                    if built is None or not _verify_chain(
                            space, r, lam, c1, c2, dr, built[0], built[1]):
                        reason = f"no verified chain at c1={c1}, c2={c2}, m={m}"
                        last_failure = (r, x, y, reason)
                        ok_all = False
                        break
                    centers, overlaps = built
                    max_links = max(max_links, len(centers))
                    witnesses.append(ChainWitness(r, space.ids[x], space.ids[y],
                                                  True,
                                                  tuple(space.ids[c] for c in centers),
                                                  tuple(space.ids[z] for z in overlaps)))
                if ok_all:
                    delta = 1.0 / (2 ** m * lam * c1)
                    return ChainReport(lam, True, c1, c2, delta, max_links,
                                       tuple(witnesses), tuple(radii), pair_budget)
    r, x, y, reason = last_failure  # type: ignore[misc]
    witness = ChainWitness(r, space.ids[x], space.ids[y], False, (), (), reason)
    return ChainReport(lam, False, None, None, None, None, (witness,),
                       tuple(radii), pair_budget)


def verify_chain_report(space: SpaceGraph, report: ChainReport) -> bool:
    """Re-check every stored chain witness of a passing report."""
    if not report.passed:
        return False
    if report.c1 is None:
        return True  # vacuous pass: no testable pairs
    for task in report.tasks:
        centers = [space.index(c) for c in task.centers]
        overlaps = [space.index(z) for z in task.overlaps]
        if not _verify_chain(space, task.r, report.lam, report.c1, report.c2,
                             report.delta * task.r, centers, overlaps):
            return False
    return True


# -- Poincaré probe -------------------------------------------------------


@dataclass(frozen=True)
class PoincareRow:
    center: int
    radius: float
    mean_oscillation: float
    gradient_term: float
    ratio: float


@dataclass(frozen=True)
class PoincareReport:
    p: float
    lam: float
    value: float
    rows: tuple[PoincareRow, ...]
    skipped: tuple[int, ...]


def poincare_probe(space: SpaceGraph, u: np.ndarray, rho: np.ndarray,
                   p: float, ball_sample: Sequence[tuple[int, float]],
                   lam: float = 1.0) -> PoincareReport:
    """Largest Poincaré quotient of ``(u, rho)`` over sampled balls.

    Each ball contributes ``avg_B |u - u_B|`` divided by
    ``r * (avg_{lam B} rho**p)**(1/p)`` with mass-weighted averages.
    Balls whose denominator vanishes are skipped and reported; if every
    ball is skipped the probe raises :class:`AllBallsSkippedError`.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    u = np.asarray(u, dtype=float)
    rho = np.asarray(rho, dtype=float)
    rows = []
    skipped = []
    for center_id, radius in ball_sample:
        center = space.index(center_id)
        inner = space.ball(center, radius)
        outer = space.ball(center, lam * radius) if lam != 1.0 else inner
        m_in = float(np.sum(space.mass[inner]))
        m_out = float(np.sum(space.mass[outer]))
        if m_in == 0 or m_out == 0:
            skipped.append(center_id)
            continue
        u_mean = float(np.sum(u[inner] * space.mass[inner])) / m_in
        osc = float(np.sum(np.abs(u[inner] - u_mean) * space.mass[inner])) / m_in
        grad = radius * (float(np.sum(rho[outer] ** p * space.mass[outer]))
                         / m_out) ** (1.0 / p)
        if grad == 0:
            skipped.append(center_id)
            continue
        rows.append(PoincareRow(center_id, float(radius), osc, grad, osc / grad))
    if not rows:
        raise AllBallsSkippedError("every sampled ball had a vanishing denominator")
    value = max(row.ratio for row in rows)
    return PoincareReport(p, lam, value, tuple(rows), tuple(skipped))

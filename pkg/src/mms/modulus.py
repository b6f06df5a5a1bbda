"""Discrete p-modulus of path families on a SpaceGraph.

The modulus of a family of paths is the infimum of sum(rho(v)^p * mu(v))
over node densities rho >= 0 whose trapezoidal line integral along every
path of the family is at least 1.  The solver generates constraints
lazily: it repeatedly finds the minimum rho-length path with a
nonnegative-weight shortest-path search, adds it while violated, and
re-solves the convex subproblem restricted to the active constraint set.
Termination is certified by the shortest rho-path of the full family
having rho-length >= 1 - ADMISSIBILITY_TOL.

Empty families and disconnected condensers are reported with the
distinguished value +inf rather than raising: with nothing to block,
every density is admissible and the infimum degenerates.  A family
containing a path that never meets the support set is also +inf, this
time because no density on the support can block it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.sparse.csgraph import dijkstra

from .graph_space import MalformedPathError, SpaceGraph, profile_from_graph
from .growth_criteria import script_R

ADMISSIBILITY_TOL = 1e-6
ACTIVE_PATH_TOL = 1e-8
KKT_TOL = 1e-9
CONSTRAINT_CAP = 10_000

# Shortest-path weights are floored at this value so that zero-density
# regions keep their edges in the search graph; the distortion is far
# below every tolerance in use.
_WEIGHT_FLOOR = 1e-300

# How many violated paths to add per generation round.  One would do; a
# diverse batch cuts the round count sharply on wide condensers.
_BATCH_PATHS = 384

# Shortest-path waves per generation round: after each wave the accepted
# corridors are weight-bumped so the next wave explores elsewhere.
_WAVE_COUNT = 8

# Newton step budget for intermediate re-solves; the certifying solve
# gets the full budget.
_LOOSE_NEWTON = 4

# Dual target for intermediate re-solves, scaled down with the current
# infeasibility; the certifying solve always reaches KKT_TOL.
_LOOSE_KKT = 1e-4

_MAX_NEWTON = 400

# Free sets up to this size use a direct dense Newton solve; larger ones
# switch to matrix-free conjugate gradients on the same system.
_DENSE_FREE_LIMIT = 700

# A working-set row whose multiplier is zero and whose constraint holds
# with this much slack for _DROP_AGE consecutive rounds is dropped; it
# returns through generation if it ever matters again.
_DROP_SLACK = 0.05
_DROP_AGE = 3


class FamilyError(ValueError):
    """Raised when a curve family is structurally invalid."""


class OverflowHypothesisError(ValueError):
    """Raised when the (region, min_length) crossing hypothesis fails.

    Attributes
    ----------
    witness : tuple of int
        Node ids of a path whose length inside the region falls short.
    shortfall : float
        The length that path actually spends inside the region.
    """

    def __init__(self, message: str, witness: Sequence[int], shortfall: float):
        super().__init__(message)
        self.witness = tuple(witness)
        self.shortfall = float(shortfall)


@dataclass(frozen=True)
class ExplicitPaths:
    """A finite family given by node-id walks."""

    paths: tuple

    def __init__(self, paths: Iterable[Sequence[int]]):
        object.__setattr__(
            self, "paths", tuple(tuple(int(v) for v in path) for path in paths)
        )
        for path in self.paths:
            if len(path) < 2:
                raise FamilyError(f"path {path} has fewer than two nodes")


@dataclass(frozen=True)
class Condenser:
    """All paths from the node set ``source`` to the node set ``target``."""

    source: tuple
    target: tuple

    def __init__(self, source: Iterable[int], target: Iterable[int]):
        src = tuple(sorted({int(v) for v in source}))
        dst = tuple(sorted({int(v) for v in target}))
        if not src or not dst:
            raise FamilyError("condenser plates must be non-empty")
        if set(src) & set(dst):
            raise FamilyError("condenser plates must be disjoint")
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "target", dst)


@dataclass(frozen=True)
class TruncatedRays:
    """Condenser schedule standing in for the family of infinite curves.

    For each radius R the family is the condenser from the closed unit
    ball around the base to the complement of B(O, R).
    """

    radii: tuple

    def __init__(self, radii: Iterable[float]):
        rs = tuple(float(r) for r in radii)
        if not rs or any(b <= a for a, b in zip(rs, rs[1:])) or rs[0] <= 1.0:
            raise FamilyError("radii must be strictly increasing and exceed 1")
        object.__setattr__(self, "radii", rs)


@dataclass(frozen=True)
class Density:
    """A nonnegative node density aligned with ``SpaceGraph.ids``."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("density values must be finite and nonnegative")
        object.__setattr__(self, "values", vals)

    def at(self, space: SpaceGraph, node: int) -> float:
        return float(self.values[space.index(node)])


@dataclass(frozen=True)
class ModulusResult:
    """Solver outcome for one family.

    ``certificate`` is the duality gap for p > 1 and the LP optimality
    flag for p = 1; ``shortest_length`` is the certified minimum
    rho-length over the whole family at termination.  Infinite results
    carry ``reason`` and an all-zero density.
    """

    value: float
    optimal_density: Density
    active_paths: tuple
    certificate: object
    iterations: int
    shortest_length: float
    converged: bool
    p: float
    reason: str = ""

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _infinite_result(space: SpaceGraph, p: float, reason: str) -> ModulusResult:
    return ModulusResult(
        value=math.inf,
        optimal_density=Density(np.zeros(space.node_count)),
        active_paths=(),
        certificate=reason,
        iterations=0,
        shortest_length=math.inf,
        converged=True,
        p=p,
        reason=reason,
    )


def _index_path(space: SpaceGraph, path_ids: Sequence[int]) -> list:
    idx = [space.index(v) for v in path_ids]
    for (u, v), (iu, iv) in zip(zip(path_ids[:-1], path_ids[1:]), zip(idx[:-1], idx[1:])):
        try:
            space.edge_length(iu, iv)
        except MalformedPathError:
            raise MalformedPathError(
                f"nodes {u} and {v} are not joined by an edge"
            ) from None
    return idx


def _path_row(space: SpaceGraph, idx_path: Sequence[int], mask=None) -> tuple:
    """Trapezoid coefficients of an index walk as (columns, weights).

    Columns outside ``mask`` are omitted, which encodes the support
    restriction directly in the constraint matrix.
    """

    coeff: dict = {}
    for iu, iv in zip(idx_path[:-1], idx_path[1:]):
        half = 0.5 * space.edge_length(int(iu), int(iv))
        coeff[iu] = coeff.get(iu, 0.0) + half
        coeff[iv] = coeff.get(iv, 0.0) + half
    keep = sorted(c for c in coeff if mask is None or mask[c])
    cols = np.array(keep, dtype=np.int64)
    vals = np.array([coeff[c] for c in keep])
    return cols, vals


def _row_value(row: tuple, values: np.ndarray) -> float:
    cols, vals = row
    return float(values[cols] @ vals)


def _rows_to_matrix(rows: Sequence[tuple], n: int) -> sparse.csr_matrix:
    if not rows:
        return sparse.csr_matrix((0, n))
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum([len(cols) for cols, _ in rows], out=indptr[1:])
    indices = np.concatenate([cols for cols, _ in rows])
    data = np.concatenate([vals for _, vals in rows])
    return sparse.csr_matrix((data, indices, indptr), shape=(len(rows), n))


def _support_mask(space: SpaceGraph, support) -> np.ndarray | None:
    if support is None:
        return None
    mask = np.zeros(space.node_count, dtype=bool)
    for node in support:
        mask[space.index(node)] = True
    return mask


def _line_weights(space: SpaceGraph, values: np.ndarray) -> np.ndarray:
    u, v = space.edges[:, 0], space.edges[:, 1]
    w = space.lengths * 0.5 * (values[u] + values[v])
    return np.maximum(w, _WEIGHT_FLOOR)


def _plate_boundary(space: SpaceGraph, target_mask: np.ndarray) -> np.ndarray:
    """Targets restricted to the plate's inner boundary.

    Every path into the plate first hits a plate node with a neighbour
    outside, and that prefix is a shorter constraint of the same family,
    so nothing is lost; deep plate interiors would otherwise dominate
    the per-round target scan.
    """

    u, v = space.edges[:, 0], space.edges[:, 1]
    boundary = np.zeros(space.node_count, dtype=bool)
    cross = target_mask[u] & ~target_mask[v]
    boundary[u[cross]] = True
    cross = target_mask[v] & ~target_mask[u]
    boundary[v[cross]] = True
    return boundary if boundary.any() else target_mask


def _shortest_paths(
    space: SpaceGraph,
    rho: np.ndarray,
    sources: np.ndarray,
    target_mask: np.ndarray,
    threshold: float,
    used: np.ndarray | None = None,
    cap: int = _BATCH_PATHS,
) -> tuple:
    """Minimum rho-length into the target set, plus paths under threshold.

    Returns ``(best, paths)`` where ``paths`` are internal index paths
    with rho-length below ``threshold``, visited in (length, index)
    order, so the minimum path always comes first.  A violated path is
    only batched when most of its nodes are not already covered in
    ``used``; without this filter the batches fill with staircase
    near-duplicates that exhaust the constraint budget on wide
    condensers.
    """

    graph = space.adjacency(data=_line_weights(space, rho))
    dist, pred, _ = dijkstra(
        graph,
        directed=False,
        indices=sources,
        return_predecessors=True,
        min_only=True,
    )
    t_idx = np.flatnonzero(target_mask)
    reach = t_idx[np.isfinite(dist[t_idx])]
    if reach.size == 0:
        return math.inf, []
    order = reach[np.lexsort((reach, dist[reach]))]
    best = float(dist[order[0]])
    paths: list = []
    if used is None:
        used = np.zeros(space.node_count, dtype=bool)
    any_used = bool(used.any())
    for t in order:
        if dist[t] >= threshold or len(paths) >= cap:
            break
        path = [int(t)]
        while pred[path[-1]] >= 0:
            path.append(int(pred[path[-1]]))
        path.reverse()
        if any_used and int(np.count_nonzero(used[path])) > len(path) // 3:
            continue
        used[path] = True
        any_used = True
        paths.append(path)
    return best, paths


def _generate_cuts(
    space: SpaceGraph,
    rho: np.ndarray,
    sources: np.ndarray,
    target_mask: np.ndarray,
    threshold: float,
) -> tuple:
    """Violated paths found over several shortest-path waves.

    The first wave gives the true minimum rho-length; after each wave
    the accepted corridors get their working weights raised so the next
    wave routes around them, and its paths are re-measured against the
    real density before acceptance.  Returns ``(best, paths)``.
    """

    used = np.zeros(space.node_count, dtype=bool)
    best, paths = _shortest_paths(
        space, rho, sources, target_mask, threshold, used
    )
    if math.isinf(best) or best >= threshold:
        return best, paths
    # Bumps only ever raise weights, so any path a later wave finds under
    # the threshold is genuinely violated for the real density too.
    work = rho.copy()
    new = paths
    for _ in range(_WAVE_COUNT - 1):
        if len(paths) >= _BATCH_PATHS or not new:
            break
        for path in new:
            length = _row_value(_path_row(space, path), rho)
            work[path] += (threshold - length + 0.05) / max(len(path) - 1, 1)
        _, new = _shortest_paths(
            space, work, sources, target_mask, threshold, used,
            _BATCH_PATHS - len(paths),
        )
        paths = paths + new
    return best, paths


# -- convex subproblems ----------------------------------------------------


def _primal_density(s: np.ndarray, mu: np.ndarray, p: float) -> np.ndarray:
    q = 1.0 / (p - 1.0)
    out = np.zeros_like(s)
    pos = s > 0.0
    out[pos] = (s[pos] / (p * mu[pos])) ** q
    return out


def _dual_value(lam: np.ndarray, rho: np.ndarray, mu: np.ndarray, p: float) -> float:
    return float(lam.sum() - (p - 1.0) * np.dot(mu, rho**p))


def _kkt_residual(lam: np.ndarray, grad: np.ndarray) -> float:
    res = np.where(lam > 0.0, np.abs(grad), np.maximum(grad, 0.0))
    return float(res.max()) if res.size else 0.0


def _cg_step(Af: sparse.csr_matrix, dslope: np.ndarray, gf: np.ndarray,
             kkt: float) -> np.ndarray:
    """Inexact Newton step by preconditioned conjugate gradients.

    Solves (Af diag(dslope) Af^T) x = gf without forming the matrix,
    with Jacobi preconditioning.  The forcing term ties the residual
    target to the current KKT residual so early rounds stay cheap and
    late rounds stay accurate.
    """

    AfT = Af.T.tocsr()
    diag = Af.multiply(Af).dot(dslope)
    shift = 1e-14 * max(float(diag.max(initial=0.0)), 1.0)
    precond = np.maximum(diag + shift, 1e-300)

    def apply(x: np.ndarray) -> np.ndarray:
        return Af.dot(dslope * AfT.dot(x)) + shift * x

    x = np.zeros_like(gf)
    r = gf.copy()
    z = r / precond
    d = z.copy()
    rz = float(r @ z)
    target = max(1e-12, min(0.5, math.sqrt(max(kkt, 0.0)))) * math.sqrt(
        float(gf @ gf)
    )
    for _ in range(min(2 * gf.size, 1000)):
        Ad = apply(d)
        dAd = float(d @ Ad)
        if dAd <= 0.0:
            break
        alpha = rz / dAd
        x += alpha * d
        r -= alpha * Ad
        if math.sqrt(float(r @ r)) <= target:
            break
        z = r / precond
        rz_new = float(r @ z)
        if rz_new <= 0.0:
            break
        d = z + (rz_new / rz) * d
        rz = rz_new
    return x


def _solve_subproblem_newton(
    A: sparse.csr_matrix,
    mu: np.ndarray,
    p: float,
    lam: np.ndarray,
    kkt_goal: float = KKT_TOL,
    max_steps: int = _MAX_NEWTON,
) -> tuple:
    """Maximize the dual of the restricted problem by projected Newton.

    The dual objective is sum(lam) - (p-1) * sum(mu * rho(s)^p) with
    s = A^T lam and rho = (s / (p mu))^(1/(p-1)); its gradient is
    1 - A rho, so KKT stationarity is exactly admissibility of the
    active paths.  Returns (rho, lam, kkt_residual).
    """

    m = A.shape[0]
    if lam.size != m:
        lam = np.concatenate([lam, np.zeros(m - lam.size)])
    AT = A.T.tocsr()
    for _ in range(max_steps):
        s = AT.dot(lam)
        rho = _primal_density(s, mu, p)
        grad = 1.0 - A.dot(rho)
        kkt = _kkt_residual(lam, grad)
        if kkt <= kkt_goal:
            break
        free = np.flatnonzero((lam > 0.0) | (grad > 0.0))
        if free.size == 0:
            break
        # d rho / d s, floored where no active path has touched a node
        # yet so that the Newton system stays regular.
        s_ref = max(float(s.max()), 1.0)
        dslope = rho / ((p - 1.0) * np.maximum(s, s_ref * 1e-14))
        cold = s <= 0.0
        if np.any(cold):
            dslope[cold] = (1.0 / (p * mu[cold])) ** (1.0 / (p - 1.0)) / (p - 1.0)
        Af = A[free]
        gf = grad[free]
        if free.size <= _DENSE_FREE_LIMIT:
            H = (Af.multiply(dslope) @ Af.T).toarray()
            shift = 1e-14 * max(np.trace(H), 1.0)
            try:
                step = np.linalg.solve(H + shift * np.eye(H.shape[0]), gf)
            except np.linalg.LinAlgError:
                step = gf
        else:
            step = _cg_step(Af, dslope, gf, kkt)
        improved = False
        for candidate_step in (step, gf):
            value = _dual_value(lam, rho, mu, p)
            t = 1.0
            for _ in range(50):
                cand = lam.copy()
                cand[free] = np.maximum(cand[free] + t * candidate_step, 0.0)
                rho_c = _primal_density(AT.dot(cand), mu, p)
                if _dual_value(cand, rho_c, mu, p) > value:
                    lam = cand
                    improved = True
                    break
                t *= 0.5
            if improved:
                break
        if not improved:
            break
    s = AT.dot(lam)
    rho = _primal_density(s, mu, p)
    return rho, lam, _kkt_residual(lam, 1.0 - A.dot(rho))


def _solve_subproblem_lp(A: sparse.csr_matrix, mu: np.ndarray) -> tuple:
    """Exact p = 1 subproblem over the active constraints."""

    res = linprog(
        c=mu,
        A_ub=-A,
        b_ub=-np.ones(A.shape[0]),
        bounds=(0.0, None),
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"active-set LP failed with status {res.status}")
    return np.asarray(res.x), 0.0


def _solve_active_set(space, rows, p, lam, kkt_goal=KKT_TOL,
                      max_steps=_MAX_NEWTON):
    """Solve on the working set.

    Returns (rho, lam, cert, row_values, lower): ``lower`` is a bound
    on the full-family modulus from below, valid for any multiplier
    point by weak duality, since adding family constraints only raises
    the optimum.
    """

    A = _rows_to_matrix(rows, space.node_count)
    mu = space.mass
    if p > 1.0:
        rho, lam, _ = _solve_subproblem_newton(A, mu, p, lam, kkt_goal, max_steps)
        lower = _dual_value(lam, rho, mu, p)
        cert = max(float(np.dot(mu, rho**p)) - lower, 0.0)
    else:
        rho, cert = _solve_subproblem_lp(A, mu)
        lam = np.zeros(A.shape[0])
        lower = float(np.dot(mu, rho))
    return rho, lam, cert, A.dot(rho), lower


def _finalize(space, rho, idx_paths, cert, p, iterations, shortest, converged):
    value = float(np.dot(space.mass, rho**p))
    active = tuple(tuple(int(space.ids[i]) for i in path) for path in idx_paths)
    return ModulusResult(
        value=value,
        optimal_density=Density(rho),
        active_paths=active,
        certificate=cert,
        iterations=iterations,
        shortest_length=shortest,
        converged=converged,
        p=p,
    )


def modulus(
    space: SpaceGraph,
    family,
    p: float,
    support: Iterable[int] | None = None,
    value_rtol: float = 1e-6,
) -> ModulusResult:
    """Compute the p-modulus of a path family.

    Parameters
    ----------
    space : SpaceGraph
    family : ExplicitPaths or Condenser
        Explicit families are solved against their full constraint set;
        condensers run shortest-path constraint generation.
    p : float
        Exponent, at least 1.  The p = 1 subproblem is an exact linear
        program; p > 1 uses a projected Newton method on the dual, whose
        duality gap is reported as the certificate.
    support : iterable of node ids, optional
        When given, the density is forced to zero off this set and the
        objective runs over it only.
    value_rtol : float, optional
        Generated solves also terminate once the dual lower bound and
        the scaled-density upper bound agree to this relative gap; the
        returned density is then rescaled to be globally admissible, so
        the admissibility certificate holds as usual.

    Returns
    -------
    ModulusResult
    """

    if p < 1.0:
        raise ValueError("p must be at least 1")
    mask = _support_mask(space, support)

    if isinstance(family, ExplicitPaths):
        if not family.paths:
            return _infinite_result(space, p, "empty family")
        idx_paths = [_index_path(space, path) for path in family.paths]
        rows = [_path_row(space, path, mask) for path in idx_paths]
        if all(len(cols) == 0 for cols, _ in rows):
            raise FamilyError("no support node lies on any family path")
        if any(len(cols) == 0 for cols, _ in rows):
            return _infinite_result(space, p, "a family path avoids the support")
        rho, lam, cert, row_values, _ = _solve_active_set(
            space, rows, p, np.zeros(0)
        )
        shortest = float(np.min(row_values))
        return _finalize(space, rho, idx_paths, cert, p, 1, shortest, True)

    if isinstance(family, Condenser):
        sources = np.array([space.index(v) for v in family.source])
        target_mask = np.zeros(space.node_count, dtype=bool)
        for v in family.target:
            target_mask[space.index(v)] = True
        return _solve_generated(space, sources, target_mask, p, mask, value_rtol)

    raise FamilyError(f"unsupported family {type(family).__name__}")


def _solve_generated(space, sources, target_mask, p, mask, value_rtol):
    target_mask = _plate_boundary(space, target_mask)
    seed = np.zeros(space.node_count)
    scale = 1.0 / max(space.approx_diameter(), 1.0)
    if mask is None:
        seed[:] = scale
    else:
        seed[mask] = scale
    best, pending = _shortest_paths(space, seed, sources, target_mask, math.inf)
    if math.isinf(best):
        return _infinite_result(space, p, "no connecting path")

    rows: list = []
    idx_paths: list = []
    in_work: set = set()
    stale = np.zeros(0, dtype=int)
    lam = np.zeros(0)
    rho = seed
    cert: object = math.inf
    generated: set = set()
    converged = False
    shortest = best
    iterations = 0
    prev_goal = math.inf
    best_lower = 0.0
    while iterations < CONSTRAINT_CAP and len(generated) < CONSTRAINT_CAP:
        iterations += 1
        added = 0
        for path in pending:
            key = tuple(path)
            if key in in_work:
                # A loosely solved working set can leave its own rows
                # slightly violated; they need a tighter solve, not a
                # duplicate row.
                continue
            row = _path_row(space, path, mask)
            if len(row[0]) == 0:
                return _infinite_result(
                    space, p, "a connecting path avoids the support"
                )
            idx_paths.append(path)
            rows.append(row)
            in_work.add(key)
            generated.add(key)
            added += 1
        stale = np.concatenate([stale, np.zeros(added, dtype=int)])
        # Intermediate solves chase a dual target proportional to the
        # current infeasibility; only the certifying solve pays for the
        # full KKT tolerance.
        if added:
            infeasibility = max(1.0 - shortest, ADMISSIBILITY_TOL)
            kkt_goal = max(KKT_TOL, min(_LOOSE_KKT, 0.01 * infeasibility))
            max_steps = _LOOSE_NEWTON
        else:
            kkt_goal = KKT_TOL
            max_steps = _MAX_NEWTON
        rho, lam, cert, row_values, lower = _solve_active_set(
            space, rows, p, lam, kkt_goal, max_steps
        )
        # Any dual-feasible multiplier bounds the working-set problem
        # from below, and dropping constraints only lowers the optimum,
        # so the bound holds for the full family as well.
        best_lower = max(best_lower, lower)
        slack = row_values - 1.0
        droppable = (lam <= 0.0) & (slack > _DROP_SLACK)
        stale = np.where(droppable, stale + 1, 0)
        keep = stale < _DROP_AGE
        if not np.all(keep):
            keep_idx = np.flatnonzero(keep)
            rows = [rows[i] for i in keep_idx]
            idx_paths = [idx_paths[i] for i in keep_idx]
            lam = lam[keep_idx]
            stale = stale[keep_idx]
            in_work = set(map(tuple, idx_paths))
        shortest, pending = _generate_cuts(
            space, rho, sources, target_mask, 1.0 - ADMISSIBILITY_TOL
        )
        if shortest >= 1.0 - ADMISSIBILITY_TOL:
            if kkt_goal <= KKT_TOL:
                converged = True
                break
            # Admissible under a loose solve: re-solve tight on the same
            # working set and re-certify before accepting.
            pending = []
            continue
        if shortest > 0.0 and best_lower > 0.0:
            # Rescaling by the shortest length makes the density
            # admissible outright, so the energy of the rescaled density
            # brackets the modulus against the dual bound.
            upper = float(np.dot(space.mass, rho**p)) / shortest**p
            if upper <= best_lower * (1.0 + value_rtol):
                rho = rho / shortest
                shortest, _ = _shortest_paths(
                    space, rho, sources, target_mask, 0.0
                )
                cert = max(upper - best_lower, 0.0)
                converged = shortest >= 1.0 - ADMISSIBILITY_TOL
                break
        if not pending:
            break
        if added == 0 and kkt_goal <= KKT_TOL and prev_goal <= KKT_TOL:
            # Two consecutive tight solves produced nothing new to add
            # while violations persist: the subproblem is stalled.
            break
        prev_goal = kkt_goal
    return _finalize(space, rho, idx_paths, cert, p, iterations, shortest, converged)


# -- condenser schedules ----------------------------------------------------


@dataclass(frozen=True)
class CondenserSweep:
    """Condenser moduli over a radius schedule with the product check.

    ``products`` holds value * (truncated growth sum)^(p-1) for p > 1,
    where the truncation keeps the annuli contained in B(O, R), and
    value * (stored-prefix sup) for p = 1.
    """

    p: float
    radii: tuple
    results: tuple
    truncated_growth: tuple
    products: tuple


def condenser_sequence(
    space: SpaceGraph,
    p: float,
    radii: Iterable[float],
    value_rtol: float = 1e-6,
) -> CondenserSweep:
    """Moduli of the condensers (closed B(O,1), complement of B(O,R)).

    Radii must be increasing and lie within the graph; the values are
    non-increasing in R because an admissible density for a nearer
    target stays admissible when the target recedes.  ``value_rtol``
    is handed to each solve, see :func:`modulus`.
    """

    rs = tuple(float(r) for r in radii)
    if not rs or any(b <= a for a, b in zip(rs, rs[1:])):
        raise ValueError("radii must be strictly increasing and non-empty")
    d0 = space.base_distances()
    if rs[-1] > float(np.max(d0[np.isfinite(d0)])):
        raise ValueError(f"radius {rs[-1]} exceeds the graph eccentricity")
    inner = [int(space.ids[i]) for i in np.flatnonzero(d0 <= 1.0 + 1e-12)]
    profile = profile_from_graph(space)
    growth_full = script_R(profile, p)
    results = []
    growths = []
    products = []
    for r in rs:
        outer = [int(space.ids[i]) for i in np.flatnonzero(d0 >= r - 1e-12)]
        res = modulus(space, Condenser(inner, outer), p, value_rtol=value_rtol)
        results.append(res)
        if p > 1.0:
            j_top = int(math.floor(math.log2(r))) - 1
            j_top = min(j_top, profile.j_min + len(profile.masses) - 1)
            growth = 0.0 if j_top < profile.j_min else growth_full.truncated(j_top)
        else:
            growth = growth_full.partial[-1]
        growths.append(growth)
        if math.isinf(res.value) or math.isinf(growth):
            products.append(math.inf)
        elif p > 1.0:
            products.append(res.value * growth ** (p - 1.0))
        else:
            products.append(res.value * growth)
    return CondenserSweep(
        p=p,
        radii=rs,
        results=tuple(results),
        truncated_growth=tuple(growths),
        products=tuple(products),
    )


def overflow_bound(
    space: SpaceGraph,
    family,
    region: Iterable[int],
    min_length: float,
    p: float,
) -> float:
    """Admissibility upper bound mu(region) / min_length^p.

    The hypothesis that every family path spends length at least
    ``min_length`` inside ``region`` is verified first: per path for
    explicit families, by a shortest crossing search for condensers.
    The scaled region indicator is then admissible for the family, and
    its p-energy is the returned bound.

    Raises
    ------
    OverflowHypothesisError
        If some path crosses the region too quickly; the offending
        path is attached as a witness.
    """

    if min_length <= 0:
        raise ValueError("min_length must be positive")
    idx = sorted({space.index(v) for v in region})
    chi = np.zeros(space.node_count)
    chi[idx] = 1.0

    if isinstance(family, ExplicitPaths):
        for path in family.paths:
            inside = _row_value(_path_row(space, _index_path(space, path)), chi)
            if inside < min_length - 1e-12:
                raise OverflowHypothesisError(
                    f"path spends only {inside:.6g} < {min_length:.6g} "
                    "in the region",
                    path,
                    inside,
                )
    elif isinstance(family, Condenser):
        sources = np.array([space.index(v) for v in family.source])
        target_mask = np.zeros(space.node_count, dtype=bool)
        for v in family.target:
            target_mask[space.index(v)] = True
        target_mask = _plate_boundary(space, target_mask)
        _, paths = _shortest_paths(space, chi, sources, target_mask, math.inf)
        if paths:
            ids = [int(space.ids[i]) for i in paths[0]]
            inside = _row_value(_path_row(space, paths[0]), chi)
            if inside < min_length - 1e-12:
                raise OverflowHypothesisError(
                    f"a connecting path spends only {inside:.6g} "
                    f"< {min_length:.6g} in the region",
                    ids,
                    inside,
                )
    else:
        raise FamilyError(f"unsupported family {type(family).__name__}")

    mass = float(np.sum(space.mass[idx]))
    return mass / min_length**p

"""Weak polar coordinate systems and numeric checks of their inequality.

A weak polar coordinate system at a point ``O`` is a measured family of
radial curves together with a coordinate weight ``h`` and a constant
``C`` such that curve-wise integration of ``f * h`` against the
direction measure is dominated by ``C`` times the volume integral of
``f``.  This module represents such systems as finite samples (a
direction list with probability weights, one arc-length-sampled curve
per direction, and ``h`` stored along each curve), verifies the
defining inequality and the kernel inequality of Semmes-type families
on test functions, and truncates the curves outside the unit ball for
use as a modulus family.

Four families are built in: exact spherical coordinates on the plane
and in 3-space, geodesic rays on a regular tree, the vertical-projection
system on the Cantor diamond region, and the three strip-and-wedge
systems that share one planar region.  The spherical system is an
identity (ratio 1 up to quadrature); the others are genuinely one-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .graph_space import SpaceGraph
from .model_spaces import sphere_area
from .modulus import ExplicitPaths
from .quadrature import adaptive_simpson

# Direction weights must form a probability measure to this tolerance.
WEIGHT_SUM_TOL = 1e-12

# Allowed mismatch between consecutive stored arc positions and the
# declared step, and slack for chord-length sanity checks.
SPACING_TOL = 1e-9

# Default verification tolerance: identity systems are quadrature
# limited at roughly this level under default sampling.
DEFAULT_TOL = 0.02

# Points within this distance of the unit sphere count as "on" it when
# truncating curves, so exact boundary hits are kept.
_BALL_EDGE_TOL = 1e-9


class PolarViolationError(ValueError):
    """The defining inequality failed outright (positive LHS, zero RHS)."""


def _as_point_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("each curve needs at least two points of equal dimension")
    return arr


@dataclass(frozen=True)
class PolarSystem:
    """A sampled weak polar coordinate system.

    ``curves[i]`` holds the points of the radial curve for direction
    ``directions[i]``, sampled at consecutive arc-length multiples of
    ``step`` starting from the coordinate point, and ``h_samples[i]``
    the coordinate weight at those points.  ``radii`` gives each
    point's distance to the coordinate point; when omitted it defaults
    to the Euclidean distance from the curve's first point, which is
    exact for the planar built-ins and overridden by the tree system
    (whose points are not an isometric embedding).

    ``identity`` marks systems whose inequality is an equality, and
    ``semmes_constant`` optionally declares the constant of the
    Semmes-type kernel inequality when it differs from ``C``.
    """

    directions: tuple
    weights: np.ndarray
    curves: tuple
    h_samples: tuple
    step: float
    C: float
    radii: tuple | None = None
    identity: bool = False
    semmes_constant: float | None = None
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        n = len(self.directions)
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (n,):
            raise ValueError("one weight per direction required")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("direction weights must be a probability vector")
        object.__setattr__(self, "weights", weights)
        if self.step <= 0 or not math.isfinite(self.step):
            raise ValueError("step must be positive")
        if self.C <= 0 or not math.isfinite(self.C):
            raise ValueError("the system constant must be positive")
        curves = tuple(_as_point_array(c) for c in self.curves)
        if len(curves) != n:
            raise ValueError("one curve per direction required")
        hs = tuple(np.asarray(h, dtype=float) for h in self.h_samples)
        if len(hs) != n:
            raise ValueError("one weight sample array per curve required")
        if self.radii is None:
            radii = tuple(
                np.linalg.norm(c - c[0], axis=1) for c in curves
            )
        else:
            radii = tuple(np.asarray(r, dtype=float) for r in self.radii)
            if len(radii) != n:
                raise ValueError("one radius array per curve required")
        for pts, h, r in zip(curves, hs, radii):
            if h.shape != (len(pts),) or r.shape != (len(pts),):
                raise ValueError("h and radius samples must match curve length")
            if np.any(h < 0) or not np.all(np.isfinite(h)):
                raise ValueError("h must be nonnegative and finite")
            if r[0] > SPACING_TOL:
                raise ValueError("curves must start at the coordinate point")
            chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            if np.any(chords > self.step * (1.0 + 1e-9) + SPACING_TOL):
                raise ValueError(
                    "consecutive points are farther apart than the declared step"
                )
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "h_samples", hs)
        object.__setattr__(self, "radii", radii)

    @property
    def direction_count(self) -> int:
        return len(self.directions)


def _eval_along(f, points: np.ndarray) -> np.ndarray:
    """Evaluate a test function at every stored point of one curve.

    Row-wise vectorized callables are used directly; plain scalar
    callables are detected by the result shape (or by the ambiguity
    errors numpy raises on array branching) and evaluated point by
    point.
    """

    try:
        vals = np.asarray(f(points), dtype=float)
        if vals.shape == (len(points),):
            return vals
    except (TypeError, ValueError, IndexError):
        pass
    return np.array([float(f(p)) for p in points])


def _curve_integrals(system: PolarSystem, f, use_h: bool) -> np.ndarray:
    out = np.empty(system.direction_count)
    for i, pts in enumerate(system.curves):
        vals = _eval_along(f, pts)
        if use_h:
            vals = vals * system.h_samples[i]
        out[i] = np.trapezoid(vals, dx=system.step)
    return out


def polar_lhs(system: PolarSystem, f) -> float:
    """Left side of the polar inequality for a nonnegative integrand.

    Computes the direction-weighted sum of trapezoidal line integrals
    of ``f * h`` along the stored curves; the summation runs in
    direction order so repeated calls are bit-identical.
    """

    per_direction = _curve_integrals(system, f, use_h=True)
    return float(np.sum(system.weights * per_direction))


@dataclass(frozen=True)
class PolarReport:
    """Per-function ratios of a polar (or Semmes) verification run.

    ``ratios[i]`` is LHS / (C * RHS) for the i-th test function;
    ``quadrature_error`` is the largest relative shift observed when
    the line integrals are re-evaluated at double step, an a-posteriori
    bound on the discretization component of the ratios.  ``skipped``
    lists (index, reason) pairs for functions that could not be scored.
    """

    system: str
    C: float
    ratios: tuple
    lhs: tuple
    rhs: tuple
    passed: bool
    identity: bool
    quadrature_error: float
    tol: float
    skipped: tuple = ()


def verify_polar(
    system: PolarSystem,
    test_functions: Sequence,
    volume_integrator: Callable,
    tol: float = DEFAULT_TOL,
) -> PolarReport:
    """Check LHS <= C * RHS on each test function.

    Parameters
    ----------
    system : PolarSystem
    test_functions : sequence of callables
        Nonnegative integrands, point -> value (row-vectorized callables
        are accepted too).
    volume_integrator : callable
        Independent evaluator of the volume integral of a test function.
    tol : float
        Pass threshold: all ratios must stay below ``1 + tol``; identity
        systems must additionally keep every ratio within ``tol`` of 1.

    Raises
    ------
    PolarViolationError
        When some test function has zero volume integral but a positive
        left side, which no constant can repair.
    """

    ratios = []
    lhs_list = []
    rhs_list = []
    quad_err = 0.0
    for f in test_functions:
        fine = np.empty(system.direction_count)
        coarse = np.empty(system.direction_count)
        for i, pts in enumerate(system.curves):
            vals = _eval_along(f, pts) * system.h_samples[i]
            fine[i] = np.trapezoid(vals, dx=system.step)
            coarse[i] = np.trapezoid(vals[::2], dx=2.0 * system.step)
        lhs = float(np.sum(system.weights * fine))
        lhs2 = float(np.sum(system.weights * coarse))
        rhs = float(volume_integrator(f))
        if rhs < 0 or not math.isfinite(rhs):
            raise ValueError("volume integral must be finite and nonnegative")
        if rhs == 0.0:
            if lhs > 0.0:
                raise PolarViolationError(
                    "positive curve integral against a null volume integral"
                )
            ratio = 0.0
        else:
            ratio = lhs / (system.C * rhs)
            quad_err = max(quad_err, abs(lhs - lhs2) / (system.C * rhs))
        ratios.append(ratio)
        lhs_list.append(lhs)
        rhs_list.append(rhs)
    passed = all(r <= 1.0 + tol for r in ratios)
    if system.identity:
        passed = passed and all(abs(r - 1.0) <= tol for r in ratios)
    return PolarReport(
        system=system.name,
        C=system.C,
        ratios=tuple(ratios),
        lhs=tuple(lhs_list),
        rhs=tuple(rhs_list),
        passed=passed,
        identity=system.identity,
        quadrature_error=quad_err,
        tol=tol,
    )


def semmes_check(
    system: PolarSystem,
    kernel: Callable,
    test_functions: Sequence,
    volume_integrator: Callable,
    C: float | None = None,
    tol: float = DEFAULT_TOL,
) -> PolarReport:
    """Check the Semmes-type kernel inequality on test functions.

    The left side drops the coordinate weight (plain arc-length
    integration); the right side integrates ``f`` against the kernel
    ``d(x, O) / mu(B(O, d(x, O)))`` supplied by the caller.  The
    constant defaults to the system's declared Semmes constant and
    falls back to ``C``.  Functions whose kernel integral diverges or
    vanishes together with the left side are skipped and reported.
    """

    const = C if C is not None else (
        system.semmes_constant if system.semmes_constant is not None else system.C
    )
    ratios = []
    lhs_list = []
    rhs_list = []
    skipped = []
    for idx, f in enumerate(test_functions):
        lhs = float(np.sum(system.weights * _curve_integrals(system, f, use_h=False)))
        rhs = float(volume_integrator(lambda p, f=f: f(p) * kernel(p)))
        if not math.isfinite(rhs):
            skipped.append((idx, "kernel integral diverges"))
            ratios.append(math.nan)
            lhs_list.append(lhs)
            rhs_list.append(rhs)
            continue
        if rhs == 0.0:
            if lhs > 0.0:
                raise PolarViolationError(
                    "positive curve integral against a null kernel integral"
                )
            skipped.append((idx, "zero mass on both sides"))
            ratios.append(math.nan)
            lhs_list.append(lhs)
            rhs_list.append(rhs)
            continue
        ratios.append(lhs / (const * rhs))
        lhs_list.append(lhs)
        rhs_list.append(rhs)
    scored = [r for r in ratios if not math.isnan(r)]
    return PolarReport(
        system=system.name,
        C=const,
        ratios=tuple(ratios),
        lhs=tuple(lhs_list),
        rhs=tuple(rhs_list),
        passed=all(r <= 1.0 + tol for r in scored),
        identity=False,
        quadrature_error=0.0,
        tol=tol,
        skipped=tuple(skipped),
    )


# -- truncation outside the unit ball ---------------------------------------


@dataclass(frozen=True)
class ExclusionWitness:
    """Why a direction was dropped during truncation."""

    direction: object
    reason: str
    point: tuple
    arc: float


@dataclass(frozen=True)
class TruncatedFamily:
    """Curves re-parameterized from their last exit out of B(O, 1).

    ``exit_arcs`` records the interpolated arc length at which each kept
    curve finally crosses the unit sphere; ``curves`` stores the points
    from the first sample at or beyond the sphere, none of which lie in
    the open unit ball.  ``excluded`` carries the witnesses of dropped
    directions: curves that never leave the ball within their stored
    range, or return into it after first exiting.
    """

    directions: tuple
    curves: tuple
    exit_arcs: tuple
    step: float
    excluded: tuple

    def to_explicit_paths(self, space: SpaceGraph) -> ExplicitPaths:
        """Snap the truncated curves onto a graph as explicit paths.

        Each stored point maps to its nearest node of ``space`` (which
        must carry coordinates of matching dimension); consecutive
        duplicates collapse, and non-adjacent consecutive nodes are
        bridged along graph shortest paths so every returned sequence
        is a genuine edge path.
        """

        if space.coords is None:
            raise ValueError("the graph carries no coordinate embedding")
        coords = np.asarray(space.coords, dtype=float)
        tree = cKDTree(coords)
        paths = []
        for pts in self.curves:
            if pts.shape[1] != coords.shape[1]:
                raise ValueError("curve and graph dimensions differ")
            _, nearest = tree.query(pts)
            nodes = [int(nearest[0])]
            for idx in nearest[1:]:
                if int(idx) != nodes[-1]:
                    nodes.append(int(idx))
            if len(nodes) < 2:
                continue
            full = [nodes[0]]
            for a, b in zip(nodes, nodes[1:]):
                full.extend(_bridge(space, a, b)[1:])
            paths.append([int(space.ids[i]) for i in full])
        return ExplicitPaths(paths)


def _bridge(space: SpaceGraph, a: int, b: int) -> list:
    key = (min(a, b), max(a, b))
    if key in space._edge_len:
        return [a, b]
    _, pred = dijkstra(
        space.adjacency(), directed=False, indices=a, return_predecessors=True
    )
    if pred[b] < 0:
        raise ValueError("snapped curve nodes fall in different components")
    chain = [b]
    while chain[-1] != a:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    return chain


def hat_truncate(
    system: PolarSystem, directions: Iterable[int] | None = None
) -> TruncatedFamily:
    """Truncate radial curves at their last exit from the unit ball.

    Parameters
    ----------
    system : PolarSystem
    directions : iterable of direction indices, optional
        Subset to truncate; all directions by default.

    Returns
    -------
    TruncatedFamily
        Kept curves never re-visit the open unit ball on any stored
        point.  Directions whose curve stays inside the ball, or leaves
        and later returns (the oscillating case), are excluded with a
        witness instead of being truncated.
    """

    picks = range(system.direction_count) if directions is None else directions
    kept = []
    curves = []
    exits = []
    excluded = []
    for i in picks:
        pts = system.curves[i]
        r = system.radii[i]
        outside = np.flatnonzero(r > 1.0 + _BALL_EDGE_TOL)
        label = system.directions[i]
        if outside.size == 0:
            excluded.append(
                ExclusionWitness(
                    direction=label,
                    reason="never leaves the unit ball",
                    point=tuple(pts[-1]),
                    arc=(len(pts) - 1) * system.step,
                )
            )
            continue
        first_out = int(outside[0])
        returns = np.flatnonzero(r[first_out:] < 1.0 - _BALL_EDGE_TOL)
        if returns.size:
            j = first_out + int(returns[0])
            excluded.append(
                ExclusionWitness(
                    direction=label,
                    reason="re-enters the unit ball after exiting",
                    point=tuple(pts[j]),
                    arc=j * system.step,
                )
            )
            continue
        inside = np.flatnonzero(r < 1.0 - _BALL_EDGE_TOL)
        start = int(inside[-1]) + 1 if inside.size else 0
        r0, r1 = r[start - 1] if start else 0.0, r[start]
        frac = (1.0 - r0) / (r1 - r0) if r1 > r0 else 0.0
        exits.append(system.step * (start - 1 + frac) if start else 0.0)
        kept.append(label)
        curves.append(pts[start:])
    return TruncatedFamily(
        directions=tuple(kept),
        curves=tuple(curves),
        exit_arcs=tuple(exits),
        step=system.step,
        excluded=tuple(excluded),
    )


# -- built-in systems --------------------------------------------------------


def _ray_points(direction: np.ndarray, count: int, step: float) -> np.ndarray:
    return np.outer(np.arange(count) * step, direction)


def euclidean_spherical(
    n: int = 2,
    directions: int = 256,
    extent: float = 8.0,
    step: float = 1.0 / 64.0,
) -> PolarSystem:
    """Exact spherical coordinates on the plane or in 3-space.

    Straight rays from the origin under the normalized sphere measure,
    with ``h = area(S^{n-1}) * r^(n-1)`` and constant 1; the polar
    inequality is an identity.  Directions are uniform angles for
    ``n = 2`` and a Fibonacci sphere for ``n = 3``; higher dimensions
    have no uniform deterministic sample here and are rejected.
    """

    if n == 2:
        angles = 2.0 * math.pi * np.arange(directions) / directions
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    elif n == 3:
        k = np.arange(directions)
        z = 1.0 - (2.0 * k + 1.0) / directions
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        dirs = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    else:
        raise ValueError("direction sampling is implemented for n = 2 and n = 3")
    count = int(math.floor(extent / step)) + 1
    area = sphere_area(n)
    rs = np.arange(count) * step
    h = area * rs ** (n - 1)
    curves = [_ray_points(d, count, step) for d in dirs]
    return PolarSystem(
        directions=tuple(map(tuple, dirs)),
        weights=np.full(directions, 1.0 / directions),
        curves=curves,
        h_samples=[h.copy() for _ in range(directions)],
        step=step,
        C=1.0,
        identity=True,
        semmes_constant=1.0 / n,
        name=f"spherical-{n}d",
    )


def spherical_volume(n: int, radial_f: Callable[[float], float],
                     extent: float) -> float:
    """Volume integral of a radial function, by 1-D quadrature."""

    area = sphere_area(n)
    return area * adaptive_simpson(
        lambda r: radial_f(r) * r ** (n - 1), 0.0, extent
    )


def tree_polar(
    k: int = 2,
    depth: int = 6,
    mu_ratio: float = 1.0,
    lambda_ratio: float = 1.0,
    step: float = 0.125,
) -> PolarSystem:
    """Geodesic-ray coordinates on a regular tree with radial weights.

    The tree has ``k`` children per vertex; the generation-``m`` edges
    carry length ``lambda_ratio**(m-1)``, mass ``mu_ratio**(m-1)``
    spread uniformly along each edge, and coordinate weight
    ``k**m * mass / length`` there.  One curve per boundary ray (all
    ``k**depth`` of them, each of weight ``k**-depth``), stored as
    ``(distance from root, ray index)`` pairs; radii are the distances
    themselves.  For integrands constant on each generation the polar
    inequality is an identity up to the step smearing at generation
    boundaries.
    """

    if k < 2 or depth < 1:
        raise ValueError("need at least two children and one generation")
    rays = k**depth
    if rays > 8192:
        raise ValueError("too many boundary rays; lower k or depth")
    lengths = np.array([lambda_ratio ** (m - 1) for m in range(1, depth + 1)])
    masses = np.array([mu_ratio ** (m - 1) for m in range(1, depth + 1)])
    bounds = np.concatenate([[0.0], np.cumsum(lengths)])
    total = float(bounds[-1])
    count = int(math.floor(total / step)) + 1
    ts = np.arange(count) * step
    gen = np.clip(np.searchsorted(bounds[1:-1], ts, side="left"), 0, depth - 1)
    h = (float(k) ** (gen + 1)) * masses[gen] / lengths[gen]
    # Samples landing exactly on a generation boundary take the mean of
    # the one-sided values; the trapezoid rule then integrates the jump
    # exactly instead of losing half a step per generation.
    for m in range(1, depth):
        at = np.flatnonzero(np.abs(ts - bounds[m]) <= 1e-12 * max(1.0, bounds[m]))
        if at.size:
            left = float(k) ** m * masses[m - 1] / lengths[m - 1]
            right = float(k) ** (m + 1) * masses[m] / lengths[m]
            h[at] = 0.5 * (left + right)
    curves = []
    for ray in range(rays):
        pts = np.column_stack([ts, np.full(count, float(ray))])
        curves.append(pts)
    radii = [ts.copy() for _ in range(rays)]
    return PolarSystem(
        directions=tuple(range(rays)),
        weights=np.full(rays, 1.0 / rays),
        curves=curves,
        h_samples=[h.copy() for _ in range(rays)],
        step=step,
        C=1.0,
        radii=radii,
        name=f"tree-{k}-{depth}",
    )


def tree_volume(system_k: int, depth: int, mu_ratio: float,
                lambda_ratio: float, radial_f: Callable[[float], float],
                samples_per_edge: int = 64) -> float:
    """Tree volume integral of a distance-radial integrand.

    Sums ``k**m * mass_m *`` (edge average of ``f``) over generations,
    with midpoint averages along each edge.
    """

    total = 0.0
    t0 = 0.0
    for m in range(1, depth + 1):
        length = lambda_ratio ** (m - 1)
        mass = mu_ratio ** (m - 1)
        offs = (np.arange(samples_per_edge) + 0.5) / samples_per_edge * length
        avg = float(np.mean([radial_f(t0 + o) for o in offs]))
        total += system_k**m * mass * avg
        t0 += length
    return total


# -- the Cantor diamond ------------------------------------------------------


def _cantor_cells(depth: int) -> list:
    """Removed middle-third intervals of the unit cell, sorted."""

    removed = []
    keep = [(0.0, 1.0)]
    for _ in range(depth):
        nxt = []
        for a, b in keep:
            third = (b - a) / 3.0
            removed.append((a + third, b - third))
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        keep = nxt
    return sorted(removed)


def _diamond_segments(depth: int, extent: int) -> list:
    """Polyline pieces (x0, x1, d0, d1) of the distance profile.

    ``d`` is the distance to the depth-limited Cantor set, linear on
    each piece: zero on the surviving intervals, a tent of slope one
    over each removed interval.  The pattern repeats on every unit
    cell.
    """

    gaps = _cantor_cells(depth)
    segments = []
    for cell in range(extent):
        x = float(cell)
        for a, b in gaps:
            if x < cell + a:
                segments.append((x, cell + a, 0.0, 0.0))
            mid = cell + (a + b) / 2.0
            half = (b - a) / 2.0
            segments.append((cell + a, mid, 0.0, half))
            segments.append((mid, cell + b, half, 0.0))
            x = cell + b
        if x < cell + 1.0:
            segments.append((x, cell + 1.0, 0.0, 0.0))
    return segments


def _sample_diamond_curve(segments, c: float, step: float):
    """Arc-length sampling of x -> (x, c * delta(x)) over the segments."""

    xs0 = np.array([s[0] for s in segments])
    xs1 = np.array([s[1] for s in segments])
    d0 = np.array([s[2] for s in segments])
    d1 = np.array([s[3] for s in segments])
    slope = np.where(xs1 > xs0, (d1 - d0) / (xs1 - xs0), 0.0)
    speed = np.sqrt(1.0 + (c * slope) ** 2)
    seg_arc = (xs1 - xs0) * speed
    cum = np.concatenate([[0.0], np.cumsum(seg_arc)])
    total = float(cum[-1])
    count = int(math.floor(total / step)) + 1
    s = np.arange(count) * step
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(segments) - 1)
    x = xs0[idx] + (s - cum[idx]) / speed[idx]
    delta = d0[idx] + slope[idx] * (x - xs0[idx])
    pts = np.column_stack([x, c * delta])
    return pts, delta


def cantor_diamond(
    depth: int = 4,
    directions: int = 64,
    extent: int = 4,
    step: float = 1.0 / 128.0,
) -> PolarSystem:
    """The vertical-projection system on the depth-limited diamond row.

    The region is the union of squares erected over the removed
    middle-third intervals of Cantor sets on consecutive unit cells.
    Curves are images of horizontal lines under
    ``F(x, y) = (x, delta(x) tan(pi y / 4))``, sampled at uniform
    ``y``; the weight is the Jacobian ``pi delta / (4 cos^2(pi y/4))``
    pushed to the curve, the direction measure is uniform on
    ``[-1, 1]`` halved, and the constant 2 comes from the Lipschitz
    bound on the curves.
    """

    if depth < 1 or extent < 1:
        raise ValueError("depth and extent must be at least 1")
    segments = _diamond_segments(depth, extent)
    ys = -1.0 + (2.0 * np.arange(directions) + 1.0) / directions
    curves = []
    hs = []
    for y in ys:
        c = math.tan(math.pi * y / 4.0)
        pts, delta = _sample_diamond_curve(segments, c, step)
        jac = math.pi * delta / (4.0 * math.cos(math.pi * y / 4.0) ** 2)
        curves.append(pts)
        hs.append(jac)
    return PolarSystem(
        directions=tuple(float(y) for y in ys),
        weights=np.full(directions, 1.0 / directions),
        curves=curves,
        h_samples=hs,
        step=step,
        C=2.0,
        name=f"cantor-diamond-{depth}",
    )


def cantor_volume(depth: int, extent: int, f, ny: int = 64,
                  nx: int = 16) -> float:
    """Area integral over the diamond region by pull-back quadrature.

    Uses the change of variables through ``F`` on ``[0, extent] x
    [-1, 1]`` with midpoint rules: ``nx`` samples per polyline piece in
    ``x`` and ``ny`` lines in ``y``.
    """

    segments = _diamond_segments(depth, extent)
    ys = -1.0 + (2.0 * np.arange(ny) + 1.0) / ny
    total = 0.0
    for y in ys:
        c = math.tan(math.pi * y / 4.0)
        sec2 = 1.0 / math.cos(math.pi * y / 4.0) ** 2
        for x0, x1, dd0, dd1 in segments:
            if dd0 == 0.0 and dd1 == 0.0:
                continue
            xs = x0 + (np.arange(nx) + 0.5) / nx * (x1 - x0)
            deltas = dd0 + (dd1 - dd0) * (xs - x0) / (x1 - x0)
            pts = np.column_stack([xs, c * deltas])
            vals = _eval_along(f, pts)
            jac = math.pi * deltas / 4.0 * sec2
            total += float(np.sum(vals * jac)) * (x1 - x0) / nx
    return total * 2.0 / ny


# -- the strip-and-wedge region ----------------------------------------------


def in_wedge_region(pts: np.ndarray) -> np.ndarray:
    """Membership in the strip-plus-wedge region, row-wise."""

    x1, x2 = pts[:, 0], pts[:, 1]
    return (np.abs(x2) <= 1.0) | (np.abs(x2) <= x1)


def _strip_curve(xi: float, extent: float, step: float):
    speed = math.sqrt(1.0 + xi * xi)
    corner = speed
    total = corner + extent
    count = int(math.floor(total / step)) + 1
    s = np.arange(count) * step
    before = s <= corner
    t = np.where(before, s / speed, 0.0)
    x = np.where(before, -t, -1.0 - (s - corner))
    y = np.where(before, t * xi, xi)
    pts = np.column_stack([x, y])
    h = (pts[:, 0] < -1.0).astype(float)
    return pts, h


def _wedge_curve(xi: float, extent: float, step: float):
    count = int(math.floor(extent / step)) + 1
    s = np.arange(count) * step
    pts = np.column_stack([s * math.cos(xi), s * math.sin(xi)])
    h = np.where(pts[:, 1] >= 0.0, s, 0.0)
    return pts, h


def wedge_strip(
    variant: int,
    directions: int = 128,
    extent: float = 8.0,
    step: float = 1.0 / 64.0,
) -> PolarSystem:
    """One of the three coordinate systems on the strip-plus-wedge plane.

    The region is the horizontal strip of half-width 1 joined with the
    right-opening wedge ``|x2| <= x1``.  Variant 1 runs bent curves
    into the left strip with indicator weight beyond ``x1 = -1``;
    variant 2 runs straight rays into the wedge with weight
    ``|x| * chi(x2 >= 0)``; variant 3 is the disjoint union of the two
    with each branch keeping its own weight.  Each variant's constant
    is the reciprocal of its parameter measure, so the stored weights
    are probabilities.
    """

    if variant not in (1, 2, 3):
        raise ValueError("variant must be 1, 2, or 3")
    strip_n = directions
    wedge_n = directions
    strip_xi = -1.0 + (2.0 * np.arange(strip_n) + 1.0) / strip_n
    wedge_xi = (-math.pi / 4.0
                + (math.pi / 2.0) * (np.arange(wedge_n) + 0.5) / wedge_n)
    if variant == 1:
        labels = [("strip", float(x)) for x in strip_xi]
        built = [_strip_curve(x, extent, step) for x in strip_xi]
        weights = np.full(strip_n, 1.0 / strip_n)
        C = 0.5
    elif variant == 2:
        labels = [("wedge", float(x)) for x in wedge_xi]
        built = [_wedge_curve(x, extent, step) for x in wedge_xi]
        weights = np.full(wedge_n, 1.0 / wedge_n)
        C = 2.0 / math.pi
    else:
        span = 2.0 + math.pi / 2.0
        labels = [("strip", float(x)) for x in strip_xi]
        labels += [("wedge", float(x)) for x in wedge_xi]
        built = [_strip_curve(x, extent, step) for x in strip_xi]
        built += [_wedge_curve(x, extent, step) for x in wedge_xi]
        weights = np.concatenate([
            np.full(strip_n, 2.0 / strip_n / span),
            np.full(wedge_n, (math.pi / 2.0) / wedge_n / span),
        ])
        C = 1.0 / span
    return PolarSystem(
        directions=tuple(labels),
        weights=weights,
        curves=[pts for pts, _ in built],
        h_samples=[h for _, h in built],
        step=step,
        C=C,
        name=f"wedge-strip-{variant}",
    )


def wedge_volume(f, extent: float = 8.0, resolution: int = 512) -> float:
    """Area integral over the strip-plus-wedge region, midpoint grid."""

    xs = np.linspace(-extent, extent, resolution, endpoint=False)
    cell = 2.0 * extent / resolution
    xs = xs + cell / 2.0
    ys = xs.copy()
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    mask = in_wedge_region(pts)
    vals = _eval_along(f, pts[mask])
    return float(np.sum(vals)) * cell * cell


# -- named systems with their verification suites ----------------------------


def _radial_indicator(lo: float, hi: float):
    def f(points):
        pts = np.asarray(points, dtype=float)
        r = np.linalg.norm(pts, axis=-1)
        return ((r >= lo) & (r < hi)).astype(float)

    return f


def _gaussian(center, scale: float):
    c = np.asarray(center, dtype=float)

    def f(points):
        pts = np.asarray(points, dtype=float)
        d2 = np.sum((pts - c) ** 2, axis=-1)
        return np.exp(-d2 / (2.0 * scale * scale))

    return f


def _box(x0, x1, y_half):
    def f(points):
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        if single:
            pts = pts[None]
        hit = (pts[:, 0] >= x0) & (pts[:, 0] < x1) & (np.abs(pts[:, 1]) <= y_half)
        out = hit.astype(float)
        return float(out[0]) if single else out

    return f


def standard_suite(name: str, **overrides):
    """A named system with matched test functions and volume integrator.

    Returns ``(system, test_functions, volume_integrator)`` ready for
    :func:`verify_polar`.  Known names: ``spherical2``, ``spherical3``,
    ``tree``, ``diamond``, ``wedge1``, ``wedge2``, ``wedge3``.  Keyword
    overrides are forwarded to the system constructor.

    The spherical suites pair indicator and Gaussian integrands with
    closed-form radial volumes; the planar suites use midpoint grid
    volumes over their regions, independent of the curve-wise sums.
    """

    if name == "spherical2" or name == "spherical3":
        n = 2 if name == "spherical2" else 3
        params = {"directions": 256 if n == 2 else 128, "extent": 8.0,
                  "step": 1.0 / 64.0}
        params.update(overrides)
        system = euclidean_spherical(n, **params)
        extent = params["extent"]
        funcs = [
            _radial_indicator(0.0, 1.0),
            _gaussian(np.zeros(n), math.sqrt(0.5)),
            _radial_indicator(1.0, 2.0),
        ]
        area = sphere_area(n)
        if n == 2:
            gauss_vol = math.pi * (1.0 - math.exp(-(extent**2)))
        else:
            gauss_vol = (math.pi ** 1.5 * math.erf(extent)
                         - 2.0 * math.pi * extent * math.exp(-(extent**2)))
        volumes = {
            id(funcs[0]): area / n,
            id(funcs[1]): gauss_vol,
            id(funcs[2]): area * (2.0**n - 1.0) / n,
        }

        def integrator(f, volumes=volumes):
            return volumes[id(f)]

        return system, funcs, integrator
    if name == "tree":
        params = {"k": 2, "depth": 6, "mu_ratio": 1.0, "lambda_ratio": 1.0}
        params.update(overrides)
        system = tree_polar(**params)
        total = sum(params["lambda_ratio"] ** (m - 1)
                    for m in range(1, params["depth"] + 1))

        def constant(points):
            pts = np.asarray(points, dtype=float)
            return np.ones(len(pts)) if pts.ndim == 2 else 1.0

        def near_half(points):
            pts = np.asarray(points, dtype=float)
            t = pts[..., 0]
            return np.exp(-((t - total / 2.0) / total) ** 2)

        radials = {
            id(constant): lambda t: 1.0,
            id(near_half): lambda t: math.exp(-((t - total / 2.0) / total) ** 2),
        }

        def integrator(f, params=params, radials=radials):
            return tree_volume(params["k"], params["depth"],
                               params["mu_ratio"], params["lambda_ratio"],
                               radials[id(f)])

        return system, [constant, near_half], integrator
    if name == "diamond":
        params = {"depth": 4, "directions": 64, "extent": 4,
                  "step": 1.0 / 128.0}
        params.update(overrides)
        system = cantor_diamond(**params)

        def constant(points):
            pts = np.asarray(points, dtype=float)
            return np.ones(len(pts)) if pts.ndim == 2 else 1.0

        def left(points):
            pts = np.asarray(points, dtype=float)
            single = pts.ndim == 1
            if single:
                pts = pts[None]
            out = (pts[:, 0] < params["extent"] / 2.0).astype(float)
            return float(out[0]) if single else out

        def tall(points):
            pts = np.asarray(points, dtype=float)
            single = pts.ndim == 1
            if single:
                pts = pts[None]
            out = np.abs(pts[:, 1])
            return float(out[0]) if single else out

        def integrator(f, params=params):
            return cantor_volume(params["depth"], params["extent"], f)

        return system, [constant, left, tall], integrator
    if name in ("wedge1", "wedge2", "wedge3"):
        variant = int(name[-1])
        params = {"directions": 128, "extent": 8.0, "step": 1.0 / 64.0}
        params.update(overrides)
        system = wedge_strip(variant, **params)
        funcs = [
            _box(-2.0, 0.0, 0.5),
            _gaussian([4.0, 0.5], 0.8),
            _box(-3.0, 3.0, 1.0),
        ]

        def integrator(f, extent=params["extent"]):
            return wedge_volume(f, extent=extent)

        return system, funcs, integrator
    raise ValueError(f"unknown system name {name!r}")


# -- custom systems from JSON ------------------------------------------------


def system_from_json(doc: dict) -> PolarSystem:
    """Build a system from a parsed JSON document.

    Expected keys: ``directions`` (labels), ``weights``, ``curves``
    (lists of point lists), ``h`` (per-curve sample lists), ``step``,
    ``C``; optional ``radii``, ``identity``, ``name``.
    """

    try:
        return PolarSystem(
            directions=tuple(
                tuple(d) if isinstance(d, list) else d for d in doc["directions"]
            ),
            weights=np.asarray(doc["weights"], dtype=float),
            curves=[np.asarray(c, dtype=float) for c in doc["curves"]],
            h_samples=[np.asarray(h, dtype=float) for h in doc["h"]],
            step=float(doc["step"]),
            C=float(doc["C"]),
            radii=(
                [np.asarray(r, dtype=float) for r in doc["radii"]]
                if "radii" in doc
                else None
            ),
            identity=bool(doc.get("identity", False)),
            name=str(doc.get("name", "custom")),
        )
    except KeyError as exc:
        raise ValueError(f"polar system document lacks key {exc}") from exc


def system_to_json(system: PolarSystem) -> dict:
    """Serializable document for a system, inverse of system_from_json."""

    return {
        "directions": [
            list(d) if isinstance(d, tuple) else d for d in system.directions
        ],
        "weights": [float(w) for w in system.weights],
        "curves": [c.tolist() for c in system.curves],
        "h": [h.tolist() for h in system.h_samples],
        "radii": [r.tolist() for r in system.radii],
        "step": system.step,
        "C": system.C,
        "identity": system.identity,
        "name": system.name,
    }

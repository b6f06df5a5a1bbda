"""Divergent-function construction from a divergent growth profile.

When the dyadic growth series diverges, one can pick blocks of annuli
whose term sums grow past 2^k, spread a density over each block with
total p-energy budget S_k^(1-p), and integrate it from the base point.
The resulting function has finite energy yet exceeds every threshold
along every path that leaves all balls, which is exactly the failure of
limits at infinity on such spaces.  This module builds the blocks, the
density, and the distance function, and checks the divergence on
sampled rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .graph_space import SpaceGraph
from .growth_criteria import DIVERGENT, script_R
from .model_spaces import RadialProfile

# Relative tolerance when matching a graph's annulus masses against the
# profile a density was built from.  Discretizations cannot hit the
# continuum masses exactly.
ANNULUS_MATCH_RTOL = 0.10


class PreconditionError(ValueError):
    """The profile does not admit the construction."""


class BlockShortfallError(ValueError):
    """The stored prefix ran out before the requested block count.

    Attributes
    ----------
    achieved : int
        How many complete blocks the prefix did support.
    """

    def __init__(self, message: str, achieved: int):
        super().__init__(message)
        self.achieved = int(achieved)


class AnnulusMismatchError(ValueError):
    """Graph annulus masses disagree with the profile beyond tolerance."""


@dataclass(frozen=True)
class BlockSequence:
    """Greedy annulus blocks whose term sums pass the 2^k thresholds.

    For p > 1, block k spans annulus indices ``starts[k-1] .. starts[k]``
    inclusive, so consecutive blocks share their boundary index, and
    ``sums[k-1]`` is the block term sum, strictly above 2^k.  For p = 1,
    ``starts`` holds the selected indices i_k themselves and ``sums``
    the single terms 2^(i_k) / mass.
    """

    p: float
    starts: tuple
    sums: tuple

    def __post_init__(self):
        for k, s in enumerate(self.sums, start=1):
            if not s > 2.0**k:
                raise ValueError(f"block {k} sum {s} fails the 2^{k} threshold")

    @property
    def count(self) -> int:
        return len(self.sums)


@dataclass(frozen=True)
class BlockDensity:
    """Per-annulus constants of the block density and its energy budget.

    ``levels`` maps annulus index j to the density value on that
    annulus.  ``budget`` is the proof-side energy: the sum of the exact
    per-block contributions S_k^(1-p) for p > 1 (the annulus shared by
    two consecutive blocks carries both contributions in the density,
    which only enlarges the true integral by a bounded factor), or
    sum(2^(-i_k) * mass) for p = 1.  ``realized_energy`` integrates the
    stored density itself.
    """

    p: float
    levels: dict
    budget: float
    realized_energy: float
    blocks: BlockSequence

    def value_at(self, j: int) -> float:
        return self.levels.get(int(j), 0.0)


def _terms(profile: RadialProfile, p: float) -> list:
    out = []
    for j in profile.j_values:
        m = profile.mass(j)
        if p > 1.0:
            out.append((2.0**j) ** (p / (p - 1.0)) * m ** (1.0 / (1.0 - p)))
        else:
            out.append(2.0**j / m)
    return out


def greedy_blocks(profile: RadialProfile, p: float, count: int) -> BlockSequence:
    """Greedy minimal block sequence for a divergent profile.

    Parameters
    ----------
    profile : RadialProfile
        Must classify as divergent for this p; the construction has no
        content otherwise and the call is refused.
    p : float
    count : int
        Number of blocks to build.

    Raises
    ------
    PreconditionError
        If the growth report is not divergent.
    BlockShortfallError
        If the stored prefix supports fewer than ``count`` blocks; the
        achieved count rides along on the exception.
    """

    if count < 1:
        raise ValueError("block count must be positive")
    report = script_R(profile, p)
    if report.verdict != DIVERGENT:
        raise PreconditionError(
            f"growth functional is {report.verdict}, not divergent; "
            "no block sequence exists"
        )
    terms = _terms(profile, p)
    j_min = profile.j_min
    j_max = j_min + len(terms) - 1

    if p > 1.0:
        starts = [max(1, j_min)]
        sums = []
        if starts[0] > j_max:
            raise BlockShortfallError("prefix ends before the first block", 0)
        for k in range(1, count + 1):
            n_k = starts[-1]
            total = terms[n_k - j_min]
            n_next = n_k
            while total <= 2.0**k:
                n_next += 1
                if n_next > j_max:
                    raise BlockShortfallError(
                        f"prefix exhausted inside block {k}", k - 1
                    )
                total += terms[n_next - j_min]
            if n_next == n_k:
                # A block needs a strictly larger end index; extend by
                # one annulus so the index sequence stays increasing.
                n_next += 1
                if n_next > j_max:
                    raise BlockShortfallError(
                        f"prefix exhausted inside block {k}", k - 1
                    )
                total += terms[n_next - j_min]
            starts.append(n_next)
            sums.append(total)
        return BlockSequence(p=p, starts=tuple(starts), sums=tuple(sums))

    picks = []
    values = []
    prev = max(1, j_min) - 1
    for k in range(1, count + 1):
        i = prev + 1
        while i <= j_max and terms[i - j_min] <= 2.0**k:
            i += 1
        if i > j_max:
            raise BlockShortfallError(f"prefix exhausted at index {k}", k - 1)
        picks.append(i)
        values.append(terms[i - j_min])
        prev = i
    return BlockSequence(p=1.0, starts=tuple(picks), sums=tuple(values))


def build_density(profile: RadialProfile, blocks: BlockSequence) -> BlockDensity:
    """Per-annulus density constants and the energy budget.

    For p > 1 the annulus A_{2^i} inside block k carries
    (2^i)^(1/(p-1)) * mass^(1/(1-p)) / S_k; the block's exact energy
    contribution is then S_k^(1-p).  For p = 1 the selected annuli carry
    2^(-i_k).
    """

    p = blocks.p
    j_min = profile.j_min
    j_max = j_min + len(profile.masses) - 1
    levels: dict = {}

    if p > 1.0:
        budget = 0.0
        for k in range(blocks.count):
            lo, hi = blocks.starts[k], blocks.starts[k + 1]
            s_k = blocks.sums[k]
            for i in range(lo, hi + 1):
                if i > j_max:
                    raise ValueError("blocks do not fit the profile prefix")
                m = profile.mass(i)
                coeff = (2.0**i) ** (1.0 / (p - 1.0)) * m ** (1.0 / (1.0 - p))
                levels[i] = levels.get(i, 0.0) + coeff / s_k
            budget += s_k ** (1.0 - p)
        realized = sum(
            levels[i] ** p * profile.mass(i) for i in levels
        )
    else:
        budget = 0.0
        for i in blocks.starts:
            if i > j_max:
                raise ValueError("blocks do not fit the profile prefix")
            levels[i] = levels.get(i, 0.0) + 2.0**-i
            budget += 2.0**-i * profile.mass(i)
        realized = sum(levels[i] * profile.mass(i) for i in levels)
    return BlockDensity(
        p=p, levels=levels, budget=budget, realized_energy=realized, blocks=blocks
    )


def budget_bound(p: float, count: int | None = None) -> float:
    """Closed form of sum over k of 2^(-k(p-1)), k from 1.

    The infinite sum for p > 1 is 1/(2^(p-1) - 1); for p = 1 the
    corresponding threshold series sums to 1.  Passing ``count`` gives
    the finite truncation instead.
    """

    if p > 1.0:
        ratio = 2.0 ** -(p - 1.0)
    else:
        ratio = 0.5
    if count is None:
        return ratio / (1.0 - ratio)
    return ratio * (1.0 - ratio**count) / (1.0 - ratio)


def _graph_annulus_masses(space: SpaceGraph, indices: Iterable[int]) -> dict:
    d0 = space.base_distances()
    out = {}
    for j in indices:
        sel = (d0 >= 2.0**j) & (d0 < 2.0 ** (j + 1))
        out[j] = float(np.sum(space.mass[sel]))
    return out


def _density_on_nodes(space: SpaceGraph, density: BlockDensity) -> np.ndarray:
    d0 = space.base_distances()
    g = np.zeros(space.node_count)
    for j, value in density.levels.items():
        sel = (d0 >= 2.0**j) & (d0 < 2.0 ** (j + 1))
        g[sel] = value
    return g


def distance_function(
    space: SpaceGraph, profile: RadialProfile, density: BlockDensity
) -> np.ndarray:
    """Shortest-path integral of the block density from the base.

    The density is sampled onto nodes by their dyadic annulus, edge
    weights are the trapezoid integrals, and u is the single-source
    distance; the density is an upper gradient of u by construction.

    Raises
    ------
    AnnulusMismatchError
        If any annulus the blocks use differs from the profile mass by
        more than ANNULUS_MATCH_RTOL relatively.
    """

    used = sorted(density.levels)
    got = _graph_annulus_masses(space, used)
    for j in used:
        want = profile.mass(j)
        if abs(got[j] - want) > ANNULUS_MATCH_RTOL * want:
            raise AnnulusMismatchError(
                f"annulus {j}: graph mass {got[j]:.6g} vs profile "
                f"{want:.6g} beyond {ANNULUS_MATCH_RTOL:.0%}"
            )
    g = _density_on_nodes(space, density)
    u, v = space.edges[:, 0], space.edges[:, 1]
    w = np.maximum(space.lengths * 0.5 * (g[u] + g[v]), 1e-300)
    dist = dijkstra(
        space.adjacency(data=w), directed=False, indices=space.base, min_only=False
    )
    return np.asarray(dist)


@dataclass(frozen=True)
class RayCrossing:
    """Threshold crossings of u along one sampled ray."""

    ray: tuple
    thresholds: tuple
    radii: tuple
    complete: bool


@dataclass(frozen=True)
class DivergenceReport:
    crossings: tuple
    passed: bool


def divergence_check(
    space: SpaceGraph,
    u: np.ndarray,
    rays: Sequence[Sequence[int]],
    thresholds: Sequence[float],
) -> DivergenceReport:
    """First crossing radius of each threshold along each sampled ray.

    A ray is a node-id path leading outward from near the base; for
    each threshold M the report records the base distance of the first
    ray node where u exceeds M, or infinity when the stored ray ends
    first (flagged per ray as incomplete).
    """

    ms = tuple(float(m) for m in thresholds)
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError("thresholds must be strictly increasing")
    d0 = space.base_distances()
    rows = []
    ok = True
    for ray in rays:
        idx = [space.index(v) for v in ray]
        radii = []
        complete = True
        for m in ms:
            hit = math.inf
            for i in idx:
                if u[i] > m:
                    hit = float(d0[i])
                    break
            if math.isinf(hit):
                complete = False
            radii.append(hit)
        ok = ok and complete
        rows.append(
            RayCrossing(
                ray=tuple(int(v) for v in ray),
                thresholds=ms,
                radii=tuple(radii),
                complete=complete,
            )
        )
    return DivergenceReport(crossings=tuple(rows), passed=ok)

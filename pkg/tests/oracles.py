"""Independent oracles the test suite checks the solvers against.

Everything here is deliberately naive: full path enumeration instead of
constraint generation, dense dual ascent instead of active sets, and
closed-form series formulas instead of graph solves.  None of it shares
code with the package beyond numpy and scipy primitives, so agreement
between the two is evidence, not tautology.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog, minimize


def simple_plate_paths(
    node_count: int,
    edges: Sequence[tuple[int, int]],
    source: Iterable[int],
    target: Iterable[int],
) -> list[list[int]]:
    """Every simple path from ``source`` to ``target`` (node indices).

    Interior nodes avoid both plates: any plate-to-plate walk contains
    such a sub-path with a smaller line integral, so these paths carry
    all binding constraints of the condenser program.
    """

    src = sorted(set(source))
    dst = set(target)
    banned = set(src) | dst
    neighbours: list[list[int]] = [[] for _ in range(node_count)]
    for u, v in edges:
        neighbours[u].append(v)
        neighbours[v].append(u)
    for row in neighbours:
        row.sort()

    paths: list[list[int]] = []

    def walk(path: list[int], seen: set[int]) -> None:
        here = path[-1]
        for nxt in neighbours[here]:
            if nxt in dst:
                paths.append(path + [nxt])
            elif nxt not in seen and nxt not in banned:
                seen.add(nxt)
                walk(path + [nxt], seen)
                seen.remove(nxt)

    for s in src:
        walk([s], {s})
    return paths


def _constraint_matrix(
    node_count: int,
    edges: Sequence[tuple[int, int]],
    lengths: Sequence[float],
    paths: Sequence[Sequence[int]],
) -> np.ndarray:
    """Rows of trapezoid line-integral coefficients, one per path."""

    length_of = {}
    for (u, v), ell in zip(edges, lengths):
        length_of[(u, v)] = float(ell)
        length_of[(v, u)] = float(ell)
    rows = np.zeros((len(paths), node_count))
    for i, path in enumerate(paths):
        for u, v in zip(path[:-1], path[1:]):
            ell = length_of[(u, v)]
            rows[i, u] += 0.5 * ell
            rows[i, v] += 0.5 * ell
    return rows


def modulus_by_enumeration(
    node_masses: Sequence[float],
    edges: Sequence[tuple[int, int]],
    lengths: Sequence[float],
    paths: Sequence[Sequence[int]],
    p: float,
) -> float:
    """Solve min sum(mu * rho^p) over all enumerated path constraints.

    p = 1 goes to an LP.  p = 2 goes through the dual: with constraint
    matrix A the dual is max 1.lam - lam.A diag(1/(4 mu)) A'.lam over
    lam >= 0, a smooth box-constrained QP; the primal rho = A'.lam/(2 mu)
    is then nonnegative automatically because A is.
    """

    mu = np.asarray(node_masses, dtype=float)
    a = _constraint_matrix(len(mu), edges, lengths, paths)
    if p == 1:
        res = linprog(mu, A_ub=-a, b_ub=-np.ones(len(paths)),
                      bounds=(0, None), method="highs")
        if not res.success:
            raise RuntimeError(f"oracle LP failed: {res.message}")
        return float(res.fun)
    if p != 2:
        raise ValueError("enumeration oracle supports p in {1, 2} only")

    g = a @ (a / (2.0 * mu)).T

    def negdual(lam: np.ndarray) -> tuple[float, np.ndarray]:
        # dual objective: 1.lam - 1/2 lam.G.lam with G = A (1/(2mu)) A'
        glam = g @ lam
        return -(lam.sum() - 0.5 * lam @ glam), -(np.ones_like(lam) - glam)

    lam0 = np.full(len(paths), 1.0 / max(1, len(paths)))
    res = minimize(negdual, lam0, jac=True, method="L-BFGS-B",
                   bounds=[(0.0, None)] * len(paths),
                   options={"maxiter": 20000, "ftol": 1e-16, "gtol": 1e-12})
    rho = (a.T @ res.x) / (2.0 * mu)
    # polish: rescale to exact admissibility, then report the primal
    shortest = float((a @ rho).min())
    if shortest <= 0:
        raise RuntimeError("oracle dual produced a zero density")
    rho = rho / shortest
    return float(np.sum(mu * rho * rho))


def single_constraint_value(
    coefficients: Sequence[float],
    node_masses: Sequence[float],
    p: float,
) -> float:
    """Exact optimum of min sum(mu rho^p) s.t. sum(a rho) >= 1.

    Lagrange stationarity gives rho_v proportional to (a_v/mu_v)^(1/(p-1));
    p = 1 concentrates everything on the best ratio instead.
    """

    a = np.asarray(coefficients, dtype=float)
    mu = np.asarray(node_masses, dtype=float)
    keep = a > 0
    a, mu = a[keep], mu[keep]
    if p == 1:
        return float(np.min(mu / a))
    q = p / (p - 1.0)
    return float(np.sum(a**q * mu ** (1.0 - q)) ** (1.0 - p))


def path_condenser_value(interior: int, p: float,
                         plate_halves: bool = True) -> float:
    """Condenser modulus on a unit path graph with ``interior`` nodes.

    The unique plate-to-plate path has trapezoid coefficient 1 on each
    interior node and 1/2 on the two plate endpoints (included in the
    objective unless ``plate_halves`` is false).
    """

    coeffs = [1.0] * interior
    if plate_halves:
        coeffs = [0.5] + coeffs + [0.5]
    return single_constraint_value(coeffs, [1.0] * len(coeffs), p)


def radial_grid_oracle(outer: int) -> float:
    """Radial upper oracle for the 2-D grid condenser at p = 2.

    Restricting to densities that depend only on the graph distance
    reduces the program to one linear constraint over the shells
    1..outer: shell k holds 4k unit-mass nodes and the radial geodesic
    gives coefficient 1 on interior shells, 1/2 on shells 1 and outer.
    """

    if outer < 3:
        raise ValueError("need outer radius >= 3")
    coeffs = [0.5] + [1.0] * (outer - 2) + [0.5]
    masses = [4.0 * k for k in range(1, outer + 1)]
    return single_constraint_value(coeffs, masses, 2.0)


def ahlfors_series_finite(q: float, p: float) -> bool:
    """Dichotomy of sum_j (2^j)^((p-q)/(p-1)) read off the exponent.

    For p = 1 the series degenerates to sup_j 2^(j(1-q))/(2^q - 1),
    finite precisely when q >= 1.
    """

    if p == 1:
        return q >= 1.0
    return 2.0 ** ((p - q) / (p - 1.0)) < 1.0


def dichotomy_expected(q: float, p: float) -> bool:
    """Acceptance table: finite iff (p < q and q > 1) or (p = 1 = q)."""

    return (p < q and q > 1.0) or (p == 1.0 and q == 1.0)


def spherical_disc_area(extent: float) -> float:
    return math.pi * min(extent, 1.0) ** 2


def spherical_annulus_area(extent: float) -> float:
    return math.pi * (min(extent, 2.0) ** 2 - 1.0)


def spherical_gaussian_mass(extent: float) -> float:
    return math.pi * (1.0 - math.exp(-(extent**2)))

"""Growth functionals deciding existence of limits along infinite curves.

Two quantities are computed from a space based at ``O``:

* the dyadic series functional ``script_R`` built from annulus masses,
  ``sum_j (2**j)**(p/(p-1)) * mu(A(2**j))**(1/(1-p))`` for ``p > 1`` and
  ``sup_j 2**j / mu(A(2**j))`` for ``p = 1``;
* the weighted integral functional ``R_weight``, an integral of
  ``h**(p/(1-p))`` outside the unit ball for ``p > 1`` and the essential
  supremum of ``1/h`` there for ``p = 1``.

Finiteness of either infinite-tail quantity is only ever decided from a
declared asymptotic class; a bare prefix of terms is reported as
inconclusive rather than guessed at.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model_spaces import (AhlforsModel, AsymptoticClass, ModelSpace,
                           PowerWeightedEuclidean, RadialPower, RadialProfile,
                           WeightedHalfLine, annulus_masses)
from .quadrature import adaptive_simpson

FINITE = "finite"
DIVERGENT = "divergent"
INCONCLUSIVE = "inconclusive"

BASIS_CLOSED_FORM = "closed-form-tail"
BASIS_DECLARED = "declared-class"
BASIS_PREFIX = "prefix-only"

# Two stored term ratios agreeing with the declared class ratio to this
# relative tolerance certify that the prefix is exactly geometric, which
# is what licenses closed-form tail summation.
_EXACT_RATIO_RTOL = 1e-9

# Samples per dyadic shell for essential suprema and zero detection.
_SHELL_GRID = 512


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of a growth-functional evaluation.

    ``partial`` holds partial sums (``p > 1``) or running suprema
    (``p = 1``), one entry per dyadic index starting at ``j_min``.
    ``verdict`` is ``finite``/``divergent``/``inconclusive`` and
    ``basis`` records what justified it: a closed-form tail, the
    declared asymptotic class alone, or nothing beyond the stored
    prefix.  ``value`` is set only for a ``finite`` verdict and then
    always dominates the last ``partial`` entry.
    """

    p: float
    verdict: str
    value: float | None
    partial: tuple[float, ...]
    terms: tuple[float, ...]
    j_min: int
    basis: str
    notes: str = ""

    @property
    def is_finite(self) -> bool:
        return self.verdict == FINITE

    def truncated(self, j: int) -> float:
        """Partial sum (or running sup) through annulus ``j``."""
        return self.partial[j - self.j_min]


def _class_term_ratio(cls: AsymptoticClass, p: float) -> float | None:
    """Limiting ratio ``term[j+1] / term[j]`` implied by a declared class."""
    if cls.kind == "polynomial":
        a = cls.value
        return 2.0 ** ((p - a) / (p - 1.0)) if p > 1 else 2.0 ** (1.0 - a)
    if cls.kind == "geometric":
        g = cls.value
        if p > 1:
            return 2.0 ** (p / (p - 1.0)) * g ** (-1.0 / (p - 1.0))
        return 2.0 / g
    if cls.kind == "exponential":
        return 0.0
    return None


def _prefix_is_geometric(terms: tuple[float, ...], ratio: float) -> bool:
    if len(terms) < 3 or ratio <= 0:
        return False
    for a, b in zip(terms[:-1], terms[1:]):
        if a <= 0 or not math.isfinite(a) or not math.isfinite(b):
            return False
        if abs(b / a - ratio) > _EXACT_RATIO_RTOL * ratio:
            return False
    return True


def script_R(profile: RadialProfile, p: float) -> GrowthReport:
    """Evaluate the dyadic series growth functional on a mass profile.

    Parameters
    ----------
    profile : RadialProfile
        Annulus masses with a declared asymptotic class.
    p : float
        Exponent, ``p >= 1``.

    Returns
    -------
    GrowthReport
        Terms, partial sums (running suprema for ``p = 1``), and a
        verdict.  The verdict is decided from the declared class; with
        an ``unknown`` class it is inconclusive unless some stored term
        is already infinite.  When the stored prefix is exactly
        geometric the tail is summed in closed form and included in
        ``value``.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    terms = []
    for j, m in zip(profile.j_values, profile.masses):
        r = 2.0 ** j
        if m == 0.0:
            terms.append(math.inf)
        elif p > 1:
            terms.append(r ** (p / (p - 1.0)) * m ** (1.0 / (1.0 - p)))
        else:
            terms.append(r / m)
    partial = []
    acc = 0.0
    for t in terms:
        acc = acc + t if p > 1 else max(acc, t)
        partial.append(acc)
    terms_t = tuple(terms)
    partial_t = tuple(partial)

    if any(math.isinf(t) for t in terms):
        return GrowthReport(p, DIVERGENT, None, partial_t, terms_t,
                            profile.j_min, BASIS_PREFIX,
                            "a stored term is infinite (zero annulus mass)")

    ratio = _class_term_ratio(profile.asymptotic_class, p)
    if ratio is None:
        return GrowthReport(p, INCONCLUSIVE, None, partial_t, terms_t,
                            profile.j_min, BASIS_PREFIX,
                            "no declared asymptotic class; prefix only")

    exact = _prefix_is_geometric(terms_t, ratio)
    if p > 1:
        if ratio >= 1.0:
            return GrowthReport(p, DIVERGENT, None, partial_t, terms_t,
                                profile.j_min,
                                BASIS_CLOSED_FORM if exact else BASIS_DECLARED,
                                f"term ratio {ratio} >= 1")
        if exact:
            tail = terms_t[-1] * ratio / (1.0 - ratio)
            return GrowthReport(p, FINITE, partial_t[-1] + tail, partial_t,
                                terms_t, profile.j_min, BASIS_CLOSED_FORM,
                                "geometric prefix; tail summed in closed form")
        return GrowthReport(p, FINITE, partial_t[-1], partial_t, terms_t,
                            profile.j_min, BASIS_DECLARED,
                            "declared class is summable; value is the stored prefix sum")
    # p == 1
    if ratio > 1.0:
        return GrowthReport(p, DIVERGENT, None, partial_t, terms_t,
                            profile.j_min,
                            BASIS_CLOSED_FORM if exact else BASIS_DECLARED,
                            f"term ratio {ratio} > 1")
    if exact:
        return GrowthReport(p, FINITE, partial_t[-1], partial_t, terms_t,
                            profile.j_min, BASIS_CLOSED_FORM,
                            "geometric prefix; tail supremum dominated by stored terms")
    return GrowthReport(p, FINITE, partial_t[-1], partial_t, terms_t,
                        profile.j_min, BASIS_DECLARED,
                        "declared class keeps tail terms bounded; value is the stored supremum")


def _density_power(space: ModelSpace) -> tuple[float, float] | None:
    """``(c, e)`` with radial density exactly ``c * r**e``, when exact."""
    if isinstance(space, AhlforsModel):
        return space.constant * space.Q, space.Q - 1.0
    if isinstance(space, PowerWeightedEuclidean):
        from .model_spaces import sphere_area
        return sphere_area(space.n), space.n - 1.0 + space.alpha
    if isinstance(space, WeightedHalfLine) and isinstance(space.weight, RadialPower):
        return space.weight.c, space.weight.beta
    return None


def R_weight(space: ModelSpace, h, p: float, truncation: float) -> GrowthReport:
    """Weighted growth functional of ``h`` outside the unit ball.

    For ``p > 1`` this is the integral of ``h**(p/(1-p))`` against the
    space's measure over the shell ``1 < r < truncation``, accumulated
    per dyadic shell; for ``p = 1`` it is the essential supremum of
    ``1/h`` there, evaluated as a grid maximum (resolution recorded in
    the notes).  Tail behaviour beyond the truncation is classified
    exactly as in :func:`script_R`: a power-form ``h`` on a power-form
    density yields a closed-form tail, anything else is decided from
    declared exponents or left inconclusive.

    ``h`` vanishing somewhere on the shell makes the ``p > 1``
    integrand infinite on a set of positive measure, so divergence is
    reported immediately.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if truncation <= 1:
        raise ValueError("truncation must exceed 1")
    shells: list[tuple[float, float]] = []
    j = 0
    while 2.0 ** j < truncation:
        shells.append((2.0 ** j, min(2.0 ** (j + 1), truncation)))
        j += 1

    beta = getattr(h, "tail_exponent", None)
    dens = _density_power(space)
    dens_exp = space.density_tail_exponent()

    if p == 1:
        sups = []
        running = 0.0
        for lo, hi in shells:
            step = (hi - lo) / _SHELL_GRID
            for k in range(_SHELL_GRID):
                r = lo + (k + 0.5) * step
                hv = float(h(r))
                running = math.inf if hv <= 0 else max(running, 1.0 / hv)
            sups.append(running)
        partial_t = tuple(sups)
        notes = f"grid maximum at {_SHELL_GRID} samples per dyadic shell"
        if math.isinf(running):
            return GrowthReport(p, DIVERGENT, None, partial_t, partial_t, 0,
                                BASIS_PREFIX, "h vanishes on the shell; " + notes)
        if beta is None:
            return GrowthReport(p, INCONCLUSIVE, None, partial_t, partial_t, 0,
                                BASIS_PREFIX, notes)
        if beta < 0:
            return GrowthReport(p, DIVERGENT, None, partial_t, partial_t, 0,
                                BASIS_CLOSED_FORM,
                                "1/h grows without bound; " + notes)
        if isinstance(h, RadialPower):
            value = 1.0 / h.c  # sup of (1/c) r**(-beta) over r > 1
            return GrowthReport(p, FINITE, value, partial_t, partial_t, 0,
                                BASIS_CLOSED_FORM,
                                "supremum attained toward the inner boundary; " + notes)
        return GrowthReport(p, FINITE, running, partial_t, partial_t, 0,
                            BASIS_DECLARED,
                            "declared tail exponent keeps 1/h bounded; " + notes)

    # p > 1: scan for zeros of h, then integrate shell by shell.
    for lo, hi in shells:
        step = (hi - lo) / _SHELL_GRID
        for k in range(_SHELL_GRID + 1):
            if float(h(lo + k * step)) <= 0:
                return GrowthReport(
                    p, DIVERGENT, None, (), (), 0, BASIS_PREFIX,
                    f"h vanishes near r={lo + k * step}; integrand is infinite "
                    "on a set of positive measure")
    q = p / (1.0 - p)
    terms = []
    for lo, hi in shells:
        cuts = space.density_breakpoints(lo, hi)
        terms.append(adaptive_simpson(
            lambda r: float(h(r)) ** q * space.radial_density(r),
            lo, hi, breakpoints=cuts))
    partial = []
    acc = 0.0
    for t in terms:
        acc += t
        partial.append(acc)
    partial_t = tuple(partial)
    terms_t = tuple(terms)

    if beta is None or dens_exp is None:
        return GrowthReport(p, INCONCLUSIVE, None, partial_t, terms_t, 0,
                            BASIS_PREFIX, "tail exponents undeclared")
    tail_exp = beta * q + dens_exp
    if tail_exp >= -1.0:
        return GrowthReport(p, DIVERGENT, None, partial_t, terms_t, 0,
                            BASIS_DECLARED,
                            f"integrand exponent {tail_exp} >= -1")
    if isinstance(h, RadialPower) and dens is not None:
        c_int = h.c ** q * dens[0]
        tail = -c_int * truncation ** (tail_exp + 1.0) / (tail_exp + 1.0)
        return GrowthReport(p, FINITE, partial_t[-1] + tail, partial_t, terms_t,
                            0, BASIS_CLOSED_FORM,
                            "power integrand; tail integrated in closed form")
    return GrowthReport(p, FINITE, partial_t[-1], partial_t, terms_t, 0,
                        BASIS_DECLARED,
                        "declared exponents integrable; value is the truncated integral")


@dataclass(frozen=True)
class CompareReport:
    """Ratio of the two growth functionals across truncation levels.

    ``ratios[i]`` compares the weighted functional truncated at
    ``2**(levels[i] + 1)`` with the dyadic series through annulus
    ``levels[i]``.  ``band`` is ``ratio_max / ratio_min``; a band close
    to one over growing levels is the numerical signature that the two
    functionals are comparable for the given weight.
    """

    p: float
    levels: tuple[int, ...]
    numerators: tuple[float, ...]
    denominators: tuple[float, ...]
    ratios: tuple[float, ...]
    ratio_min: float
    ratio_max: float
    band: float


def compare_R(space: ModelSpace, h, p: float, j_max: int,
              levels: int = 5) -> CompareReport:
    """Compare ``R_weight`` against ``script_R`` at matched truncations.

    The weighted functional truncated at radius ``2**(j+1)`` is divided
    by the series partial through annulus ``j`` for the last ``levels``
    values of ``j`` up to ``j_max``.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if j_max < levels - 1:
        raise ValueError("j_max too small for the requested level count")
    profile = annulus_masses(space, j_max=j_max)
    series = script_R(profile, p)
    weighted = R_weight(space, h, p, truncation=2.0 ** (j_max + 1))
    lvls = tuple(range(j_max - levels + 1, j_max + 1))
    nums = tuple(weighted.partial[j] for j in lvls)
    dens = tuple(series.partial[j] for j in lvls)
    ratios = tuple(n / d for n, d in zip(nums, dens))
    rmin, rmax = min(ratios), max(ratios)
    band = math.inf if rmin == 0 else rmax / rmin
    return CompareReport(p, lvls, nums, dens, ratios, rmin, rmax, band)

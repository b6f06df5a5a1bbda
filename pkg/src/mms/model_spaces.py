"""Radially structured model measure spaces and their dyadic profiles.

Everything downstream (growth functionals, block densities, weight
comparisons) consumes a space through two narrow views: the dyadic
annulus masses around the base point, packaged as a
:class:`RadialProfile`, and a radial measure density for 1-D
quadrature.  Four concrete families are provided:

* :class:`AhlforsModel` -- exact ball volumes ``c * r**Q``;
* :class:`WeightedHalfLine` -- ``[0, inf)`` with a weight density;
* :class:`PowerWeightedEuclidean` -- ``R^n`` with weight ``|x|**alpha``;
* :class:`KRegularTree` -- rooted ``K``-ary tree with per-generation
  edge lengths and edge masses.

Asymptotic behaviour of annulus masses is always a declared input
(:class:`AsymptoticClass`), never inferred from a finite prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .quadrature import adaptive_simpson, disc_mean

_ORIGIN_TOL = 1e-15


class NonIntegrableWeightError(ValueError):
    """The weight fails local integrability on a sampled region."""


class NonMonotoneBallMeasureError(ValueError):
    """A ball measure evaluator decreased on nested balls."""


class ProfileOverflowError(OverflowError):
    """An annulus mass overflowed to a non-finite float."""


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in ``R^n``."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class AsymptoticClass:
    """Declared tail behaviour of dyadic annulus masses.

    ``polynomial(a)`` promises ``masses[j] / 2**(j*a)`` bounded above
    and below, ``geometric(g)`` promises ``masses[j+1]/masses[j] -> g``,
    ``exponential()`` promises the ratio grows without bound, and
    ``unknown()`` promises nothing (classification then stays
    prefix-only).
    """

    kind: str
    value: float | None = None

    _KINDS = ("polynomial", "geometric", "exponential", "unknown")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown asymptotic class kind {self.kind!r}")
        if self.kind in ("polynomial", "geometric") and self.value is None:
            raise ValueError(f"{self.kind} class requires a parameter")

    @staticmethod
    def polynomial(exponent: float) -> "AsymptoticClass":
        return AsymptoticClass("polynomial", float(exponent))

    @staticmethod
    def geometric(ratio: float) -> "AsymptoticClass":
        if ratio <= 0:
            raise ValueError("geometric ratio must be positive")
        return AsymptoticClass("geometric", float(ratio))

    @staticmethod
    def exponential() -> "AsymptoticClass":
        return AsymptoticClass("exponential")

    @staticmethod
    def unknown() -> "AsymptoticClass":
        return AsymptoticClass("unknown")


@dataclass(frozen=True)
class RadialProfile:
    """Dyadic annulus masses ``masses[i] = mu(A(2**(j_min + i)))``.

    ``A(2**j)`` is the open-ball annulus ``B(O, 2**(j+1)) - B(O, 2**j)``.
    """

    masses: tuple[float, ...]
    j_min: int = 0
    asymptotic_class: AsymptoticClass = field(default_factory=AsymptoticClass.unknown)

    def __post_init__(self) -> None:
        for i, m in enumerate(self.masses):
            if not math.isfinite(m):
                raise ProfileOverflowError(
                    f"annulus mass at j={self.j_min + i} is non-finite ({m})")
            if m < 0:
                raise NonMonotoneBallMeasureError(
                    f"annulus mass at j={self.j_min + i} is negative ({m})")

    @property
    def j_values(self) -> range:
        return range(self.j_min, self.j_min + len(self.masses))

    def mass(self, j: int) -> float:
        return self.masses[j - self.j_min]

    def scaled(self, factor: float) -> "RadialProfile":
        """Profile with every annulus mass multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return RadialProfile(tuple(factor * m for m in self.masses),
                             self.j_min, self.asymptotic_class)


class ModelSpace:
    """Shared interface: ball measures, annulus masses, radial density."""

    asymptotic_class: AsymptoticClass

    def ball_measure(self, r: float) -> float:
        raise NotImplementedError

    def annulus_mass(self, j: int) -> float:
        lo = self.ball_measure(float(2 ** j))
        hi = self.ball_measure(float(2 ** (j + 1)))
        if hi < lo:
            raise NonMonotoneBallMeasureError(
                f"ball measure decreased between radii 2^{j} and 2^{j + 1}")
        return hi - lo

    def radial_density(self, r: float) -> float:
        """Density ``m'(r)`` of the ball measure, for 1-D quadrature."""
        raise NotImplementedError

    def density_breakpoints(self, lo: float, hi: float) -> list[float]:
        """Known kinks of the radial density inside ``(lo, hi)``."""
        return []

    def density_tail_exponent(self) -> float | None:
        """``e`` such that ``m'(r)`` is comparable to ``r**e``, if declared."""
        cls = self.asymptotic_class
        if cls.kind == "polynomial":
            return cls.value - 1.0
        return None

    def profile(self, j_max: int, j_min: int = 0) -> RadialProfile:
        return annulus_masses(self, j_max=j_max, j_min=j_min)


def annulus_masses(space: ModelSpace, j_max: int, j_min: int = 0) -> RadialProfile:
    """Dyadic annulus masses of ``space`` as a :class:`RadialProfile`.

    Parameters
    ----------
    space : ModelSpace
        Any model variant with a ball-measure evaluator.
    j_max : int
        Last annulus index (inclusive).
    j_min : int
        First annulus index; exposed because some constructions index
        annuli from one rather than zero.

    Raises
    ------
    NonMonotoneBallMeasureError
        If the evaluator is decreasing on nested balls.
    ProfileOverflowError
        If a mass overflows to a non-finite float; overflow is reported,
        never clamped.
    """
    if j_max < j_min:
        raise ValueError("j_max must be >= j_min")
    masses = []
    for j in range(j_min, j_max + 1):
        m = space.annulus_mass(j)
        if not math.isfinite(m):
            raise ProfileOverflowError(f"annulus mass at j={j} overflowed ({m})")
        masses.append(m)
    return RadialProfile(tuple(masses), j_min, space.asymptotic_class)


@dataclass(frozen=True)
class RadialPower:
    """Radial map ``r -> c * r**beta`` carrying its own tail exponent."""

    c: float = 1.0
    beta: float = 0.0

    def __call__(self, r):
        return self.c * np.asarray(r, dtype=float) ** self.beta

    @property
    def tail_exponent(self) -> float:
        return self.beta


@dataclass(frozen=True)
class GenerationWeight:
    """Per-generation weight ``m -> c * ratio**m`` for tree models."""

    c: float = 1.0
    ratio: float = 1.0

    def __call__(self, m: int) -> float:
        return self.c * self.ratio ** m


@dataclass(frozen=True)
class AhlforsModel(ModelSpace):
    """Model space with exact ball volumes ``constant * r**Q``."""

    Q: float
    constant: float = 1.0

    def __post_init__(self) -> None:
        if self.Q <= 0 or self.constant <= 0:
            raise ValueError("AhlforsModel requires Q > 0 and constant > 0")

    @property
    def asymptotic_class(self) -> AsymptoticClass:
        return AsymptoticClass.polynomial(self.Q)

    def ball_measure(self, r: float) -> float:
        if r < 0:
            raise ValueError("radius must be non-negative")
        return self.constant * r ** self.Q

    def annulus_mass(self, j: int) -> float:
        return self.constant * (2.0 ** ((j + 1) * self.Q) - 2.0 ** (j * self.Q))

    def radial_density(self, r: float) -> float:
        return self.constant * self.Q * r ** (self.Q - 1.0)


@dataclass(frozen=True)
class WeightedHalfLine(ModelSpace):
    """``[0, inf)`` with measure ``weight(r) dr`` based at the endpoint.

    ``weight`` must be positive and locally integrable; declare the
    annulus-mass class explicitly when it is known (for a power weight
    ``c * r**beta`` it is ``polynomial(beta + 1)``).
    """

    weight: Callable[[float], float] = field(default_factory=RadialPower)
    asymptotic_class: AsymptoticClass = field(default_factory=AsymptoticClass.unknown)

    @staticmethod
    def constant() -> "WeightedHalfLine":
        """Unit-weight half-line; annulus masses are exactly ``2**j``."""
        return WeightedHalfLine(RadialPower(1.0, 0.0), AsymptoticClass.polynomial(1.0))

    @staticmethod
    def power(c: float, beta: float) -> "WeightedHalfLine":
        if beta <= -1.0:
            raise NonIntegrableWeightError(
                f"half-line weight r**{beta} is not integrable at the base point")
        return WeightedHalfLine(RadialPower(c, beta),
                                AsymptoticClass.polynomial(beta + 1.0))

    def ball_measure(self, r: float) -> float:
        if r < 0:
            raise ValueError("radius must be non-negative")
        if isinstance(self.weight, RadialPower):
            c, beta = self.weight.c, self.weight.beta
            if beta <= -1.0:
                raise NonIntegrableWeightError(
                    f"half-line weight r**{beta} is not integrable at the base point")
            return c * r ** (beta + 1.0) / (beta + 1.0)
        return adaptive_simpson(lambda s: float(self.weight(s)), 0.0, r)

    def annulus_mass(self, j: int) -> float:
        lo, hi = float(2 ** j), float(2 ** (j + 1))
        if isinstance(self.weight, RadialPower):
            c, beta = self.weight.c, self.weight.beta
            e = beta + 1.0
            if e == 0:
                return c * math.log(hi / lo)
            return c * (hi ** e - lo ** e) / e
        return adaptive_simpson(lambda s: float(self.weight(s)), lo, hi)

    def radial_density(self, r: float) -> float:
        return float(self.weight(r))


@dataclass(frozen=True)
class PowerWeightedEuclidean(ModelSpace):
    """``R^n`` with measure ``|x|**alpha dx`` based at the origin.

    Balls around the origin have measure
    ``sphere_area(n) * r**(n + alpha) / (n + alpha)``; this is finite
    precisely when ``alpha > -n``.  The space object itself can be
    built for any ``alpha`` (annulus masses away from the origin are
    always finite); evaluations that touch the origin raise
    :class:`NonIntegrableWeightError` when ``alpha <= -n``.
    """

    n: int
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be at least 1")

    @property
    def asymptotic_class(self) -> AsymptoticClass:
        return AsymptoticClass.polynomial(self.n + self.alpha)

    def _check_origin_integrable(self) -> None:
        if self.alpha <= -self.n:
            raise NonIntegrableWeightError(
                f"|x|**{self.alpha} is not locally integrable in R^{self.n}")

    def ball_measure(self, r: float) -> float:
        if r < 0:
            raise ValueError("radius must be non-negative")
        self._check_origin_integrable()
        e = self.n + self.alpha
        return sphere_area(self.n) * r ** e / e

    def annulus_mass(self, j: int) -> float:
        lo, hi = float(2 ** j), float(2 ** (j + 1))
        e = self.n + self.alpha
        if e == 0:
            return sphere_area(self.n) * math.log(hi / lo)
        return sphere_area(self.n) * (hi ** e - lo ** e) / e

    def annulus_mass_quadrature(self, j: int) -> float:
        """Same mass by 1-D radial quadrature; cross-checks the closed form."""
        lo, hi = float(2 ** j), float(2 ** (j + 1))
        area = sphere_area(self.n)
        return adaptive_simpson(
            lambda s: area * s ** (self.n - 1 + self.alpha), lo, hi)

    def radial_density(self, r: float) -> float:
        return sphere_area(self.n) * r ** (self.n - 1 + self.alpha)

    def weight_mean(self, center: Sequence[float], radius: float,
                    exponent: float = 1.0) -> float:
        """Average of ``(|x|**alpha)**exponent`` over a Euclidean ball.

        Origin-centered balls reduce to an exact radial integral.
        Off-center balls use the fixed 256x256 tensor midpoint rule
        (implemented in the plane, where all sampled configurations
        live).  Returns ``inf`` when the integrand is non-integrable on
        a ball through the origin but the weight itself is integrable;
        raises when the weight is not locally integrable at all.
        """
        beta = self.alpha * exponent
        c = np.asarray(center, dtype=float)
        dist = float(np.linalg.norm(c))
        touches_origin = dist <= radius + _ORIGIN_TOL
        if touches_origin and self.alpha <= -self.n:
            raise NonIntegrableWeightError(
                f"|x|**{self.alpha} is not locally integrable in R^{self.n}")
        if touches_origin and beta <= -self.n:
            return math.inf
        if dist <= _ORIGIN_TOL:
            # exact: mean of |x|**beta over B(0, r) in R^n
            return self.n / (self.n + beta) * radius ** beta
        if len(c) != 2:
            raise NotImplementedError(
                "off-center ball averages are implemented in the plane")
        return disc_mean(
            lambda pts: np.linalg.norm(pts, axis=1) ** beta, c, radius)


@dataclass(frozen=True)
class KRegularTree(ModelSpace):
    """Rooted tree where every vertex has ``K`` children.

    Each edge between generations ``m`` and ``m + 1`` is an interval of
    length ``edge_length(m)`` carrying total mass ``edge_measure(m)``;
    there are ``K**(m+1)`` such edges.  The ball measure around the
    root is piecewise linear in the radius.
    """

    K: int
    edge_length: Callable[[int], float] = field(default_factory=GenerationWeight)
    edge_measure: Callable[[int], float] = field(default_factory=GenerationWeight)
    asymptotic_class: AsymptoticClass = field(default_factory=AsymptoticClass.exponential)

    def __post_init__(self) -> None:
        if self.K < 2:
            raise ValueError("KRegularTree requires K >= 2")
        # cumulative (depth, length, mass) cache grown on demand
        object.__setattr__(self, "_cum", [(0.0, 0.0)])

    def _grow_to(self, r: float) -> None:
        cum: list[tuple[float, float]] = self._cum  # type: ignore[attr-defined]
        while cum[-1][0] < r and math.isfinite(cum[-1][1]):
            m = len(cum) - 1
            length = float(self.edge_length(m))
            if length <= 0:
                raise ValueError(f"edge length at generation {m} must be positive")
            mass = float(self.K ** (m + 1)) * float(self.edge_measure(m))
            cum.append((cum[-1][0] + length, cum[-1][1] + mass))

    def _generation_at(self, r: float) -> int:
        self._grow_to(r)
        cum = self._cum  # type: ignore[attr-defined]
        for m in range(len(cum) - 1):
            if cum[m][0] <= r < cum[m + 1][0]:
                return m
        return len(cum) - 1

    def ball_measure(self, r: float) -> float:
        if r < 0:
            raise ValueError("radius must be non-negative")
        if r == 0:
            return 0.0
        self._grow_to(r)
        cum = self._cum  # type: ignore[attr-defined]
        m = self._generation_at(r)
        depth_lo, mass_lo = cum[m]
        depth_hi, mass_hi = cum[m + 1] if m + 1 < len(cum) else cum[m]
        if not math.isfinite(mass_lo):
            return math.inf
        if r >= depth_hi:
            return mass_hi
        frac = (r - depth_lo) / (depth_hi - depth_lo)
        return mass_lo + frac * (mass_hi - mass_lo)

    def radial_density(self, r: float) -> float:
        m = self._generation_at(r)
        return (float(self.K ** (m + 1)) * float(self.edge_measure(m))
                / float(self.edge_length(m)))

    def density_breakpoints(self, lo: float, hi: float) -> list[float]:
        self._grow_to(hi)
        cum = self._cum  # type: ignore[attr-defined]
        return [depth for depth, _ in cum if lo < depth < hi]


@dataclass(frozen=True)
class MuckenhouptEstimate:
    """Finite-sample estimate of a Muckenhoupt constant.

    ``lower_bound`` is always true: the supremum over a sample of balls
    can only underestimate the supremum over all balls.
    """

    value: float
    p: float
    ball_count: int
    worst_ball: tuple[tuple[float, ...], float] | None
    lower_bound: bool = True


def muckenhoupt_constant(space: PowerWeightedEuclidean, p: float,
                         ball_sample: Sequence[tuple[Sequence[float], float]]
                         ) -> MuckenhouptEstimate:
    """Largest Muckenhoupt ratio of the weight over sampled balls.

    For ``p > 1`` each ball ``B`` contributes

        ``(avg_B w)**(1/p) * (avg_B w**(1/(1-p)))**((p-1)/p)``

    and for ``p = 1`` it contributes ``(avg_B w) * ess-sup_B (1/w)``,
    with the essential supremum evaluated in closed form from radial
    monotonicity of the weight.

    Parameters
    ----------
    space : PowerWeightedEuclidean
        The weighted space; the weight is ``|x|**alpha``.
    p : float
        Exponent, ``p >= 1``.
    ball_sample : sequence of ``(center, radius)``
        Balls to test.  A superset sample can only increase the result.

    Returns
    -------
    MuckenhouptEstimate
        Maximum ratio, flagged as a lower bound for the true constant.
        The value is ``inf`` when a sampled ball makes one factor
        genuinely infinite (weight outside the admissible range).
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if not ball_sample:
        raise ValueError("ball sample must be non-empty")
    alpha = space.alpha
    best = -math.inf
    worst = None
    for center, radius in ball_sample:
        if radius <= 0:
            raise ValueError("ball radius must be positive")
        avg_w = space.weight_mean(center, radius, exponent=1.0)
        if p == 1:
            c = np.asarray(center, dtype=float)
            dist = float(np.linalg.norm(c))
            d_min = max(0.0, dist - radius)
            d_max = dist + radius
            if alpha > 0:
                sup_inv = math.inf if d_min == 0 else d_min ** (-alpha)
            elif alpha < 0:
                sup_inv = d_max ** (-alpha)
            else:
                sup_inv = 1.0
            ratio = avg_w * sup_inv
        else:
            avg_dual = space.weight_mean(center, radius,
                                         exponent=1.0 / (1.0 - p))
            ratio = avg_w ** (1.0 / p) * avg_dual ** ((p - 1.0) / p)
        if ratio > best:
            best = ratio
            worst = (tuple(float(x) for x in center), float(radius))
    return MuckenhouptEstimate(best, p, len(ball_sample), worst)


def standard_ball_sample(n: int, stages: int) -> list[tuple[tuple[float, ...], float]]:
    """Deterministic ball sample probing scales ``2**-stages .. 2**stages``.

    Mixes origin-centered balls, off-center balls clear of the origin,
    and balls containing the origin strictly inside; growing ``stages``
    yields a superset sample, so estimates are monotone in ``stages``.
    """
    if stages < 1:
        raise ValueError("stages must be at least 1")
    sample: list[tuple[tuple[float, ...], float]] = []
    e1 = lambda s: (s,) + (0.0,) * (n - 1)
    for i in range(stages + 1):
        scale = 2.0 ** i
        sample.append((e1(0.0), scale))
        sample.append((e1(0.0), 1.0 / scale))
        sample.append((e1(3.0 / scale), 1.0 / scale))
        sample.append((e1(3.0 * scale), scale))
        sample.append((e1(1.0 / scale), 2.0 / scale))
    return sample


def model_to_json(space: ModelSpace) -> dict:
    """JSON-serializable description of a model space."""
    if isinstance(space, AhlforsModel):
        params = {"Q": space.Q, "constant": space.constant}
        variant = "ahlfors"
    elif isinstance(space, WeightedHalfLine):
        if not isinstance(space.weight, RadialPower):
            raise TypeError("only power-form half-line weights serialize to JSON")
        params = {"c": space.weight.c, "beta": space.weight.beta}
        variant = "halfline"
    elif isinstance(space, PowerWeightedEuclidean):
        params = {"n": space.n, "alpha": space.alpha}
        variant = "power_euclidean"
    elif isinstance(space, KRegularTree):
        if not (isinstance(space.edge_length, GenerationWeight)
                and isinstance(space.edge_measure, GenerationWeight)):
            raise TypeError("only generation-weight trees serialize to JSON")
        params = {
            "K": space.K,
            "length_c": space.edge_length.c, "length_ratio": space.edge_length.ratio,
            "measure_c": space.edge_measure.c, "measure_ratio": space.edge_measure.ratio,
        }
        variant = "tree"
    else:
        raise TypeError(f"unknown model space type {type(space).__name__}")
    return {"schema": "mms/1", "kind": "model", "variant": variant, "params": params}


def model_from_json(doc: dict) -> ModelSpace:
    """Inverse of :func:`model_to_json`, with strict key checking."""
    if not isinstance(doc, dict):
        raise ValueError("model document must be a JSON object")
    expected = {"schema", "kind", "variant", "params"}
    if set(doc) != expected:
        raise ValueError(f"model document keys must be exactly {sorted(expected)}")
    if doc["schema"] != "mms/1":
        raise ValueError(f"unsupported schema {doc['schema']!r}")
    if doc["kind"] != "model":
        raise ValueError(f"expected kind 'model', got {doc['kind']!r}")
    variant = doc["variant"]
    params = doc["params"]
    if variant == "ahlfors":
        return AhlforsModel(Q=float(params["Q"]),
                            constant=float(params.get("constant", 1.0)))
    if variant == "halfline":
        return WeightedHalfLine.power(float(params.get("c", 1.0)),
                                      float(params.get("beta", 0.0)))
    if variant == "power_euclidean":
        return PowerWeightedEuclidean(n=int(params["n"]),
                                      alpha=float(params.get("alpha", 0.0)))
    if variant == "tree":
        return KRegularTree(
            K=int(params["K"]),
            edge_length=GenerationWeight(float(params.get("length_c", 1.0)),
                                         float(params.get("length_ratio", 1.0))),
            edge_measure=GenerationWeight(float(params.get("measure_c", 1.0)),
                                          float(params.get("measure_ratio", 1.0))),
        )
    raise ValueError(f"unknown model variant {variant!r}")

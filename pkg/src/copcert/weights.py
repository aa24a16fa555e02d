"""Radial weights, the measures they induce, and the change-of-variable density.

A weight is a power series gamma(t) = sum a_n t^n with nonnegative
coefficients and at least one positive coefficient of index >= 1.  The
measure on R^kappa has Lebesgue density gamma(|x|_P^2) (direct side) or
1/gamma(|x|_P^2) (reciprocal side).  An invertible symbol A pushes the
measure forward; the density of the pushforward with respect to the
measure itself is the rational/exponential expression computed by
`density_h`, and its supremum decides boundedness of the composition
operator f -> f o A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import WeightClassError, ZeroDensityError
from .linalg import InnerProduct, MatrixSymbol, extremal_direction, op_norm

EXP_RADIUS = 700.0

BOUNDARY_BAND = 1e-12

MULTISTART_COUNT = 64
MULTISTART_RADIUS = 10.0


class WeightKind(Enum):
    POLYNOMIAL = "polynomial"
    ENTIRE = "entire"


class Side(Enum):
    DIRECT = "direct"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True, eq=False)
class WeightSeries:
    """Coefficient sequence of an admissible radial weight.

    Polynomial weights store their coefficients; the entire kind is the
    exponential series a_n = 1/n!, kept symbolic so ratios of evaluations
    never go through a truncated sum.
    """

    kind: WeightKind
    coeffs: np.ndarray | None = None
    radius: float = EXP_RADIUS

    @classmethod
    def polynomial(cls, coeffs) -> "WeightSeries":
        a = np.asarray(coeffs, dtype=float)
        if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a)):
            raise WeightClassError("coefficients must be a finite 1-d sequence")
        if np.any(a < 0):
            raise WeightClassError("coefficients must be nonnegative")
        nz = np.nonzero(a)[0]
        if nz.size == 0 or nz[-1] == 0:
            raise WeightClassError("some coefficient of index >= 1 must be positive")
        return cls(kind=WeightKind.POLYNOMIAL, coeffs=a[: nz[-1] + 1].copy())

    @classmethod
    def exp(cls, radius: float = EXP_RADIUS) -> "WeightSeries":
        return cls(kind=WeightKind.ENTIRE, coeffs=None, radius=radius)

    @property
    def degree(self) -> int:
        """Polynomial degree; entire weights have no finite degree."""
        if self.kind is WeightKind.ENTIRE:
            raise WeightClassError("entire weight has no finite degree")
        return int(self.coeffs.size - 1)

    @property
    def a0(self) -> float:
        return 1.0 if self.kind is WeightKind.ENTIRE else float(self.coeffs[0])

    @property
    def low_index(self) -> int:
        """Index of the first nonzero coefficient (0 for the entire kind)."""
        if self.kind is WeightKind.ENTIRE:
            return 0
        return int(np.nonzero(self.coeffs)[0][0])

    def coefficient(self, n: int) -> float:
        if self.kind is WeightKind.ENTIRE:
            return 1.0 / math.factorial(n)
        return float(self.coeffs[n]) if n < self.coeffs.size else 0.0

    def truncated_coeffs(self, k: int) -> np.ndarray:
        """Raw coefficients (a_0, ..., a_k), without the admissibility check."""
        if k < 0:
            raise ValueError("truncation level must be nonnegative")
        if self.kind is WeightKind.ENTIRE:
            return np.array([1.0 / math.factorial(n) for n in range(k + 1)])
        out = np.zeros(k + 1)
        m = min(k + 1, self.coeffs.size)
        out[:m] = self.coeffs[:m]
        return out

    def eval(self, t) -> np.ndarray:
        """Series value at t >= 0 (vectorized)."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("weight argument must be nonnegative")
        if self.kind is WeightKind.ENTIRE:
            if np.any(t > self.radius):
                raise ValueError(f"argument beyond the declared radius {self.radius:g}")
            return np.exp(t)
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def log_eval(self, t) -> np.ndarray:
        """log gamma(t); exact for the entire kind, safe near zero density."""
        t = np.asarray(t, dtype=float)
        if self.kind is WeightKind.ENTIRE:
            return t
        vals = np.polynomial.polynomial.polyval(t, self.coeffs)
        with np.errstate(divide="ignore"):
            return np.log(vals)


def truncate(gamma: WeightSeries, k: int) -> WeightSeries:
    """Polynomial truncation (a_0, ..., a_k), which must itself be admissible."""
    coeffs = gamma.truncated_coeffs(k)
    try:
        return WeightSeries.polynomial(coeffs)
    except WeightClassError as exc:
        raise WeightClassError(
            f"truncation at k={k} has no positive coefficient of index >= 1"
        ) from exc


@dataclass(frozen=True, eq=False)
class WeightedMeasure:
    """Measure with density gamma(|x|_P^2) or its reciprocal."""

    weight: WeightSeries
    side: Side
    inner: InnerProduct

    @property
    def dim(self) -> int:
        return self.inner.dim

    def density(self, points: np.ndarray) -> np.ndarray:
        vals = self.weight.eval(self.inner.norm_sq(points))
        if self.side is Side.DIRECT:
            return vals
        with np.errstate(divide="ignore"):
            return 1.0 / vals

    def log_density(self, points: np.ndarray) -> np.ndarray:
        vals = self.weight.log_eval(self.inner.norm_sq(points))
        return vals if self.side is Side.DIRECT else -vals


def density_h(measure: WeightedMeasure, sym: MatrixSymbol, points: np.ndarray) -> np.ndarray:
    """Derivative of the pushforward measure under A with respect to the measure.

    Direct side: gamma(|A^{-1}x|^2) / (|det A| gamma(|x|^2)); the reciprocal
    side swaps the two evaluations.  Undefined at x = 0 when a_0 = 0.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    gamma, inner = measure.weight, measure.inner
    t_x = inner.norm_sq(points)
    if gamma.a0 == 0.0 and np.any(t_x == 0.0):
        raise ZeroDensityError("density vanishes at the origin for weights with a_0 = 0")
    t_ax = inner.norm_sq(points @ sym.inverse.T)
    if gamma.kind is WeightKind.ENTIRE:
        diff = t_ax - t_x if measure.side is Side.DIRECT else t_x - t_ax
        # unbounded ratios legitimately overflow to inf when sampled far out
        with np.errstate(over="ignore"):
            return np.exp(diff) / sym.absdet
    num, den = gamma.eval(t_ax), gamma.eval(t_x)
    if measure.side is Side.RECIPROCAL:
        num, den = den, num
    return num / (den * sym.absdet)


def log_density_h(measure: WeightedMeasure, sym: MatrixSymbol, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    gamma, inner = measure.weight, measure.inner
    lx = gamma.log_eval(inner.norm_sq(points))
    lax = gamma.log_eval(inner.norm_sq(points @ sym.inverse.T))
    diff = lax - lx if measure.side is Side.DIRECT else lx - lax
    return diff - np.log(sym.absdet)


@dataclass(frozen=True, eq=False)
class BoundednessReport:
    """Classification of the composition operator induced by a symbol."""

    bounded: bool
    norm: float | None
    sup_density: float | None
    marginal: bool
    criterion_norm: float
    densely_defined: bool
    divergence_log: tuple[tuple[float, float], ...] | None  # (|x|_P, log h) along a ray

    @property
    def verdict(self) -> str:
        return "BOUNDED" if self.bounded else "UNBOUNDED"


def _multistart_sup(measure: WeightedMeasure, sym: MatrixSymbol) -> float:
    """Largest interior value of h found from quasi-random ascent starts."""
    dim = measure.dim
    sampler = qmc.Sobol(d=dim, scramble=False)
    raw = sampler.random_base2(m=int(math.log2(MULTISTART_COUNT)))
    cube = 2.0 * raw - 1.0
    # unscrambled Sobol begins at the origin; nudge it off in case a_0 = 0
    cube[np.all(cube == 0.0, axis=1)] = 1e-3
    starts = (MULTISTART_RADIUS / math.sqrt(dim)) * cube @ measure.inner.factor_inv.T

    def neg_log_h(x):
        return -float(log_density_h(measure, sym, x[None, :])[0])

    best = -np.inf
    for x0 in starts:
        res = optimize.minimize(
            neg_log_h, x0, method="L-BFGS-B", options={"gtol": 1e-10, "maxiter": 200}
        )
        if np.isfinite(res.fun):
            best = max(best, -float(res.fun))
    return math.exp(best) if np.isfinite(best) else 0.0


def _directional_limits(measure: WeightedMeasure, sym: MatrixSymbol) -> list[float]:
    """Ray limits of h at infinity and, when a_0 = 0, at the origin."""
    gamma = measure.weight
    if measure.side is Side.DIRECT:
        crit = op_norm(sym.inverted(), measure.inner)
    else:
        crit = op_norm(sym, measure.inner)
    limits = [crit ** (2 * gamma.degree) / sym.absdet]
    if gamma.a0 == 0.0:
        limits.append(crit ** (2 * gamma.low_index) / sym.absdet)
    return limits


def classify_boundedness(measure: WeightedMeasure, sym: MatrixSymbol) -> BoundednessReport:
    """Boundedness of f -> f o A on the weighted space, with a norm when bounded.

    Polynomial weights always give bounded operators; the supremum of h is
    located by multistart ascent combined with the analytic ray limits.  For
    the entire kind boundedness is decided by the operator norm of A^{-1}
    (direct side) or A (reciprocal side) against 1, and the supremum of h at
    1/|det A| is attained at the origin because the exponent is a
    nonpositive-definite quadratic form.
    """
    gamma, inner = measure.weight, measure.inner
    crit = op_norm(sym.inverted() if measure.side is Side.DIRECT else sym, inner)
    if gamma.kind is WeightKind.POLYNOMIAL:
        candidates = _directional_limits(measure, sym)
        if gamma.a0 > 0.0:
            candidates.append(1.0 / sym.absdet)
        candidates.append(_multistart_sup(measure, sym))
        sup = max(candidates)
        return BoundednessReport(
            bounded=True,
            norm=math.sqrt(sup),
            sup_density=sup,
            marginal=False,
            criterion_norm=crit,
            densely_defined=True,
            divergence_log=None,
        )
    marginal = abs(crit - 1.0) <= BOUNDARY_BAND
    if crit <= 1.0 + BOUNDARY_BAND:
        sup = 1.0 / sym.absdet
        return BoundednessReport(
            bounded=True,
            norm=math.sqrt(sup),
            sup_density=sup,
            marginal=marginal,
            criterion_norm=crit,
            densely_defined=True,
            divergence_log=None,
        )
    # witness a ray along which log h increases without bound
    if measure.side is Side.DIRECT:
        u = extremal_direction(sym.inverted(), inner)
        rate = crit**2 - 1.0
    else:
        u = extremal_direction(sym.inverted(), inner, smallest=True)
        rate = 1.0 - 1.0 / crit**2
    scale = math.sqrt(10.0 / rate)
    radii = [scale * j for j in range(1, 9)]
    log_vals = [float(r * r * rate - math.log(sym.absdet)) for r in radii]
    return BoundednessReport(
        bounded=False,
        norm=None,
        sup_density=None,
        marginal=False,
        criterion_norm=crit,
        densely_defined=True,
        divergence_log=tuple(zip(radii, log_vals)),
    )

"""Gaussian-polynomial test functions and indicator simple functions.

The working family is q(x) exp(-x^T S x) with q a real multivariate
polynomial and S symmetric positive definite.  It is closed under
composition with linear maps, pointwise products, and (same-S) linear
combinations, which is what the operator layer needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, MembershipError
from .linalg import InnerProduct, MatrixSymbol, quad_form
from .weights import Side, WeightedMeasure, WeightKind

DEGREE_CAP = 12


def _normalize_terms(terms: dict) -> dict:
    out = {}
    for expo, coeff in terms.items():
        if coeff != 0.0:
            out[tuple(int(e) for e in expo)] = float(coeff)
    return out


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Multivariate polynomial as a map from exponent tuples to coefficients."""

    dim: int
    terms: dict

    @classmethod
    def from_terms(cls, dim: int, terms: dict) -> "Polynomial":
        clean = _normalize_terms(terms)
        for expo in clean:
            if len(expo) != dim or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent tuple {expo} for dimension {dim}")
        return cls(dim=dim, terms=clean)

    @classmethod
    def constant(cls, dim: int, value: float = 1.0) -> "Polynomial":
        return cls.from_terms(dim, {(0,) * dim: value})

    @classmethod
    def coordinate(cls, dim: int, axis: int) -> "Polynomial":
        expo = [0] * dim
        expo[axis] = 1
        return cls.from_terms(dim, {tuple(expo): 1.0})

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[1] != self.dim:
            raise DimensionMismatchError(f"points have dimension {x.shape[1]}, expected {self.dim}")
        if not self.terms:
            return np.zeros(x.shape[0])
        max_exp = [max(e[i] for e in self.terms) for i in range(self.dim)]
        pows = [np.power.outer(x[:, i], np.arange(m + 1)) for i, m in enumerate(max_exp)]
        out = np.zeros(x.shape[0])
        for expo, coeff in self.terms.items():
            term = np.full(x.shape[0], coeff)
            for i, e in enumerate(expo):
                if e:
                    term = term * pows[i][:, e]
            out += term
        return out

    def add(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            terms[expo] = terms.get(expo, 0.0) + coeff
        return Polynomial.from_terms(self.dim, terms)

    def scale(self, factor: float) -> "Polynomial":
        return Polynomial.from_terms(self.dim, {e: c * factor for e, c in self.terms.items()})

    def mul(self, other: "Polynomial") -> "Polynomial":
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                terms[expo] = terms.get(expo, 0.0) + c1 * c2
        return Polynomial.from_terms(self.dim, terms)

    def compose_matrix(self, a: np.ndarray) -> "Polynomial":
        """Exact coefficients of x -> q(a x)."""
        rows = [
            Polynomial.from_terms(self.dim, {self._unit(j): a[i, j] for j in range(self.dim)})
            for i in range(self.dim)
        ]
        out = Polynomial.from_terms(self.dim, {})
        for expo, coeff in self.terms.items():
            factor = Polynomial.constant(self.dim, coeff)
            for i, e in enumerate(expo):
                for _ in range(e):
                    factor = factor.mul(rows[i])
            out = out.add(factor)
        return out

    def _unit(self, axis: int) -> tuple:
        expo = [0] * self.dim
        expo[axis] = 1
        return tuple(expo)


def _check_shape(shape, dim: int) -> np.ndarray:
    s = np.array(shape, dtype=float)
    if s.shape != (dim, dim):
        raise DimensionMismatchError(f"shape matrix must be {dim}x{dim}")
    if np.linalg.norm(s - s.T) > 1e-12 * max(1.0, np.linalg.norm(s)):
        raise ValueError("shape matrix must be symmetric")
    s = 0.5 * (s + s.T)
    if np.linalg.eigvalsh(s)[0] <= 0.0:
        raise ValueError("shape matrix must be positive definite")
    return s


@dataclass(frozen=True, eq=False)
class TestFunction:
    """q(x) exp(-x^T S x) with q polynomial and S symmetric positive definite."""

    __test__ = False  # keep pytest from collecting this as a test case

    poly: Polynomial
    shape: np.ndarray

    @classmethod
    def gaussian(cls, shape) -> "TestFunction":
        s = np.atleast_2d(np.asarray(shape, dtype=float))
        return cls.create(Polynomial.constant(s.shape[0]), s)

    @classmethod
    def create(cls, poly: Polynomial, shape) -> "TestFunction":
        s = _check_shape(shape, poly.dim)
        if poly.degree > DEGREE_CAP:
            raise ValueError(f"polynomial degree {poly.degree} exceeds the cap {DEGREE_CAP}")
        return cls(poly=poly, shape=s)

    @property
    def dim(self) -> int:
        return self.poly.dim

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return self.poly(x) * np.exp(-quad_form(self.shape, x))

    def product(self, other: "TestFunction") -> "TestFunction":
        return TestFunction.create(self.poly.mul(other.poly), self.shape + other.shape)

    def combine(self, other: "TestFunction", c1: float = 1.0, c2: float = 1.0) -> "TestFunction":
        """Linear combination; requires both factors to share the Gaussian part."""
        if not np.array_equal(self.shape, other.shape):
            raise ValueError("linear combinations require identical Gaussian factors")
        return TestFunction.create(self.poly.scale(c1).add(other.poly.scale(c2)), self.shape)

    def scale(self, factor: float) -> "TestFunction":
        return TestFunction(poly=self.poly.scale(factor), shape=self.shape)


def compose_linear(f: TestFunction, sym: MatrixSymbol | np.ndarray) -> TestFunction:
    """x -> f(A x), again a Gaussian-polynomial function."""
    a = sym.entries if isinstance(sym, MatrixSymbol) else np.asarray(sym, dtype=float)
    if a.shape != (f.dim, f.dim):
        raise DimensionMismatchError("symbol dimension does not match the function")
    return TestFunction.create(f.poly.compose_matrix(a), a.T @ f.shape @ a)


@dataclass(frozen=True, eq=False)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def create(cls, lo, hi) -> "Box":
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo > hi) or not np.all(np.isfinite(lo) & np.isfinite(hi)):
            raise ValueError("box must have finite lo <= hi")
        return cls(lo=lo, hi=hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    def indicator(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(points)
        return np.all((x >= self.lo) & (x < self.hi), axis=1).astype(float)


@dataclass(frozen=True, eq=False)
class PBall:
    inner: InnerProduct
    radius: float

    @property
    def dim(self) -> int:
        return self.inner.dim

    def indicator(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(points)
        return (self.inner.norm_sq(x) <= self.radius**2).astype(float)


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    """Finite linear combination of indicators of boxes and balls."""

    pieces: tuple  # of (coefficient, Box | PBall)

    @classmethod
    def create(cls, pieces) -> "SimpleFunction":
        items = []
        dims = set()
        for coeff, region in pieces:
            if not np.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            dims.add(region.dim)
            items.append((float(coeff), region))
        if len(dims) > 1:
            raise DimensionMismatchError(f"regions of mixed dimension: {sorted(dims)}")
        return cls(pieces=tuple(items))

    @property
    def dim(self) -> int:
        return self.pieces[0][1].dim if self.pieces else 0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(points)
        out = np.zeros(x.shape[0])
        for coeff, region in self.pieces:
            out += coeff * region.indicator(x)
        return out


def pointwise_eval(f, x) -> float | np.ndarray:
    """Value of a test or simple function at one point or a batch of points."""
    x = np.asarray(x, dtype=float)
    single = x.ndim <= 1
    vals = f(np.atleast_2d(x))
    return float(vals[0]) if single else vals


def in_l2(f: TestFunction, measure: WeightedMeasure) -> bool:
    """Square integrability of f against the measure.

    |f|^2 carries the Gaussian exp(-2 x^T S x); only the direct side of the
    entire weight adds the growing factor exp(|x|_P^2), so membership there
    needs 2S - P positive definite.  All other weight/side combinations put
    at most polynomial growth against the Gaussian.
    """
    if f.dim != measure.dim:
        raise DimensionMismatchError("function and measure dimensions differ")
    if measure.weight.kind is WeightKind.ENTIRE and measure.side is Side.DIRECT:
        m = 2.0 * f.shape - measure.inner.gram
        return bool(np.linalg.eigvalsh(m)[0] > 0.0)
    return True


def require_membership(f: TestFunction, measure: WeightedMeasure, what: str = "function") -> None:
    if not in_l2(f, measure):
        raise MembershipError(f"{what} is not square integrable against the measure")


def gaussian_dictionary(
    dim: int, count: int, anisotropy: float = 0.25, inner: InnerProduct | None = None
) -> list[TestFunction]:
    """Deterministic family of distinct Gaussian test functions.

    Shapes are s * P^{1/2} B P^{1/2} with B mildly anisotropic and scales
    from 0.8 up, so 2S - P stays positive definite and the family lives in
    every space the pipelines use, including the direct side of the entire
    weight in the configured geometry.
    """
    base = np.eye(dim)
    if dim >= 2:
        base[0, 1] = base[1, 0] = anisotropy
    if inner is not None:
        base = inner.factor @ base @ inner.factor
    scales = np.linspace(0.8, 2.0, count) if count > 1 else np.array([1.0])
    return [TestFunction.gaussian(s * base) for s in scales]


def monomial_suite(dim: int, max_degree: int, shape) -> list[TestFunction]:
    """All monomial-times-Gaussian functions up to a total degree."""
    s = np.asarray(shape, dtype=float)
    out = []
    for total in range(max_degree + 1):
        for expo in itertools.product(range(total + 1), repeat=dim):
            if sum(expo) == total:
                out.append(TestFunction.create(Polynomial.from_terms(dim, {expo: 1.0}), s))
    return out

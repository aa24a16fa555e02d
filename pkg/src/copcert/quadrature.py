"""Inner products and norms on the weighted spaces.

Two integration paths.  When the full integrand is polynomial times a
Gaussian exp(-x^T M x) (polynomial weight on the direct side, or the
entire weight merged into the Gaussian), tensorized Gauss-Hermite after
whitening M is exact up to rounding once the order exceeds half the
polynomial degree.  Everything else (reciprocal side of a polynomial
weight) goes through a globally adaptive panel rule on a box chosen so
the Gaussian tail is negligible relative to the integrand's peak.
"""

from __future__ import annotations

import heapq
import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import MembershipError, QuadratureError
from .functions import TestFunction
from .linalg import InnerProduct, quad_form
from .weights import Side, WeightKind, WeightSeries, WeightedMeasure

TENSOR_NODE_CAP = 2_000_000

ADAPTIVE_REL_TOL = 1e-10
ADAPTIVE_MAX_PANELS = 4096

# log of the requested tail-to-peak ratio for box truncation
_TAIL_LOG = -37.0

_PANEL_ORDERS = {1: (10, 20), 2: (8, 16), 3: (6, 12)}


@lru_cache(maxsize=None)
def _hermgauss(order: int):
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    return nodes, weights


@lru_cache(maxsize=None)
def _leggauss(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def _tensor_grid(nodes_1d: np.ndarray, weights_1d: np.ndarray, dim: int):
    idx = np.array(list(itertools.product(range(nodes_1d.size), repeat=dim)))
    pts = nodes_1d[idx]
    wts = np.prod(weights_1d[idx], axis=1)
    return pts, wts


def gaussian_poly_integral(factor, degree: int, gauss: np.ndarray) -> float:
    """Integral of factor(x) exp(-x^T gauss x) over R^k.

    Exact up to rounding when `factor` is a polynomial of total degree at
    most `degree`.  The Gaussian is whitened by its eigendecomposition, so
    the rule order is degree//2 + 1 per axis.
    """
    gauss = np.atleast_2d(gauss)
    dim = gauss.shape[0]
    evals, evecs = np.linalg.eigh(0.5 * (gauss + gauss.T))
    if evals[0] <= 0.0:
        raise MembershipError("Gaussian part of the integrand is not positive definite")
    order = degree // 2 + 1
    if order**dim > TENSOR_NODE_CAP:
        raise QuadratureError(f"tensor rule of order {order} in dimension {dim} is too large")
    nodes, weights = _hermgauss(order)
    pts, wts = _tensor_grid(nodes, weights, dim)
    transform = evecs / np.sqrt(evals)  # maps whitened y to x = Q diag(1/sqrt(lam)) y
    x = pts @ transform.T
    det_scale = float(np.prod(1.0 / np.sqrt(evals)))
    return det_scale * float(wts @ factor(x))


def _envelope_box(gauss: np.ndarray, degree: int) -> float:
    """Half-width R so that r^degree exp(-lam_min r^2) at r=R is exp(-37) below its peak."""
    lam = float(np.linalg.eigvalsh(np.atleast_2d(gauss))[0])
    if lam <= 0.0:
        raise QuadratureError("adaptive integrand lacks Gaussian decay")
    if degree <= 0:
        return math.sqrt(-_TAIL_LOG / lam)
    r_peak = math.sqrt(degree / (2.0 * lam))
    g_peak = degree * math.log(max(r_peak, 1e-300)) - lam * r_peak**2
    r = r_peak + 1.0
    while degree * math.log(r) - lam * r * r > g_peak + _TAIL_LOG:
        r *= 1.25
    return r


def _panel_value(fn, lo: np.ndarray, hi: np.ndarray, order: int) -> float:
    dim = lo.size
    nodes, weights = _leggauss(order)
    pts, wts = _tensor_grid(nodes, weights, dim)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid + pts * half
    return float(np.prod(half)) * float(wts @ fn(x))


def adaptive_integral(
    fn,
    dim: int,
    gauss: np.ndarray | None = None,
    degree: int = 0,
    box: float | None = None,
    rel_tol: float = ADAPTIVE_REL_TOL,
    max_panels: int = ADAPTIVE_MAX_PANELS,
) -> float:
    """Globally adaptive integral of fn over R^dim (or [-box, box]^dim).

    Panels of the truncation box are split dyadically, worst error first,
    until the summed panel-error estimate drops below rel_tol relative to
    the accumulated value.  The integrand must be piecewise smooth with
    discontinuities, if any, aligned to dyadic panel boundaries; the
    two-order error estimate is blind across interior jumps.
    """
    if box is None:
        box = _envelope_box(gauss, degree)
    lo0 = np.full(dim, -box)
    hi0 = np.full(dim, box)
    low_order, high_order = _PANEL_ORDERS.get(dim, (4, 8))

    def make_panel(lo, hi):
        coarse = _panel_value(fn, lo, hi, low_order)
        fine = _panel_value(fn, lo, hi, high_order)
        return abs(fine - coarse), fine, lo, hi

    heap = []
    counter = itertools.count()
    # start from one dyadic split per axis
    mids = 0.5 * (lo0 + hi0)
    for corner in itertools.product((0, 1), repeat=dim):
        lo = np.where(np.array(corner) == 0, lo0, mids)
        hi = np.where(np.array(corner) == 0, mids, hi0)
        err, val, plo, phi = make_panel(lo, hi)
        heapq.heappush(heap, (-err, next(counter), val, plo, phi))
    while True:
        total = sum(item[2] for item in heap)
        err_total = sum(-item[0] for item in heap)
        scale = max(abs(total), 1e-3 * sum(abs(item[2]) for item in heap), 1e-300)
        if err_total <= rel_tol * scale:
            return total
        if len(heap) + 2**dim - 1 > max_panels:
            raise QuadratureError(
                f"adaptive rule did not reach rel_tol={rel_tol:g} within {max_panels} panels "
                f"(error estimate {err_total / scale:.2e} relative)"
            )
        _, _, _, plo, phi = heapq.heappop(heap)
        pmid = 0.5 * (plo + phi)
        for corner in itertools.product((0, 1), repeat=dim):
            lo = np.where(np.array(corner) == 0, plo, pmid)
            hi = np.where(np.array(corner) == 0, pmid, phi)
            err, val, qlo, qhi = make_panel(lo, hi)
            heapq.heappush(heap, (-err, next(counter), val, qlo, qhi))


def _poly_weight_values(coeffs: np.ndarray, inner: InnerProduct, x: np.ndarray) -> np.ndarray:
    return np.polynomial.polynomial.polyval(quad_form(inner.gram, x), coeffs)


def inner_product(f: TestFunction, g: TestFunction, measure: WeightedMeasure) -> float:
    """L2 inner product of two test functions against the weighted measure."""
    if f.dim != g.dim or f.dim != measure.dim:
        raise MembershipError("dimension mismatch between functions and measure")
    inner = measure.inner
    weight = measure.weight
    gauss = f.shape + g.shape

    if weight.kind is WeightKind.ENTIRE:
        merged = gauss - inner.gram if measure.side is Side.DIRECT else gauss + inner.gram
        if np.linalg.eigvalsh(merged)[0] <= 0.0:
            raise MembershipError("product has no Gaussian decay against the entire weight")
        factor = lambda x: f.poly(x) * g.poly(x)
        return gaussian_poly_integral(factor, f.poly.degree + g.poly.degree, merged)

    coeffs = weight.coeffs
    if measure.side is Side.DIRECT:
        factor = lambda x: f.poly(x) * g.poly(x) * _poly_weight_values(coeffs, inner, x)
        degree = f.poly.degree + g.poly.degree + 2 * weight.degree
        return gaussian_poly_integral(factor, degree, gauss)

    def fn(x):
        return f(x) * g(x) / _poly_weight_values(coeffs, inner, x)

    return adaptive_integral(fn, f.dim, gauss=gauss, degree=f.poly.degree + g.poly.degree)


def adaptive_inner_product(u, v, measure: WeightedMeasure, gauss: np.ndarray, degree: int) -> float:
    """Adaptive <u, v> for general evaluables; polynomial weights only.

    `gauss` must bound the joint Gaussian decay of u*v and `degree` their
    polynomial growth (including the weight's own polynomial factor).
    """
    if measure.weight.kind is not WeightKind.POLYNOMIAL:
        raise QuadratureError(
            "adaptive inner products are limited to polynomial weights; "
            "entire-weight integrands merge into the exact path"
        )

    def fn(x):
        return u(x) * v(x) * measure.density(x)

    return adaptive_integral(fn, measure.dim, gauss=gauss, degree=degree)


def norm_sq(f: TestFunction, measure: WeightedMeasure) -> float:
    return inner_product(f, f, measure)


def norm(f: TestFunction, measure: WeightedMeasure) -> float:
    return math.sqrt(max(norm_sq(f, measure), 0.0))


def tower_norms(f: TestFunction, gamma: WeightSeries, kmax: int, inner: InnerProduct) -> np.ndarray:
    """Norms of f against the truncated-weight measures, k = 0..kmax.

    Each truncation gives a polynomial weight, so every entry uses the
    exact Gauss-Hermite path.  The k = 0 entry is the plain a_0-scaled
    Lebesgue norm; admissibility of the truncation as a weight in its own
    right is irrelevant for the norm values.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    if gamma.kind is WeightKind.ENTIRE:
        if np.linalg.eigvalsh(2.0 * f.shape - inner.gram)[0] <= 0.0:
            raise MembershipError("function is not square integrable against the entire weight")
    gauss = 2.0 * f.shape
    out = np.empty(kmax + 1)
    for k in range(kmax + 1):
        coeffs = gamma.truncated_coeffs(k)
        factor = lambda x: f.poly(x) ** 2 * _poly_weight_values(coeffs, inner, x)
        val = gaussian_poly_integral(factor, 2 * f.poly.degree + 2 * k, gauss)
        out[k] = math.sqrt(max(val, 0.0))
    return out

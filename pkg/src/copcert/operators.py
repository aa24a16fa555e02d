"""The composition operator f -> f o A, its adjoint, and derived quantities.

The adjoint acts as multiplication by the pushforward density followed by
composition with A^{-1}; its n-th power telescopes to the single density
of A^n, which is how `adjoint_apply_power` avoids compounding quadrature
error.  Moment ladders ||C^n f||^2 and the block quadratic form of the
Bram positivity test are assembled on top of the exact integration path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MembershipError
from .functions import TestFunction, compose_linear, require_membership
from .linalg import MatrixSymbol, quad_form
from .quadrature import adaptive_integral, gaussian_poly_integral, inner_product, norm_sq
from .weights import Side, WeightKind, WeightedMeasure, density_h


@dataclass(frozen=True, eq=False)
class CompositionOperator:
    """Composition operator with an invertible matrix symbol on a weighted space."""

    symbol: MatrixSymbol
    space: WeightedMeasure

    def __post_init__(self):
        if self.symbol.dim != self.space.dim:
            raise MembershipError("symbol and space dimensions differ")

    @property
    def dim(self) -> int:
        return self.space.dim

    def inverted(self) -> "CompositionOperator":
        return CompositionOperator(symbol=self.symbol.inverted(), space=self.space)


def power_symbol(sym: MatrixSymbol, n: int) -> MatrixSymbol:
    """A^n as a symbol, for any integer n."""
    return MatrixSymbol(entries=sym.power(n), inverse=sym.power(-n), absdet=sym.absdet ** float(n))


def apply(op: CompositionOperator, f: TestFunction) -> TestFunction:
    """f o A, with membership in the space re-checked."""
    g = compose_linear(f, op.symbol)
    require_membership(g, op.space, "composed function")
    return g


@dataclass(frozen=True, eq=False)
class WeightedCompositionOperator:
    """f -> w (f o A) with a Gaussian-polynomial multiplier w.

    Dense definiteness needs (|w|^2 o A^{-1}) h_A finite almost everywhere;
    construction samples that quantity and rejects non-finite values.  The
    graph norm of the operator is the L2 norm against (1 + J) times the
    space density, with J the sampled quantity.
    """

    symbol: MatrixSymbol
    multiplier: TestFunction
    space: WeightedMeasure

    @classmethod
    def create(
        cls,
        symbol: MatrixSymbol,
        multiplier: TestFunction,
        space: WeightedMeasure,
        samples: int = 256,
        seed: int = 0,
    ) -> "WeightedCompositionOperator":
        op = cls(symbol=symbol, multiplier=multiplier, space=space)
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(samples, space.dim))
        if not np.all(np.isfinite(op.graph_density(pts))):
            raise MembershipError(
                "weighted composition operator is not densely defined: "
                "the sampled graph density is not finite"
            )
        return op

    def graph_density(self, points: np.ndarray) -> np.ndarray:
        """J = (|w|^2 o A^{-1}) h_A evaluated row-wise."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        w_vals = self.multiplier(x @ self.symbol.inverse.T)
        with np.errstate(invalid="ignore"):
            return w_vals**2 * density_h(self.space, self.symbol, x)


def weighted_apply(op: WeightedCompositionOperator, f: TestFunction) -> TestFunction:
    """w (f o A), which stays in the Gaussian-polynomial family."""
    g = op.multiplier.product(compose_linear(f, op.symbol))
    require_membership(g, op.space, "weighted composed function")
    return g


@dataclass(frozen=True, eq=False)
class AdjointPowerImage:
    """Closed form of the n-th adjoint power applied to f.

    Evaluates |det A|^{-n} rho(A^{-n}x)/rho(x) f(A^{-n}x), with rho the
    space density; the density ratio is exactly the pushforward density
    of the symbol A^n.
    """

    op: CompositionOperator
    f: TestFunction
    n: int
    power: MatrixSymbol

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return density_h(self.op.space, self.power, x) * self.f(x @ self.power.inverse.T)


def adjoint_apply_power(op: CompositionOperator, f: TestFunction, n: int) -> AdjointPowerImage:
    if n < 0:
        raise ValueError("adjoint power must be nonnegative")
    return AdjointPowerImage(op=op, f=f, n=n, power=power_symbol(op.symbol, n))


@dataclass(frozen=True, eq=False)
class UnitaryImage:
    """Image of f under the division-by-weight isometry onto the direct space."""

    f: TestFunction
    space: WeightedMeasure  # reciprocal-side space the function comes from

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        weight, inner = self.space.weight, self.space.inner
        if weight.kind is WeightKind.ENTIRE:
            expo = quad_form(self.f.shape, x) + inner.norm_sq(x)
            return self.f.poly(x) * np.exp(-expo)
        return self.f(x) / weight.eval(inner.norm_sq(x))


def unitary_map(f: TestFunction, space: WeightedMeasure) -> UnitaryImage:
    """The isometry from the reciprocal space to the direct one: f -> f / gamma(|.|^2)."""
    if space.side is not Side.RECIPROCAL:
        raise ValueError("the unitary map starts from the reciprocal-side space")
    return UnitaryImage(f=f, space=space)


@dataclass(frozen=True, eq=False)
class ComposedEvaluable:
    """g o B for an arbitrary evaluable g and a fixed matrix B."""

    g: object
    matrix: np.ndarray

    def __call__(self, points: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        return self.g(x @ self.matrix.T)


@dataclass(frozen=True, eq=False)
class MomentLadder:
    """||C^n f||^2 for n = 0..count, possibly cut short by a domain failure."""

    values: np.ndarray
    failed_at: int | None

    @property
    def complete(self) -> bool:
        return self.failed_at is None


def moment_sequence(op: CompositionOperator, f: TestFunction, count: int) -> MomentLadder:
    """Squared norms of the iterates C^n f, n = 0..count.

    An iterate leaving the space truncates the ladder and records the first
    failing power; for unbounded operators that is informative rather than
    an error.
    """
    values = []
    g = f
    for n in range(count + 1):
        try:
            require_membership(g, op.space)
        except MembershipError:
            return MomentLadder(values=np.asarray(values), failed_at=n)
        values.append(norm_sq(g, op.space))
        if n < count:
            g = compose_linear(g, op.symbol)
    return MomentLadder(values=np.asarray(values), failed_at=None)


def gram_block_matrix(op: CompositionOperator, dictionary, maxpow: int) -> np.ndarray:
    """Block quadratic form of the Bram positivity test over a dictionary span.

    With images psi_{p,d} = C^p phi_d, the returned matrix K has
    K[(p,d),(q,e)] = <C^q phi_d, C^p phi_e>, so that for functions
    f_j = sum_d c_{j,d} phi_d the form sum_{i,j} <C^i f_j, C^j f_i> equals
    the K-quadratic form in the stacked coefficient vector.  All images
    must lie in the space.
    """
    if maxpow < 0:
        raise ValueError("maxpow must be nonnegative")
    images = []
    current = list(dictionary)
    for p in range(maxpow + 1):
        if p > 0:
            current = [compose_linear(g, op.symbol) for g in current]
        for d, g in enumerate(current):
            if not_in := not_in_space(g, op.space):
                raise MembershipError(
                    f"dictionary image C^{p} phi_{d} left the space: {not_in}"
                )
        images.append(list(current))
    D = len(images[0])
    P = maxpow + 1
    gram = np.empty((P, D, P, D))
    for p in range(P):
        for q in range(p, P):
            for d in range(D):
                for e in range(D):
                    if q == p and e < d:
                        gram[p, d, q, e] = gram[p, e, q, d]
                        continue
                    val = inner_product(images[p][d], images[q][e], op.space)
                    gram[p, d, q, e] = val
                    gram[q, e, p, d] = val
    bram = gram.transpose(2, 1, 0, 3).reshape(P * D, P * D)
    return 0.5 * (bram + bram.T)


def not_in_space(f: TestFunction, space: WeightedMeasure) -> str | None:
    try:
        require_membership(f, space)
        return None
    except MembershipError as exc:
        return str(exc)


def _merged_adjoint_gaussian(op: CompositionOperator, f: TestFunction, b: np.ndarray) -> np.ndarray:
    """Gaussian matrix of |(C*)^n f|^2 rho for the entire weight, B = A^{-n}."""
    p = op.space.inner.gram
    s_part = 2.0 * b.T @ f.shape @ b
    if op.space.side is Side.DIRECT:
        return s_part + p - 2.0 * b.T @ p @ b
    return s_part + 2.0 * b.T @ p @ b - p


def adjoint_moment_norm_sq(op: CompositionOperator, f: TestFunction, n: int) -> float:
    """||(C*)^n f||^2 computed from the telescoped closed form.

    Entire weights merge into a single Gaussian and use the exact path
    (positive definiteness of the merged matrix is exactly the domain
    condition); polynomial weights go through the adaptive rule.
    """
    power = power_symbol(op.symbol, n)
    b = power.inverse
    weight = op.space.weight
    if weight.kind is WeightKind.ENTIRE:
        merged = _merged_adjoint_gaussian(op, f, b)
        if np.linalg.eigvalsh(merged)[0] <= 0.0:
            raise MembershipError(f"f is outside the domain of the adjoint power n={n}")
        factor = lambda x: f.poly(x @ b.T) ** 2
        val = gaussian_poly_integral(factor, 2 * f.poly.degree, merged)
        return val / power.absdet**2

    image = adjoint_apply_power(op, f, n)

    def fn(x):
        return image(x) ** 2 * op.space.density(x)

    gauss = 2.0 * b.T @ f.shape @ b
    degree = 2 * f.poly.degree + 2 * weight.degree
    return adaptive_integral(fn, op.dim, gauss=gauss, degree=degree)


def unitary_route_moment_norm_sq(op: CompositionOperator, f: TestFunction, n: int) -> float:
    """The same adjoint moment via the unitary equivalence with the inverted symbol.

    Computes |det A|^{-2n} ||(Uf) o A^{-n}||^2 on the direct-side space, a
    numerically independent assembly of the same quantity.
    """
    if op.space.side is not Side.RECIPROCAL:
        raise ValueError("the unitary route applies to reciprocal-side operators")
    power = power_symbol(op.symbol, n)
    b = power.inverse
    weight, inner = op.space.weight, op.space.inner
    scale = power.absdet ** -2.0
    if weight.kind is WeightKind.ENTIRE:
        merged = 2.0 * b.T @ (f.shape + inner.gram) @ b - inner.gram
        if np.linalg.eigvalsh(merged)[0] <= 0.0:
            raise MembershipError(f"unitary image leaves the direct space at power n={n}")
        factor = lambda x: f.poly(x @ b.T) ** 2
        return scale * gaussian_poly_integral(factor, 2 * f.poly.degree, merged)

    composed = ComposedEvaluable(g=unitary_map(f, op.space), matrix=b)

    def fn(x):
        return composed(x) ** 2 * weight.eval(inner.norm_sq(x))

    gauss = 2.0 * b.T @ f.shape @ b
    degree = 2 * f.poly.degree + 2 * weight.degree
    return scale * adaptive_integral(fn, op.dim, gauss=gauss, degree=degree)


def adjoint_inner_product(op: CompositionOperator, f: TestFunction, g: TestFunction) -> float:
    """<C* f, g> through the closed-form adjoint and the adaptive rule.

    Deliberately does not reuse the change-of-variables identity with
    <f, C g>, so the two sides of the duality check are independent.
    """
    if op.space.weight.kind is not WeightKind.POLYNOMIAL:
        raise MembershipError("the adaptive duality route supports polynomial weights only")
    image = adjoint_apply_power(op, f, 1)

    def fn(x):
        return image(x) * g(x) * op.space.density(x)

    a_inv = op.symbol.inverse
    gauss = a_inv.T @ f.shape @ a_inv + g.shape
    degree = f.poly.degree + g.poly.degree + 2 * op.space.weight.degree
    return adaptive_integral(fn, op.dim, gauss=gauss, degree=degree)

"""Inner-product geometry and invertible matrix symbols on R^kappa.

The norm is the one induced by a symmetric positive-definite Gram matrix
P: |x|_P^2 = x^T P x.  Adjoints, normality and operator norms of a symbol
A are all taken with respect to this geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SingularMatrixError

MAX_DIM = 8

DEFAULT_NORMALITY_TOL = 1e-10


def _as_square(mat, name: str) -> np.ndarray:
    a = np.array(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[0] > MAX_DIM:
        raise DimensionMismatchError(
            f"{name} must be k x k with 1 <= k <= {MAX_DIM}, got k={a.shape[0]}"
        )
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def quad_form(m: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate x^T m x for each row x of `points` (shape (n, k))."""
    return np.einsum("ni,ij,nj->n", points, m, points)


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Symmetric positive-definite Gram matrix with cached square roots."""

    gram: np.ndarray
    factor: np.ndarray      # symmetric PD square root of gram
    factor_inv: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_matrix(cls, gram) -> "InnerProduct":
        p = _as_square(gram, "inner product")
        scale = np.linalg.norm(p)
        if np.linalg.norm(p - p.T) > 1e-14 * max(scale, 1.0):
            raise ValueError("inner product matrix is not symmetric")
        p = 0.5 * (p + p.T)
        evals, evecs = np.linalg.eigh(p)
        if evals[0] <= 0.0:
            raise ValueError(f"inner product is not positive definite (min eig {evals[0]:g})")
        root = (evecs * np.sqrt(evals)) @ evecs.T
        root_inv = (evecs / np.sqrt(evals)) @ evecs.T
        inv = (evecs / evals) @ evecs.T
        if np.linalg.norm(root @ root - p) > 1e-12 * scale:
            raise ValueError("square-root factorization failed the consistency check")
        return cls(gram=p, factor=root, factor_inv=root_inv, inverse=inv)

    @classmethod
    def identity(cls, dim: int) -> "InnerProduct":
        return cls.from_matrix(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def dot(self, x, y) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))

    def norm_sq(self, points: np.ndarray) -> np.ndarray:
        """|x|_P^2 row-wise for points of shape (n, k)."""
        return quad_form(self.gram, np.atleast_2d(points))


@dataclass(frozen=True, eq=False)
class MatrixSymbol:
    """Invertible matrix with cached inverse and determinant modulus."""

    entries: np.ndarray
    inverse: np.ndarray
    absdet: float

    @classmethod
    def from_matrix(cls, entries) -> "MatrixSymbol":
        a = _as_square(entries, "symbol matrix")
        k = a.shape[0]
        absdet = abs(float(np.linalg.det(a)))
        scale = float(np.linalg.norm(a, 2))
        if absdet < 1e-12 * max(scale, 1e-300) ** k:
            raise SingularMatrixError(
                "symbol matrix is singular or nearly so; the composition operator "
                "is well defined only for invertible symbols"
            )
        inv = np.linalg.inv(a)
        if np.linalg.norm(a @ inv - np.eye(k)) > 1e-12 * max(1.0, scale * np.linalg.norm(inv, 2)):
            raise SingularMatrixError("inverse failed the round-trip check; matrix too ill-conditioned")
        return cls(entries=a, inverse=inv, absdet=absdet)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def inverted(self) -> "MatrixSymbol":
        return MatrixSymbol(entries=self.inverse, inverse=self.entries, absdet=1.0 / self.absdet)

    def compose(self, other: "MatrixSymbol") -> "MatrixSymbol":
        """Matrix product self @ other as a new symbol."""
        _check_dims(self, other)
        return MatrixSymbol(
            entries=self.entries @ other.entries,
            inverse=other.inverse @ self.inverse,
            absdet=self.absdet * other.absdet,
        )

    def power(self, n: int) -> np.ndarray:
        """A^n for any integer n (negative powers use the cached inverse)."""
        if n >= 0:
            return np.linalg.matrix_power(self.entries, n)
        return np.linalg.matrix_power(self.inverse, -n)


def _check_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def p_adjoint(sym: MatrixSymbol, inner: InnerProduct) -> np.ndarray:
    """Adjoint of A with respect to <.,.>_P, i.e. P^{-1} A^T P.

    Satisfies <Ax, y>_P = <x, p_adjoint(A) y>_P for all x, y.
    """
    _check_dims(sym, inner)
    return inner.inverse @ sym.entries.T @ inner.gram


def is_normal(sym: MatrixSymbol, inner: InnerProduct, tol: float = DEFAULT_NORMALITY_TOL) -> bool:
    """Whether A commutes with its P-adjoint, up to tol * ||A||_F^2."""
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    _check_dims(sym, inner)
    a = sym.entries
    astar = p_adjoint(sym, inner)
    comm = a @ astar - astar @ a
    return float(np.linalg.norm(comm)) <= tol * float(np.linalg.norm(a)) ** 2


def op_norm(sym: MatrixSymbol, inner: InnerProduct) -> float:
    """Operator norm sup |Ax|_P / |x|_P, the top singular value of P^{1/2} A P^{-1/2}."""
    _check_dims(sym, inner)
    return float(np.linalg.norm(inner.factor @ sym.entries @ inner.factor_inv, 2))


def extremal_direction(sym: MatrixSymbol, inner: InnerProduct, smallest: bool = False) -> np.ndarray:
    """Unit vector u (|u|_P = 1) maximizing |Au|_P, or minimizing it if `smallest`."""
    _check_dims(sym, inner)
    b = inner.factor @ sym.entries @ inner.factor_inv
    _, _, vt = np.linalg.svd(b)
    v = vt[-1] if smallest else vt[0]
    return inner.factor_inv @ v

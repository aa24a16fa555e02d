"""Tests for the Gaussian-polynomial function algebra."""

import math

import numpy as np
import pytest

from copcert.errors import DimensionMismatchError
from copcert.functions import (
    Box,
    PBall,
    Polynomial,
    SimpleFunction,
    TestFunction,
    compose_linear,
    in_l2,
    pointwise_eval,
)
from copcert.linalg import InnerProduct, MatrixSymbol
from copcert.weights import Side, WeightSeries, WeightedMeasure


def gauss1(scale=1.0):
    return TestFunction.gaussian([[scale]])


class TestPolynomial:
    def test_eval_matches_direct_sum(self):
        q = Polynomial.from_terms(2, {(0, 0): 1.0, (2, 1): 3.0})
        x = np.array([[1.0, 2.0], [0.5, -1.0]])
        expected = 1.0 + 3.0 * x[:, 0] ** 2 * x[:, 1]
        assert np.allclose(q(x), expected)

    def test_mul_degree_adds(self):
        q = Polynomial.from_terms(1, {(2,): 1.0})
        r = Polynomial.from_terms(1, {(3,): 2.0})
        assert q.mul(r).degree == 5

    def test_compose_matrix_exact(self):
        # q(x, y) = x y composed with a generic matrix, checked coefficientwise
        q = Polynomial.from_terms(2, {(1, 1): 1.0})
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        composed = q.compose_matrix(a)
        # (x + 2y)(3x + 4y) = 3x^2 + 10xy + 8y^2
        assert composed.terms == {(2, 0): 3.0, (1, 1): 10.0, (0, 2): 8.0}


class TestComposeLinear:
    def test_identity_fixes_function(self):
        f = TestFunction.create(Polynomial.from_terms(1, {(1,): 2.0}), [[1.0]])
        g = compose_linear(f, MatrixSymbol.from_matrix([[1.0]]))
        assert g.poly.terms == f.poly.terms
        assert np.allclose(g.shape, f.shape)

    def test_gaussian_doubling(self):
        g = compose_linear(gauss1(), MatrixSymbol.from_matrix([[2.0]]))
        assert np.allclose(g.shape, [[4.0]])
        x = np.array([0.7])
        assert abs(pointwise_eval(g, x) - math.exp(-4 * 0.49)) < 1e-15

    def test_linear_times_gaussian(self):
        # x exp(-x^2) composed with tripling: 3x exp(-9x^2)
        f = TestFunction.create(Polynomial.coordinate(1, 0), [[1.0]])
        g = compose_linear(f, MatrixSymbol.from_matrix([[3.0]]))
        assert g.poly.terms == {(1,): 3.0}
        assert np.allclose(g.shape, [[9.0]])

    def test_composition_associates(self):
        rng = np.random.default_rng(11)
        q = Polynomial.from_terms(2, {(0, 0): 0.5, (1, 0): 1.0, (1, 1): -2.0})
        f = TestFunction.create(q, [[1.0, 0.2], [0.2, 1.5]])
        for _ in range(10):
            a = MatrixSymbol.from_matrix(rng.normal(size=(2, 2)) + 2 * np.eye(2))
            b = MatrixSymbol.from_matrix(rng.normal(size=(2, 2)) + 2 * np.eye(2))
            two_step = compose_linear(compose_linear(f, a), b)
            # (f o A) o B = f o (A B)
            one_step = compose_linear(f, a.compose(b))
            x = rng.normal(size=(100, 2))
            assert np.allclose(two_step(x), one_step(x), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            compose_linear(gauss1(), MatrixSymbol.from_matrix(np.eye(2)))


class TestPointwiseEval:
    def test_gaussian_at_origin(self):
        assert pointwise_eval(gauss1(), np.zeros(1)) == 1.0

    def test_ball_indicator_outside(self):
        ball = PBall(inner=InnerProduct.identity(2), radius=1.0)
        s = SimpleFunction.create([(1.0, ball)])
        assert pointwise_eval(s, np.array([2.0, 0.0])) == 0.0
        assert pointwise_eval(s, np.array([0.3, 0.4])) == 1.0

    def test_quadratic_times_gaussian(self):
        q = Polynomial.from_terms(1, {(0,): 1.0, (2,): 1.0})
        f = TestFunction.create(q, [[1.0]])
        assert abs(pointwise_eval(f, np.array([1.0])) - 2.0 / math.e) < 1e-15

    def test_box_half_open(self):
        s = SimpleFunction.create([(2.0, Box.create([0.0], [1.0]))])
        assert pointwise_eval(s, np.array([0.0])) == 2.0
        assert pointwise_eval(s, np.array([1.0])) == 0.0


class TestAlgebraClosure:
    def test_product_stays_in_family(self):
        f = TestFunction.create(Polynomial.coordinate(1, 0), [[1.0]])
        g = gauss1(2.0)
        prod = f.product(g)
        x = np.linspace(-1, 1, 9)[:, None]
        assert np.allclose(prod(x), f(x) * g(x), atol=1e-15)

    def test_combination_requires_same_shape(self):
        with pytest.raises(ValueError):
            gauss1(1.0).combine(gauss1(2.0))
        h = gauss1(1.0).combine(gauss1(1.0), 2.0, -0.5)
        assert h.poly.terms == {(0,): 1.5}

    def test_degree_cap_enforced(self):
        q = Polynomial.from_terms(1, {(7,): 1.0})
        f = TestFunction.create(q, [[1.0]])
        with pytest.raises(ValueError):
            f.product(f)


class TestMembership:
    def test_exp_direct_needs_sharp_gaussian(self):
        m = WeightedMeasure(
            weight=WeightSeries.exp(), side=Side.DIRECT, inner=InnerProduct.identity(1)
        )
        assert in_l2(gauss1(1.0), m)          # 2S - P = 1 > 0
        assert not in_l2(gauss1(0.25), m)     # 2S - P = -1/2 < 0

    def test_polynomial_weight_admits_all(self):
        m = WeightedMeasure(
            weight=WeightSeries.polynomial([1.0, 1.0]),
            side=Side.DIRECT,
            inner=InnerProduct.identity(1),
        )
        assert in_l2(gauss1(0.05), m)

    def test_exp_reciprocal_admits_all(self):
        m = WeightedMeasure(
            weight=WeightSeries.exp(), side=Side.RECIPROCAL, inner=InnerProduct.identity(1)
        )
        assert in_l2(gauss1(0.05), m)

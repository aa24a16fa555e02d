"""Tests for weights, measures, the pushforward density, and classification."""

import math

import numpy as np
import pytest

from copcert.errors import WeightClassError, ZeroDensityError
from copcert.linalg import InnerProduct, MatrixSymbol, op_norm
from copcert.weights import (
    Side,
    WeightKind,
    WeightSeries,
    WeightedMeasure,
    classify_boundedness,
    density_h,
    truncate,
)


def measure_1d(weight, side=Side.DIRECT):
    return WeightedMeasure(weight=weight, side=side, inner=InnerProduct.identity(1))


class TestWeightSeries:
    def test_exp_values(self):
        g = WeightSeries.exp()
        assert g.eval(0.0) == 1.0
        assert abs(g.eval(1.0) - math.e) < 1e-15

    def test_polynomial_value(self):
        g = WeightSeries.polynomial([1.0, 1.0])
        assert g.eval(3.0) == 4.0

    def test_vectorized_eval(self):
        g = WeightSeries.polynomial([0.0, 0.0, 2.0])
        assert np.allclose(g.eval(np.array([0.0, 1.0, 2.0])), [0.0, 2.0, 8.0])

    def test_exp_radius_guard(self):
        with pytest.raises(ValueError):
            WeightSeries.exp(radius=10.0).eval(11.0)

    def test_rejects_negative_coefficients(self):
        with pytest.raises(WeightClassError):
            WeightSeries.polynomial([1.0, -0.5])

    def test_rejects_constant(self):
        with pytest.raises(WeightClassError):
            WeightSeries.polynomial([2.0])

    def test_low_index(self):
        assert WeightSeries.polynomial([0.0, 0.0, 1.0]).low_index == 2
        assert WeightSeries.polynomial([1.0, 1.0]).low_index == 0


class TestTruncate:
    def test_exp_truncation_is_partial_sum(self):
        g1 = truncate(WeightSeries.exp(), 1)
        assert g1.kind is WeightKind.POLYNOMIAL
        assert np.allclose(g1.coeffs, [1.0, 1.0])
        g3 = truncate(WeightSeries.exp(), 3)
        assert np.allclose(g3.coeffs, [1.0, 1.0, 0.5, 1.0 / 6.0])

    def test_exp_at_zero_rejected(self):
        with pytest.raises(WeightClassError):
            truncate(WeightSeries.exp(), 0)

    def test_truncation_losing_admissibility_rejected(self):
        with pytest.raises(WeightClassError):
            truncate(WeightSeries.polynomial([1.0, 0.0, 2.0]), 1)


class TestDensityH:
    def test_identity_symbol(self):
        m = measure_1d(WeightSeries.polynomial([1.0, 1.0]))
        a = MatrixSymbol.from_matrix([[1.0]])
        x = np.linspace(-3, 3, 7)[:, None]
        assert np.allclose(density_h(m, a, x), 1.0)

    def test_doubling_on_linear_weight(self):
        # h(x) = (1/2)(1 + x^2/4)/(1 + x^2)
        m = measure_1d(WeightSeries.polynomial([1.0, 1.0]))
        a = MatrixSymbol.from_matrix([[2.0]])
        assert abs(density_h(m, a, np.array([[0.0]]))[0] - 0.5) < 1e-15
        x = np.array([[1.7]])
        expected = 0.5 * (1 + 1.7**2 / 4) / (1 + 1.7**2)
        assert abs(density_h(m, a, x)[0] - expected) < 1e-15

    def test_contraction_on_exp_weight_unbounded(self):
        # h(x) = 2 exp(3 x^2)
        m = measure_1d(WeightSeries.exp())
        a = MatrixSymbol.from_matrix([[0.5]])
        for x in (0.0, 0.9, 2.3):
            got = density_h(m, a, np.array([[x]]))[0]
            assert abs(got - 2.0 * math.exp(3.0 * x * x)) < 1e-12 * got

    def test_origin_rejected_when_a0_zero(self):
        m = measure_1d(WeightSeries.polynomial([0.0, 1.0]))
        a = MatrixSymbol.from_matrix([[2.0]])
        with pytest.raises(ZeroDensityError):
            density_h(m, a, np.array([[0.0]]))

    def test_cocycle_identity(self):
        rng = np.random.default_rng(7)
        q = rng.normal(size=(2, 2))
        inner = InnerProduct.from_matrix(q @ q.T + 2 * np.eye(2))
        for weight in (WeightSeries.exp(), WeightSeries.polynomial([1.0, 0.5, 0.25])):
            for side in Side:
                m = WeightedMeasure(weight=weight, side=side, inner=inner)
                for _ in range(20):
                    a = MatrixSymbol.from_matrix(rng.normal(size=(2, 2)) + 2 * np.eye(2))
                    b = MatrixSymbol.from_matrix(rng.normal(size=(2, 2)) + 2 * np.eye(2))
                    x = rng.normal(size=(5, 2))
                    lhs = density_h(m, a.compose(b), x)
                    rhs = density_h(m, a, x) * density_h(m, b, x @ a.inverse.T)
                    assert np.allclose(lhs, rhs, rtol=1e-10)

    def test_direct_reciprocal_product(self):
        rng = np.random.default_rng(8)
        inner = InnerProduct.identity(2)
        weight = WeightSeries.polynomial([1.0, 2.0, 1.0])
        md = WeightedMeasure(weight=weight, side=Side.DIRECT, inner=inner)
        mr = WeightedMeasure(weight=weight, side=Side.RECIPROCAL, inner=inner)
        for _ in range(20):
            a = MatrixSymbol.from_matrix(rng.normal(size=(2, 2)) + 2 * np.eye(2))
            x = rng.normal(size=(10, 2))
            prod = density_h(md, a, x) * density_h(mr, a, x)
            assert np.allclose(prod, 1.0 / a.absdet**2, rtol=1e-12)


class TestClassifyBoundedness:
    def test_linear_weight_doubling(self):
        m = measure_1d(WeightSeries.polynomial([1.0, 1.0]))
        a = MatrixSymbol.from_matrix([[2.0]])
        rep = classify_boundedness(m, a)
        assert rep.verdict == "BOUNDED"
        assert abs(rep.norm - math.sqrt(0.5)) < 1e-12
        assert rep.densely_defined

    def test_exp_direct_expanding_inverse_unbounded(self):
        m = WeightedMeasure(
            weight=WeightSeries.exp(), side=Side.DIRECT, inner=InnerProduct.identity(2)
        )
        a = MatrixSymbol.from_matrix(0.5 * np.eye(2))
        assert abs(op_norm(a.inverted(), m.inner) - 2.0) < 1e-14
        rep = classify_boundedness(m, a)
        assert rep.verdict == "UNBOUNDED"
        logs = [v for _, v in rep.divergence_log]
        assert all(b > a_ for a_, b in zip(logs, logs[1:]))

    def test_exp_reciprocal_contraction_bounded(self):
        m = WeightedMeasure(
            weight=WeightSeries.exp(), side=Side.RECIPROCAL, inner=InnerProduct.identity(2)
        )
        a = MatrixSymbol.from_matrix(0.5 * np.eye(2))
        rep = classify_boundedness(m, a)
        assert rep.verdict == "BOUNDED"
        assert abs(rep.sup_density - 4.0) < 1e-12  # 1/|det A|

    def test_bounded_sup_dominates_samples(self):
        rng = np.random.default_rng(9)
        m = measure_1d(WeightSeries.polynomial([1.0, 1.0]))
        a = MatrixSymbol.from_matrix([[2.0]])
        rep = classify_boundedness(m, a)
        x = rng.normal(scale=3.0, size=(10_000, 1))
        h = density_h(m, a, x)
        assert np.all(np.isfinite(h))
        assert np.all(h <= rep.sup_density * (1 + 1e-9))

    def test_exp_bounded_sup_dominates_samples(self):
        rng = np.random.default_rng(10)
        m = WeightedMeasure(
            weight=WeightSeries.exp(), side=Side.DIRECT, inner=InnerProduct.identity(2)
        )
        a = MatrixSymbol.from_matrix([[1.25, 0.2], [0.0, 1.6]])
        assert op_norm(a.inverted(), m.inner) < 1.0
        rep = classify_boundedness(m, a)
        x = rng.normal(scale=2.0, size=(10_000, 2))
        h = density_h(m, a, x)
        assert np.all(h <= rep.sup_density * (1 + 1e-9))

    def test_ray_limit_can_dominate_interior(self):
        # quadratic weight, strongly contracting inverse: sup h sits at infinity
        m = measure_1d(WeightSeries.polynomial([1.0, 0.0, 1.0]))
        a = MatrixSymbol.from_matrix([[0.25]])
        rep = classify_boundedness(m, a)
        expected = 4.0**4 / 0.25  # ||A^{-1}||^{2d} / |det A|
        assert abs(rep.sup_density - expected) < 1e-9 * expected

    def test_zero_a0_constant_density_ratio(self):
        # gamma(t) = t gives h identically ||A^{-1}||^2 / |det A| in one dimension
        m = measure_1d(WeightSeries.polynomial([0.0, 1.0]))
        a = MatrixSymbol.from_matrix([[2.0]])
        rep = classify_boundedness(m, a)
        assert abs(rep.sup_density - 1.0 / 8.0) < 1e-12

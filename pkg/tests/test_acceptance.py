"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one [acceptance] PASS/FAIL line (visible under pytest -s)
and asserts both the numerical bounds and the stated runtime budget.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from copcert.certificates import (
    ReportSettings,
    core_density_check,
    cosubnormality_report,
    equivalence_residual,
    falsification_search,
    stieltjes_check,
    subnormality_report,
)
from copcert.functions import Polynomial, TestFunction, gaussian_dictionary
from copcert.linalg import InnerProduct, MatrixSymbol
from copcert.operators import CompositionOperator, apply, moment_sequence
from copcert.quadrature import norm_sq, tower_norms
from copcert.weights import (
    Side,
    WeightSeries,
    WeightedMeasure,
    classify_boundedness,
    truncate,
)

SQRT_PI = math.sqrt(math.pi)


@contextmanager
def criterion(number: int, slug: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except Exception:
        print(f"[acceptance] criterion {number:2d} ({slug}): FAIL")
        raise
    elapsed = time.perf_counter() - start
    print(f"[acceptance] criterion {number:2d} ({slug}): PASS in {elapsed:.2f}s")
    assert elapsed < budget_s, f"criterion {number} exceeded its {budget_s:.0f}s budget"


def rotation(theta, scale=1.0):
    return scale * np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )


def normal_symbol_grid():
    """Rotations times positive scalars, plus conjugates normal in a dilated geometry."""
    grid = []
    for theta in (math.pi / 6, 1.25, 2.2):
        for scale in (0.6, 2.0):
            grid.append((MatrixSymbol.from_matrix(rotation(theta, scale)), InnerProduct.identity(2)))
    for t_mat in (np.array([[1.0, 0.4], [0.0, 0.8]]), np.array([[0.7, 0.0], [0.3, 1.3]])):
        t_inv = np.linalg.inv(t_mat)
        sym = MatrixSymbol.from_matrix(t_mat @ rotation(0.9, 1.5) @ t_inv)
        inner = InnerProduct.from_matrix(t_inv.T @ t_inv)
        grid.append((sym, inner))
    return grid


def independent_op_norm(a: np.ndarray, p: np.ndarray) -> float:
    """Operator norm oracle built from raw numpy, independent of the library path."""
    evals, evecs = np.linalg.eigh(p)
    p_half = (evecs * np.sqrt(evals)) @ evecs.T
    p_half_inv = (evecs / np.sqrt(evals)) @ evecs.T
    return float(np.max(np.linalg.svd(p_half @ a @ p_half_inv, compute_uv=False)))


def test_criterion_01_tower_convergence():
    with criterion(1, "tower-convergence", 1.0):
        vals = tower_norms(TestFunction.gaussian([[1.0]]), WeightSeries.exp(), 20, InnerProduct.identity(1))
        acc = 0.0
        for k in range(21):
            acc += math.comb(2 * k, k) / 8.0**k
            expected_sq = math.sqrt(math.pi / 2.0) * acc
            assert abs(vals[k] ** 2 - expected_sq) <= 1e-12 * expected_sq
        assert np.all(np.diff(vals) >= 0.0)
        assert abs(vals[20] ** 2 - SQRT_PI) < 1e-6


def test_criterion_02_norm_formula():
    with criterion(2, "operator-norm-formula", 5.0):
        inner = InnerProduct.identity(1)
        space = WeightedMeasure(weight=WeightSeries.polynomial([1.0, 1.0]), side=Side.DIRECT, inner=inner)
        sym = MatrixSymbol.from_matrix([[2.0]])
        rep = classify_boundedness(space, sym)
        assert rep.bounded
        assert abs(rep.norm - 2.0**-0.5) <= 1e-6
        op = CompositionOperator(symbol=sym, space=space)
        rng = np.random.default_rng(2024)
        for _ in range(100):
            coeffs = {(d,): rng.normal() for d in range(rng.integers(1, 5))}
            f = TestFunction.create(Polynomial.from_terms(1, coeffs), [[rng.uniform(0.4, 2.5)]])
            denom = math.sqrt(norm_sq(f, space))
            if denom == 0.0:
                continue
            rayleigh = math.sqrt(norm_sq(apply(op, f), space)) / denom
            assert rayleigh <= rep.norm + 1e-8


def test_criterion_03_boundedness_dichotomy():
    with criterion(3, "boundedness-dichotomy", 10.0):
        rng = np.random.default_rng(333)
        checked = 0
        while checked < 100:
            dim = int(rng.integers(1, 4))
            a = rng.normal(size=(dim, dim))
            if abs(np.linalg.det(a)) < 0.1:
                continue
            a *= rng.choice([0.35, 0.8, 1.0, 1.6, 3.0]) / max(
                1e-12, np.linalg.norm(a, 2)
            )
            if rng.random() < 0.5:
                p = np.eye(dim)
            else:
                q = rng.normal(size=(dim, dim))
                p = q @ q.T + dim * np.eye(dim)
            norm_a = independent_op_norm(a, p)
            norm_ainv = independent_op_norm(np.linalg.inv(a), p)
            if abs(norm_a - 1.0) < 1e-6 or abs(norm_ainv - 1.0) < 1e-6:
                continue  # stay clear of the boundary band
            inner = InnerProduct.from_matrix(p)
            sym = MatrixSymbol.from_matrix(a)
            for side, crit in ((Side.DIRECT, norm_ainv), (Side.RECIPROCAL, norm_a)):
                measure = WeightedMeasure(weight=WeightSeries.exp(), side=side, inner=inner)
                rep = classify_boundedness(measure, sym)
                assert rep.bounded == (crit <= 1.0), (dim, side, crit)
            checked += 1


def test_criterion_04_unitary_equivalence():
    with criterion(4, "unitary-equivalence", 10.0):
        rng = np.random.default_rng(44)
        exp_weight = WeightSeries.exp()
        for i in range(20):
            dim = 1 + i % 3
            a = rng.normal(size=(dim, dim)) + (1.5 + 0.5 * (i % 2)) * np.eye(dim)
            if abs(np.linalg.det(a)) < 1e-3:
                continue
            sym = MatrixSymbol.from_matrix(a)
            inner = InnerProduct.identity(dim)
            f = TestFunction.gaussian(np.eye(dim))
            pts = rng.normal(size=(1000, dim))
            for k in range(1, 7):
                res = equivalence_residual(sym, truncate(exp_weight, k), f, pts, inner)
                assert res < 1e-10, (i, k, res)


def test_criterion_05_moment_oracle():
    with criterion(5, "closed-form-moments", 1.0):
        space = WeightedMeasure(
            weight=WeightSeries.polynomial([0.0, 1.0]), side=Side.DIRECT, inner=InnerProduct.identity(1)
        )
        op = CompositionOperator(symbol=MatrixSymbol.from_matrix([[2.0]]), space=space)
        ladder = moment_sequence(op, TestFunction.gaussian([[1.0]]), 6)
        assert ladder.complete
        base = 0.5 * SQRT_PI * 2.0**-1.5
        for n, val in enumerate(ladder.values):
            expected = base * 8.0**-n
            assert abs(val - expected) <= 1e-10 * expected
        res = stieltjes_check(ladder.values, tol=1e-12)
        assert res.passed
        assert res.min_eig_even >= -1e-12 * res.trace_even
        assert res.min_eig_odd >= -1e-12 * res.trace_odd


GRID_SETTINGS = ReportSettings(truncations=(1, 2, 3, 4, 5), hankel_order=6, max_power=3, adjoint_power=4)


def test_criterion_06_subnormality_certificates():
    with criterion(6, "subnormality-certificates", 60.0):
        for sym, inner in normal_symbol_grid():
            fs = gaussian_dictionary(2, 4, inner=inner)
            rep = subnormality_report(sym, inner, WeightSeries.exp(), fs, fs, GRID_SETTINGS)
            assert rep.prediction == "SUBNORMAL"
            assert rep.verdict == "CONSISTENT"
            hankels = [r for r in rep.evidence if "hankel" in r.name]
            brams = [r for r in rep.evidence if "bram" in r.name]
            assert len(hankels) == 2 * 4 * 5 and len(brams) == 5
            for rec in rep.evidence:
                assert rec.min_eigenvalue >= -1e-8 * rec.matrix_norm, rec.name


def test_criterion_07_cosubnormality_certificates():
    with criterion(7, "cosubnormality-certificates", 120.0):
        for sym, inner in normal_symbol_grid():
            fs = gaussian_dictionary(2, 4, inner=inner)
            rep = cosubnormality_report(sym, inner, WeightSeries.exp(), fs, fs, GRID_SETTINGS)
            assert rep.prediction == "COSUBNORMAL"
            assert rep.verdict == "CONSISTENT"
            for rec in rep.evidence:
                assert rec.min_eigenvalue >= -1e-8 * rec.matrix_norm, rec.name
            matches = {k: v for k, v in rep.residuals.items() if k.startswith("adjoint-moment-match")}
            assert len(matches) == 4 * 5  # four functions, powers 0..4
            assert all(v <= 1e-7 for v in matches.values())


def test_criterion_08_adjoint_duality():
    with criterion(8, "adjoint-duality", 10.0):
        from copcert.operators import adjoint_inner_product
        from copcert.quadrature import inner_product

        rng = np.random.default_rng(88)
        weights = [
            WeightSeries.polynomial([1.0, 1.0]),
            WeightSeries.polynomial([1.0, 0.0, 0.5]),
            WeightSeries.polynomial([0.5, 2.0]),
        ]
        for trial in range(50):
            dim = 1 if trial % 2 == 0 else 2
            inner = InnerProduct.identity(dim)
            space = WeightedMeasure(weight=weights[trial % 3], side=Side.DIRECT, inner=inner)
            a = rng.normal(size=(dim, dim)) + 1.5 * np.eye(dim)
            if abs(np.linalg.det(a)) < 1e-2:
                continue
            op = CompositionOperator(symbol=MatrixSymbol.from_matrix(a), space=space)
            f = TestFunction.gaussian(rng.uniform(0.5, 1.5) * np.eye(dim))
            g = TestFunction.create(
                Polynomial.from_terms(dim, {(0,) * dim: 1.0, (1,) + (0,) * (dim - 1): rng.normal()}),
                rng.uniform(0.5, 1.5) * np.eye(dim),
            )
            lhs = adjoint_inner_product(op, f, g)
            cg = apply(op, g)
            rhs = inner_product(f, cg, space)
            bound = 1e-8 * (1.0 + math.sqrt(norm_sq(f, space) * norm_sq(cg, space)))
            assert abs(lhs - rhs) <= bound, trial


def test_criterion_09_core_density():
    with criterion(9, "core-density", 30.0):
        space = WeightedMeasure(
            weight=WeightSeries.polynomial([1.0, 1.0]), side=Side.DIRECT, inner=InnerProduct.identity(1)
        )
        op = CompositionOperator(symbol=MatrixSymbol.from_matrix([[2.0]]), space=space)
        steps = [2.0**-j for j in range(1, 7)]
        res = core_density_check(op, TestFunction.gaussian([[1.0]]), steps, radius=8.0)
        assert all(b < a for a, b in zip(res.errors, res.errors[1:]))
        assert res.errors[-1] < 0.01 * res.graph_norm


def test_criterion_10_no_false_witnesses():
    with criterion(10, "no-false-witnesses", 60.0):
        for sym, inner in normal_symbol_grid():
            fs = gaussian_dictionary(2, 4, inner=inner)
            for k in (1, 5):
                space = WeightedMeasure(
                    weight=truncate(WeightSeries.exp(), k), side=Side.DIRECT, inner=inner
                )
                op = CompositionOperator(symbol=sym, space=space)
                out = falsification_search(op, fs, 3, budget=4000)
                assert out.status == "INCONCLUSIVE"
                assert out.min_eig >= -1e-8 * out.trace
        # frozen regression from the implementer oracle run: the shear with the
        # Gaussian dictionary stays INCONCLUSIVE, min eig positive
        shear_space = WeightedMeasure(
            weight=WeightSeries.polynomial([1.0, 1.0]), side=Side.DIRECT, inner=InnerProduct.identity(2)
        )
        shear_op = CompositionOperator(
            symbol=MatrixSymbol.from_matrix([[1.0, 1.0], [0.0, 1.0]]), space=shear_space
        )
        out = falsification_search(shear_op, gaussian_dictionary(2, 4), 3, budget=4000)
        assert out.status == "INCONCLUSIVE"
        assert out.evaluations <= 4000
        assert abs(out.min_eig / out.trace - 7.572244621712646e-07) < 1e-10

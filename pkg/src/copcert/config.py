"""Build domain objects out of a validated run configuration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import ReportSettings
from .errors import ConfigError, CopcertError
from .functions import Polynomial, TestFunction, gaussian_dictionary
from .linalg import InnerProduct, MatrixSymbol
from .schemas import RunConfig, TestFunctionSpec
from .weights import Side, WeightSeries, WeightedMeasure


@dataclass(frozen=True)
class RunObjects:
    inner: InnerProduct
    symbol: MatrixSymbol
    weight: WeightSeries
    side: Side
    measure: WeightedMeasure
    test_functions: list
    dictionary: list
    settings: ReportSettings


def _square_from_flat(values, dim: int, where: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.size != dim * dim:
        raise ConfigError(f"{where}: expected {dim * dim} entries for dim={dim}, got {arr.size}")
    return arr.reshape(dim, dim)


def _build_function(spec: TestFunctionSpec, dim: int, where: str) -> TestFunction:
    if isinstance(spec.shape, (int, float)):
        shape = float(spec.shape) * np.eye(dim)
    else:
        shape = np.asarray(spec.shape, dtype=float)
    if spec.poly is None:
        poly = Polynomial.constant(dim)
    else:
        terms = {}
        for mono in spec.poly:
            if len(mono.exponents) != dim:
                raise ConfigError(f"{where}: exponent tuple {mono.exponents} does not match dim={dim}")
            key = tuple(mono.exponents)
            terms[key] = terms.get(key, 0.0) + mono.coeff
        poly = Polynomial.from_terms(dim, terms)
    try:
        return TestFunction.create(poly, shape)
    except (ValueError, CopcertError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def build_objects(cfg: RunConfig) -> RunObjects:
    """Validate and assemble every domain object a pipeline needs.

    Raises ConfigError with a location-tagged message on the first invalid
    field; a fixed seed makes every downstream sample deterministic.
    """
    dim = cfg.dim
    try:
        inner = (
            InnerProduct.identity(dim)
            if cfg.inner_product is None
            else InnerProduct.from_matrix(_square_from_flat(cfg.inner_product, dim, "inner_product"))
        )
    except (ValueError, CopcertError) as exc:
        raise ConfigError(f"inner_product: {exc}") from exc
    try:
        symbol = MatrixSymbol.from_matrix(_square_from_flat(cfg.matrix, dim, "matrix"))
    except (ValueError, CopcertError) as exc:
        raise ConfigError(f"matrix: {exc}") from exc
    try:
        weight = (
            WeightSeries.exp() if cfg.weight == "exp" else WeightSeries.polynomial(cfg.weight)
        )
    except CopcertError as exc:
        raise ConfigError(f"weight: {exc}") from exc
    side = Side(cfg.side)
    measure = WeightedMeasure(weight=weight, side=side, inner=inner)

    if cfg.test_functions is None:
        funcs = gaussian_dictionary(dim, cfg.suite_size, inner=inner)
    else:
        funcs = [
            _build_function(spec, dim, f"test_functions[{i}]")
            for i, spec in enumerate(cfg.test_functions)
        ]
    if cfg.dictionary is None:
        dictionary = list(funcs)
    else:
        dictionary = [
            _build_function(spec, dim, f"dictionary[{i}]")
            for i, spec in enumerate(cfg.dictionary)
        ]

    if any(k < 0 for k in cfg.truncations):
        raise ConfigError("truncations: levels must be nonnegative")
    settings = ReportSettings(
        truncations=tuple(cfg.truncations),
        hankel_order=cfg.hankel_order,
        max_power=cfg.max_power,
        adjoint_power=cfg.adjoint_power,
        psd_tol=cfg.tolerances.psd,
        residual_tol=cfg.tolerances.residual,
        adjoint_match_tol=cfg.tolerances.adjoint_match,
        normality_tol=cfg.tolerances.normality,
        seed=cfg.seed,
        samples=cfg.samples,
        falsify_budget=cfg.falsify_budget,
    )
    return RunObjects(
        inner=inner,
        symbol=symbol,
        weight=weight,
        side=side,
        measure=measure,
        test_functions=funcs,
        dictionary=dictionary,
        settings=settings,
    )

"""Numerical certificates for composition operators on weighted L2 spaces."""

__version__ = "0.1.0"

from .certificates import (
    CertificateReport,
    FalsificationOutcome,
    ReportSettings,
    StieltjesResult,
    core_density_check,
    cosubnormality_report,
    coefficient_system_check,
    equivalence_residual,
    falsification_search,
    stieltjes_check,
    subnormality_report,
)
from .functions import Polynomial, SimpleFunction, TestFunction, compose_linear, pointwise_eval
from .linalg import InnerProduct, MatrixSymbol, is_normal, op_norm, p_adjoint
from .operators import (
    CompositionOperator,
    WeightedCompositionOperator,
    adjoint_apply_power,
    apply,
    gram_block_matrix,
    moment_sequence,
    unitary_map,
    weighted_apply,
)
from .quadrature import inner_product, norm, norm_sq, tower_norms
from .weights import (
    Side,
    WeightKind,
    WeightSeries,
    WeightedMeasure,
    classify_boundedness,
    density_h,
    truncate,
)

__all__ = [
    "CertificateReport",
    "CompositionOperator",
    "FalsificationOutcome",
    "InnerProduct",
    "MatrixSymbol",
    "Polynomial",
    "ReportSettings",
    "Side",
    "SimpleFunction",
    "StieltjesResult",
    "TestFunction",
    "WeightKind",
    "WeightSeries",
    "WeightedCompositionOperator",
    "WeightedMeasure",
    "adjoint_apply_power",
    "apply",
    "classify_boundedness",
    "compose_linear",
    "core_density_check",
    "cosubnormality_report",
    "coefficient_system_check",
    "density_h",
    "equivalence_residual",
    "falsification_search",
    "gram_block_matrix",
    "inner_product",
    "is_normal",
    "moment_sequence",
    "norm",
    "norm_sq",
    "op_norm",
    "p_adjoint",
    "pointwise_eval",
    "stieltjes_check",
    "subnormality_report",
    "tower_norms",
    "truncate",
    "unitary_map",
    "weighted_apply",
]

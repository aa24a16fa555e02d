"""Pydantic request and response models for the service and the CLI client."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class MonomialSpec(BaseModel):
    exponents: list[int]
    coeff: float


class TestFunctionSpec(BaseModel):
    """Gaussian shape (scalar for s*I or a full matrix) with an optional polynomial factor."""

    shape: Union[float, list[list[float]]]
    poly: Optional[list[MonomialSpec]] = None


class ToleranceSpec(BaseModel):
    psd: float = Field(default=1e-8, gt=0)
    residual: float = Field(default=1e-10, gt=0)
    adjoint_match: float = Field(default=1e-7, gt=0)
    normality: float = Field(default=1e-10, gt=0)


class RunConfig(BaseModel):
    """One batch run: symbol, geometry, weight, and pipeline knobs."""

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1, le=8)
    matrix: list[float]
    inner_product: Optional[list[float]] = None
    weight: Union[Literal["exp"], list[float]] = "exp"
    side: Literal["direct", "reciprocal"] = "direct"
    truncations: list[int] = Field(default=[1, 2, 3, 4, 5], min_length=1)
    test_functions: Optional[list[TestFunctionSpec]] = None
    dictionary: Optional[list[TestFunctionSpec]] = None
    suite_size: int = Field(default=4, ge=1, le=16)
    hankel_order: int = Field(default=6, ge=1, le=10)
    max_power: int = Field(default=3, ge=0, le=8)
    adjoint_power: int = Field(default=4, ge=0, le=8)
    samples: int = Field(default=1000, ge=1, le=100_000)
    seed: int = Field(default=0, ge=0)
    tolerances: ToleranceSpec = ToleranceSpec()
    points: Optional[list[list[float]]] = None
    kmax: Optional[int] = Field(default=None, ge=0)
    falsify_budget: int = Field(default=4000, ge=1)


class ClassificationModel(BaseModel):
    verdict: Literal["BOUNDED", "UNBOUNDED"]
    norm: Optional[float]
    sup_density: Optional[float]
    marginal: bool
    criterion_norm: float
    densely_defined: bool
    divergence_log: Optional[list[list[float]]]


class EvidenceModel(BaseModel):
    name: str
    theorem: str
    min_eigenvalue: float
    matrix_norm: float
    order: int
    passed: bool


class FalsificationModel(BaseModel):
    status: Literal["WITNESS", "INCONCLUSIVE"]
    min_eigenvalue: float
    trace: float
    dictionary_size: int
    max_power: int
    witness_coefficients: Optional[list[float]]
    form_value: Optional[float]
    evaluations: int
    note: str = ""


class CertificateModel(BaseModel):
    prediction: Literal["SUBNORMAL", "COSUBNORMAL", "NOT_PREDICTED"]
    classification: ClassificationModel
    evidence: list[EvidenceModel]
    residuals: dict[str, float]
    residual_bounds: dict[str, float]
    verdict: Literal["CONSISTENT", "VIOLATION", "INCONCLUSIVE"]
    falsification: Optional[FalsificationModel]
    notes: list[str]


class ReportResponse(BaseModel):
    mode: Literal["subnormality", "cosubnormality"]
    seed: int
    certificate: CertificateModel


class NormResponse(BaseModel):
    side: Literal["direct", "reciprocal"]
    classification: ClassificationModel


class TowerResponse(BaseModel):
    kmax: int
    norms: list[list[float]]  # one nondecreasing sequence per test function


class DensityResponse(BaseModel):
    points: list[list[float]]
    values: list[float]
    log_values: list[float]
    all_finite: bool


class FalsifyResponse(BaseModel):
    classification: ClassificationModel
    falsification: FalsificationModel


class HealthResponse(BaseModel):
    status: str
    name: str
    version: str

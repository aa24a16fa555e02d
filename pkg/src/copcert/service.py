"""FastAPI service exposing the certificate pipelines.

Every endpoint is a stateless function of its RunConfig body, so the same
handlers back both the HTTP routes and the in-process CLI client.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .certificates import cosubnormality_report, falsification_search, subnormality_report
from .config import build_objects
from .errors import ConfigError, CopcertError
from .operators import CompositionOperator
from .quadrature import tower_norms
from .schemas import (
    CertificateModel,
    ClassificationModel,
    DensityResponse,
    FalsificationModel,
    FalsifyResponse,
    HealthResponse,
    NormResponse,
    ReportResponse,
    RunConfig,
    TowerResponse,
)
from .weights import classify_boundedness, density_h, log_density_h


def _classification_model(rep) -> ClassificationModel:
    return ClassificationModel(
        verdict=rep.verdict,
        norm=rep.norm,
        sup_density=rep.sup_density,
        marginal=rep.marginal,
        criterion_norm=rep.criterion_norm,
        densely_defined=rep.densely_defined,
        divergence_log=[list(p) for p in rep.divergence_log] if rep.divergence_log else None,
    )


def _certificate_model(report) -> CertificateModel:
    doc = report.to_dict()
    return CertificateModel(
        prediction=doc["prediction"],
        classification=ClassificationModel(**doc["classification"]),
        evidence=doc["evidence"],
        residuals=doc["residuals"],
        residual_bounds=doc["residual_bounds"],
        verdict=doc["verdict"],
        falsification=FalsificationModel(**doc["falsification"]) if doc["falsification"] else None,
        notes=doc["notes"],
    )


def _run_certificate(cfg: RunConfig, mode: str) -> ReportResponse:
    objs = build_objects(cfg)
    pipeline = subnormality_report if mode == "subnormality" else cosubnormality_report
    report = pipeline(
        objs.symbol,
        objs.inner,
        objs.weight,
        objs.test_functions,
        objs.dictionary,
        objs.settings,
    )
    return ReportResponse(mode=mode, seed=cfg.seed, certificate=_certificate_model(report))


def run_report(cfg: RunConfig) -> ReportResponse:
    """Full pipeline for the configured side of the weight."""
    mode = "subnormality" if cfg.side == "direct" else "cosubnormality"
    return _run_certificate(cfg, mode)


def run_certify_subnormal(cfg: RunConfig) -> ReportResponse:
    return _run_certificate(cfg.model_copy(update={"side": "direct"}), "subnormality")


def run_certify_cosubnormal(cfg: RunConfig) -> ReportResponse:
    return _run_certificate(cfg.model_copy(update={"side": "reciprocal"}), "cosubnormality")


def run_norm(cfg: RunConfig) -> NormResponse:
    objs = build_objects(cfg)
    rep = classify_boundedness(objs.measure, objs.symbol)
    return NormResponse(side=cfg.side, classification=_classification_model(rep))


def run_tower(cfg: RunConfig) -> TowerResponse:
    objs = build_objects(cfg)
    kmax = cfg.kmax if cfg.kmax is not None else max(objs.settings.truncations)
    norms = [
        [float(v) for v in tower_norms(f, objs.weight, kmax, objs.inner)]
        for f in objs.test_functions
    ]
    return TowerResponse(kmax=kmax, norms=norms)


def run_density(cfg: RunConfig) -> DensityResponse:
    objs = build_objects(cfg)
    if cfg.points is not None:
        pts = np.asarray(cfg.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != cfg.dim:
            raise ConfigError(f"points: expected rows of length {cfg.dim}")
    else:
        rng = np.random.default_rng(cfg.seed)
        pts = rng.normal(size=(min(cfg.samples, 1000), cfg.dim))
    values = density_h(objs.measure, objs.symbol, pts)
    logs = log_density_h(objs.measure, objs.symbol, pts)
    return DensityResponse(
        points=[[float(c) for c in row] for row in pts],
        values=[float(v) for v in values],
        log_values=[float(v) for v in logs],
        all_finite=bool(np.all(np.isfinite(values))),
    )


def run_falsify(cfg: RunConfig) -> FalsifyResponse:
    objs = build_objects(cfg)
    rep = classify_boundedness(objs.measure, objs.symbol)
    if not rep.bounded:
        raise ConfigError(
            "falsify: the bounded subnormality criterion does not apply to an unbounded operator"
        )
    op = CompositionOperator(symbol=objs.symbol, space=objs.measure)
    outcome = falsification_search(
        op,
        objs.dictionary,
        objs.settings.max_power,
        objs.settings.falsify_budget,
        objs.settings.psd_tol,
    )
    return FalsifyResponse(
        classification=_classification_model(rep),
        falsification=FalsificationModel(**outcome.to_dict()),
    )


HANDLERS = {
    "report": run_report,
    "certify-subnormal": run_certify_subnormal,
    "certify-cosubnormal": run_certify_cosubnormal,
    "norm": run_norm,
    "tower": run_tower,
    "density": run_density,
    "falsify": run_falsify,
}

app = FastAPI(
    title="copcert",
    description="Numerical certificates for composition operators on weighted L2 spaces",
    version=__version__,
)


def _guard(handler, cfg: RunConfig):
    try:
        return handler(cfg)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except CopcertError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/healthz", response_model=HealthResponse)
def healthz() -> HealthResponse:
    return HealthResponse(status="ok", name="copcert", version=__version__)


@app.post("/v1/report", response_model=ReportResponse)
def report_endpoint(cfg: RunConfig) -> ReportResponse:
    return _guard(run_report, cfg)


@app.post("/v1/certify/subnormal", response_model=ReportResponse)
def certify_subnormal_endpoint(cfg: RunConfig) -> ReportResponse:
    return _guard(run_certify_subnormal, cfg)


@app.post("/v1/certify/cosubnormal", response_model=ReportResponse)
def certify_cosubnormal_endpoint(cfg: RunConfig) -> ReportResponse:
    return _guard(run_certify_cosubnormal, cfg)


@app.post("/v1/norm", response_model=NormResponse)
def norm_endpoint(cfg: RunConfig) -> NormResponse:
    return _guard(run_norm, cfg)


@app.post("/v1/tower", response_model=TowerResponse)
def tower_endpoint(cfg: RunConfig) -> TowerResponse:
    return _guard(run_tower, cfg)


@app.post("/v1/density", response_model=DensityResponse)
def density_endpoint(cfg: RunConfig) -> DensityResponse:
    return _guard(run_density, cfg)


@app.post("/v1/falsify", response_model=FalsifyResponse)
def falsify_endpoint(cfg: RunConfig) -> FalsifyResponse:
    return _guard(run_falsify, cfg)

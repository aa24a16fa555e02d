"""Numerical certificates for (co)subnormality predictions.

A report pairs the symbol-level prediction (normality of A in the chosen
geometry) with necessary numerical evidence: Stieltjes positivity of the
moment Hankel pair on each truncated space, positivity of the Bram block
form over a dictionary, monotone convergence of the truncation tower, and
residuals of the unitary-equivalence identity tying the adjoint to the
inverted symbol.  Evidence can refute a prediction (a VIOLATION would
witness a bug or a false theorem) but can never prove subnormality; the
non-predicted direction is explored by a best-effort eigenvalue search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MembershipError, QuadratureError, ZeroDensityError
from .functions import TestFunction, compose_linear
from .linalg import InnerProduct, MatrixSymbol, is_normal
from .operators import (
    ComposedEvaluable,
    CompositionOperator,
    adjoint_apply_power,
    adjoint_moment_norm_sq,
    apply,
    gram_block_matrix,
    moment_sequence,
    unitary_map,
    unitary_route_moment_norm_sq,
)
from .quadrature import inner_product, norm_sq, tower_norms
from .weights import (
    BoundednessReport,
    Side,
    WeightSeries,
    WeightedMeasure,
    classify_boundedness,
    truncate,
)

PREDICT_SUBNORMAL = "SUBNORMAL"
PREDICT_COSUBNORMAL = "COSUBNORMAL"
PREDICT_NONE = "NOT_PREDICTED"

VERDICT_CONSISTENT = "CONSISTENT"
VERDICT_VIOLATION = "VIOLATION"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"

THM_SUBNORMAL = "normal-symbol-subnormality"
THM_COSUBNORMAL = "normal-symbol-cosubnormality"
THM_STIELTJES = "stieltjes-moment-sequence"


@dataclass(frozen=True)
class ReportSettings:
    """Knobs shared by the certificate pipelines."""

    truncations: tuple = (1, 2, 3, 4, 5)
    hankel_order: int = 6
    max_power: int = 3
    adjoint_power: int = 4
    psd_tol: float = 1e-8
    residual_tol: float = 1e-10
    adjoint_match_tol: float = 1e-7
    normality_tol: float = 1e-10
    seed: int = 0
    samples: int = 1000
    falsify_budget: int = 4000


@dataclass(frozen=True)
class EvidenceRecord:
    name: str
    theorem: str
    min_eigenvalue: float
    matrix_norm: float  # nuclear norm (trace) of the PSD candidate, the tolerance scale
    order: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "theorem": self.theorem,
            "min_eigenvalue": self.min_eigenvalue,
            "matrix_norm": self.matrix_norm,
            "order": self.order,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class StieltjesResult:
    """Minimal eigenvalues of the two moment Hankel matrices."""

    min_eig_even: float
    min_eig_odd: float
    trace_even: float
    trace_odd: float
    order_even: int
    order_odd: int
    passed: bool


def stieltjes_check(moments, tol: float = 1e-8) -> StieltjesResult:
    """Positive-semidefiniteness of the Hankel pair of a moment sequence.

    A sequence of moments of a positive measure on the half line makes both
    [m_{i+j}] and the shifted [m_{i+j+1}] positive semidefinite; each uses
    every available entry.  PASS means both minimal eigenvalues clear
    -tol * trace.
    """
    m = np.asarray(moments, dtype=float)
    if m.ndim != 1 or m.size < 3:
        raise ValueError("need at least three moments (m_0, m_1, m_2)")
    if not np.all(np.isfinite(m)) or np.any(m < 0):
        raise ValueError("moments must be finite and nonnegative")
    n0 = (m.size - 1) // 2
    n1 = (m.size - 2) // 2
    idx0 = np.arange(n0 + 1)
    idx1 = np.arange(n1 + 1)
    h_even = m[idx0[:, None] + idx0[None, :]]
    h_odd = m[idx1[:, None] + idx1[None, :] + 1]
    eig_even = float(np.linalg.eigvalsh(h_even)[0])
    eig_odd = float(np.linalg.eigvalsh(h_odd)[0])
    tr_even = float(np.trace(h_even))
    tr_odd = float(np.trace(h_odd))
    passed = eig_even >= -tol * tr_even and eig_odd >= -tol * tr_odd
    return StieltjesResult(
        min_eig_even=eig_even,
        min_eig_odd=eig_odd,
        trace_even=tr_even,
        trace_odd=tr_odd,
        order_even=n0 + 1,
        order_odd=n1 + 1,
        passed=passed,
    )


@dataclass(frozen=True)
class CoefficientSystemResult:
    status: str  # SCREENED_POSITIVE or REJECTED
    scalar_min: float
    value: float | None


def coefficient_system_check(
    op: CompositionOperator,
    functions,
    coeffs: np.ndarray,
    rng: np.random.Generator,
    n_samples: int = 10_000,
) -> CoefficientSystemResult:
    """Evaluate a coefficient-system quadratic form against operator powers.

    `coeffs[p, q, i, j]` must be Hermitian in the paired indices.  The scalar
    form sum a_{p,q,i,j} lam^p conj(lam)^q z_i conj(z_j) is screened for
    nonnegativity on random samples; systems that screen positive have
    sum a_{p,q,i,j} <C^p f_i, C^q f_j> evaluated and reported.
    """
    a = np.asarray(coeffs, dtype=complex)
    if a.ndim != 4 or a.shape[0] != a.shape[1] or a.shape[2] != a.shape[3]:
        raise ValueError("coefficient system must have shape (n+1, n+1, m, m)")
    m_funcs = len(functions)
    if a.shape[2] != m_funcs:
        raise ValueError("coefficient system does not match the number of functions")
    hermitian_partner = np.conj(a.transpose(1, 0, 3, 2))
    scale_a = np.max(np.abs(a)) or 1.0
    if not np.allclose(a, hermitian_partner, atol=1e-12 * scale_a):
        raise ValueError("coefficient system is not Hermitian")

    npow = a.shape[0]
    lam = rng.normal(size=n_samples) + 1j * rng.normal(size=n_samples)
    z = rng.normal(size=(n_samples, m_funcs)) + 1j * rng.normal(size=(n_samples, m_funcs))
    lam_pows = lam[:, None] ** np.arange(npow)[None, :]
    form = np.einsum(
        "pqij,sp,sq,si,sj->s", a, lam_pows, np.conj(lam_pows), z, np.conj(z), optimize=True
    )
    abs_form = np.einsum(
        "pqij,sp,sq,si,sj->s",
        np.abs(a),
        np.abs(lam_pows),
        np.abs(lam_pows),
        np.abs(z),
        np.abs(z),
        optimize=True,
    )
    scaled = form.real / np.maximum(abs_form, 1e-300)
    scalar_min = float(np.min(scaled))
    if scalar_min < -1e-12:
        return CoefficientSystemResult(status="REJECTED", scalar_min=scalar_min, value=None)

    images = []
    current = list(functions)
    for p in range(npow):
        if p > 0:
            current = [apply(op, g) for g in current]
        images.append(list(current))
    gram = np.empty((npow, m_funcs, npow, m_funcs))
    for p in range(npow):
        for i in range(m_funcs):
            for q in range(npow):
                for j in range(m_funcs):
                    gram[p, i, q, j] = inner_product(images[p][i], images[q][j], op.space)
    value = complex(np.einsum("pqij,piqj->", a, gram))
    return CoefficientSystemResult(status="SCREENED_POSITIVE", scalar_min=scalar_min, value=float(value.real))


def equivalence_residual(
    sym: MatrixSymbol,
    gamma: WeightSeries,
    f: TestFunction,
    points: np.ndarray,
    inner: InnerProduct,
) -> float:
    """Pointwise residual of the identity tying C at the inverted symbol to the adjoint.

    Both sides reduce algebraically to f(A^{-1}x)/gamma(|A^{-1}x|^2), so the
    maximal absolute difference over the sample points measures assembly
    error only.
    """
    recip = WeightedMeasure(weight=gamma, side=Side.RECIPROCAL, inner=inner)
    lhs = ComposedEvaluable(g=unitary_map(f, recip), matrix=sym.inverse)
    adj = adjoint_apply_power(CompositionOperator(symbol=sym, space=recip), f, 1)
    x = np.atleast_2d(np.asarray(points, dtype=float))
    rhs = sym.absdet * adj(x) / gamma.eval(inner.norm_sq(x))
    return float(np.max(np.abs(lhs(x) - rhs)))


@dataclass(frozen=True)
class CoreDensityResult:
    resolutions: tuple
    errors: tuple
    graph_norm: float


def core_density_check(
    op: CompositionOperator,
    f: TestFunction,
    resolutions,
    radius: float = 8.0,
) -> CoreDensityResult:
    """Graph-norm distance from f to its best piecewise-constant approximants.

    The graph norm of g is the L2 norm against the density (1 + J) with
    J the pushforward density of the symbol, so the squared error of the
    best grid approximant is graph(f)^2 - sum over cells of
    (int f rho)^2 / int rho with rho = (1 + J) times the space density.
    Finer grids can only decrease it; the tail beyond the grid radius stays
    in the error.
    """
    dim = op.dim
    from .weights import density_h  # local import to keep module tops acyclic

    glx, glw = np.polynomial.legendre.leggauss(8)

    graph_sq = norm_sq(f, op.space) + norm_sq(apply(op, f), op.space)
    errors = []
    for step in resolutions:
        n_cells = int(round(2.0 * radius / step))
        # integration sub-panels keep quadrature accuracy independent of the grid
        sub = max(1, int(math.ceil(step / 0.25)))
        nodes_per_cell = sub * glx.size
        if n_cells < 1 or (n_cells * nodes_per_cell) ** dim > 20_000_000:
            raise QuadratureError(f"grid with step {step:g} is out of range")
        panel = step / sub
        sub_mids = -0.5 * step + panel * (np.arange(sub) + 0.5)
        cell_nodes = (sub_mids[:, None] + 0.5 * panel * glx[None, :]).ravel()
        cell_weights = np.tile(0.5 * panel * glw, sub)
        edges = -radius + step * np.arange(n_cells + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        axis_nodes = (mids[:, None] + cell_nodes[None, :]).ravel()
        axis_weights = np.tile(cell_weights, n_cells)
        axis_cells = np.repeat(np.arange(n_cells), nodes_per_cell)

        grids = np.meshgrid(*([axis_nodes] * dim), indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=1)
        wgrids = np.meshgrid(*([axis_weights] * dim), indexing="ij")
        w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        cgrids = np.meshgrid(*([axis_cells] * dim), indexing="ij")
        cell_index = np.zeros(x.shape[0], dtype=np.int64)
        for g in cgrids:
            cell_index = cell_index * n_cells + g.ravel()

        rho = (1.0 + density_h(op.space, op.symbol, x)) * op.space.density(x)
        if not np.all(np.isfinite(rho)):
            raise ZeroDensityError("non-finite graph-norm density at a quadrature node")
        fvals = f(x)
        mass = np.bincount(cell_index, weights=w * rho, minlength=n_cells**dim)
        fmass = np.bincount(cell_index, weights=w * rho * fvals, minlength=n_cells**dim)
        pos = mass > 0.0
        captured = float(np.sum(fmass[pos] ** 2 / mass[pos]))
        errors.append(math.sqrt(max(graph_sq - captured, 0.0)))
    return CoreDensityResult(
        resolutions=tuple(float(s) for s in resolutions),
        errors=tuple(errors),
        graph_norm=math.sqrt(graph_sq),
    )


@dataclass(frozen=True)
class FalsificationOutcome:
    status: str  # WITNESS or INCONCLUSIVE
    min_eig: float
    trace: float
    dict_size: int
    max_power: int
    witness_coeffs: tuple | None
    form_value: float | None
    evaluations: int
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "min_eigenvalue": self.min_eig,
            "trace": self.trace,
            "dictionary_size": self.dict_size,
            "max_power": self.max_power,
            "witness_coefficients": list(self.witness_coeffs) if self.witness_coeffs else None,
            "form_value": self.form_value,
            "evaluations": self.evaluations,
            "note": self.note,
        }


def falsification_search(
    op: CompositionOperator,
    dictionary,
    maxpow: int,
    budget: int = 4000,
    psd_tol: float = 1e-8,
) -> FalsificationOutcome:
    """Search for a negative direction of the Bram block form over growing dictionaries.

    Applies only to bounded operators, where failure of the form would refute
    subnormality.  A coefficient vector with form value below -psd_tol * trace
    is returned as a witness; otherwise the outcome is INCONCLUSIVE, which for
    a finite dictionary is all the positive direction can say.
    """
    rep = classify_boundedness(op.space, op.symbol)
    if not rep.bounded:
        raise ValueError("the bounded subnormality criterion does not apply: operator is unbounded")

    images = []
    current = list(dictionary)
    for p in range(maxpow + 1):
        if p > 0:
            current = [compose_linear(g, op.symbol) for g in current]
        images.append(list(current))

    cache: dict = {}
    evaluations = 0

    def entry(p, d, q, e):
        nonlocal evaluations
        key = (p, d, q, e) if (p, d) <= (q, e) else (q, e, p, d)
        if key not in cache:
            cache[key] = inner_product(images[key[0]][key[1]], images[key[2]][key[3]], op.space)
            evaluations += 1
        return cache[key]

    npow = maxpow + 1
    best = (math.inf, 0.0, 0)  # (min eig, trace, dict size)
    for size in range(1, len(dictionary) + 1):
        needed = (npow * size) * (npow * size + 1) // 2
        if evaluations + needed - len(cache) > budget:
            return FalsificationOutcome(
                status="INCONCLUSIVE",
                min_eig=best[0] if best[2] else 0.0,
                trace=best[1],
                dict_size=best[2],
                max_power=maxpow,
                witness_coeffs=None,
                form_value=None,
                evaluations=evaluations,
                note=f"budget exhausted before dictionary size {size}",
            )
        k = np.empty((npow, size, npow, size))
        for p in range(npow):
            for d in range(size):
                for q in range(npow):
                    for e in range(size):
                        k[p, d, q, e] = entry(q, d, p, e)
        k_flat = k.reshape(npow * size, npow * size)
        k_flat = 0.5 * (k_flat + k_flat.T)
        evals, evecs = np.linalg.eigh(k_flat)
        min_eig = float(evals[0])
        trace = float(np.trace(k_flat))
        best = (min_eig, trace, size)
        if min_eig < -psd_tol * trace:
            v = evecs[:, 0]
            return FalsificationOutcome(
                status="WITNESS",
                min_eig=min_eig,
                trace=trace,
                dict_size=size,
                max_power=maxpow,
                witness_coeffs=tuple(float(c) for c in v),
                form_value=float(v @ k_flat @ v),
                evaluations=evaluations,
            )
    return FalsificationOutcome(
        status="INCONCLUSIVE",
        min_eig=best[0],
        trace=best[1],
        dict_size=best[2],
        max_power=maxpow,
        witness_coeffs=None,
        form_value=None,
        evaluations=evaluations,
    )


@dataclass(frozen=True)
class CertificateReport:
    prediction: str
    classification: BoundednessReport
    evidence: tuple
    residuals: dict
    residual_bounds: dict
    verdict: str
    falsification: FalsificationOutcome | None = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "prediction": self.prediction,
            "classification": {
                "verdict": self.classification.verdict,
                "norm": self.classification.norm,
                "sup_density": self.classification.sup_density,
                "marginal": self.classification.marginal,
                "criterion_norm": self.classification.criterion_norm,
                "densely_defined": self.classification.densely_defined,
                "divergence_log": [list(p) for p in self.classification.divergence_log]
                if self.classification.divergence_log
                else None,
            },
            "evidence": [rec.to_dict() for rec in self.evidence],
            "residuals": dict(self.residuals),
            "residual_bounds": dict(self.residual_bounds),
            "verdict": self.verdict,
            "falsification": self.falsification.to_dict() if self.falsification else None,
            "notes": list(self.notes),
        }


def _verdict(prediction: str, evidence, residuals, residual_bounds) -> str:
    failed = any(not rec.passed for rec in evidence)
    failed = failed or any(residuals[k] > residual_bounds[k] for k in residuals)
    if failed:
        return VERDICT_VIOLATION
    if prediction in (PREDICT_SUBNORMAL, PREDICT_COSUBNORMAL):
        return VERDICT_CONSISTENT
    return VERDICT_INCONCLUSIVE


def _positivity_evidence(
    sym: MatrixSymbol,
    inner: InnerProduct,
    gamma: WeightSeries,
    test_functions,
    dictionary,
    settings: ReportSettings,
    theorem: str,
    prefix: str = "",
    notes: list | None = None,
):
    """Hankel and Bram evidence for C at `sym` on the direct truncated spaces."""
    records = []
    for k in settings.truncations:
        gamma_k = truncate(gamma, k)
        space_k = WeightedMeasure(weight=gamma_k, side=Side.DIRECT, inner=inner)
        op_k = CompositionOperator(symbol=sym, space=space_k)
        for fi, f in enumerate(test_functions):
            ladder = moment_sequence(op_k, f, 2 * settings.hankel_order)
            if not ladder.complete:
                if notes is not None:
                    notes.append(f"{prefix}moments[f={fi},k={k}] left the domain at power {ladder.failed_at}")
                if ladder.values.size < 3:
                    continue
            st = stieltjes_check(ladder.values, settings.psd_tol)
            records.append(
                EvidenceRecord(
                    name=f"{prefix}hankel-even[f={fi},k={k}]",
                    theorem=THM_STIELTJES,
                    min_eigenvalue=st.min_eig_even,
                    matrix_norm=st.trace_even,
                    order=st.order_even,
                    passed=st.min_eig_even >= -settings.psd_tol * st.trace_even,
                )
            )
            records.append(
                EvidenceRecord(
                    name=f"{prefix}hankel-odd[f={fi},k={k}]",
                    theorem=THM_STIELTJES,
                    min_eigenvalue=st.min_eig_odd,
                    matrix_norm=st.trace_odd,
                    order=st.order_odd,
                    passed=st.min_eig_odd >= -settings.psd_tol * st.trace_odd,
                )
            )
        try:
            bram = gram_block_matrix(op_k, dictionary, settings.max_power)
        except MembershipError as exc:
            if notes is not None:
                notes.append(f"{prefix}bram-form[k={k}] not assembled: {exc}")
            continue
        eigs = np.linalg.eigvalsh(bram)
        records.append(
            EvidenceRecord(
                name=f"{prefix}bram-form[k={k}]",
                theorem=theorem,
                min_eigenvalue=float(eigs[0]),
                matrix_norm=float(np.trace(bram)),
                order=bram.shape[0],
                passed=float(eigs[0]) >= -settings.psd_tol * float(np.trace(bram)),
            )
        )
    return records


def _tower_residuals(gamma, inner, test_functions, settings, residuals, bounds, prefix=""):
    kmax = max(settings.truncations)
    for fi, f in enumerate(test_functions):
        tow = tower_norms(f, gamma, kmax, inner)
        drops = np.maximum(0.0, tow[:-1] - tow[1:])
        scale = max(float(tow[-1]), 1e-300)
        residuals[f"{prefix}tower-monotonicity[f={fi}]"] = float(np.max(drops) / scale)
        bounds[f"{prefix}tower-monotonicity[f={fi}]"] = 1e-12


def subnormality_report(
    sym: MatrixSymbol,
    inner: InnerProduct,
    gamma: WeightSeries,
    test_functions,
    dictionary,
    settings: ReportSettings = ReportSettings(),
) -> CertificateReport:
    """Certificate pipeline for the composition operator on the direct-side space.

    A normal symbol predicts subnormality; the evidence instantiates the
    moment and Bram positivity consequences on every configured truncation.
    Non-normal bounded symbols trigger the falsification search instead.
    """
    measure = WeightedMeasure(weight=gamma, side=Side.DIRECT, inner=inner)
    classification = classify_boundedness(measure, sym)
    normal = is_normal(sym, inner, settings.normality_tol)
    prediction = PREDICT_SUBNORMAL if normal else PREDICT_NONE

    notes: list = []
    residuals: dict = {}
    bounds: dict = {}
    evidence: list = []
    falsification = None

    if normal:
        evidence.extend(
            _positivity_evidence(
                sym, inner, gamma, test_functions, dictionary, settings, THM_SUBNORMAL, notes=notes
            )
        )
    else:
        notes.append("symbol is not normal in the configured geometry; no positivity is predicted")
        if classification.bounded:
            op = CompositionOperator(symbol=sym, space=measure)
            falsification = falsification_search(
                op, dictionary, settings.max_power, settings.falsify_budget, settings.psd_tol
            )
        else:
            notes.append("operator is unbounded; the bounded non-subnormality criterion does not apply")

    _tower_residuals(gamma, inner, test_functions, settings, residuals, bounds)
    verdict = _verdict(prediction, evidence, residuals, bounds)
    return CertificateReport(
        prediction=prediction,
        classification=classification,
        evidence=tuple(evidence),
        residuals=residuals,
        residual_bounds=bounds,
        verdict=verdict,
        falsification=falsification,
        notes=tuple(notes),
    )


def cosubnormality_report(
    sym: MatrixSymbol,
    inner: InnerProduct,
    gamma: WeightSeries,
    test_functions,
    dictionary,
    settings: ReportSettings = ReportSettings(),
) -> CertificateReport:
    """Certificate pipeline on the reciprocal-side space.

    Mirrors the proof route: normality of the symbol (hence of its inverse)
    predicts subnormality of the inverted-symbol operator on the direct
    side, transported through the division-by-weight unitary.  Evidence adds
    the pointwise residual of that unitary identity and a two-route
    cross-check of the adjoint moment norms.
    """
    measure = WeightedMeasure(weight=gamma, side=Side.RECIPROCAL, inner=inner)
    classification = classify_boundedness(measure, sym)
    normal = is_normal(sym, inner, settings.normality_tol)
    prediction = PREDICT_COSUBNORMAL if normal else PREDICT_NONE

    notes: list = []
    residuals: dict = {}
    bounds: dict = {}
    evidence: list = []
    falsification = None
    rng = np.random.default_rng(settings.seed)

    if normal:
        evidence.extend(
            _positivity_evidence(
                sym.inverted(),
                inner,
                gamma,
                test_functions,
                dictionary,
                settings,
                THM_COSUBNORMAL,
                prefix="inverse-symbol/",
                notes=notes,
            )
        )
    else:
        notes.append("symbol is not normal in the configured geometry; no positivity is predicted")
        direct = WeightedMeasure(weight=gamma, side=Side.DIRECT, inner=inner)
        inv_op = CompositionOperator(symbol=sym.inverted(), space=direct)
        if classify_boundedness(direct, sym.inverted()).bounded:
            falsification = falsification_search(
                inv_op, dictionary, settings.max_power, settings.falsify_budget, settings.psd_tol
            )
        else:
            notes.append("inverted-symbol operator is unbounded; bounded criterion not applicable")

    # pointwise residual of the unitary identity on each truncation
    points = rng.normal(size=(settings.samples, inner.dim))
    for k in settings.truncations:
        gamma_k = truncate(gamma, k)
        res = max(
            equivalence_residual(sym, gamma_k, f, points, inner) for f in test_functions
        )
        residuals[f"unitary-equivalence[k={k}]"] = res
        bounds[f"unitary-equivalence[k={k}]"] = settings.residual_tol

    # adjoint moment norms, two assembly routes, on the top truncation
    k_cross = max(settings.truncations)
    gamma_k = truncate(gamma, k_cross)
    recip_k = WeightedMeasure(weight=gamma_k, side=Side.RECIPROCAL, inner=inner)
    op_k = CompositionOperator(symbol=sym, space=recip_k)
    for fi, f in enumerate(test_functions):
        for n in range(settings.adjoint_power + 1):
            try:
                direct_val = adjoint_moment_norm_sq(op_k, f, n)
                unitary_val = unitary_route_moment_norm_sq(op_k, f, n)
            except MembershipError as exc:
                notes.append(f"adjoint-moment[f={fi},n={n},k={k_cross}]: {exc}")
                break
            mismatch = abs(math.sqrt(max(direct_val, 0.0)) - math.sqrt(max(unitary_val, 0.0)))
            scale = max(math.sqrt(max(direct_val, 0.0)), 1e-300)
            residuals[f"adjoint-moment-match[f={fi},n={n},k={k_cross}]"] = mismatch / scale
            bounds[f"adjoint-moment-match[f={fi},n={n},k={k_cross}]"] = settings.adjoint_match_tol

    _tower_residuals(gamma, inner, test_functions, settings, residuals, bounds)
    verdict = _verdict(prediction, evidence, residuals, bounds)
    return CertificateReport(
        prediction=prediction,
        classification=classification,
        evidence=tuple(evidence),
        residuals=residuals,
        residual_bounds=bounds,
        verdict=verdict,
        falsification=falsification,
        notes=tuple(notes),
    )

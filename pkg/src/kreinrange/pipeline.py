"""End-to-end classification of a matrix under an indefinite metric."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import blocks
from .blocks import (
    BlockForm,
    ClassificationCertificate,
    ComponentSpec,
    HypothesisCheck,
    components_agree,
    detect_block_form,
)
from .core import PLUS, MINUS, Signature, as_matrix, is_j_hermitian, h_theta, pencil_sample
from .errors import (
    ClassificationError,
    DegenerateAlphaBeta,
    NotBlockForm,
    ZeroOffDiagonal,
)
from .geometry import (
    AnalyticHull,
    BoundaryCurve,
    BranchPiece,
    DegenerateLabel,
    HyperbolaComponent,
    IsolatedPoint,
    PencilHull,
    PointPiece,
    RegionHull,
    analytic_components,
    assign_signs,
    matrix_scale,
    numeric_curve,
    taxonomy_of,
)
from .oracle import (
    VerificationReport,
    draw_batch,
    eigenvalue_inclusion_check,
    membership_check,
    support_crosscheck,
)
from .tolerances import get_tolerances
from .tridiagonal import TridiagonalSpec, classify_tridiagonal_kappa

TAXONOMY = (
    "hyperbolic_disc",
    "hull_of_hyperbolas_with_flats",
    "half_line_pair",
    "singleton",
    "real_line",
    "line_degenerate",
    "plane_degenerate",
    "unclassified_numeric",
)


@dataclass(frozen=True, eq=False)
class StructureHint:
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(eq=False)
class ShapeReport:
    taxonomy: str
    matrix: np.ndarray
    signature: Signature
    curve: BoundaryCurve
    hull: Optional[RegionHull]
    certificate: ClassificationCertificate
    block_form: Optional[BlockForm] = None
    pairs: list = field(default_factory=list)
    specs: list = field(default_factory=list)
    cross_checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    verification: Optional[VerificationReport] = None

    @property
    def rule_fired(self) -> str:
        return self.certificate.rule_fired

    def to_dict(self) -> dict:
        out = {
            "taxonomy": self.taxonomy,
            "rule_fired": self.rule_fired,
            "signature": {"r": self.signature.r, "n": self.signature.n},
            "certificate": self.certificate.to_dict(),
            "failures": list(self.failures),
            "cross_checks": self.cross_checks,
            "components": [_component_dict(c) for c in self.curve.components],
        }
        if self.block_form is not None:
            bf = self.block_form
            out["block_form"] = {"alpha": _cplx(bf.alpha), "beta": _cplx(bf.beta), "r": bf.r, "n": bf.n,
                                 "swapped": bf.swapped}
        if self.pairs:
            out["spectral_pairs"] = [{"z": _cplx(p.z), "h": p.h, "delta": _cplx(p.delta),
                                      "rotation": p.rotation, "multiplicity": p.multiplicity} for p in self.pairs]
        if self.hull is not None:
            out["hull"] = {
                "method": self.hull.method,
                "unbounded": self.hull.unbounded,
                "flat_portions": [{"start": _cplx(f.start), "end": _cplx(f.end), "side": f.side}
                                  for f in self.hull.flat_portions],
                "corners": [{"point": _cplx(c.point), "side": c.side} for c in self.hull.corners],
            }
        if self.verification is not None:
            v = self.verification
            out["verification"] = {"name": v.name, "passed": v.passed, "max_support_violation": v.max_support_violation,
                                   "failures": v.membership_failures, "grid_size": v.grid_size}
        return out


def _cplx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _component_dict(c) -> dict:
    if isinstance(c, HyperbolaComponent):
        return {"type": "hyperbola", "id": c.component_id, "center": _cplx(c.center), "rotation": c.rotation,
                "semi_transverse": c.semi_transverse, "semi_nontransverse": c.semi_nontransverse,
                "foci": [_cplx(f) for f in c.foci], "branch_signs": list(c.branch_signs),
                "valid_interval": list(c.valid_interval), "multiplicity": c.multiplicity, "unsigned": c.unsigned}
    if isinstance(c, IsolatedPoint):
        return {"type": "point", "id": c.component_id, "value": _cplx(c.value), "sign": c.sign,
                "multiplicity": c.multiplicity}
    if isinstance(c, DegenerateLabel):
        return {"type": "label", "kind": c.kind, "detail": c.detail}
    return {"type": "track", "id": c.track_id, "component": c.component_id, "points": int(len(c.points)),
            "split_at_collision": c.split_at_collision}


def _inequality_dict(q) -> dict:
    return {"label": q.label, "lhs": q.lhs, "rhs": q.rhs, "strict": q.strict, "holds": q.holds}


def to_signature_form(a, metric) -> tuple[np.ndarray, Signature, Optional[np.ndarray]]:
    """Permute a diagonal +-1 metric into ``I_r (+) -I_{n-r}``; returns the permutation used."""
    a = as_matrix(a)
    if isinstance(metric, Signature):
        return a, metric, None
    signs = np.array(metric.signs)
    perm = np.concatenate([np.flatnonzero(signs > 0), np.flatnonzero(signs < 0)])
    return a[np.ix_(perm, perm)], Signature(int(np.sum(signs > 0)), signs.size), perm


def _is_scalar(a) -> Optional[complex]:
    lam = complex(np.trace(a) / a.shape[0])
    if np.linalg.norm(a - lam * np.eye(a.shape[0])) <= get_tolerances().herm * matrix_scale(a):
        return lam
    return None


def _degenerate_taxonomy(a, j) -> str:
    if is_j_hermitian(a, j):
        return "real_line"
    tol = get_tolerances()
    for t in np.linspace(0, math.pi, 181):
        h = h_theta(a, j, t)
        lam = np.trace(h) / h.shape[0]
        if np.linalg.norm(h - lam * np.eye(h.shape[0])) <= tol.herm * matrix_scale(a):
            return "line_degenerate"
    return "plane_degenerate"


def _half_line_report(a, j, alpha, beta, rule, notes=()) -> ShapeReport:
    scale = matrix_scale(a)
    center = (alpha + beta) / 2
    phi = math.atan2((alpha - beta).imag, (alpha - beta).real)
    half = abs(alpha - beta) / 2
    curve = BoundaryCurve((IsolatedPoint(0, complex(alpha), PLUS), IsolatedPoint(1, complex(beta), MINUS)), center)
    pieces = {PLUS: [BranchPiece(0, center, phi, half, 0.0, 1)], MINUS: [BranchPiece(0, center, phi, half, 0.0, -1)]}
    hull = AnalyticHull(curve, scale, pieces=pieces)
    hyps = (HypothesisCheck("off_diagonal_blocks_zero", True, 0.0),)
    cert = ClassificationCertificate(rule, (), hyps, "half_lines", tuple(notes))
    return ShapeReport("half_line_pair", a, j, curve, hull, cert)


def _singleton_report(a, j, lam, rule) -> ShapeReport:
    curve = BoundaryCurve((IsolatedPoint(0, lam, None),), lam)
    cert = ClassificationCertificate(rule, (), (HypothesisCheck("scalar_matrix", True, 0.0),), "singleton")
    pieces = {side: [PointPiece(0, complex(lam), complex(lam))] for side in (PLUS, MINUS)}
    return ShapeReport("singleton", a, j, curve, AnalyticHull(curve, matrix_scale(a), pieces=pieces), cert)


def _numeric_report(a, j, failures, certificate=None, samples: int = 3200) -> ShapeReport:
    cert = certificate or ClassificationCertificate("fallback_numeric")
    if certificate is not None and certificate.rule_fired != "fallback_numeric":
        cert = ClassificationCertificate("fallback_numeric", certificate.inequalities, certificate.hypotheses,
                                         None, certificate.notes)
    grid = np.linspace(-math.pi, math.pi, 720, endpoint=False)
    if not any(pencil_sample(a, j, float(t)).in_class_J for t in grid):
        kind = _degenerate_taxonomy(a, j)
        curve = BoundaryCurve((DegenerateLabel(kind, "pencil never in class on the angle grid"),),
                              complex(np.trace(a) / a.shape[0]), numeric=True)
        return ShapeReport(kind, a, j, curve, None, cert, failures=list(failures) + ["EmptyOmega"])
    curve = numeric_curve(a, j, samples)
    return ShapeReport("unclassified_numeric", a, j, curve, PencilHull(a, j, 512), cert, failures=list(failures))


def _run_cross_checks(bf: BlockForm, main_specs, hint: Optional[StructureHint]) -> tuple[dict, dict]:
    """Run every specialised rule; returns (summary, successful results)."""
    tol = 1e-9 * bf.scale()
    summary, results = {}, {}
    outcomes = blocks.run_specialised_rules(bf)
    if hint is not None and hint.kind == "tridiagonal" and "kappa" in hint.params:
        p = hint.params
        spec = TridiagonalSpec(p["alpha"], p["beta"], p["c"], p["d"])
        try:
            outcomes["cor_6_1"] = classify_tridiagonal_kappa(spec, p["kappa"])
        except ClassificationError as exc:
            outcomes["cor_6_1"] = exc
    for name, res in outcomes.items():
        if isinstance(res, Exception):
            summary[name] = {"status": type(res).__name__, "detail": str(res)}
            continue
        results[name] = res
        if main_specs is None:
            status = "applied"
        else:
            status = "agree" if components_agree(main_specs, res[0], tol) else "disagree"
        summary[name] = {"status": status, "detail": res[1].verdict,
                         "inequalities": [_inequality_dict(q) for q in res[1].inequalities]}
    return summary, results


_FALLBACK_ORDER = ("thm_5_5", "cor_5_2", "cor_5_1", "cor_4_1", "cor_6_1", "cor_5_4")


def _analytic_report(a, j, bf, specs, cert, pairs, cross, failures) -> ShapeReport:
    curve = assign_signs(analytic_components(specs, bf.center), a, j, bf)
    hull = AnalyticHull(curve, matrix_scale(a))
    return ShapeReport(taxonomy_of(hull), a, j, curve, hull, cert, bf, pairs, specs, cross, failures)


def classify_matrix(a, metric, hint: Optional[StructureHint] = None, crosscheck: bool = True) -> ShapeReport:
    """Classify ``W^J(A)``: analytic rules when they apply, numerical envelope otherwise."""
    a, j, _ = to_signature_form(a, metric)
    j.check(a)
    lam = _is_scalar(a)
    if lam is not None:
        return _finish(_singleton_report(a, j, lam, "hyp_range_thm_2x2" if j.n == 2 else "fallback_numeric"),
                       crosscheck)
    if not j.is_indefinite:
        return _finish(_numeric_report(a, j, ["metric is definite; classical numerical range"]), crosscheck)
    try:
        bf = detect_block_form(a, j)
    except ZeroOffDiagonal as exc:
        rule = "hyp_range_thm_2x2" if j.n == 2 else "thm_3_2"
        return _finish(_half_line_report(a, j, exc.alpha, exc.beta, rule,
                                         ("both off-diagonal blocks vanish",)), crosscheck)
    except (DegenerateAlphaBeta, NotBlockForm) as exc:
        if j.n == 2:
            return _finish(_two_by_two(a, j, [f"{type(exc).__name__}: {exc}"]), crosscheck)
        return _finish(_numeric_report(a, j, [f"{type(exc).__name__}: {exc}"]), crosscheck)

    failures: list[str] = []
    try:
        pairs = blocks.spectral_pairs(bf)
        specs, cert = blocks.classify_main(bf)
    except ClassificationError as exc:
        failures.append(f"{type(exc).__name__}: {exc}")
        main_cert = exc.certificate
        cross, results = _run_cross_checks(bf, None, hint)
        for name in _FALLBACK_ORDER:
            if name in results:
                specs, cert = results[name]
                pairs = []
                cert = ClassificationCertificate(cert.rule_fired, cert.inequalities, cert.hypotheses, cert.verdict,
                                                 cert.notes + (f"general rule failed: {type(exc).__name__}",))
                return _finish(_analytic_report(a, j, bf, specs, cert, pairs, cross, failures), crosscheck)
        return _finish(_numeric_report(a, j, failures, main_cert), crosscheck, cross)
    cross, _ = _run_cross_checks(bf, specs, hint)
    return _finish(_analytic_report(a, j, bf, specs, cert, pairs, cross, failures), crosscheck)


def _two_by_two(a, j, failures) -> ShapeReport:
    shape = blocks.hyperbolical_range_2x2(a)
    q = blocks.InequalityValue("trace_bounds", shape.trace_value, shape.upper_bound, True,
                               shape.lower_bound < shape.trace_value < shape.upper_bound)
    cert = ClassificationCertificate("hyp_range_thm_2x2", (q,), (), shape.kind)
    if shape.kind == "hyperbola":
        spec = ComponentSpec(blocks.HYPERBOLA, shape.foci, shape.transverse, shape.nontransverse)
        curve = assign_signs(analytic_components([spec], spec.center), a, j)
        hull = AnalyticHull(curve, matrix_scale(a))
        return ShapeReport(taxonomy_of(hull), a, j, curve, hull, cert, specs=[spec], failures=failures)
    if shape.kind == "half_lines":
        l1, l2 = shape.foci
        probe = assign_signs(BoundaryCurve((IsolatedPoint(0, l1), IsolatedPoint(1, l2)), (l1 + l2) / 2), a, j)
        if probe.points[0].sign == MINUS:
            l1, l2 = l2, l1
        return _half_line_report(a, j, l1, l2, "hyp_range_thm_2x2")
    return _numeric_report(a, j, failures, cert)


def _finish(report: ShapeReport, crosscheck: bool, cross: Optional[dict] = None) -> ShapeReport:
    if cross:
        report.cross_checks = cross
    if crosscheck and report.hull is not None and report.taxonomy != "singleton":
        report.verification = support_crosscheck(report.matrix, report.signature, report.hull, 256,
                                                 report.rule_fired)
    return report


def verify_report(report: ShapeReport, trials: int = 10000, seed: int = 0, grid: int = 256,
                  perturb_axes: Optional[float] = None) -> list[VerificationReport]:
    """Membership, support and eigenvalue-inclusion checks against the report's hull.

    ``perturb_axes`` shrinks the hull first (a negative control that must fail).
    """
    a, j = report.matrix, report.signature
    if report.hull is None:
        batch = draw_batch(a, j, trials, seed)
        return [VerificationReport("membership", 0.0, 0, grid, matrix_scale(a), report.rule_fired,
                                   f"no hull for {report.taxonomy}; {batch.trials} samples drawn")]
    hull = report.hull
    if perturb_axes is not None:
        hull = hull.perturbed(perturb_axes)
    batch = draw_batch(a, j, trials, seed)
    out = [membership_check(a, j, hull, batch, grid, report.rule_fired)]
    if report.taxonomy != "singleton":
        out.append(support_crosscheck(a, j, hull, grid, report.rule_fired))
    out.append(eigenvalue_inclusion_check(a, j, hull, grid))
    return out

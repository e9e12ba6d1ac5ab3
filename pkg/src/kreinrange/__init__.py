"""Indefinite (Krein-space) numerical ranges of block matrices."""
from .blocks import (
    BlockForm,
    ClassificationCertificate,
    ComponentSpec,
    SpectralPair,
    classify_main,
    closed_form_eigenvalues,
    detect_block_form,
    m_theta,
    spectral_pairs,
)
from .core import DiagonalMetric, Signature, h_theta, j_adjoint, pencil_sample
from .document import MatrixDocument, load_document, parse_document
from .errors import ClassificationError, KreinRangeError
from .geometry import AnalyticHull, BoundaryCurve, HyperbolaComponent, PencilHull, numerical_envelope
from .oracle import draw_batch, membership_check, support_crosscheck
from .pipeline import ShapeReport, StructureHint, classify_matrix, verify_report
from .tridiagonal import TridiagonalSpec, classify_tridiagonal_kappa, tridiagonal_to_block

__version__ = "0.1.0"

__all__ = [
    "AnalyticHull",
    "BlockForm",
    "BoundaryCurve",
    "ClassificationCertificate",
    "ClassificationError",
    "ComponentSpec",
    "DiagonalMetric",
    "HyperbolaComponent",
    "KreinRangeError",
    "MatrixDocument",
    "PencilHull",
    "ShapeReport",
    "Signature",
    "SpectralPair",
    "StructureHint",
    "TridiagonalSpec",
    "classify_main",
    "classify_matrix",
    "classify_tridiagonal_kappa",
    "closed_form_eigenvalues",
    "detect_block_form",
    "draw_batch",
    "h_theta",
    "j_adjoint",
    "load_document",
    "m_theta",
    "membership_check",
    "numerical_envelope",
    "parse_document",
    "pencil_sample",
    "spectral_pairs",
    "support_crosscheck",
    "tridiagonal_to_block",
    "verify_report",
]

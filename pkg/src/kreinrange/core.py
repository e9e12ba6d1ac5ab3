"""Indefinite inner product substrate.

Matrices are plain ``numpy`` complex arrays.  The metric ``J = I_r (+) -I_{n-r}``
is carried by :class:`Signature`; everything else (J-adjoint, the Cartesian
decomposition, the pencil ``H_theta``) is a pure function of arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import InvalidDimension, InvalidMetric, NotJHermitian
from .tolerances import get_tolerances

PLUS = "plus"
MINUS = "minus"
NEUTRAL = "neutral"
NONREAL = "nonreal"


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array, validating its shape."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise InvalidDimension(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidDimension(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidDimension("matrix entries must be finite")
    return m


@dataclass(frozen=True)
class Signature:
    """The metric ``J = I_r (+) -I_{n-r}`` stored as the pair ``(r, n)``."""

    r: int
    n: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.r <= self.n:
            raise InvalidMetric(f"invalid signature r={self.r}, n={self.n}")

    @classmethod
    def classical(cls, n: int) -> "Signature":
        return cls(n, n)

    @property
    def diag(self) -> np.ndarray:
        d = -np.ones(self.n)
        d[: self.r] = 1.0
        return d

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    @property
    def is_indefinite(self) -> bool:
        return 0 < self.r < self.n

    def check(self, a: np.ndarray) -> None:
        if a.shape != (self.n, self.n):
            raise InvalidDimension(
                f"matrix of shape {a.shape} does not match signature dimension {self.n}"
            )


@dataclass(frozen=True)
class DiagonalMetric:
    """A diagonal metric with an arbitrary arrangement of +1/-1 entries.

    Behaves like :class:`Signature` wherever only ``diag``, ``r`` and ``n``
    are consulted; used for the alternating metric diag(1, -1, 1, ...).
    """

    signs: tuple

    def __post_init__(self):
        if not self.signs or any(s not in (1, -1) for s in self.signs):
            raise InvalidMetric("signs must be a non-empty sequence of +1/-1")

    @classmethod
    def alternating(cls, n: int) -> "DiagonalMetric":
        return cls(tuple(1 if k % 2 == 0 else -1 for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def r(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def diag(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    @property
    def is_indefinite(self) -> bool:
        return 0 < self.r < self.n

    def check(self, a: np.ndarray) -> None:
        if a.shape != (self.n, self.n):
            raise InvalidDimension(
                f"matrix of shape {a.shape} does not match metric dimension {self.n}"
            )


def j_inner(x, y, j: Signature) -> complex:
    """``[x, y]_J = y^* J x``."""
    return complex(np.vdot(y, j.diag * np.asarray(x)))


def j_norm(x, j: Signature) -> float:
    return float(np.real(np.vdot(x, j.diag * np.asarray(x))))


def j_adjoint(a, j: Signature) -> np.ndarray:
    a = as_matrix(a)
    j.check(a)
    d = j.diag
    return d[:, None] * a.conj().T * d[None, :]


def cartesian_parts(a, j: Signature) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Re^J(A), Im^J(A))``, both J-Hermitian, summing to ``A``."""
    a = as_matrix(a)
    adj = j_adjoint(a, j)
    return (a + adj) / 2, (a - adj) / 2j


def h_theta(a, j: Signature, theta: float) -> np.ndarray:
    re, im = cartesian_parts(a, j)
    return re * math.cos(theta) + im * math.sin(theta)


def is_j_hermitian(m, j: Signature, tol: Optional[float] = None) -> bool:
    m = as_matrix(m)
    tol = get_tolerances().herm if tol is None else tol
    scale = max(np.linalg.norm(m), 1e-300)
    return np.linalg.norm(m - j_adjoint(m, j)) <= tol * scale


def is_j_unitary(u, j: Signature) -> bool:
    u = as_matrix(u)
    j.check(u)
    tol = get_tolerances().herm
    resid = np.linalg.norm(u @ j_adjoint(u, j) - np.eye(j.n))
    # round-off in U U^# grows with ||U||^2
    return resid <= tol * max(1.0, np.linalg.norm(u, 2) ** 2)


@dataclass(frozen=True, eq=False)
class SignedEigenvalue:
    value: complex
    sign_class: str
    eigenvector: np.ndarray = field(repr=False)
    j_norm: float

    @property
    def is_real(self) -> bool:
        return self.sign_class != NONREAL


def _sign_of(jn: float, tol: float) -> str:
    if jn > tol:
        return PLUS
    if jn < -tol:
        return MINUS
    return NEUTRAL


def signed_eigensystem(m: np.ndarray, jdiag: np.ndarray, real_tol: Optional[float] = None):
    """Eigen-decompose ``m`` and attach the J-norm sign of each eigenvector.

    Returns ``(entries, degenerate)`` where ``degenerate`` is true when a
    neutral eigenvector was met or an eigenspace carries an indefinite
    J-Gram matrix.  With ``real_tol=None`` every eigenvalue is signed by its
    eigenvector regardless of being real (used for non-J-Hermitian inputs).
    """
    tol = get_tolerances()
    w, v = scipy.linalg.eig(m, check_finite=False)
    scale = max(np.linalg.norm(m), 1e-300)
    if real_tol is None:
        real_mask = np.ones(len(w), dtype=bool)
    else:
        real_mask = np.abs(w.imag) <= real_tol * scale

    entries: list[SignedEigenvalue] = []
    degenerate = False

    idx_real = np.flatnonzero(real_mask)
    if real_tol is None:
        order = idx_real[np.lexsort((w[idx_real].imag, w[idx_real].real))]
    else:
        order = idx_real[np.argsort(w[idx_real].real, kind="stable")]
    clusters: list[list[int]] = []
    for k in order:
        if clusters and abs(w[k] - w[clusters[-1][-1]]) <= tol.cluster * scale:
            clusters[-1].append(k)
        else:
            clusters.append([k])

    for cl in clusters:
        vals = w[cl]
        if real_tol is not None:
            vals = vals.real.astype(complex)
        if len(cl) == 1:
            x = v[:, cl[0]]
            x = x / np.linalg.norm(x)
            jn = float(np.real(np.vdot(x, jdiag * x)))
            s = _sign_of(jn, tol.neutral)
            degenerate |= s == NEUTRAL
            entries.append(SignedEigenvalue(complex(vals[0]), s, x, jn))
            continue
        x = v[:, cl]
        u, sv, _ = np.linalg.svd(x, full_matrices=False)
        rank = int(np.sum(sv > 1e-6 * sv[0]))
        q = u[:, :rank]
        gram = q.conj().T @ (jdiag[:, None] * q)
        mu, wv = np.linalg.eigh((gram + gram.conj().T) / 2)
        basis = q @ wv
        signs = [_sign_of(float(mv), tol.neutral) for mv in mu]
        if (PLUS in signs and MINUS in signs) or NEUTRAL in signs or rank < len(cl):
            degenerate = True
        for i, value in enumerate(np.sort_complex(vals)[::-1]):
            if i < rank:
                entries.append(SignedEigenvalue(complex(value), signs[i], basis[:, i], float(mu[i])))
            else:
                # defective: no further eigenvectors, the missing ones are neutral
                k0 = int(np.argmin(np.abs(mu)))
                entries.append(SignedEigenvalue(complex(value), NEUTRAL, basis[:, k0], 0.0))

    for k in np.flatnonzero(~real_mask):
        x = v[:, k] / np.linalg.norm(v[:, k])
        jn = float(np.real(np.vdot(x, jdiag * x)))
        entries.append(SignedEigenvalue(complex(w[k]), NONREAL, x, jn))

    entries.sort(key=lambda e: (e.sign_class == NONREAL, -e.value.real, e.value.imag))
    return entries, degenerate


def classify_spectrum(m, j: Signature) -> list[SignedEigenvalue]:
    """Eigenvalues of a J-Hermitian matrix, each tagged plus/minus/neutral/nonreal."""
    m = as_matrix(m)
    j.check(m)
    if not is_j_hermitian(m, j):
        raise NotJHermitian("matrix is not J-Hermitian within tolerance")
    entries, _ = signed_eigensystem(m, j.diag, real_tol=get_tolerances().real)
    return entries


@dataclass(frozen=True, eq=False)
class PencilSample:
    """The spectrum of ``H_theta(A)`` split into the sign classes.

    ``support_plus`` / ``support_minus`` are the support values of ``W_+`` and
    ``-W_-`` in the direction ``theta`` (``inf`` when unbounded, ``-inf`` when
    the region is empty).
    """

    theta: float
    eigenvalues: list[SignedEigenvalue] = field(repr=False)
    in_class_J: bool
    lambda_R: Optional[float]
    lambda_L: Optional[float]
    case_tag: str
    degenerate_sign: bool = False

    @property
    def plus_values(self) -> list[float]:
        return sorted((e.value.real for e in self.eigenvalues if e.sign_class == PLUS), reverse=True)

    @property
    def minus_values(self) -> list[float]:
        return sorted((e.value.real for e in self.eigenvalues if e.sign_class == MINUS), reverse=True)

    @property
    def support_plus(self) -> float:
        plus = self.plus_values
        if not self.in_class_J:
            return math.inf
        if not plus:
            return -math.inf
        if not self.minus_values or self.case_tag == "II":
            return plus[0]
        return math.inf

    @property
    def support_minus(self) -> float:
        minus = self.minus_values
        if not self.in_class_J:
            return math.inf
        if not minus:
            return -math.inf
        if not self.plus_values or self.case_tag == "I":
            return minus[0]
        return math.inf


def pencil_sample(a, j: Signature, theta: float) -> PencilSample:
    a = as_matrix(a)
    j.check(a)
    tol = get_tolerances()
    h = h_theta(a, j, theta)
    entries, degenerate = signed_eigensystem(h, j.diag, real_tol=tol.real)
    scale = max(np.linalg.norm(h), 1e-300)

    def unclassed():
        return PencilSample(theta, entries, False, None, None, "none", degenerate)

    if any(e.sign_class in (NONREAL, NEUTRAL) for e in entries):
        return unclassed()
    plus = sorted((e.value.real for e in entries if e.sign_class == PLUS), reverse=True)
    minus = sorted((e.value.real for e in entries if e.sign_class == MINUS), reverse=True)
    if len(plus) != j.r or len(minus) != j.n - j.r:
        return unclassed()
    if not minus:
        return PencilSample(theta, entries, True, plus[0], plus[-1], "none", degenerate)
    if not plus:
        return PencilSample(theta, entries, True, minus[0], minus[-1], "none", degenerate)
    gap = tol.real * scale
    if plus[-1] - minus[0] > gap:
        return PencilSample(theta, entries, True, plus[-1], minus[0], "I", degenerate)
    if minus[-1] - plus[0] > gap:
        return PencilSample(theta, entries, True, minus[-1], plus[0], "II", degenerate)
    return unclassed()


def generating_polynomial(a, j: Signature, z: complex, theta: float) -> complex:
    h = h_theta(a, j, theta)
    return complex(np.linalg.det(h - z * np.eye(j.n)))


def inertia_reduce(h) -> tuple[Signature, np.ndarray]:
    """Sylvester reduction: return ``(J, S)`` with ``S^* h S = J``."""
    h = as_matrix(h)
    tol = get_tolerances()
    scale = max(np.linalg.norm(h), 1e-300)
    if np.linalg.norm(h - h.conj().T) > tol.herm * scale:
        raise InvalidMetric("metric matrix is not Hermitian")
    if np.count_nonzero(h - np.diag(np.diag(h))) == 0:
        w = np.diag(h).real
        vecs = np.eye(len(w), dtype=complex)
    else:
        w, vecs = np.linalg.eigh((h + h.conj().T) / 2)
        # fix the phase so the largest component of each eigenvector is real positive
        for k in range(vecs.shape[1]):
            i = int(np.argmax(np.abs(vecs[:, k])))
            vecs[:, k] *= abs(vecs[i, k]) / vecs[i, k]
    if np.min(np.abs(w)) <= tol.herm * scale:
        raise InvalidMetric("metric matrix is singular")
    order = np.concatenate([np.flatnonzero(w > 0), np.flatnonzero(w < 0)])
    s = vecs[:, order] / np.sqrt(np.abs(w[order]))[None, :]
    return Signature(int(np.sum(w > 0)), len(w)), s


def omega_interval(a, j: Signature, samples: int = 720, tol: float = 1e-6):
    """Longest contiguous angle interval on which ``H_theta(A)`` is in class J.

    Scans ``samples`` equispaced angles over ``[-pi, pi)`` (circularly) and
    refines both ends by bisection to ``tol`` radians.  Returns ``(lo, hi)``
    or ``None`` when no sampled angle is in class.
    """
    a = as_matrix(a)
    grid = -math.pi + 2 * math.pi * np.arange(samples) / samples
    inside = np.array([pencil_sample(a, j, t).in_class_J for t in grid])
    if not inside.any():
        return None
    if inside.all():
        return (-math.pi, math.pi)
    # rotate so the scan starts outside the class, then find the longest run
    start = int(np.flatnonzero(~inside)[0])
    rolled = np.roll(inside, -start)
    best, best_len, k = None, 0, 0
    while k < samples:
        if rolled[k]:
            k0 = k
            while k < samples and rolled[k]:
                k += 1
            if k - k0 > best_len:
                best, best_len = (k0, k - 1), k - k0
        else:
            k += 1
    step = 2 * math.pi / samples
    lo_in = grid[(best[0] + start) % samples]
    hi_in = lo_in + (best[1] - best[0]) * step

    def refine(t_in, t_out):
        while abs(t_out - t_in) > tol:
            mid = 0.5 * (t_in + t_out)
            if pencil_sample(a, j, mid).in_class_J:
                t_in = mid
            else:
                t_out = mid
        return t_in

    return refine(lo_in, lo_in - step), refine(hi_in, hi_in + step)

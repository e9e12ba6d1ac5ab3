"""Tridiagonal matrices with alternating diagonal ``alpha, beta, alpha, ...``.

Under the alternating metric ``diag(1, -1, 1, ...)`` such a matrix is a
permuted block form: moving the odd positions (1-based) first turns it into
``[[alpha I_r, C], [D, beta I_{n-r}]]`` with bidiagonal ``C`` and ``D``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import (
    POINT,
    POINT_PAIR,
    BlockForm,
    ClassificationCertificate,
    ComponentSpec,
    HypothesisCheck,
    InequalityValue,
    SpectralPair,
    component_from_pair,
    pair_inequalities,
    _cluster,
)
from .core import DiagonalMetric
from .errors import ConditionViolated, InvalidDimension, NotApplicable
from .tolerances import get_tolerances


@dataclass(frozen=True, eq=False)
class TridiagonalSpec:
    """``c`` is the subdiagonal (``T[k+1, k]``) and ``d`` the superdiagonal."""

    alpha: complex
    beta: complex
    c_vec: np.ndarray
    d_vec: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c_vec, dtype=complex).ravel()
        d = np.asarray(self.d_vec, dtype=complex).ravel()
        if c.size < 1 or c.shape != d.shape:
            raise InvalidDimension("sub- and superdiagonal must have the same positive length")
        object.__setattr__(self, "c_vec", c)
        object.__setattr__(self, "d_vec", d)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def n(self) -> int:
        return self.c_vec.size + 1

    @property
    def metric(self) -> DiagonalMetric:
        return DiagonalMetric.alternating(self.n)

    def matrix(self) -> np.ndarray:
        n = self.n
        diag = np.array([self.alpha if k % 2 == 0 else self.beta for k in range(n)])
        return np.diag(diag) + np.diag(self.c_vec, -1) + np.diag(self.d_vec, 1)


def bidiagonal_x(x, n: int) -> np.ndarray:
    """The ``ceil(n/2) x floor(n/2)`` lower-bidiagonal pattern filled from ``x``.

    Row ``i`` holds ``x[2i-1]`` at column ``i-1`` and ``x[2i]`` at column ``i``
    (0-based, entries outside the shape dropped).
    """
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != n - 1:
        raise InvalidDimension(f"expected {n - 1} entries, got {x.size}")
    rows, cols = (n + 1) // 2, n // 2
    out = np.zeros((rows, cols), dtype=complex)
    for i in range(rows):
        if i >= 1:
            out[i, i - 1] = x[2 * i - 1]
        if i < cols:
            out[i, i] = x[2 * i]
    return out


def odd_first_permutation(n: int) -> np.ndarray:
    """Index array ``p`` such that ``T[p][:, p]`` lists odd (1-based) positions first."""
    return np.concatenate([np.arange(0, n, 2), np.arange(1, n, 2)])


def permutation_matrix(perm) -> np.ndarray:
    """``P`` with ``(P X P^T)[i, k] = X[perm[i], perm[k]]``."""
    perm = np.asarray(perm)
    p = np.zeros((perm.size, perm.size))
    p[np.arange(perm.size), perm] = 1.0
    return p


def tridiagonal_to_block(spec: TridiagonalSpec) -> tuple[BlockForm, np.ndarray]:
    perm = odd_first_permutation(spec.n)
    a = spec.matrix()[np.ix_(perm, perm)]
    r = (spec.n + 1) // 2
    return BlockForm(spec.alpha, spec.beta, a[:r, r:], a[r:, :r]), perm


def tridiagonal_switch(spec: TridiagonalSpec, positions) -> TridiagonalSpec:
    """Exchange ``c_k`` and ``d_k`` at the given 0-based positions."""
    c, d = spec.c_vec.copy(), spec.d_vec.copy()
    for k in positions:
        c[k], d[k] = d[k], c[k]
    return TridiagonalSpec(spec.alpha, spec.beta, c, d)


def classify_tridiagonal_kappa(spec: TridiagonalSpec, kappa: complex):
    """Closed form when ``d = kappa * conj(c)``; components from singular values of ``X(c)``."""
    tol = get_tolerances()
    kappa = complex(kappa)
    c, d = spec.c_vec, spec.d_vec
    scale = max(1.0, float(np.linalg.norm(spec.matrix(), 2)))
    res = float(np.linalg.norm(d - kappa * c.conj()))
    hyps = (HypothesisCheck("superdiagonal_is_kappa_conj_sub", res <= tol.herm * scale, res),)
    if not hyps[0].passed:
        raise NotApplicable("superdiagonal is not a multiple of the conjugate subdiagonal",
                            ClassificationCertificate("cor_6_1", hypotheses=hyps))
    n = spec.n
    sv = np.linalg.svd(bidiagonal_x(c, n), compute_uv=False)
    nz = [float(s) for s in sv if s > tol.herm * scale]
    alpha, beta = spec.alpha, spec.beta
    omega = (alpha - beta) / 2
    # the equivalent block form, used only to share the pair formulas
    bf, _ = tridiagonal_to_block(spec)
    ineqs, comps, notes = [], [], []
    outer = None
    for gi, group in enumerate(_cluster(nz, tol.cluster * scale)):
        s = nz[group[0]]
        z = kappa * s * s
        h = (1 + abs(kappa) ** 2) * s * s
        pair = SpectralPair(z, h, 4 * (omega * omega + z), len(group))
        lo, hi, outcome = pair_inequalities(bf, pair, f"sv{gi + 1}")
        if gi == 0:
            lhs = 4 * abs(omega) ** 2 - 2 * (1 + abs(kappa) ** 2) * s * s
            rhs = 4 * abs(omega * omega + kappa * s * s)
            slack = tol.condition * max(rhs + 4 * abs(omega) ** 2, 1e-300)
            outer = InequalityValue("outer_singular_value", abs(lhs), rhs, True, abs(lhs) < rhs - slack)
            ineqs.append(outer)
        ineqs += [lo, hi]
        if outcome in ("lhs_violated", "rhs_violated"):
            notes.append(f"singular value {s:.6g} gives no hyperbola ({outcome})")
            continue
        comps.append(component_from_pair(bf, pair, outcome))
    if outer is not None and not outer.holds:
        raise ConditionViolated("outer tridiagonal inequality fails",
                                ClassificationCertificate("cor_6_1", tuple(ineqs), hyps, "not_disc", tuple(notes)))
    k = len(nz)
    if k < n // 2:
        comps.append(ComponentSpec(POINT_PAIR, (alpha, beta), abs(alpha - beta), 0.0))
    elif n % 2 == 1:
        comps.append(ComponentSpec(POINT, (alpha, alpha), 0.0, 0.0))
    return comps, ClassificationCertificate("cor_6_1", tuple(ineqs), hyps, "disc", tuple(notes))

"""Independent checks: Monte-Carlo membership, support cross-checks, eigenvalue inclusion.

Random draws use a Philox generator keyed by ``(seed, trial)`` so any trial
can be regenerated on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .core import MINUS, PLUS, Signature, as_matrix, j_adjoint, pencil_sample, signed_eigensystem
from .errors import EmptySignClass
from .geometry import SIDES, RegionHull, matrix_scale

MEMBERSHIP_SLACK = 1e-6
INCLUSION_SLACK = 1e-7


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _draw_on_sphere(rng: np.random.Generator, jdiag: np.ndarray, sign: int) -> np.ndarray:
    n = jdiag.size
    while True:
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        q = float(np.real(np.vdot(x, jdiag * x)))
        # near-neutral draws would amplify round-off when rescaled
        if q * sign > 1e-3 * float(np.vdot(x, x).real):
            return x / math.sqrt(abs(q))


def sample_j_sphere(j: Signature, sign: int, seed: int, trial: int = 0) -> np.ndarray:
    """Complex Gaussian vector rescaled to ``[x, x]_J = sign``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if (sign > 0 and j.r == 0) or (sign < 0 and j.r == j.n):
        raise EmptySignClass(f"no vectors with J-norm {sign} for r={j.r}, n={j.n}")
    return _draw_on_sphere(trial_rng(seed, trial), j.diag, sign)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """``points_minus`` already carries the negation, i.e. it samples ``-W_-``."""

    seed: int
    trials: int
    points_plus: np.ndarray = field(repr=False)
    points_minus: np.ndarray = field(repr=False)
    max_norm_error: float = 0.0


def _boundary_vectors(a, j, grid_size: int) -> dict:
    """Supporting pencil eigenvectors: their values lie on the region boundaries."""
    out = {PLUS: [], MINUS: []}
    psi = -math.pi + 2 * math.pi * np.arange(grid_size) / grid_size
    for t in psi:
        s = pencil_sample(a, j, float(t))
        for side in SIDES:
            val = s.support_plus if side == PLUS else s.support_minus
            if not np.isfinite(val):
                continue
            for e in s.eigenvalues:
                if e.sign_class == side and abs(e.value.real - val) <= 1e-9 * max(1.0, abs(val)):
                    out[side].append(e.eigenvector)
                    break
    return out


def draw_batch(a, j: Signature, trials: int, seed: int, boundary_grid: int = 128) -> SampleBatch:
    """Half plain Gaussian draws, half jittered supporting eigenvectors, split evenly by sign."""
    a = as_matrix(a)
    jd = j.diag
    signs = [s for s in (1, -1) if (s > 0 and j.r > 0) or (s < 0 and j.r < j.n)]
    boundary = _boundary_vectors(a, j, boundary_grid)
    vecs = {1: [], -1: []}
    for t in range(trials):
        rng = trial_rng(seed, t)
        sign = signs[t % len(signs)]
        pool = boundary[PLUS if sign > 0 else MINUS]
        if (t // len(signs)) % 2 == 1 and pool:
            base = pool[int(rng.integers(len(pool)))]
            eps = 10.0 ** rng.uniform(-8, -2)
            x = base + eps * (rng.standard_normal(j.n) + 1j * rng.standard_normal(j.n))
            q = float(np.real(np.vdot(x, jd * x)))
            if q * sign <= 1e-3 * float(np.vdot(x, x).real):
                x = _draw_on_sphere(rng, jd, sign)
            else:
                x = x / math.sqrt(abs(q))
        else:
            x = _draw_on_sphere(rng, jd, sign)
        vecs[sign].append(x)
    pts, err = {}, 0.0
    for sign in (1, -1):
        if not vecs[sign]:
            pts[sign] = np.zeros(0, dtype=complex)
            continue
        x = np.array(vecs[sign]).T
        norms = np.real(np.sum(x.conj() * (jd[:, None] * x), axis=0))
        err = max(err, float(np.max(np.abs(norms - sign))))
        vals = np.sum(x.conj() * (jd[:, None] * (a @ x)), axis=0)
        pts[sign] = vals * sign  # minus values negated
    return SampleBatch(seed, trials, pts[1], pts[-1], err)


@dataclass(frozen=True)
class VerificationReport:
    name: str
    max_support_violation: float
    membership_failures: int
    grid_size: int
    scale: float
    compared_rule: Optional[str] = None
    detail: str = ""
    threshold: float = MEMBERSHIP_SLACK

    @property
    def passed(self) -> bool:
        return self.membership_failures == 0 and self.max_support_violation <= self.threshold * self.scale

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{self.name}: {verdict} max_violation={self.max_support_violation:.3e} "
                f"failures={self.membership_failures} grid={self.grid_size}"
                + (f" ({self.detail})" if self.detail else ""))


def _grid(size: int) -> np.ndarray:
    return -math.pi + 2 * math.pi * np.arange(size) / size


def _violations(points: np.ndarray, h: np.ndarray, psi: np.ndarray, slack: float) -> tuple[float, int]:
    fin = np.isfinite(h)
    if points.size == 0 or not fin.any():
        return 0.0, 0
    proj = np.outer(points.real, np.cos(psi[fin])) + np.outer(points.imag, np.sin(psi[fin]))
    excess = proj - h[fin][None, :]
    worst = np.max(excess, axis=1)
    return max(0.0, float(np.max(worst))), int(np.sum(worst > slack))


def membership_check(a, j: Signature, hull: RegionHull, batch: SampleBatch, grid_size: int = 256,
                     rule: Optional[str] = None) -> VerificationReport:
    """Every sampled value must satisfy all support inequalities of its region."""
    scale = matrix_scale(a)
    psi = _grid(grid_size)
    slack = MEMBERSHIP_SLACK * scale
    worst, fails = 0.0, 0
    for side, pts in ((PLUS, batch.points_plus), (MINUS, batch.points_minus)):
        w, f = _violations(pts, hull.support(side, psi), psi, slack)
        worst, fails = max(worst, w), fails + f
    return VerificationReport("membership", worst, fails, grid_size, scale, rule,
                              f"{batch.points_plus.size}+{batch.points_minus.size} samples")


def support_crosscheck(a, j: Signature, hull: RegionHull, grid_size: int = 256,
                       rule: Optional[str] = None) -> VerificationReport:
    """Compare the hull's support values with the dense-eigensolver pencil values."""
    a = as_matrix(a)
    scale = matrix_scale(a)
    psi = _grid(grid_size)
    samples = [pencil_sample(a, j, float(t)) for t in psi]
    dev, mismatches = 0.0, 0
    for side in SIDES:
        h = hull.support(side, psi)
        p = np.array([s.support_plus if side == PLUS else s.support_minus for s in samples])
        both = np.isfinite(h) & np.isfinite(p)
        if both.any():
            dev = max(dev, float(np.max(np.abs(h[both] - p[both]))))
        for k in np.flatnonzero(np.isfinite(h) != np.isfinite(p)):
            # only count mismatches away from the ends of a finite-support interval
            near = hull.support(side, np.array([psi[k] - 1e-6, psi[k] + 1e-6]))
            if np.all(np.isfinite(near) == np.isfinite(h[k])):
                mismatches += 1
    return VerificationReport("support_crosscheck", dev, mismatches, grid_size, scale, rule,
                              threshold=MEMBERSHIP_SLACK)


def eigenvalue_inclusion_check(a, j: Signature, hull: RegionHull, grid_size: int = 256) -> VerificationReport:
    """Eigenvalues with plus (minus) eigenvectors lie in the plus (minus) region."""
    a = as_matrix(a)
    scale = matrix_scale(a)
    psi = _grid(grid_size)
    entries, _ = signed_eigensystem(a, j.diag, real_tol=None)
    worst, fails = 0.0, 0
    for side in SIDES:
        vals = np.array([e.value for e in entries if e.sign_class == side])
        w, f = _violations(vals, hull.support(side, psi), psi, INCLUSION_SLACK * scale)
        worst, fails = max(worst, w), fails + f
    return VerificationReport("eigenvalue_inclusion", worst, fails, grid_size, scale,
                              threshold=INCLUSION_SLACK)


# ---------------------------------------------------------------------------
# random instances


def random_complex(rng: np.random.Generator, shape, bound: float = 5.0) -> np.ndarray:
    return rng.uniform(-bound, bound, shape) + 1j * rng.uniform(-bound, bound, shape)


def random_j_unitary(rng: np.random.Generator, j: Signature, size: float = 0.3) -> np.ndarray:
    """``exp(J S)`` with ``S`` skew-Hermitian is J-unitary."""
    s = random_complex(rng, (j.n, j.n), 1.0)
    s = size * (s - s.conj().T) / 2
    return scipy.linalg.expm(np.diag(j.diag) @ s)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def j_unitary_conjugate(a, u, j: Signature) -> np.ndarray:
    return j_adjoint(u, j) @ a @ u

"""Block-form detection and closed-form classification of the boundary curve.

A matrix of the form ``A = [[alpha I_r, C], [D, beta I_{n-r}]]`` with
``n <= 2r`` is carried by :class:`BlockForm`.  Its generating curve splits into
hyperbolic components, one for every joint eigenpair ``(z_j, h_j)`` of
``DC`` and ``C^*C + DD^*`` when those two commute and ``DC`` is normal.  The
specialised rules below (commuting blocks, Hermitian blocks, scalar ``DC``,
arrowhead, angle-invariant ``M(theta)``) each produce the same list of
components from their own formulas and act as cross-checks on the general one.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .core import Signature, as_matrix, j_adjoint
from .errors import (
    ConditionViolated,
    DegenerateAlphaBeta,
    InvalidMetric,
    NotApplicable,
    NotBlockForm,
    NotCommuting,
    NotNormal,
    ZeroOffDiagonal,
)
from .tolerances import get_tolerances

HYPERBOLA = "hyperbola"
POINT_PAIR = "point_pair"
POINT = "point"


@dataclass(frozen=True)
class InequalityValue:
    label: str
    lhs: float
    rhs: float
    strict: bool
    holds: bool


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    residual: float


@dataclass(frozen=True)
class ClassificationCertificate:
    """Everything a rule looked at before giving its verdict."""

    rule_fired: str
    inequalities: tuple = ()
    hypotheses: tuple = ()
    verdict: Optional[str] = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "rule_fired": self.rule_fired,
            "verdict": self.verdict,
            "inequalities": [
                {"label": q.label, "lhs": q.lhs, "rhs": q.rhs, "strict": q.strict, "holds": q.holds}
                for q in self.inequalities
            ],
            "hypotheses": [
                {"name": h.name, "passed": h.passed, "residual": h.residual} for h in self.hypotheses
            ],
            "notes": list(self.notes),
        }


@dataclass(frozen=True, eq=False)
class BlockForm:
    """``[[alpha I_r, C], [D, beta I_{n-r}]]`` with ``n <= 2r``.

    ``swapped`` records that the input had ``n > 2r`` and was brought to this
    orientation by exchanging the roles of the two diagonal blocks (and
    replacing ``J`` with ``-J``).  Under that exchange the plus and minus
    parts of the range trade places.
    """

    alpha: complex
    beta: complex
    c_block: np.ndarray = field(repr=False)
    d_block: np.ndarray = field(repr=False)
    swapped: bool = False

    def __post_init__(self):
        c = np.asarray(self.c_block, dtype=complex)
        d = np.asarray(self.d_block, dtype=complex)
        if c.ndim != 2 or d.shape != (c.shape[1], c.shape[0]):
            raise InvalidMetric(f"incompatible block shapes {c.shape} and {d.shape}")
        if c.shape[0] < c.shape[1]:
            raise InvalidMetric("block form requires n <= 2r")
        object.__setattr__(self, "c_block", c)
        object.__setattr__(self, "d_block", d)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def r(self) -> int:
        return self.c_block.shape[0]

    @property
    def n(self) -> int:
        return self.c_block.shape[0] + self.c_block.shape[1]

    @property
    def signature(self) -> Signature:
        return Signature(self.r, self.n)

    @property
    def omega(self) -> complex:
        return (self.alpha - self.beta) / 2

    @property
    def center(self) -> complex:
        return (self.alpha + self.beta) / 2

    @property
    def dc(self) -> np.ndarray:
        return self.d_block @ self.c_block

    @property
    def k_matrix(self) -> np.ndarray:
        c, d = self.c_block, self.d_block
        return c.conj().T @ c + d @ d.conj().T

    def matrix(self) -> np.ndarray:
        r, n = self.r, self.n
        a = np.zeros((n, n), dtype=complex)
        a[:r, :r] = self.alpha * np.eye(r)
        a[r:, r:] = self.beta * np.eye(n - r)
        a[:r, r:] = self.c_block
        a[r:, :r] = self.d_block
        return a

    def scale(self) -> float:
        return max(1.0, float(np.linalg.norm(self.matrix(), 2)))


def detect_block_form(a, j: Signature) -> BlockForm:
    """Recognise the scalar-diagonal block structure of ``a`` relative to ``j``."""
    a = as_matrix(a)
    j.check(a)
    tol = get_tolerances()
    r, n = j.r, j.n
    if not 0 < r < n:
        raise InvalidMetric("block analysis needs an indefinite metric")
    scale = max(1.0, float(np.linalg.norm(a)))
    a11, a22 = a[:r, :r], a[r:, r:]
    alpha = complex(np.trace(a11) / r)
    beta = complex(np.trace(a22) / (n - r))
    if np.linalg.norm(a11 - alpha * np.eye(r)) > tol.herm * scale:
        raise NotBlockForm("upper-left block is not a scalar matrix")
    if np.linalg.norm(a22 - beta * np.eye(n - r)) > tol.herm * scale:
        raise NotBlockForm("lower-right block is not a scalar matrix")
    c, d = a[:r, r:], a[r:, :r]
    if np.linalg.norm(c) <= tol.herm * scale and np.linalg.norm(d) <= tol.herm * scale:
        err = ZeroOffDiagonal("both off-diagonal blocks vanish")
        err.alpha, err.beta = alpha, beta
        raise err
    if abs(alpha - beta) <= tol.herm * scale:
        err = DegenerateAlphaBeta("diagonal scalars coincide")
        err.alpha, err.beta = alpha, beta
        raise err
    if n > 2 * r:
        return BlockForm(beta, alpha, d.copy(), c.copy(), swapped=True)
    return BlockForm(alpha, beta, c.copy(), d.copy())


def _herm_part(x: np.ndarray) -> np.ndarray:
    return (x + x.conj().T) / 2


def m_theta(bf: BlockForm, theta: float) -> np.ndarray:
    """``C^*C + DD^* - 2 Re(e^{-2i theta} DC)``, Hermitian and PSD."""
    return bf.k_matrix - 2 * _herm_part(cmath.exp(-2j * theta) * bf.dc)


@dataclass(frozen=True)
class ClosedFormEigen:
    """One closed-form pencil eigenvalue pair.

    ``upper``/``lower`` are the two roots attached to one eigenvalue of
    ``M(theta)``; ``lower`` is ``None`` for the residual eigenvalue
    ``Re(e^{-i theta} alpha)`` which always belongs to the plus class.
    ``hint`` is ``"upper_plus"``, ``"lower_plus"``, ``"plus"`` or
    ``"unsplit"`` (complex pair, or a double root).
    """

    upper: complex
    lower: Optional[complex]
    hint: str


def closed_form_eigenvalues(bf: BlockForm, theta: float) -> list[ClosedFormEigen]:
    """Eigenvalues of ``H_theta(A)`` from the eigenvalues of ``M(theta)``."""
    e = cmath.exp(-1j * theta)
    mid = 0.5 * (e * (bf.alpha + bf.beta)).real
    w = (e * bf.omega).real
    mu = np.linalg.eigvalsh(m_theta(bf, theta))
    out = []
    for m in mu[::-1]:
        disc = w * w - m / 4
        root = cmath.sqrt(disc)
        if disc > 0 and w != 0:
            hint = "upper_plus" if w > 0 else "lower_plus"
        else:
            hint = "unsplit"
        out.append(ClosedFormEigen(mid + root, mid - root, hint))
    plus_val = (e * bf.alpha).real
    for _ in range(2 * bf.r - bf.n):
        out.append(ClosedFormEigen(complex(plus_val), None, "plus"))
    return out


def closed_form_spectrum(bf: BlockForm, theta: float) -> np.ndarray:
    vals = []
    for item in closed_form_eigenvalues(bf, theta):
        vals.append(item.upper)
        if item.lower is not None:
            vals.append(item.lower)
    return np.array(vals, dtype=complex)


@dataclass(frozen=True)
class SpectralPair:
    """A joint eigenvalue ``z`` of ``DC`` and ``h`` of ``C^*C + DD^*``."""

    z: complex
    h: float
    delta: complex
    multiplicity: int = 1

    @property
    def rotation(self) -> float:
        return 0.5 * cmath.phase(self.delta)


@dataclass(frozen=True)
class ComponentSpec:
    """Closed-form description of one component of the boundary curve.

    ``kind`` is ``"hyperbola"``, ``"point_pair"`` (a hyperbola collapsed to
    its two foci) or ``"point"`` (an isolated point, stored in ``foci[0]``).
    ``foci[0] - foci[1]`` points along the transverse axis.
    """

    kind: str
    foci: tuple
    transverse: float
    nontransverse: float
    multiplicity: int = 1
    source: Optional[SpectralPair] = None

    @property
    def center(self) -> complex:
        return (self.foci[0] + self.foci[1]) / 2

    @property
    def rotation(self) -> float:
        d = self.foci[0] - self.foci[1]
        return cmath.phase(d) if abs(d) > 0 else 0.0

    def points(self) -> list[complex]:
        if self.kind == POINT:
            return [self.foci[0]]
        if self.kind == POINT_PAIR:
            return list(self.foci)
        return []


def _cluster(values, tol):
    groups: list[list[int]] = []
    for k, v in enumerate(values):
        for g in groups:
            if abs(values[g[0]] - v) <= tol:
                g.append(k)
                break
        else:
            groups.append([k])
    return groups


def _offdiag_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x - np.diag(np.diag(x))))


def _hypotheses_main(bf: BlockForm) -> tuple[HypothesisCheck, HypothesisCheck]:
    tol = get_tolerances()
    dc, k = bf.dc, bf.k_matrix
    ndc = float(np.linalg.norm(dc))
    nk = float(np.linalg.norm(k))
    normal_res = float(np.linalg.norm(dc @ dc.conj().T - dc.conj().T @ dc))
    comm_res = float(np.linalg.norm(dc @ k - k @ dc))
    # measured against |C||D| so that a DC which vanishes up to round-off passes
    ref = max(ndc, float(np.linalg.norm(bf.c_block)) * float(np.linalg.norm(bf.d_block)))
    normal_ok = normal_res <= tol.herm * max(ref * ref, 1e-300)
    comm_ok = comm_res <= tol.herm * max(ref * nk, 1e-300)
    return (
        HypothesisCheck("DC_normal", bool(normal_ok), normal_res),
        HypothesisCheck("DC_commutes_with_K", bool(comm_ok), comm_res),
    )


def spectral_pairs(bf: BlockForm) -> list[SpectralPair]:
    """Joint eigenvalue pairs of ``DC`` and ``K = C^*C + DD^*``.

    Raises :class:`NotNormal` / :class:`NotCommuting` when the hypotheses
    of the common diagonalisation fail.
    """
    tol = get_tolerances()
    normal, comm = _hypotheses_main(bf)
    if not normal.passed:
        raise NotNormal("DC is not normal", ClassificationCertificate("thm_3_2", hypotheses=(normal, comm)))
    if not comm.passed:
        raise NotCommuting(
            "DC does not commute with C^*C + DD^*",
            ClassificationCertificate("thm_3_2", hypotheses=(normal, comm)),
        )
    dc, k = bf.dc, bf.k_matrix
    scale = max(1.0, float(np.linalg.norm(dc)), float(np.linalg.norm(k)))
    t, q = scipy.linalg.schur(dc, output="complex")
    zdiag = np.diag(t)
    basis = np.zeros_like(q)
    col = 0
    for group in _cluster(list(zdiag), tol.cluster * scale):
        qg = q[:, group]
        kg = qg.conj().T @ k @ qg
        _, vg = np.linalg.eigh(_herm_part(kg))
        basis[:, col : col + len(group)] = qg @ vg
        col += len(group)
    zz = np.diag(basis.conj().T @ dc @ basis)
    hh = np.diag(basis.conj().T @ k @ basis).real
    # merge repeated pairs
    raw = list(zip(zz, hh))
    merged: list[list] = []
    for z, h in raw:
        for m in merged:
            if abs(m[0] - z) <= tol.cluster * scale and abs(m[1] - h) <= tol.cluster * scale:
                m[2] += 1
                break
        else:
            merged.append([complex(z), float(h), 1])
    ab = bf.alpha - bf.beta
    pairs = [SpectralPair(z, max(h, 0.0), ab * ab + 4 * z, m) for z, h, m in merged]
    pairs.sort(key=lambda p: (-p.h, -p.z.real, -p.z.imag))
    return pairs


def _condition_values(bf: BlockForm, pair: SpectralPair):
    ab2 = abs(bf.alpha - bf.beta) ** 2
    ad = abs(pair.delta)
    return ab2 - ad, 2 * pair.h, ab2 + ad


def pair_inequalities(bf: BlockForm, pair: SpectralPair, label: str) -> tuple[InequalityValue, InequalityValue, str]:
    """Check ``|a-b|^2 - |Delta| <= 2h < |a-b|^2 + |Delta|`` for one pair.

    Returns the two inequality records and the outcome ``"hyperbola"``,
    ``"point_pair"``, ``"lhs_violated"`` or ``"rhs_violated"``.
    """
    tol = get_tolerances()
    lo, mid, hi = _condition_values(bf, pair)
    slack = tol.condition * max(hi, 1e-300)
    lower = InequalityValue(f"{label}_lower", lo, mid, False, mid >= lo - slack)
    upper = InequalityValue(f"{label}_upper", mid, hi, True, mid < hi - slack)
    if not upper.holds:
        outcome = "rhs_violated"
    elif not lower.holds:
        outcome = "lhs_violated"
    elif abs(mid - lo) <= slack:
        outcome = POINT_PAIR
    else:
        outcome = HYPERBOLA
    return lower, upper, outcome


def component_from_pair(bf: BlockForm, pair: SpectralPair, outcome: str) -> ComponentSpec:
    ab2 = abs(bf.alpha - bf.beta) ** 2
    ad = abs(pair.delta)
    root = 0.5 * cmath.sqrt(pair.delta)
    foci = (bf.center + root, bf.center - root)
    n_len = math.sqrt(max(0.0, 0.5 * ad + 0.5 * ab2 - pair.h))
    m_len = 0.0 if outcome == POINT_PAIR else math.sqrt(max(0.0, 0.5 * ad - 0.5 * ab2 + pair.h))
    return ComponentSpec(outcome, foci, n_len, m_len, pair.multiplicity, pair)


def _alpha_point(bf: BlockForm) -> ComponentSpec:
    return ComponentSpec(POINT, (bf.alpha, bf.alpha), 0.0, 0.0, 2 * bf.r - bf.n)


def _finish(bf: BlockForm, comps: list[ComponentSpec]) -> list[ComponentSpec]:
    """Append the isolated point ``alpha`` when ``n < 2r`` (unless already present)."""
    if bf.n < 2 * bf.r:
        tol = get_tolerances()
        present = any(
            c.kind in (POINT, POINT_PAIR) and any(abs(p - bf.alpha) <= tol.cluster * bf.scale() for p in c.points())
            for c in comps
        )
        if not present:
            comps.append(_alpha_point(bf))
    return comps


def classify_main(bf: BlockForm) -> tuple[list[ComponentSpec], ClassificationCertificate]:
    """General classification from the joint spectrum of ``DC`` and ``K``."""
    pairs = spectral_pairs(bf)
    hyps = _hypotheses_main(bf)
    ineqs: list[InequalityValue] = []
    comps: list[ComponentSpec] = []
    bad = []
    notes = []
    for i, p in enumerate(pairs):
        lo, hi, outcome = pair_inequalities(bf, p, f"pair{i + 1}")
        ineqs += [lo, hi]
        if outcome in ("lhs_violated", "rhs_violated"):
            bad.append((i, outcome))
            continue
        if p.h <= get_tolerances().cluster * bf.scale() ** 2:
            notes.append(f"pair{i + 1} has h = 0; contributes the points alpha and beta")
        comps.append(component_from_pair(bf, p, outcome))
    if bad:
        cert = ClassificationCertificate(
            "thm_3_2",
            tuple(ineqs),
            hyps,
            "not_disc",
            tuple(f"pair{i + 1}: {o}" for i, o in bad),
        )
        raise ConditionViolated("hyperbolicity inequality fails for some joint eigenpair", cert)
    comps = _finish(bf, comps)
    return comps, ClassificationCertificate("thm_3_2", tuple(ineqs), hyps, "disc", tuple(notes))


# ---------------------------------------------------------------------------
# specialised rules


def _common_basis(mats: list[np.ndarray], scale: float) -> Optional[np.ndarray]:
    """Unitary diagonalising every Hermitian matrix in ``mats`` (or ``None``)."""
    tol = get_tolerances()
    coeffs = [1.0, math.sqrt(2.0), math.sqrt(3.0), math.sqrt(5.0), math.sqrt(7.0), math.pi]
    for attempt in range(3):
        g = sum(coeffs[(k + attempt) % len(coeffs)] ** (attempt + 1) * m for k, m in enumerate(mats))
        _, u = np.linalg.eigh(_herm_part(g))
        if all(_offdiag_norm(u.conj().T @ m @ u) <= 1e3 * tol.herm * scale for m in mats):
            return u
    return None


def _point_components(bf: BlockForm, with_alpha_beta: bool) -> list[ComponentSpec]:
    comps = []
    if with_alpha_beta:
        comps.append(ComponentSpec(POINT_PAIR, (bf.alpha, bf.beta), abs(bf.alpha - bf.beta), 0.0))
    return comps


def _from_foci(bf, f_plus, f_minus, m_len, mult=1) -> ComponentSpec:
    dist2 = abs(f_plus - f_minus) ** 2
    n_len = math.sqrt(max(0.0, dist2 - m_len * m_len))
    kind = POINT_PAIR if m_len == 0.0 else HYPERBOLA
    return ComponentSpec(kind, (f_plus, f_minus), n_len, m_len, mult)


def classify_commuting_blocks(bf: BlockForm):
    """Rule for normal ``CD`` and ``DC``: lengths from ``sigma_j, delta_j, z_j``."""
    tol = get_tolerances()
    c, d = bf.c_block, bf.d_block
    cd, dc = c @ d, d @ c
    sc = bf.scale() ** 2
    res_cd = float(np.linalg.norm(cd @ cd.conj().T - cd.conj().T @ cd))
    res_dc = float(np.linalg.norm(dc @ dc.conj().T - dc.conj().T @ dc))
    hyps = (
        HypothesisCheck("CD_normal", res_cd <= tol.herm * sc * sc, res_cd),
        HypothesisCheck("DC_normal", res_dc <= tol.herm * sc * sc, res_dc),
    )
    if not all(h.passed for h in hyps):
        raise NotApplicable("CD or DC is not normal", ClassificationCertificate("cor_4_1", hypotheses=hyps))
    ctc = c.conj().T @ c
    ddh = d @ d.conj().T
    u = _common_basis([ctc, ddh, _herm_part(dc), _herm_part(-1j * dc)], sc)
    if u is None:
        raise NotApplicable("no common unitary eigenbasis", ClassificationCertificate("cor_4_1", hypotheses=hyps))
    sig2 = np.diag(u.conj().T @ ctc @ u).real
    del2 = np.diag(u.conj().T @ ddh @ u).real
    zs = np.diag(u.conj().T @ dc @ u)
    a2, b2 = abs(bf.alpha) ** 2, abs(bf.beta) ** 2
    ineqs, comps, notes, bad = [], [], [], []
    seen: list[tuple] = []
    for s2, dl2, z in zip(sig2, del2, zs):
        key = (complex(z), float(s2 + dl2))
        dup = [x for x in seen if abs(x[0] - key[0]) <= tol.cluster * sc and abs(x[1] - key[1]) <= tol.cluster * sc]
        if dup:
            dup[0][2][0] += 1
            continue
        delta = (bf.alpha - bf.beta) ** 2 + 4 * z
        fp = bf.center + 0.5 * cmath.sqrt(delta)
        fm = bf.center - 0.5 * cmath.sqrt(delta)
        lo = 2 * (fp.conjugate() * fm).real
        mid = a2 + b2 - s2 - dl2
        hi = abs(fp) ** 2 + abs(fm) ** 2
        slack = tol.condition * max(abs(hi), abs(lo), 1.0)
        i = len(seen) + 1
        ineqs.append(InequalityValue(f"pair{i}_lower", lo, mid, True, mid > lo + slack))
        ineqs.append(InequalityValue(f"pair{i}_upper", mid, hi, True, mid < hi - slack))
        mult = [1]
        seen.append((key[0], key[1], mult))
        # mid - lo is the squared transverse length, hi - mid the non-transverse one
        if mid <= lo + slack or mid > hi + slack:
            bad.append(i)
            continue
        m2 = hi - mid
        if abs(mid - hi) <= slack:
            notes.append(f"pair{i} sits on the boundary of the condition; collapses to its foci")
            comps.append((fp, fm, 0.0, mult))
        else:
            comps.append((fp, fm, math.sqrt(max(m2, 0.0)), mult))
    if bad:
        cert = ClassificationCertificate("cor_4_1", tuple(ineqs), hyps, "not_disc")
        raise ConditionViolated("commuting-block inequality fails", cert)
    specs = [_from_foci(bf, fp, fm, ml, mult[0]) for fp, fm, ml, mult in comps]
    specs = _finish(bf, specs)
    return specs, ClassificationCertificate("cor_4_1", tuple(ineqs), hyps, "disc", tuple(notes))


def classify_hermitian_blocks(bf: BlockForm):
    """Real ``alpha, beta`` with ``D = C^*``: horizontal nested hyperbolas."""
    tol = get_tolerances()
    sc = bf.scale()
    res_ab = abs(bf.alpha.imag) + abs(bf.beta.imag)
    res_d = float(np.linalg.norm(bf.d_block - bf.c_block.conj().T))
    hyps = (
        HypothesisCheck("alpha_beta_real", res_ab <= tol.herm * sc, res_ab),
        HypothesisCheck("D_equals_C_adjoint", res_d <= tol.herm * sc, res_d),
    )
    if not all(h.passed for h in hyps):
        raise NotApplicable("blocks are not Hermitian-paired", ClassificationCertificate("cor_5_1", hypotheses=hyps))
    w = bf.omega.real
    cen = bf.center.real
    sv = np.linalg.svd(bf.c_block, compute_uv=False)
    nz = [s for s in sv if s > tol.herm * sc]
    comps = []
    for group in _cluster(nz, tol.cluster * sc):
        s = nz[group[0]]
        f = math.sqrt(w * w + s * s)
        comps.append(ComponentSpec(HYPERBOLA, (complex(cen + f), complex(cen - f)), 2 * abs(w), 2 * s, len(group)))
    notes = []
    if len(nz) < bf.n - bf.r:
        comps.append(ComponentSpec(POINT_PAIR, (complex(bf.alpha.real), complex(bf.beta.real)), 2 * abs(w), 0.0))
        notes.append("C is rank deficient; alpha and beta are isolated points")
    comps = _finish(bf, comps)
    return comps, ClassificationCertificate("cor_5_1", (), hyps, "disc", tuple(notes))


def classify_scalar_dc(bf: BlockForm):
    """``DC = z I``: one shared pair of foci, nested hyperbolas indexed by ``K``."""
    tol = get_tolerances()
    dc, k = bf.dc, bf.k_matrix
    m = bf.n - bf.r
    z = complex(np.trace(dc) / m)
    sc = bf.scale() ** 2
    res = float(np.linalg.norm(dc - z * np.eye(m)))
    hyps = (HypothesisCheck("DC_scalar", res <= tol.herm * sc, res),)
    if not hyps[0].passed:
        raise NotApplicable("DC is not scalar", ClassificationCertificate("cor_5_2", hypotheses=hyps))
    d_zero = float(np.linalg.norm(bf.d_block)) <= tol.herm * bf.scale()
    rule = "cor_5_3" if d_zero else "cor_5_2"
    hs = np.linalg.eigvalsh(_herm_part(k))[::-1]
    ab2 = abs(bf.alpha - bf.beta) ** 2
    delta = (bf.alpha - bf.beta) ** 2 + 4 * z
    knorm = float(hs[0])
    slack = tol.condition * max(ab2 + abs(delta), 1e-300)
    if d_zero:
        cnorm = float(np.linalg.norm(bf.c_block, 2))
        q = InequalityValue("C_norm_below_gap", cnorm, abs(bf.alpha - bf.beta), True,
                            cnorm < abs(bf.alpha - bf.beta) * (1 - tol.condition))
    else:
        lhs = abs(ab2 - 2 * knorm)
        q = InequalityValue("outer_pair", lhs, abs(delta), True, lhs < abs(delta) - slack)
    if not q.holds:
        raise ConditionViolated("outer component is not a hyperbola",
                                ClassificationCertificate(rule, (q,), hyps, "not_disc"))
    comps, notes = [], []
    for group in _cluster(list(hs), tol.cluster * sc):
        h = float(max(hs[group[0]], 0.0))
        pair = SpectralPair(z, h, delta, len(group))
        _, _, outcome = pair_inequalities(bf, pair, "inner")
        if outcome in ("lhs_violated", "rhs_violated"):
            notes.append(f"component with h={h:.6g} is not hyperbolic ({outcome})")
            continue
        comps.append(component_from_pair(bf, pair, outcome))
    comps = _finish(bf, comps)
    return comps, ClassificationCertificate(rule, (q,), hyps, "disc", tuple(notes))


def classify_arrowhead(alpha: complex, beta: complex, c_vec, d_vec):
    """Matrix ``[[alpha I_{n-1}, c], [d^T, beta]]`` with ``J = I_{n-1} (+) -1``.

    ``c`` is the last column above the diagonal and ``d`` the last row to the
    left of it.  Returns ``(components, certificate)``.
    """
    tol = get_tolerances()
    c = np.asarray(c_vec, dtype=complex).ravel()
    d = np.asarray(d_vec, dtype=complex).ravel()
    if c.shape != d.shape or c.size < 1:
        raise InvalidMetric("arrowhead vectors must have equal positive length")
    alpha, beta = complex(alpha), complex(beta)
    ctd = complex(c @ d)  # unconjugated
    ssum = float(np.vdot(c, c).real + np.vdot(d, d).real)
    ab2 = abs(alpha - beta) ** 2
    delta = (alpha - beta) ** 2 + 4 * ctd
    lhs = abs(ab2 - 2 * ssum)
    slack = tol.condition * max(ab2 + abs(delta), 1e-300)
    q = InequalityValue("arrowhead", lhs, abs(delta), True, lhs < abs(delta) - slack)
    if not q.holds:
        raise ConditionViolated("arrowhead inequality fails", ClassificationCertificate("cor_5_4", (q,), (), "not_disc"))
    cen = (alpha + beta) / 2
    root = 0.5 * cmath.sqrt(delta)
    fp, fm = cen + root, cen - root
    m2 = 0.5 * abs(delta) - 0.5 * ab2 + ssum
    comps = [_from_foci(None, fp, fm, math.sqrt(max(m2, 0.0)))]
    if c.size > 1:
        comps.append(ComponentSpec(POINT, (alpha, alpha), 0.0, 0.0, c.size - 1))
    return comps, ClassificationCertificate("cor_5_4", (q,), (), "disc")


def classify_theta_invariant(bf: BlockForm, samples: int = 64):
    """Rule for an ``M(theta)`` whose spectrum does not depend on ``theta``."""
    tol = get_tolerances()
    mu0 = np.linalg.eigvalsh(m_theta(bf, 0.0))
    scale = max(float(np.max(np.abs(mu0))), float(np.linalg.norm(bf.k_matrix, 2)), 1e-300)
    drift = 0.0
    for t in np.linspace(0, math.pi, samples, endpoint=False)[1:]:
        drift = max(drift, float(np.max(np.abs(np.linalg.eigvalsh(m_theta(bf, t)) - mu0))))
    hyps = (HypothesisCheck("M_theta_spectrum_constant", drift <= tol.herm * scale, drift),)
    if not hyps[0].passed:
        raise NotApplicable("spectrum of M(theta) varies with theta", ClassificationCertificate("thm_5_5", hypotheses=hyps))
    gap = abs(bf.alpha - bf.beta)
    diff = float(np.linalg.norm(bf.c_block - bf.d_block.conj().T, 2))
    q = InequalityValue("C_minus_D_adjoint_below_gap", diff, gap, True, diff < gap * (1 - tol.condition))
    if not q.holds:
        raise ConditionViolated("norm of C - D^* reaches |alpha - beta|",
                                ClassificationCertificate("thm_5_5", (q,), hyps, "not_disc"))
    mu = np.clip(mu0[::-1], 0.0, None)
    nz = [float(v) for v in mu if v > tol.herm * scale]
    comps = []
    for group in _cluster(nz, tol.cluster * scale):
        m2 = nz[group[0]]
        comps.append(ComponentSpec(HYPERBOLA, (bf.alpha, bf.beta), math.sqrt(max(gap * gap - m2, 0.0)),
                                   math.sqrt(m2), len(group)))
    if len(nz) < bf.n - bf.r:
        comps.append(ComponentSpec(POINT_PAIR, (bf.alpha, bf.beta), gap, 0.0))
    comps = _finish(bf, comps)
    note = f"M(theta) spectrum constant over {samples} angles (drift {drift:.1e})"
    return comps, ClassificationCertificate("thm_5_5", (q,), hyps, "disc", (note,))


SPECIALISED_RULES = (
    ("cor_4_1", classify_commuting_blocks),
    ("cor_5_1", classify_hermitian_blocks),
    ("cor_5_2", classify_scalar_dc),
    ("thm_5_5", classify_theta_invariant),
)


def run_specialised_rules(bf: BlockForm) -> dict:
    """Apply every specialised rule; map rule name to result or failure reason."""
    out = {}
    for name, fn in SPECIALISED_RULES:
        try:
            out[name] = fn(bf)
        except (NotApplicable, ConditionViolated) as exc:
            out[name] = exc
    if bf.n - bf.r == 1:
        # a single minus row/column is the arrowhead pattern
        try:
            out["cor_5_4"] = classify_arrowhead(bf.alpha, bf.beta, bf.c_block[:, 0], bf.d_block[0, :])
        except ConditionViolated as exc:
            out["cor_5_4"] = exc
    return out


def components_agree(left: list[ComponentSpec], right: list[ComponentSpec], tol: float) -> bool:
    """Compare two component lists as multisets of (kind, foci, lengths)."""

    def key(c: ComponentSpec):
        f = sorted(c.foci, key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        return (c.kind, f, c.transverse, c.nontransverse)

    def expand(lst):
        out = []
        for c in lst:
            out.append(key(c))
        return out

    a, b = expand(left), expand(right)
    if len(a) != len(b):
        return False
    used = [False] * len(b)
    for ka in a:
        for i, kb in enumerate(b):
            if used[i] or ka[0] != kb[0]:
                continue
            if ka[0] == POINT:
                ok = abs(ka[1][0] - kb[1][0]) <= tol
            else:
                ok = (
                    min(
                        abs(ka[1][0] - kb[1][0]) + abs(ka[1][1] - kb[1][1]),
                        abs(ka[1][0] - kb[1][1]) + abs(ka[1][1] - kb[1][0]),
                    )
                    <= 2 * tol
                    and abs(ka[2] - kb[2]) <= tol
                    and abs(ka[3] - kb[3]) <= tol
                )
            if ok:
                used[i] = True
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class TwoByTwoShape:
    """Shape of the range of a 2x2 matrix under ``J = diag(1, -1)``."""

    kind: str
    foci: tuple
    transverse: float
    nontransverse: float
    trace_value: float
    lower_bound: float
    upper_bound: float


def hyperbolical_range_2x2(a) -> TwoByTwoShape:
    """Decide the shape from ``T = Tr(A^# A)`` and the eigenvalues of ``A``.

    ``kind`` is ``"hyperbola"``, ``"half_lines"``, ``"singleton"``,
    ``"line_degenerate"`` or ``"plane_degenerate"``.
    """
    a = as_matrix(a)
    if a.shape != (2, 2):
        raise InvalidMetric("expected a 2x2 matrix")
    tol = get_tolerances()
    j = Signature(1, 2)
    t = float(np.trace(j_adjoint(a, j) @ a).real)
    l1, l2 = np.linalg.eigvals(a)
    left = 2 * (l1 * l2.conjugate()).real
    right = abs(l1) ** 2 + abs(l2) ** 2
    slack = tol.condition * max(right, abs(left), abs(t), 1.0)
    foci = (complex(l1), complex(l2))
    mid = np.trace(a) / 2
    if np.linalg.norm(a - mid * np.eye(2)) <= tol.herm * max(1.0, float(np.linalg.norm(a))):
        return TwoByTwoShape("singleton", (complex(mid), complex(mid)), 0.0, 0.0, t, left, right)
    if left + slack < t < right - slack:
        return TwoByTwoShape("hyperbola", foci, math.sqrt(t - left), math.sqrt(right - t), t, left, right)
    if abs(t - right) <= slack and left + slack < t:
        return TwoByTwoShape("half_lines", foci, math.sqrt(max(t - left, 0.0)), 0.0, t, left, right)
    kind = "line_degenerate" if abs(t - left) <= slack else "plane_degenerate"
    return TwoByTwoShape(kind, foci, 0.0, 0.0, t, left, right)

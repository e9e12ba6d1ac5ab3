"""Geometry of the boundary generating curve and of the two convex regions.

Components are hyperbolas ``center + e^{i phi}(+-a cosh t + i b sinh t)`` and
isolated points.  Each branch and point belongs either to the plus region
``W_+`` or to the minus region ``-W_-``; those regions are handled through
their support functions, since both are unbounded.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from .blocks import HYPERBOLA, POINT, POINT_PAIR, BlockForm, ComponentSpec
from .core import MINUS, NONREAL, PLUS, as_matrix, h_theta, pencil_sample, signed_eigensystem
from .errors import EmptyOmega
from .tolerances import get_tolerances

SIDES = (PLUS, MINUS)


def matrix_scale(a) -> float:
    return max(1.0, float(np.linalg.norm(np.asarray(a), 2)))


# ---------------------------------------------------------------------------
# components


@dataclass(frozen=True)
class HyperbolaComponent:
    """One hyperbola of the curve.

    ``branch_signs[0]`` is the region of the branch on the ``+e^{i phi}`` side
    of the center, ``branch_signs[1]`` the one on the ``-e^{i phi}`` side.
    """

    component_id: int
    center: complex
    rotation: float
    semi_transverse: float
    semi_nontransverse: float
    branch_signs: tuple = (None, None)
    multiplicity: int = 1
    unsigned: bool = False

    @property
    def focal_distance(self) -> float:
        return math.hypot(self.semi_transverse, self.semi_nontransverse)

    @property
    def foci(self) -> tuple:
        off = self.focal_distance * cmath.exp(1j * self.rotation)
        return (self.center + off, self.center - off)

    @property
    def valid_interval(self) -> tuple:
        """Pencil angles on which this component contributes real eigenvalues."""
        eta = math.atan2(self.semi_transverse, self.semi_nontransverse)
        return (self.rotation - eta, self.rotation + eta)

    def branch_sign(self, side: int) -> Optional[str]:
        return self.branch_signs[0 if side > 0 else 1]

    def branch_points(self, side: int, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        a, b = self.semi_transverse, self.semi_nontransverse
        local = side * a * np.cosh(t) + 1j * b * np.sinh(t)
        return self.center + cmath.exp(1j * self.rotation) * local

    def asymptote_directions(self) -> tuple:
        slope = cmath.exp(1j * self.rotation)
        return (slope * complex(self.semi_transverse, self.semi_nontransverse),
                slope * complex(self.semi_transverse, -self.semi_nontransverse))


@dataclass(frozen=True)
class IsolatedPoint:
    component_id: int
    value: complex
    sign: Optional[str] = None
    multiplicity: int = 1


@dataclass(frozen=True)
class DegenerateLabel:
    kind: str
    detail: str = ""


@dataclass(frozen=True, eq=False)
class EnvelopeTrack:
    """A run of envelope points traced by one pencil eigenvalue."""

    track_id: int
    component_id: int
    thetas: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    signs: tuple = field(repr=False)
    split_at_collision: bool = False


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    components: tuple
    center: complex
    numeric: bool = False

    @property
    def hyperbolas(self) -> list[HyperbolaComponent]:
        return [c for c in self.components if isinstance(c, HyperbolaComponent)]

    @property
    def points(self) -> list[IsolatedPoint]:
        return [c for c in self.components if isinstance(c, IsolatedPoint)]

    @property
    def tracks(self) -> list[EnvelopeTrack]:
        return [c for c in self.components if isinstance(c, EnvelopeTrack)]

    @property
    def component_count(self) -> int:
        """Distinct curve components; tracks joined through the wrap count once."""
        others = [c for c in self.components if not isinstance(c, (EnvelopeTrack, DegenerateLabel))]
        return len(others) + len({t.component_id for t in self.tracks})

    @property
    def labels(self) -> list[DegenerateLabel]:
        return [c for c in self.components if isinstance(c, DegenerateLabel)]

    def sample(self, samples: int = 512, t_max: float = 6.0) -> list[tuple]:
        """Rows ``(component_id, branch, sign, t_or_theta, x, y)``."""
        rows = []
        t = np.linspace(-t_max, t_max, samples)
        for comp in self.components:
            if isinstance(comp, HyperbolaComponent):
                for side, name in ((1, "pos"), (-1, "neg")):
                    pts = comp.branch_points(side, t)
                    sgn = _sign_symbol(comp.branch_sign(side))
                    rows += [(comp.component_id, name, sgn, float(tk), p.real, p.imag) for tk, p in zip(t, pts)]
            elif isinstance(comp, IsolatedPoint):
                rows.append((comp.component_id, "point", _sign_symbol(comp.sign), 0.0, comp.value.real, comp.value.imag))
            elif isinstance(comp, EnvelopeTrack):
                name = f"track{comp.track_id}"
                for th, p, s in zip(comp.thetas, comp.points, comp.signs):
                    rows.append((comp.component_id, name, _sign_symbol(s), float(th), p.real, p.imag))
        return rows


def _sign_symbol(sign: Optional[str]) -> str:
    return {PLUS: "+", MINUS: "-"}.get(sign, "none")


def envelope_point(lam: float, lam_prime: float, theta: float) -> complex:
    """Point where the line ``Re(e^{-i theta} z) = lam(theta)`` touches its envelope."""
    return cmath.exp(1j * theta) * complex(lam, lam_prime)


def support_functions(a, j, grid) -> list:
    """Pencil samples over ``grid``; raises :class:`EmptyOmega` if none is in class."""
    a = as_matrix(a)
    samples = [pencil_sample(a, j, float(t)) for t in grid]
    if not any(s.in_class_J for s in samples):
        raise EmptyOmega("the pencil is never in class on the grid")
    return samples


def analytic_components(specs: list[ComponentSpec], center: complex) -> BoundaryCurve:
    """Turn closed-form component descriptions into unsigned curve components."""
    comps = []
    cid = 0
    for spec in specs:
        if spec.kind == HYPERBOLA:
            comps.append(HyperbolaComponent(cid, spec.center, spec.rotation, spec.transverse / 2,
                                            spec.nontransverse / 2, multiplicity=spec.multiplicity))
            cid += 1
        elif spec.kind == POINT_PAIR:
            for f in spec.foci:
                comps.append(IsolatedPoint(cid, complex(f), None, spec.multiplicity))
                cid += 1
        elif spec.kind == POINT:
            comps.append(IsolatedPoint(cid, complex(spec.foci[0]), None, spec.multiplicity))
            cid += 1
    return BoundaryCurve(tuple(comps), complex(center))


# ---------------------------------------------------------------------------
# sign attribution


def _probe_value(entries, expected: float, tol: float) -> Optional[str]:
    near = [e for e in entries if e.sign_class != NONREAL and abs(e.value.real - expected) <= tol]
    if not near:
        return None
    signs = {e.sign_class for e in near}
    if len(signs) == 1 and signs <= {PLUS, MINUS}:
        return signs.pop()
    return None


def _pencil_entries(a, j, theta):
    tol = get_tolerances()
    entries, _ = signed_eigensystem(h_theta(a, j, theta), j.diag, real_tol=tol.real)
    return entries


def _closed_form_side(bf: Optional[BlockForm], phi: float) -> Optional[int]:
    """Side (+1/-1 along ``e^{i phi}``) of the plus branch, from the sign of ``Re(e^{-i phi} omega)``."""
    if bf is None:
        return None
    w = (cmath.exp(-1j * phi) * bf.omega).real
    if abs(w) <= get_tolerances().real * max(1.0, abs(bf.omega)):
        return None
    side = 1 if w > 0 else -1
    return -side if bf.swapped else side


def branch_sign_assignment(comp: HyperbolaComponent, a, j, bf: Optional[BlockForm] = None,
                           retries: int = 5) -> HyperbolaComponent:
    """Attach plus/minus to the two branches by probing the pencil near the axis angle."""
    a = as_matrix(a)
    tol = 1e-7 * matrix_scale(a)
    c, phi = comp.center, comp.rotation
    aa, bb = comp.semi_transverse, comp.semi_nontransverse
    for k in range(retries + 1):
        theta = phi + 1e-3 * k * (1 if k % 2 else -1)
        d = theta - phi
        root = math.sqrt(max(aa * aa * math.cos(d) ** 2 - bb * bb * math.sin(d) ** 2, 0.0))
        mid = (cmath.exp(-1j * theta) * c).real
        entries = _pencil_entries(a, j, theta)
        pos = _probe_value(entries, mid + root, tol)
        neg = _probe_value(entries, mid - root, tol)
        if pos is not None and neg is not None and pos != neg:
            return replace(comp, branch_signs=(pos, neg), unsigned=False)
    side = _closed_form_side(bf, phi)
    if side is None:
        return replace(comp, branch_signs=(None, None), unsigned=True)
    signs = (PLUS, MINUS) if side > 0 else (MINUS, PLUS)
    return replace(comp, branch_signs=signs, unsigned=True)


_POINT_PROBES = (0.3141, 1.2345, 2.0718, -0.8123, 2.7183, -2.2360)


def point_sign_assignment(pt: IsolatedPoint, a, j) -> IsolatedPoint:
    a = as_matrix(a)
    tol = 1e-7 * matrix_scale(a)
    for theta in _POINT_PROBES:
        s = _probe_value(_pencil_entries(a, j, theta), (cmath.exp(-1j * theta) * pt.value).real, tol)
        if s is not None:
            return replace(pt, sign=s)
    return pt


def assign_signs(curve: BoundaryCurve, a, j, bf: Optional[BlockForm] = None) -> BoundaryCurve:
    comps = []
    for comp in curve.components:
        if isinstance(comp, HyperbolaComponent):
            comps.append(branch_sign_assignment(comp, a, j, bf))
        elif isinstance(comp, IsolatedPoint):
            comps.append(point_sign_assignment(comp, a, j))
        else:
            comps.append(comp)
    return replace(curve, components=tuple(comps))


# ---------------------------------------------------------------------------
# support pieces


@dataclass(frozen=True)
class BranchPiece:
    """The convex region enclosed by one hyperbola branch."""

    component_id: int
    center: complex
    rotation: float
    a: float
    b: float
    side: int

    def support(self, psi) -> tuple[np.ndarray, np.ndarray]:
        psi = np.asarray(psi, dtype=float)
        d = psi - self.rotation
        cd, sd = np.cos(d), np.sin(d)
        u = self.side * self.a * cd
        v = self.b * sd
        finite = (u < 0) & (np.abs(u) >= np.abs(v) - 1e-15 * max(self.a, self.b, 1.0))
        base = self.center.real * np.cos(psi) + self.center.imag * np.sin(psi)
        root = np.sqrt(np.clip(u * u - v * v, 0.0, None))
        val = np.where(finite, base - root, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            th = np.where(finite, -v / np.where(u == 0, -1.0, u), np.nan)
        inside = np.abs(th) < 1 - 1e-12
        t = np.where(inside, np.arctanh(np.clip(th, -1 + 1e-12, 1 - 1e-12)), np.nan)
        local = self.side * self.a * np.cosh(t) + 1j * self.b * np.sinh(t)
        pts = np.where(inside & finite, self.center + cmath.exp(1j * self.rotation) * local, np.nan + 0j)
        return val, pts

    def perturbed(self, factor: float) -> "BranchPiece":
        return replace(self, a=self.a / factor, b=self.b * factor)


@dataclass(frozen=True)
class PointPiece:
    component_id: int
    value: complex
    center: complex

    def support(self, psi) -> tuple[np.ndarray, np.ndarray]:
        psi = np.asarray(psi, dtype=float)
        val = self.value.real * np.cos(psi) + self.value.imag * np.sin(psi)
        return val, np.full(psi.shape, self.value, dtype=complex)

    def perturbed(self, factor: float) -> "PointPiece":
        return replace(self, value=self.center + (self.value - self.center) / factor)


@dataclass(frozen=True)
class FlatPortion:
    start: complex
    end: complex
    side: str

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Corner:
    point: complex
    side: str


class RegionHull:
    """Support-function description of ``W_+`` and ``-W_-``."""

    method = "abstract"

    def __init__(self, center: complex, scale: float):
        self.center = complex(center)
        self.scale = scale
        self.flat_portions: list[FlatPortion] = []
        self.corners: list[Corner] = []
        self.plus_boundary = np.zeros(0, dtype=complex)
        self.minus_boundary = np.zeros(0, dtype=complex)
        self.unbounded = True

    def support(self, side: str, psi) -> np.ndarray:
        raise NotImplementedError

    def boundary(self, side: str) -> np.ndarray:
        return self.plus_boundary if side == PLUS else self.minus_boundary


class AnalyticHull(RegionHull):
    """Hull of signed hyperbola branches and points, evaluated in closed form."""

    method = "analytic"

    def __init__(self, curve: BoundaryCurve, scale: float, grid_size: int = 4096, pieces=None):
        super().__init__(curve.center, scale)
        self.curve = curve
        self.grid_size = grid_size
        self.pieces = pieces if pieces is not None else _pieces_from_curve(curve)
        self._build()

    def perturbed(self, factor: float) -> "AnalyticHull":
        """Hull shrunk by pushing every piece outward by ``1/factor`` (test control)."""
        pieces = {s: [p.perturbed(factor) for p in self.pieces[s]] for s in SIDES}
        return AnalyticHull(self.curve, self.scale, self.grid_size, pieces)

    def raw_support(self, side: str, psi):
        psi = np.atleast_1d(np.asarray(psi, dtype=float))
        pieces = self.pieces[side]
        if not pieces:
            return np.full(psi.shape, -np.inf), np.full(psi.shape, -1), np.full(psi.shape, np.nan + 0j)
        vals, pts = zip(*(p.support(psi) for p in pieces))
        vals = np.vstack(vals)
        pts = np.vstack(pts)
        arg = np.argmax(vals, axis=0)
        cols = np.arange(psi.size)
        return vals[arg, cols], arg, pts[arg, cols]

    def support(self, side: str, psi) -> np.ndarray:
        psi = np.atleast_1d(np.asarray(psi, dtype=float))
        other = MINUS if side == PLUS else PLUS
        own, _, _ = self.raw_support(side, psi)
        opp, _, _ = self.raw_support(other, psi + math.pi)
        slack = 1e-9 * self.scale
        ok = np.isfinite(own) & np.isfinite(opp) & (own <= -opp + slack)
        # an empty opposite region leaves this one as an ordinary convex set
        ok |= np.isfinite(own) & np.isneginf(opp)
        return np.where(ok, own, np.inf)

    def _build(self):
        g = self.grid_size
        psi = -math.pi + 2 * math.pi * np.arange(g) / g
        for side in SIDES:
            h = self.support(side, psi)
            raw, arg, pts = self.raw_support(side, psi)
            fin = np.isfinite(h)
            self.flat_portions += self._flats(side, psi, fin, arg)
            self.corners += self._corners(side, fin, arg)
            boundary = self._polyline(fin, pts)
            if side == PLUS:
                self.plus_boundary = boundary
            else:
                self.minus_boundary = boundary
        self.unbounded = True

    def _flats(self, side, psi, fin, arg) -> list[FlatPortion]:
        pieces = self.pieces[side]
        out: list[FlatPortion] = []
        g = psi.size
        for k in range(g):
            k2 = (k + 1) % g
            if not (fin[k] and fin[k2]) or arg[k] == arg[k2]:
                continue
            pi_, pj = pieces[arg[k]], pieces[arg[k2]]
            lo = psi[k]
            hi = psi[k2] if k2 else psi[k2] + 2 * math.pi

            def diff(t):
                return pi_.support(np.array([t]))[0][0] - pj.support(np.array([t]))[0][0]

            try:
                dlo, dhi = diff(lo), diff(hi)
                if not (np.isfinite(dlo) and np.isfinite(dhi)):
                    continue
                if dlo * dhi < 0:
                    star = scipy.optimize.brentq(diff, lo, hi, xtol=1e-14)
                else:
                    # a tie sits on a grid angle
                    star = lo if abs(dlo) <= abs(dhi) else hi
            except ValueError:
                continue
            p = pi_.support(np.array([star]))[1][0]
            q = pj.support(np.array([star]))[1][0]
            if not (np.isfinite(p) and np.isfinite(q)) or abs(p - q) <= 1e-9 * self.scale:
                continue
            if any(abs(f.start - p) + abs(f.end - q) <= 1e-7 * self.scale for f in out):
                continue
            out.append(FlatPortion(complex(p), complex(q), side))
        return out

    def _corners(self, side, fin, arg) -> list[Corner]:
        out = []
        for idx, piece in enumerate(self.pieces[side]):
            if not isinstance(piece, PointPiece):
                continue
            active = fin & (arg == idx)
            # active on at least two consecutive grid angles: a positive-length interval
            if np.any(active & np.roll(active, 1)):
                out.append(Corner(piece.value, side))
        return out

    def _polyline(self, fin, pts) -> np.ndarray:
        if not fin.any():
            return np.zeros(0, dtype=complex)
        start = int(np.flatnonzero(~fin)[0]) if not fin.all() else 0
        order = np.roll(np.arange(fin.size), -start)
        out = []
        for k in order:
            if fin[k] and np.isfinite(pts[k]):
                if not out or abs(out[-1] - pts[k]) > 1e-12 * self.scale:
                    out.append(pts[k])
            elif out and np.isfinite(out[-1]):
                out.append(np.nan + 0j)
        return np.array(out, dtype=complex)

    def active_components(self, side: str) -> set:
        g = self.grid_size
        psi = -math.pi + 2 * math.pi * np.arange(g) / g
        fin = np.isfinite(self.support(side, psi))
        _, arg, _ = self.raw_support(side, psi)
        return {(self.pieces[side][i].component_id, getattr(self.pieces[side][i], "side", 0)) for i in arg[fin]}


def _pieces_from_curve(curve: BoundaryCurve) -> dict:
    pieces = {PLUS: [], MINUS: []}
    for comp in curve.components:
        if isinstance(comp, HyperbolaComponent):
            for side in (1, -1):
                s = comp.branch_sign(side)
                if s in pieces:
                    pieces[s].append(BranchPiece(comp.component_id, comp.center, comp.rotation,
                                                 comp.semi_transverse, comp.semi_nontransverse, side))
        elif isinstance(comp, IsolatedPoint) and comp.sign in pieces:
            pieces[comp.sign].append(PointPiece(comp.component_id, comp.value, curve.center))
    return pieces


def pseudo_convex_hull(curve: BoundaryCurve, scale: float = 1.0, grid_size: int = 4096) -> AnalyticHull:
    return AnalyticHull(curve, scale, grid_size)


class PencilHull(RegionHull):
    """Hull whose support values come straight from the pencil eigenvalues."""

    method = "pencil"

    def __init__(self, a, j, grid_size: int = 1024, erosion: float = 0.0):
        a = as_matrix(a)
        super().__init__(complex(np.trace(a) / a.shape[0]), matrix_scale(a))
        self.a, self.j = a, j
        self.grid_size = grid_size
        self.erosion = erosion
        self._build()

    def perturbed(self, factor: float) -> "PencilHull":
        return PencilHull(self.a, self.j, self.grid_size, (1 - factor) * self.scale)

    def support(self, side: str, psi) -> np.ndarray:
        psi = np.atleast_1d(np.asarray(psi, dtype=float))
        out = np.empty(psi.size)
        for k, t in enumerate(psi):
            s = pencil_sample(self.a, self.j, float(t))
            out[k] = s.support_plus if side == PLUS else s.support_minus
        return out - self.erosion

    def _build(self):
        g = self.grid_size
        psi = -math.pi + 2 * math.pi * np.arange(g) / g
        bounds = {PLUS: [], MINUS: []}
        for t in psi:
            s = pencil_sample(self.a, self.j, float(t))
            for side in SIDES:
                val = s.support_plus if side == PLUS else s.support_minus
                if not np.isfinite(val):
                    bounds[side].append(np.nan + 0j)
                    continue
                best = [e for e in s.eigenvalues if e.sign_class == side and abs(e.value.real - val) <= 1e-12 * self.scale + 1e-15]
                x = best[0].eigenvector
                jn = float(np.real(np.vdot(x, self.j.diag * x)))
                bounds[side].append(np.vdot(x, self.j.diag * (self.a @ x)) / jn)
        for side in SIDES:
            pts = np.array(bounds[side], dtype=complex)
            if side == PLUS:
                self.plus_boundary = pts
            else:
                self.minus_boundary = pts
            # a corner: the same support point over several consecutive angles
            fin = np.isfinite(pts)
            for k in range(g):
                ks = [(k + m) % g for m in range(3)]
                if all(fin[i] for i in ks) and max(abs(pts[i] - pts[k]) for i in ks) <= 1e-9 * self.scale:
                    if not any(abs(c.point - pts[k]) <= 1e-6 * self.scale for c in self.corners):
                        self.corners.append(Corner(complex(pts[k]), side))
        self.flat_portions = detect_flat_portions_spectral(self.a, self.j, psi)


# ---------------------------------------------------------------------------
# flat portions from the pencil eigenspaces


def _top_gap(a, j, theta, side):
    s = pencil_sample(a, j, theta)
    if not s.in_class_J:
        return np.inf
    val = s.support_plus if side == PLUS else s.support_minus
    if not np.isfinite(val):
        return np.inf
    vals = s.plus_values if side == PLUS else s.minus_values
    if len(vals) < 2:
        return np.inf
    return vals[0] - vals[1]


def detect_flat_portions_spectral(a, j, grid) -> list[FlatPortion]:
    """Segments where the supporting pencil eigenvalue is multiple.

    The range of ``[H_{theta+pi/2} x, x] / [x, x]`` over the (same-sign)
    eigenspace is a segment of the boundary when it is not a single value.
    """
    a = as_matrix(a)
    scale = matrix_scale(a)
    grid = np.sort(np.asarray(grid, dtype=float))
    out: list[FlatPortion] = []
    for side in SIDES:
        gaps = np.array([_top_gap(a, j, float(t), side) for t in grid])
        g = grid.size
        for k in range(g):
            prev, nxt = gaps[(k - 1) % g], gaps[(k + 1) % g]
            if not np.isfinite(gaps[k]) or gaps[k] > prev or gaps[k] > nxt:
                continue
            lo = grid[k] - (grid[1] - grid[0])
            hi = grid[k] + (grid[1] - grid[0])
            res = scipy.optimize.minimize_scalar(
                lambda t: _top_gap(a, j, t, side), bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-13},
            )
            if not np.isfinite(res.fun) or res.fun > 1e-6 * scale:
                continue
            seg = _eigenspace_segment(a, j, float(res.x), side, scale)
            if seg is None:
                continue
            p, q = seg
            if any(min(abs(f.start - p) + abs(f.end - q), abs(f.start - q) + abs(f.end - p)) <= 1e-6 * scale
                   for f in out if f.side == side):
                continue
            out.append(FlatPortion(p, q, side))
    return out


def _eigenspace_segment(a, j, theta, side, scale):
    h = h_theta(a, j, theta)
    w, v = np.linalg.eig(h)
    jd = j.diag
    sgn = 1.0 if side == PLUS else -1.0
    cand = []
    for k in range(w.size):
        if abs(w[k].imag) > 1e-7 * scale:
            continue
        x = v[:, k] / np.linalg.norm(v[:, k])
        jn = float(np.real(np.vdot(x, jd * x)))
        if jn * sgn > 0:
            cand.append((w[k].real, k))
    if len(cand) < 2:
        return None
    cand.sort(reverse=True)
    top = cand[0][0]
    idx = [k for val, k in cand if top - val <= 1e-5 * scale]
    if len(idx) < 2:
        return None
    q, sv, _ = np.linalg.svd(v[:, idx], full_matrices=False)
    q = q[:, sv > 1e-8 * sv[0]]
    gram = q.conj().T @ (jd[:, None] * q)
    hp = h_theta(a, j, theta + math.pi / 2)
    hq = q.conj().T @ (jd[:, None] * (hp @ q))
    gram = sgn * (gram + gram.conj().T) / 2
    hq = sgn * (hq + hq.conj().T) / 2
    if np.min(np.linalg.eigvalsh(gram)) <= 0:
        return None  # indefinite eigenspace: the pair would not share a sign
    mu, y = scipy.linalg.eigh(hq, gram)
    if mu[-1] - mu[0] <= 1e-8 * scale:
        return None
    pts = []
    for col in (0, -1):
        x = q @ y[:, col]
        jn = float(np.real(np.vdot(x, jd * x)))
        pts.append(complex(np.vdot(x, jd * (a @ x)) / jn))
    return pts[0], pts[1]


# ---------------------------------------------------------------------------
# numerical envelope


def numerical_envelope(a, j, samples: int = 3200, collision: float = 1e-6) -> list[EnvelopeTrack]:
    """Trace every pencil eigenvalue over half a turn and form envelope points.

    Angles cover ``[-pi/2, pi/2)``; the wrap-around uses ``H_{theta+pi} = -H_theta``.
    Tracks are split where two eigenvalues collide or an eigenvalue leaves
    the real axis; tracks joined through the wrap share a ``component_id``.
    """
    a = as_matrix(a)
    tol = get_tolerances()
    n = a.shape[0]
    scale = matrix_scale(a)
    step = math.pi / samples
    thetas = -math.pi / 2 + step * np.arange(samples)
    vals = np.empty((samples, n), dtype=complex)
    signs = np.empty((samples, n), dtype=object)
    collide = np.zeros((samples, n), dtype=bool)
    for k, t in enumerate(thetas):
        entries, _ = signed_eigensystem(h_theta(a, j, t), j.diag, real_tol=tol.real)
        v = np.array([e.value for e in entries])
        s = [e.sign_class for e in entries]
        if k == 0:
            order = np.arange(n)
        else:
            pred = vals[k - 1] + (vals[k - 1] - vals[k - 2] if k >= 2 else 0)
            cost = np.abs(pred[:, None] - v[None, :])
            _, order = scipy.optimize.linear_sum_assignment(cost)
        vals[k] = v[order]
        signs[k] = [s[i] for i in order]
        for i in range(n):
            others = np.delete(vals[k], i)
            if others.size and np.min(np.abs(others - vals[k, i])) < collision * scale:
                collide[k, i] = True
    # continuation through the wrap: track i at the end meets track wrap[i] at the start
    pred = vals[-1] + (vals[-1] - vals[-2])
    cost = np.abs(pred[:, None] + vals[0][None, :])
    # H_{theta+pi} = -H_theta keeps the eigenvector, hence its sign; this
    # decides the match when a plus and a minus eigenvalue meet at the wrap
    # (signs are read away from collisions, where they are arbitrary)
    def end_sign(i, order):
        for k in order:
            if not collide[k, i] and signs[k][i] in (PLUS, MINUS):
                return signs[k][i]
        return None

    real = np.abs(vals.imag) <= 1e-7 * scale
    head = [end_sign(i, range(samples)) for i in range(n)]
    tail = [end_sign(i, range(samples - 1, -1, -1)) for i in range(n)]
    for i in range(n):
        for k in range(n):
            if (tail[i] and head[k] and tail[i] != head[k]) or real[-1, i] != real[0, k]:
                cost[i, k] += 1e6 * scale
    _, wrap = scipy.optimize.linear_sum_assignment(cost)

    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        parent[find(i)] = find(int(wrap[i]))
    # a conjugate pair is where two real tracks have met and left the axis:
    # both are branches of one curve
    for k in np.flatnonzero(~real.all(axis=1)):
        cols = np.flatnonzero(~real[k])
        for i in cols:
            for m in cols:
                if i < m and abs(vals[k, i] - vals[k, m].conjugate()) <= collision * scale:
                    parent[find(i)] = find(int(m))
    comp_ids = {root: cid for cid, root in enumerate(sorted({find(i) for i in range(n)}))}

    tracks: list[EnvelopeTrack] = []
    tid = 0
    for i in range(n):
        lam = vals[:, i].real
        deriv = np.full(samples, np.nan)
        deriv[1:-1] = (lam[2:] - lam[:-2]) / (2 * step)
        valid = real[:, i] & ~collide[:, i]
        valid[1:-1] &= real[2:, i] & real[:-2, i] & ~collide[2:, i] & ~collide[:-2, i]
        valid[0] = valid[-1] = False
        valid &= np.isfinite(deriv)
        runs = _runs(valid)
        for lo, hi in runs:
            if hi - lo < 3:
                continue
            idx = np.arange(lo, hi)
            pts = np.exp(1j * thetas[idx]) * (lam[idx] + 1j * deriv[idx])
            split = bool(collide[max(lo - 2, 0), i] or collide[min(hi + 1, samples - 1), i])
            tracks.append(EnvelopeTrack(tid, comp_ids[find(i)], thetas[idx], pts,
                                        tuple(signs[k, i] for k in idx), split))
            tid += 1
    return tracks


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    out = []
    k = 0
    m = mask.size
    while k < m:
        if mask[k]:
            k0 = k
            while k < m and mask[k]:
                k += 1
            out.append((k0, k))
        else:
            k += 1
    return out


def numeric_curve(a, j, samples: int = 3200) -> BoundaryCurve:
    a = as_matrix(a)
    tracks = numerical_envelope(a, j, samples)
    return BoundaryCurve(tuple(tracks), complex(np.trace(a) / a.shape[0]), numeric=True)


def taxonomy_of(hull: AnalyticHull) -> str:
    """``hyperbolic_disc`` when both regions are bounded by the two branches of one hyperbola."""
    if hull.flat_portions or hull.corners:
        return "hull_of_hyperbolas_with_flats"
    plus = hull.active_components(PLUS)
    minus = hull.active_components(MINUS)
    if len(plus) == 1 and len(minus) == 1:
        (cp, sp), = plus
        (cm, sm), = minus
        if cp == cm and sp == -sm and sp != 0:
            return "hyperbolic_disc"
    return "hull_of_hyperbolas_with_flats"

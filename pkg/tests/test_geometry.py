import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreinrange.core import MINUS, PLUS, Signature, pencil_sample
from kreinrange.errors import EmptyOmega
from kreinrange.geometry import (
    AnalyticHull,
    BoundaryCurve,
    HyperbolaComponent,
    IsolatedPoint,
    PencilHull,
    detect_flat_portions_spectral,
    envelope_point,
    numerical_envelope,
    support_functions,
    taxonomy_of,
)
from kreinrange.pipeline import classify_matrix

from generators import commuting_blocks, fixture

GRID = -math.pi + 2 * math.pi * np.arange(1024) / 1024


def report_of(name):
    a, j = fixture(name)
    return classify_matrix(a, j, crosscheck=False)


def test_envelope_point_examples():
    assert envelope_point(2.0, 0.0, 0.0) == 2
    assert envelope_point(2.0, 0.0, math.pi / 2) == pytest.approx(2j)
    assert envelope_point(1.0, 1.0, 0.0) == 1 + 1j


def test_envelope_of_hyperbola_support_lies_on_hyperbola():
    # lam(theta) = sqrt(a^2 cos^2 - b^2 sin^2) is the support of a right branch
    a, b = 2.0, 0.7
    for t in np.linspace(-1.0, 1.0, 21):
        lam = math.sqrt(a * a * math.cos(t) ** 2 - b * b * math.sin(t) ** 2)
        dlam = -(a * a + b * b) * math.sin(t) * math.cos(t) / lam
        z = envelope_point(lam, dlam, t)
        assert z.real**2 / a**2 - z.imag**2 / b**2 == pytest.approx(1.0, abs=1e-12)
        assert z.real > 0


def test_hyperbola_component_geometry():
    h = HyperbolaComponent(0, 1 + 1j, 0.3, 3.0, 4.0, (PLUS, MINUS))
    f0, f1 = h.foci
    assert abs(f0 - f1) == pytest.approx(10.0)
    assert (f0 + f1) / 2 == pytest.approx(1 + 1j)
    for side in (1, -1):
        z = h.branch_points(side, np.linspace(-2, 2, 9))
        # focal definition: | |z - f0| - |z - f1| | = 2a
        assert np.allclose(np.abs(np.abs(z - f0) - np.abs(z - f1)), 6.0)
    lo, hi = h.valid_interval
    assert hi - lo == pytest.approx(2 * math.atan2(3.0, 4.0))


def test_corner_example_hull():
    rep = report_of("corner_flats")
    hull = rep.hull
    corners = {(round(c.point.real, 10), c.side) for c in hull.corners}
    assert corners == {(round(8 + math.sqrt(3), 10), PLUS), (round(8 - math.sqrt(3), 10), MINUS)}
    # corners are eigenvalues of A
    eig = np.linalg.eigvals(rep.matrix)
    for c in hull.corners:
        assert np.min(np.abs(eig - c.point)) < 1e-10
    assert len(hull.flat_portions) == 4
    for f in hull.flat_portions:
        ends = (f.start, f.end)
        assert any(abs(e - c.point) < 1e-9 for e in ends for c in hull.corners)


def test_vertical_flat_example():
    hull = report_of("vertical_flat").hull
    for f in hull.flat_portions:
        # vertical segments, symmetric about the real axis
        assert f.start.real == pytest.approx(f.end.real, abs=1e-9)
        assert f.start.imag == pytest.approx(-f.end.imag, abs=1e-9)
        assert f.length == pytest.approx(2 * 2 / math.sqrt(5), abs=1e-9)
    plus = [f for f in hull.flat_portions if f.side == PLUS]
    minus = [f for f in hull.flat_portions if f.side == MINUS]
    assert len(plus) == len(minus) == 1
    # central symmetry about 8.5
    assert plus[0].start.real + minus[0].start.real == pytest.approx(17.0, abs=1e-9)


@pytest.mark.parametrize("name", ["corner_flats", "vertical_flat", "non_nested"])
def test_spectral_flats_match_analytic(name):
    rep = report_of(name)
    a, j = fixture(name)
    spectral = detect_flat_portions_spectral(a, j, GRID)
    analytic = rep.hull.flat_portions
    assert len(spectral) == len(analytic)
    scale = rep.hull.scale
    for f in analytic:
        best = min(min(abs(f.start - g.start) + abs(f.end - g.end), abs(f.start - g.end) + abs(f.end - g.start))
                   for g in spectral if g.side == f.side)
        assert best <= 1e-6 * scale


@pytest.mark.parametrize("name", ["corner_flats", "non_nested", "scalar_dc", "theta_invariant", "vertical_flat"])
def test_analytic_hull_support_matches_pencil(name):
    rep = report_of(name)
    a, j = fixture(name)
    psi = GRID[::8]
    scale = rep.hull.scale
    for t in psi:
        s = pencil_sample(a, j, float(t))
        for side, val in ((PLUS, s.support_plus), (MINUS, s.support_minus)):
            h = rep.hull.support(side, [t])[0]
            if np.isfinite(h) and np.isfinite(val):
                assert h == pytest.approx(val, abs=1e-8 * scale)


@pytest.mark.parametrize("name", ["corner_flats", "vertical_flat", "non_nested"])
def test_hull_is_centrally_symmetric(name):
    # for these examples A - center is J-unitarily similar to center - A
    rep = report_of(name)
    c = rep.hull.center
    # offset so that no angle sits exactly on an asymptote direction
    psi = GRID[::16] + 1e-3
    hp = rep.hull.support(PLUS, psi)
    hm = rep.hull.support(MINUS, psi + math.pi)
    shift = c.real * np.cos(psi) + c.imag * np.sin(psi)
    fin = np.isfinite(hp) & np.isfinite(hm)
    assert fin.any()
    assert np.allclose(hp[fin] - shift[fin], hm[fin] + shift[fin], atol=1e-9)


def test_taxonomy_of_single_hyperbola_and_with_point():
    h = HyperbolaComponent(0, 0j, 0.0, 1.0, 1.0, (PLUS, MINUS))
    hull = AnalyticHull(BoundaryCurve((h,), 0j), 1.0, 512)
    assert taxonomy_of(hull) == "hyperbolic_disc"
    # a plus point outside the right branch's region creates corners and flats
    pt = IsolatedPoint(1, 0.5 + 0j, PLUS)
    hull2 = AnalyticHull(BoundaryCurve((h, pt), 0j), 1.0, 512)
    assert taxonomy_of(hull2) == "hull_of_hyperbolas_with_flats"
    assert hull2.corners and hull2.flat_portions


def test_perturbed_hull_is_smaller():
    rep = report_of("scalar_dc")
    small = rep.hull.perturbed(0.99)
    psi = GRID[::4]
    for side in (PLUS, MINUS):
        h0, h1 = rep.hull.support(side, psi), small.support(side, psi)
        fin = np.isfinite(h0) & np.isfinite(h1)
        assert np.all(h1[fin] <= h0[fin] + 1e-12) and np.any(h1[fin] < h0[fin] - 1e-6)


def test_support_functions_needs_class():
    # J-Hermitian with non-real spectrum: H_theta never has a real split
    a = np.array([[0, 1], [-1, 0]], dtype=complex)
    with pytest.raises(EmptyOmega):
        support_functions(a, Signature(1, 2), np.linspace(-1.5, 1.5, 16))


@pytest.mark.parametrize("c", [0.4, 1.0, 1.6])
def test_numerical_envelope_of_two_by_two(c):
    a = np.array([[1, c], [0, -1]], dtype=complex)
    tracks = numerical_envelope(a, Signature(1, 2))
    assert tracks
    b = c / 2
    aa = math.sqrt(1 - b * b)
    for tr in tracks:
        z = tr.points[np.isfinite(tr.points)]
        # central differences lose accuracy near the asymptotic ends of a track
        z = z[np.abs(z) <= 3.0]
        assert z.size > 1000
        assert np.allclose(z.real**2 / aa**2, 1.0 + z.imag**2 / b**2, rtol=1e-6)


def test_numerical_envelope_of_j_hermitian_is_real():
    rng = np.random.default_rng(3)
    a, j = commuting_blocks(rng)
    h = (a + j.matrix @ a.conj().T @ j.matrix) / 2
    for tr in numerical_envelope(h, j):
        z = tr.points[np.isfinite(tr.points)]
        assert np.all(np.abs(z.imag) <= 1e-5 * max(1.0, np.linalg.norm(h, 2)))


def test_deltoid_envelope_has_three_components():
    a, j = fixture("deltoids")
    tracks = numerical_envelope(a, j)
    # two deltoids (one per sign) and the two branches of a hyperbola-like curve
    assert len({t.component_id for t in tracks}) == 3
    by_comp = {}
    for t in tracks:
        by_comp.setdefault(t.component_id, set()).update(t.signs)
    assert sorted(len(s) for s in by_comp.values()) == [1, 1, 2]


def test_pencil_hull_agrees_with_analytic():
    rep = report_of("corner_flats")
    a, j = fixture("corner_flats")
    ph = PencilHull(a, j, 256)
    psi = GRID[::16]
    for side in (PLUS, MINUS):
        h0, h1 = rep.hull.support(side, psi), ph.support(side, psi)
        fin = np.isfinite(h0) & np.isfinite(h1)
        assert np.allclose(h0[fin], h1[fin], atol=1e-8 * ph.scale)
    assert {round(c.point.real, 8) for c in ph.corners} == {round(c.point.real, 8) for c in rep.hull.corners}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_hull_translation(seed, shift):
    a, j = commuting_blocks(np.random.default_rng(seed))
    r0 = classify_matrix(a, j, crosscheck=False)
    r1 = classify_matrix(a + shift * np.eye(j.n), j, crosscheck=False)
    if r0.hull is None or r1.hull is None:
        return
    psi = GRID[::32]
    move = shift.real * np.cos(psi) + shift.imag * np.sin(psi)
    scale = r0.hull.scale
    for side in (PLUS, MINUS):
        h0, h1 = r0.hull.support(side, psi), r1.hull.support(side, psi)
        fin = np.isfinite(h0) & np.isfinite(h1)
        # both regions move with the shift since -[(A + s)x, x] = -[Ax, x] + s when [x, x] = -1
        assert np.allclose(h1[fin], h0[fin] + move[fin], atol=1e-8 * (scale + abs(shift)))

"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line (shown even
under output capture) and then asserts.  Tolerances are pinned as module
constants next to the test that uses them.
"""
import cmath
import math
import time

import numpy as np
import pytest

from kreinrange.blocks import (
    HYPERBOLA,
    classify_arrowhead,
    classify_commuting_blocks,
    classify_hermitian_blocks,
    classify_main,
    classify_scalar_dc,
    classify_theta_invariant,
    closed_form_spectrum,
    hyperbolical_range_2x2,
    components_agree,
    detect_block_form,
    m_theta,
)
from kreinrange.core import Signature, h_theta, pencil_sample
from kreinrange.errors import ConditionViolated
from kreinrange.oracle import draw_batch, j_unitary_conjugate, membership_check, random_j_unitary
from kreinrange.pipeline import classify_matrix
from kreinrange.tridiagonal import classify_tridiagonal_kappa, tridiagonal_switch, tridiagonal_to_block

from generators import (
    FIXTURE_NAMES,
    arrowhead,
    commuting_blocks,
    fixture,
    hermitian_blocks,
    multiset_distance,
    nilpotent_dc,
    random_block,
    random_tridiagonal,
    scalar_dc,
    tridiagonal_kappa,
)


@pytest.fixture
def say(capsys):
    def emit(criterion: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")
    return emit


def close(x, y, tol) -> bool:
    return abs(complex(x) - complex(y)) <= tol


def same_pair(got, want, tol) -> bool:
    return (close(got[0], want[0], tol) and close(got[1], want[1], tol)) or \
        (close(got[0], want[1], tol) and close(got[1], want[0], tol))


def timed_classify(name):
    a, j = fixture(name)
    t0 = time.perf_counter()
    rep = classify_matrix(a, j)
    return rep, time.perf_counter() - t0


# ---------------------------------------------------------------------------

TOL_1 = 1e-10
TOL_1_PAIRS = 1e-12
BUDGET_1 = 1.0


def test_criterion_1_corner_example(say):
    rep, elapsed = timed_classify("corner_flats")
    pairs = sorted(((p.z, p.h) for p in rep.pairs), key=lambda p: p[0].real)
    want = [(-1, 2), (1, 2), (4, 8)]
    pairs_ok = len(pairs) == 3 and all(close(z, wz, TOL_1_PAIRS) and abs(h - wh) <= TOL_1_PAIRS
                                       for (z, h), (wz, wh) in zip(pairs, want))
    outer = max((s for s in rep.specs if s.kind == HYPERBOLA), key=lambda s: s.nontransverse)
    outer_ok = (same_pair(outer.foci, (8 + math.sqrt(8), 8 - math.sqrt(8)), TOL_1)
                and abs(outer.transverse - 4) <= TOL_1 and abs(outer.nontransverse - 4) <= TOL_1)
    pts = sorted(p.value.real for p in rep.curve.points)
    points_ok = len(pts) == 2 and same_pair(pts, (8 - math.sqrt(3), 8 + math.sqrt(3)), TOL_1)
    corners = sorted(c.point.real for c in rep.hull.corners)
    corners_ok = len(corners) == 2 and same_pair(corners, pts, TOL_1)
    flats_ok = len(rep.hull.flat_portions) > 0
    ok = pairs_ok and outer_ok and points_ok and corners_ok and flats_ok and elapsed < BUDGET_1
    say(1, ok, f"pairs={pairs_ok} outer(N=M=4)={outer_ok} points={points_ok} corners={corners_ok} "
               f"flats={len(rep.hull.flat_portions)} time={elapsed:.3f}s tol={TOL_1:g}")
    assert ok


TOL_2 = 1e-10
BUDGET_2 = 1.0


def test_criterion_2_scalar_dc_example(say):
    rep, elapsed = timed_classify("scalar_dc")
    root = cmath.sqrt(24 - 14j)
    foci = ((19 + 1j) / 2 + root / 2, (19 + 1j) / 2 - root / 2)
    m_len = math.sqrt(9 + math.sqrt(193))
    outer = max((s for s in rep.specs if s.kind == HYPERBOLA), key=lambda s: s.nontransverse)
    geom_ok = same_pair(outer.foci, foci, TOL_2) and abs(outer.nontransverse - m_len) <= TOL_2
    ineq = rep.cross_checks.get("cor_5_2", {}).get("inequalities", [])
    margin_ok = any(abs(abs(q["lhs"]) - 18) <= TOL_2 and abs(q["rhs"] - 2 * math.sqrt(193)) <= TOL_2
                    and q["holds"] for q in ineq)
    ok = rep.taxonomy == "hyperbolic_disc" and geom_ok and margin_ok and elapsed < BUDGET_2
    shown = f"|{ineq[0]['lhs']:.6f}| < {ineq[0]['rhs']:.6f}" if ineq else "missing"
    say(2, ok, f"taxonomy={rep.taxonomy} foci/M={geom_ok} margin {shown} time={elapsed:.3f}s tol={TOL_2:g}")
    assert ok


TOL_3 = 1e-10
ANGLES_3 = 64


def test_criterion_3_theta_invariant_example(say):
    a, j = fixture("theta_invariant")
    bf = detect_block_form(a, j)
    want = sorted([7.5 - 1.5 * math.sqrt(17), 7.5 + 1.5 * math.sqrt(17)])
    worst = 0.0
    for t in np.linspace(0, 2 * math.pi, ANGLES_3, endpoint=False):
        got = np.sort(np.linalg.eigvalsh(m_theta(bf, t)))
        worst = max(worst, float(np.max(np.abs(got - want))))
    specs, cert = classify_theta_invariant(bf)
    outer = max(specs, key=lambda s: s.nontransverse)
    m_len = math.sqrt(7.5 + 1.5 * math.sqrt(17))
    geom_ok = same_pair(outer.foci, (8 + 1j, 4 - 1j), TOL_3) and abs(outer.nontransverse - m_len) <= TOL_3
    rep = classify_matrix(a, j, crosscheck=False)
    ok = worst <= TOL_3 and cert.rule_fired == "thm_5_5" and cert.verdict == "disc" and geom_ok \
        and rep.rule_fired == "thm_5_5"
    say(3, ok, f"M(theta) spectrum drift={worst:.2e} over {ANGLES_3} angles verdict={cert.verdict} "
               f"foci/M={geom_ok} tol={TOL_3:g}")
    assert ok


MIN_TRACKS_4 = 3


def test_criterion_4_deltoid_example(say):
    a, j = fixture("deltoids")
    rep = classify_matrix(a, j, crosscheck=False)
    fell_back = rep.rule_fired == "fallback_numeric" and rep.curve.numeric
    not_commuting = any(f.startswith("NotCommuting") for f in rep.failures)
    tracks = rep.curve.tracks
    components = len({t.component_id for t in tracks})
    ok = fell_back and not_commuting and components >= MIN_TRACKS_4
    say(4, ok, f"failures={rep.failures} rule={rep.rule_fired} components={components} "
               f"(need >= {MIN_TRACKS_4}) tracks={len(tracks)}")
    assert ok


TOL_5 = 1e-8
INSTANCES_5 = 200
ANGLES_5 = 32


def test_criterion_5_closed_form_equivalence(say):
    rng = np.random.default_rng(20240501)
    failures, worst = 0, 0.0
    for _ in range(INSTANCES_5):
        a, j = random_block(rng, n_max=12)
        bf = detect_block_form(a, j)
        scale = max(1.0, float(np.linalg.norm(a, 2)))
        for t in rng.uniform(-math.pi, math.pi, ANGLES_5):
            d = multiset_distance(closed_form_spectrum(bf, t), np.linalg.eigvals(h_theta(a, j, t))) / scale
            worst = max(worst, d)
            failures += d > TOL_5
    ok = failures == 0
    say(5, ok, f"{INSTANCES_5}x{ANGLES_5} samples failures={failures} worst_rel={worst:.2e} tol={TOL_5:g}")
    assert ok


TOL_6 = 1e-8
INSTANCES_6 = 100
GRID_6 = 128


def test_criterion_6_hyperbola_round_trip(say):
    rng = np.random.default_rng(6)
    j = Signature(1, 2)
    worst, axes = 0.0, 0.0
    for _ in range(INSTANCES_6):
        at, bt = rng.uniform(0.1, 10.0, 2)
        ct = math.hypot(at, bt)
        # foci +-ct and non-transverse axis 2 bt
        a = np.array([[ct, 2 * bt], [0.0, -ct]], dtype=complex)
        shape = hyperbolical_range_2x2(a)
        axes = max(axes, abs(shape.transverse - 2 * at), abs(shape.nontransverse - 2 * bt))
        theta0 = math.atan(at / bt)
        grid = -theta0 + 2 * theta0 * np.arange(1, GRID_6 + 1) / (GRID_6 + 1)
        for t in grid:
            s = pencil_sample(a, j, float(t))
            want = math.sqrt(at * at - ct * ct * math.sin(t) ** 2)
            got = s.lambda_R if s.in_class_J else math.nan
            err = abs(got - want) if math.isfinite(got) else math.inf
            worst = max(worst, err)
    ok = worst <= TOL_6 and axes <= TOL_6
    say(6, ok, f"{INSTANCES_6} hyperbolas x {GRID_6} angles worst={worst:.2e} axes={axes:.2e} tol={TOL_6:g}")
    assert ok


TOL_7 = 1e-8
INSTANCES_7 = 100
ANGLES_7 = 24


def _supports(a, j, thetas):
    s = [pencil_sample(a, j, float(t)) for t in thetas]
    return np.array([x.support_plus for x in s]), np.array([x.support_minus for x in s])


def _support_gap(h0, h1):
    """Largest difference where both are finite; inf if finiteness differs."""
    f0, f1 = np.isfinite(h0), np.isfinite(h1)
    if np.any(f0 != f1):
        return math.inf
    return float(np.max(np.abs(h0[f0] - h1[f0]))) if f0.any() else 0.0


def _swap(a, j):
    r, n = j.r, j.n
    perm = np.r_[np.arange(r, n), np.arange(r)]
    return a[np.ix_(perm, perm)], Signature(n - r, n)


def test_criterion_7_invariance_suite(say):
    rng = np.random.default_rng(7)
    thetas = np.linspace(-math.pi, math.pi, ANGLES_7, endpoint=False) + 0.0123
    worst = {"translation": 0.0, "j_unitary": 0.0, "swap": 0.0, "switching": 0.0}

    def note(key, gap, scale):
        worst[key] = max(worst[key], gap / scale)

    for _ in range(INSTANCES_7):
        gen = [commuting_blocks, scalar_dc, hermitian_blocks, arrowhead][int(rng.integers(4))]
        a, j = gen(rng)
        scale = max(1.0, float(np.linalg.norm(a, 2)))
        p0, m0 = _supports(a, j, thetas)

        shift = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
        p1, m1 = _supports(a + shift * np.eye(j.n), j, thetas)
        move = (np.exp(-1j * thetas) * shift).real
        note("translation", max(_support_gap(p0 + move, p1), _support_gap(m0 + move, m1)), scale + abs(shift))

        u = random_j_unitary(rng, j)
        p2, m2 = _supports(j_unitary_conjugate(a, u, j), j, thetas)
        note("j_unitary", max(_support_gap(p0, p2), _support_gap(m0, m2)), scale)

        b, jb = _swap(a, j)
        p3, m3 = _supports(b, jb, thetas)
        # plus and minus regions exchange
        note("swap", max(_support_gap(p0, m3), _support_gap(m0, p3)), scale)

        spec = random_tridiagonal(rng) if rng.uniform() < 0.5 else tridiagonal_kappa(rng)[0]
        ks = [k for k in range(spec.n - 1) if rng.uniform() < 0.5]
        t0 = spec.matrix()
        ts = max(1.0, float(np.linalg.norm(t0, 2)))
        p4, m4 = _supports(t0, spec.metric, thetas)
        p5, m5 = _supports(tridiagonal_switch(spec, ks).matrix(), spec.metric, thetas)
        note("switching", max(_support_gap(p4, p5), _support_gap(m4, m5)), ts)

    ok = all(v <= TOL_7 for v in worst.values())
    say(7, ok, " ".join(f"{k}={v:.2e}" for k, v in worst.items()) + f" ({INSTANCES_7} each, tol={TOL_7:g}*scale)")
    assert ok


TRIALS_8 = 10_000
BUDGET_8 = 30.0
CONTROL_8 = 0.99


def test_criterion_8_oracle_suite(say):
    t0 = time.perf_counter()
    passed, controls = [], []
    for name in FIXTURE_NAMES:
        a, j = fixture(name)
        rep = classify_matrix(a, j, crosscheck=False)
        batch = draw_batch(a, j, TRIALS_8, seed=0)
        good = membership_check(a, j, rep.hull, batch)
        bad = membership_check(a, j, rep.hull.perturbed(CONTROL_8), batch)
        passed.append(good.passed)
        controls.append(bad.membership_failures)
    elapsed = time.perf_counter() - t0
    ok = all(passed) and all(c >= 1 for c in controls) and elapsed < BUDGET_8
    say(8, ok, f"membership={sum(passed)}/{len(passed)} control_failures={controls} "
               f"time={elapsed:.1f}s (< {BUDGET_8:g}s)")
    assert ok


TOL_9 = 1e-9
INSTANCES_9 = 100


def _fast_path(kind, rng):
    """Draw an instance for one corollary; returns (main specs, fast specs, scale) or None."""
    if kind == "cor_6_1":
        spec, kappa = tridiagonal_kappa(rng)
        fast, _ = classify_tridiagonal_kappa(spec, kappa)
        bf, _ = tridiagonal_to_block(tridiagonal_switch(spec, range(0, spec.n - 1, 2)))
    else:
        gen = {"cor_4_1": commuting_blocks, "cor_5_1": hermitian_blocks, "cor_5_2": scalar_dc,
               "cor_5_4": arrowhead, "thm_5_5": nilpotent_dc}[kind]
        a, j = gen(rng)
        bf = detect_block_form(a, j)
        if kind == "cor_5_4":
            fast, _ = classify_arrowhead(bf.alpha, bf.beta, bf.c_block[:, 0], bf.d_block[0, :])
        else:
            fn = {"cor_4_1": classify_commuting_blocks, "cor_5_1": classify_hermitian_blocks,
                  "cor_5_2": classify_scalar_dc, "thm_5_5": classify_theta_invariant}[kind]
            fast, _ = fn(bf)
    main, _ = classify_main(bf)
    return main, fast, bf.scale()


def test_criterion_9_rule_agreement(say):
    rng = np.random.default_rng(9)
    kinds = ("cor_4_1", "cor_5_1", "cor_5_2", "cor_5_4", "thm_5_5", "cor_6_1")
    done, agree, skipped = 0, 0, 0
    per_kind = dict.fromkeys(kinds, 0)
    while done < INSTANCES_9:
        kind = kinds[done % len(kinds)]
        try:
            main, fast, scale = _fast_path(kind, rng)
        except ConditionViolated:
            # the disc condition fails, so neither rule produces components
            skipped += 1
            continue
        done += 1
        per_kind[kind] += 1
        agree += components_agree(main, fast, TOL_9 * scale)
    ok = agree == INSTANCES_9
    say(9, ok, f"agree={agree}/{INSTANCES_9} per_rule={per_kind} skipped_condition={skipped} tol={TOL_9:g}*scale")
    assert ok

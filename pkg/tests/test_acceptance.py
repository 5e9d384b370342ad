"""Acceptance suite: one test per headline criterion, each printing a
PASS/FAIL line (run with -s to see them)."""

import math
import time

import numpy as np
import pytest

import latticefrac as lf
from latticefrac import (
    BoundaryCondition,
    SolverParams,
    appendix_fold,
    barrier_objective,
    build_domain,
    dual_identity_residual,
    extract_rigid_partition,
    is_admissible,
    lj_potential,
    multilayer_fracture,
    opening_crack_diagnostic,
    phi,
    rot,
    slicing_lower_bound,
    small_deformation_scaling,
    staircase_approximation,
    straight_crack,
    surface_relaxation,
    symmetric_triple_point_data,
    total_energy,
    triple_point,
    triple_point_offset,
    two_region_map,
)

from conftest import UNIT_SQUARE, square_domain

I2 = np.eye(2)
SQRT3 = math.sqrt(3.0)


def _report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_01_coordinate_crack_limit():
    t0 = time.time()
    errs = []
    for eps in (1 / 16, 1 / 32, 1 / 64, 1 / 128):
        dom = square_domain(eps)
        res = straight_crack(dom, (0, 1), I2, I2, (0, 0.3), (0, 0), (0.5, 0.5))
        assert res.admissible
        errs.append(abs(res.measured - 2.0) / 2.0)
    ok = errs[-1] < 0.05 and all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    _report("criterion 1 coordinate-crack limit", ok,
            f"final rel err {errs[-1]:.3e}, sequence {['%.2e' % e for e in errs]}, "
            f"{time.time()-t0:.1f}s")
    assert time.time() - t0 < 30


def test_criterion_02_staircase_anisotropy():
    t0 = time.time()
    pred = 4.0 / SQRT3
    per = None
    for eps in (1 / 32, 1 / 64, 1 / 128):
        dom = square_domain(eps)
        res = staircase_approximation(dom, (1, 0), (0.5, 0.5), I2, I2,
                                      (0.3, 0), (0, 0), h=16 * eps)
        assert res.admissible
        per = res.extras["per_length_measured"]
    err = abs(per - pred) / pred
    _report("criterion 2 staircase anisotropy", err < 0.05,
            f"per-length {per:.5f} vs {pred:.5f} (rel err {err:.3e}), {time.time()-t0:.1f}s")
    assert time.time() - t0 < 120


def test_criterion_03_dual_norm_identity():
    t0 = time.time()
    rng = np.random.default_rng(123)
    worst = 0.0
    for _ in range(10000):
        th = rng.uniform(0.0, 2.0 * math.pi)
        worst = max(worst, abs(dual_identity_residual((math.cos(th), math.sin(th)))))
    _report("criterion 3 dual-norm identity", worst <= 1e-12,
            f"max residual {worst:.2e} over 10^4 directions, {time.time()-t0:.2f}s")
    assert time.time() - t0 < 1.0


def test_criterion_04_lower_bound_dominance():
    t0 = time.time()
    dom = square_domain(1 / 32)
    rng = np.random.default_rng(7)
    # random admissible states around the ground state and around a crack
    crack = straight_crack(dom, (0, 1), I2, I2, (0, 0.3), (0, 0), (0.5, 0.5))
    bases = (dom.nodes, crack.displacement)
    checked = 0
    ok = True
    for trial in range(2000):
        if checked >= 100:
            break
        base = bases[trial % 2]
        amp = rng.uniform(0.01, 0.1)
        u = base + amp * dom.epsilon * rng.standard_normal(dom.nodes.shape)
        rep = total_energy(dom, u)
        if not rep.admissible:
            continue
        checked += 1
        for s in (0.5, 0.9):
            if slicing_lower_bound(dom, u, s) > rep.bond_sum + 1e-12:
                ok = False
    ok &= checked >= 100
    _report("criterion 4 lower-bound dominance", ok,
            f"{checked} admissible random states, s in {{0.5, 0.9}}, {time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_05_surface_relaxation_cost():
    t0 = time.time()
    pred = 2.0 + 2.0 * lj_potential(SQRT3 / 2) + lj_potential(0.5)
    dom = square_domain(1 / 128)
    res = surface_relaxation(dom, 0.5 + 0.1 / 128, (0.05, -0.5))
    assert res.admissible
    density = res.extras["density_rows"]
    err = abs(density - pred) / pred
    _report("criterion 5 surface-relaxation cost", err < 0.05,
            f"measured row density {density:.3f} vs {pred:.3f} (rel err {err:.2e}), "
            f"{time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_06_layer_doubling():
    t0 = time.time()
    dom = square_domain(1 / 128)
    res = multilayer_fracture(dom, (0, 1), 0.5, 0.3, 1, style="fold")
    per = res.extras["per_length_measured"]
    jump_ok = res.conditions["jump_dot_R_minus_nu"] < 0
    res0 = multilayer_fracture(dom, (0, 1), 0.5, 0.3, 0, style="fold")
    ok = res.admissible and jump_ok and abs(per - 4.0) / 4.0 < 0.05 and not res0.admissible
    _report("criterion 6 layer doubling", ok,
            f"n=1 per-length {per:.4f} (target 4), n=0 admissible={res0.admissible}, "
            f"{time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_07_triple_point_compatibility():
    t0 = time.time()
    x0 = np.array([0.5, 0.5])
    R1, q1, R2, q2, R3, q3 = symmetric_triple_point_data(0.3)
    ok = True
    for eps in (1 / 32, 1 / 64, 1 / 128, 1 / 256):
        dom = build_domain(UNIT_SQUARE, eps, triple_point_offset(x0, eps))
        good = triple_point(dom, x0, R1, q1, R2, q2, R3, q3)
        flipped = triple_point(dom, x0, R1, q2, R2, q1, R3, q3)
        ok &= good.admissible and flipped.extras["central_det"] <= 0
    _report("criterion 7 triple-point compatibility", ok,
            f"symmetric admissible and flipped central det <= 0 over four meshes, "
            f"{time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_08_rigidity_extraction():
    t0 = time.time()
    ok = True
    details = []
    for (tp, tm) in ((10.0, -7.0), (0.0, 0.0), (25.0, 3.0)):
        dom = square_domain(1 / 32)
        res = straight_crack(dom, (0, 1), rot(tp), rot(tm), (0.05, 0.4), (0, 0), (0.5, 0.5))
        part = extract_rigid_partition(dom, res.displacement, 0.5)
        if len(part) < 2:
            # no jump: a single exactly-rigid cluster
            errs = [abs(part.clusters[0].angle - math.radians(tp))]
        else:
            angles = sorted(c.angle for c in part.clusters[:2])
            errs = [abs(angles[0] - math.radians(min(tp, tm))),
                    abs(angles[1] - math.radians(max(tp, tm)))]
        resid = max(c.rms_residual for c in part.clusters[:2])
        ok &= max(errs) < 1e-6 and resid < 1e-8
        details.append(f"{max(errs):.1e}/{resid:.1e}")
    _report("criterion 8 rigidity extraction", ok,
            f"angle/residual errors {details}, {time.time()-t0:.1f}s")
    assert time.time() - t0 < 10


def test_criterion_09_necessity_diagnostic():
    t0 = time.time()
    scenarios = []
    dom = square_domain(1 / 64)
    scenarios.append(("straight crack", dom,
                      straight_crack(dom, (0, 1), I2, I2, (0, 0.3), (0, 0), (0.5, 0.5)),
                      (0.5, 0.5), (0, 1)))
    scenarios.append(("rotated crack", dom,
                      straight_crack(dom, (0, 1), rot(6), rot(-4), (0.02, 0.35), (0, 0), (0.5, 0.5)),
                      (0.5, 0.5), (0, 1)))
    res_m = multilayer_fracture(dom, (0, 1), 0.5, 0.3, 1, style="fold")
    scenarios.append(("multilayer", dom, res_m, (0.5, res_m.params["crack_level"]), (0, 1)))
    ok = True
    lines = []
    for name, d, res, x0, nu in scenarios:
        diag = opening_crack_diagnostic(d, res.displacement, x0, 16 * d.epsilon, nu)
        if not diag["conclusive"]:
            lines.append(f"{name}: inconclusive")
            continue
        if diag["density_le_phi"]:
            thr = -0.05 * diag["jump_norm"]
            holds = diag["dot_R_plus_nu"] >= thr and diag["dot_R_minus_nu"] >= thr
            ok &= holds
            lines.append(f"{name}: density {diag['density']:.2f} <= phi, opening holds={holds}")
        else:
            lines.append(f"{name}: density {diag['density']:.2f} > phi (hypothesis not met)")
    _report("criterion 9 necessity diagnostic", ok, "; ".join(lines) +
            f", {time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_10_gradient_check():
    t0 = time.time()
    dom = square_domain(1 / 8)
    rng = np.random.default_rng(42)
    mu = 1e-3
    h = 1e-7
    worst = 0.0
    checked = 0
    while checked < 20:
        u = dom.nodes + 0.05 * dom.epsilon * rng.standard_normal(dom.nodes.shape)
        ok_adm, _ = is_admissible(dom, u)
        if not ok_adm:
            continue
        r = lf.energy.bond_lengths(dom, u)
        if r.min() < 0.5 or r.max() > 3.0:
            continue
        checked += 1
        f, g = barrier_objective(dom, u, mu)
        for i in rng.integers(0, dom.n_nodes, 2):
            for c in (0, 1):
                up = u.copy()
                up[i, c] += h
                um = u.copy()
                um[i, c] -= h
                fd = (barrier_objective(dom, up, mu)[0]
                      - barrier_objective(dom, um, mu)[0]) / (2 * h)
                worst = max(worst, abs(fd - g[i, c]) / max(1.0, abs(g[i, c])))
    _report("criterion 10 gradient check", worst < 1e-6,
            f"worst relative error {worst:.2e} over 20 states, {time.time()-t0:.1f}s")
    assert time.time() - t0 < 30


def test_criterion_11_small_deformation_reduction():
    t0 = time.time()
    eps_list = [1 / 64, 1 / 128, 1 / 256]
    ok = True
    for sign, expect in ((0.5, True), (-0.5, False)):
        v = two_region_map((0.5, 0.5), (0, 1), I2, (0, sign), I2, (0, 0))
        rows = small_deformation_scaling(lambda e: square_domain(e), v, eps_list)
        ok &= all(r["admissible"] == expect for r in rows)
    _report("criterion 11 small-deformation reduction", ok,
            f"verdicts match sign of the profile jump on eps <= 1/64, {time.time()-t0:.1f}s")
    assert time.time() - t0 < 60


def test_criterion_12_appendix_negatives():
    t0 = time.time()
    ok = True
    for eps in (1 / 16, 1 / 32, 1 / 64, 1 / 128):
        dom = square_domain(eps)
        u = appendix_fold(dom, 0.5)
        adm, _ = is_admissible(dom, u, 0.0)
        ok &= not adm
    _report("criterion 12 appendix negatives", ok,
            f"half-turn fold rejected at strict margin 0 for all meshes, {time.time()-t0:.1f}s")
    assert time.time() - t0 < 10

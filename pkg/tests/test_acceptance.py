"""Acceptance suite: one PASS/FAIL line per criterion, printed to the terminal.

Each test computes its measured value, prints the line, then asserts.
"""

import math
import time

import cvxpy as cp
import numpy as np
import pytest

from tvsip import (FlowParams, Signal, TvConfig, angle, bregman, check_phi_orthogonality,
                   experiment_1d_distance, experiment_blobs, experiment_two_discs, hsip,
                   l2_norm, lis_measure, lq_handle, make_box_1d, orth_measure, prox_tv,
                   reconstruct, run_flow, separate, sip, spectrum, subgradient, transform,
                   tv_value)
from tvsip.decomp import default_cutoff, independent_boxes, is_monotone, median_smooth, three_discs
from tvsip.eigen import box_1d, eigen_flow_solution
from tvsip.sip import lq_norm
from tvsip.spectral import parseval_ratio

from conftest import piecewise_constant

PRECISE = TvConfig(prox_tol=1e-8)
SEED = 20240611


def report(pytestconfig, number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    reporter = pytestconfig.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line(line)
    else:
        print(line)
    assert ok, line


@pytest.fixture(scope="module")
def box_run():
    pair = make_box_1d(256, 20, 1.0)
    t0 = time.perf_counter()
    traj = run_flow(pair.signal, FlowParams(dt=0.2, horizon=15, tv=PRECISE))
    elapsed = time.perf_counter() - t0
    return pair, traj, transform(traj), elapsed


@pytest.fixture(scope="module")
def image_run():
    f = three_discs(128) + 0.5
    t0 = time.perf_counter()
    traj = run_flow(f, FlowParams.for_eigenvalues(0.21, 0.065, tv=TvConfig(prox_tol=1e-6)))
    dec = transform(traj)
    elapsed = time.perf_counter() - t0
    return f, traj, dec, elapsed


def test_criterion_01_eigenfunction_flow(box_run, pytestconfig):
    pair, traj, _, elapsed = box_run
    worst = 0.0
    for k, t in enumerate(traj.times):
        if t <= 0.9 / pair.lam + 1e-12:
            ref = eigen_flow_solution(pair, t)
            worst = max(worst, l2_norm(traj.state(k) - ref) / l2_norm(ref))
    report(pytestconfig, 1, worst <= 0.02 and elapsed <= 10,
           f"max rel error {worst:.2e} (<= 2e-2), flow {elapsed:.1f} s (<= 10 s)")


def test_criterion_02_dirac_concentration(box_run, pytestconfig):
    _, traj, dec, _ = box_run
    sp = spectrum(traj, dec)
    band = (sp.times >= 9) & (sp.times <= 11)
    frac = sp.s1[band].sum() / sp.s1.sum()
    report(pytestconfig, 2, frac >= 0.9, f"S1 mass in [9, 11] = {frac:.4f} (>= 0.9)")


def test_criterion_03_reconstruction(image_run, pytestconfig):
    f, _, dec, elapsed = image_run
    err = l2_norm(reconstruct(dec) - f) / l2_norm(f)
    report(pytestconfig, 3, err <= 1e-3 and elapsed <= 120,
           f"rel error {err:.2e} (<= 1e-3), {elapsed:.0f} s (<= 120 s)")


def test_criterion_04_parseval(image_run, pytestconfig):
    f, traj, dec, _ = image_run
    ratio = parseval_ratio(spectrum(traj, dec), traj.dt, l2_norm(f - f.mean()) ** 2)
    report(pytestconfig, 4, abs(ratio - 1) <= 0.05,
           f"int S2^2 / ||f - mean||^2 = {ratio:.4f} (within 5%)")


def test_criterion_05_phi_u_orthogonality(box_run, image_run, pytestconfig):
    ov_box = check_phi_orthogonality(box_run[1], box_run[2])
    ov_img = check_phi_orthogonality(image_run[1], image_run[2])
    report(pytestconfig, 5, max(ov_box, ov_img) <= 0.05,
           f"overlap box {ov_box:.3e}, image {ov_img:.3e} (<= 0.05)")


def test_criterion_06_sip_axioms(pytestconfig):
    rng = np.random.default_rng(SEED)
    cs = self_err = prod_err = 0.0
    for _ in range(200):
        u, v = piecewise_constant(rng), piecewise_constant(rng)
        ju, jv = tv_value(u), tv_value(v)
        s = sip(u, v)
        cs = max(cs, abs(s) / (ju * jv) - 1)
        self_err = max(self_err, abs(sip(u, u) - ju ** 2) / ju ** 2)
        prod_err = max(prod_err, abs(s - hsip(u, v) * jv) / max(abs(s), 1e-300))
    F = lq_handle(3.0)
    giles = 0.0
    for _ in range(200):
        u = Signal.from_array(rng.normal(size=32))
        v = Signal.from_array(rng.normal(size=32))
        ref = np.sum(u.values * v.values * np.abs(v.values)) * lq_norm(v, 3.0) ** -1
        giles = max(giles, abs(sip(u, v, F) - ref) / abs(ref))
    ok = cs <= 2e-3 and self_err <= 2e-3 and prod_err <= 1e-12 and giles <= 1e-12
    report(pytestconfig, 6, ok,
           f"CS excess {max(cs, 0):.1e}, [u,u] err {self_err:.1e} (<= 2e-3); "
           f"sip/hsip {prod_err:.1e}, Lq oracle {giles:.1e} (<= 1e-12)")


def test_criterion_07_bregman_angle(pytestconfig):
    rng = np.random.default_rng(SEED + 1)
    worst, lo, hi_excess = 0.0, math.inf, -math.inf
    for _ in range(200):
        u, v = piecewise_constant(rng), piecewise_constant(rng)
        pv = subgradient(v)
        ju = tv_value(u)
        d = bregman(u, v, pv=pv)
        ident = ju * (1 - math.cos(angle(u, v, pv=pv)))
        worst = max(worst, abs(d - ident))
        lo = min(lo, d)
        hi_excess = max(hi_excess, d - 2 * ju)
    ok = worst <= 1e-10 and lo >= 0 and hi_excess <= 1e-9
    report(pytestconfig, 7, ok,
           f"|D - J(1 - cos)| {worst:.1e} (<= 1e-10), min D {lo:.2e}, "
           f"max D - 2J {hi_excess:.2e}")


def test_criterion_08_correlated(pytestconfig):
    rng = np.random.default_rng(SEED + 2)
    wo = wl = 0.0
    for _ in range(20):
        u = piecewise_constant(rng)
        wo = max(wo, orth_measure(u, 2 * u))
        wl = max(wl, lis_measure(u, 2 * u))
    report(pytestconfig, 8, wo <= 2e-3 and wl <= 2e-3,
           f"max O(u, 2u) {wo:.1e}, max L(u, 2u) {wl:.1e} (<= 2e-3)")


def test_criterion_09_independence(pytestconfig):
    u, v = box_1d(2048, 700, 8, 1.0), box_1d(2048, 1300, 8, 1.5)
    ju, jv, juv = tv_value(u), tv_value(v), tv_value(u + v)
    tri = abs(juv - ju - jv) / juv
    h = max(abs(hsip(u, v)), abs(hsip(v, u))) / min(ju, jv)
    report(pytestconfig, 9, tri <= 1e-3 and h <= 1e-2,
           f"triangle defect {tri:.1e} (<= 1e-3), hsip / min J {h:.1e} (<= 1e-2)")


def test_criterion_10_perfect_decomposition(pytestconfig):
    lam1, lam2 = 0.05, 0.2
    f1, f2 = independent_boxes(4096, lam1, lam2)
    t0 = time.perf_counter()
    res = separate(f1 + f2, default_cutoff(lam1, lam2),
                   FlowParams.for_eigenvalues(lam2, lam1, tv=PRECISE), truth=(f1, f2))
    elapsed = time.perf_counter() - t0
    ok = res.err_low <= 0.05 and res.err_high <= 0.05 and elapsed <= 30
    report(pytestconfig, 10, ok,
           f"err_low {res.err_low:.3f}, err_high {res.err_high:.3f} (<= 0.05), "
           f"{elapsed:.1f} s (<= 30 s)")


def test_criterion_11_experiment_curves(pytestconfig):
    boxes = experiment_1d_distance(256, 8, 1.0, 8, 1.0, np.arange(0, 121, 8))
    b0 = max(boxes.o_values[0], boxes.l_values[0])
    bfar = min(boxes.o_values[-1], boxes.l_values[-1])
    xs = np.arange(0, 4.01, 0.25)
    discs = experiment_two_discs(128, 12, 1.0, xs)
    d0 = max(discs.o_values[0], discs.l_values[0])
    d4 = min(discs.o_values[-1], discs.l_values[-1])
    win = xs >= 2
    mono = all(is_monotone(median_smooth(y)[win], slack=0.02)
               for y in (discs.o_values, discs.l_values))
    ok = b0 <= 2e-3 and bfar >= 0.95 and d0 <= 0.1 and d4 >= 0.95 and mono
    report(pytestconfig, 11, ok,
           f"boxes d=0 {b0:.1e}, d=120 {bfar:.3f}; discs d/r=0 {d0:.1e}, "
           f"d/r=4 {d4:.3f}, monotone on [2, 4] {mono}")


def test_criterion_12_blobs(pytestconfig):
    res = experiment_blobs(with_flow=False)
    s, o = res["separated"].report, res["overlapping"].report
    ok = (min(s.orth_O, s.lis_L) >= 0.95 and max(o.orth_O, o.lis_L) <= 0.85
          and s.orth_O > o.orth_O and s.lis_L > o.lis_L)
    report(pytestconfig, 12, ok,
           f"separated O {s.orth_O:.3f} L {s.lis_L:.3f}; "
           f"overlapping O {o.orth_O:.3f} L {o.lis_L:.3f}")


def test_criterion_13_prox_oracle(pytestconfig):
    # the dual max-change stopping rule bounds the step, not the energy gap,
    # so the oracle comparison runs at a tight tolerance; the default
    # tolerance is measured alongside for reference
    rng = np.random.default_rng(SEED + 3)
    tight, default = -math.inf, -math.inf
    for _ in range(100):
        f = rng.normal(size=10)
        tau = float(rng.uniform(0.05, 1.5))
        x = cp.Variable(10)
        prob = cp.Problem(cp.Minimize(0.5 * cp.sum_squares(x - f) + tau * cp.norm1(cp.diff(x))))
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
        for cfg, name in ((TvConfig(prox_tol=1e-9, prox_max_iter=100000), "tight"),
                          (TvConfig(), "default")):
            u = prox_tv(Signal.from_array(f), tau, cfg).values
            excess = 0.5 * np.sum((u - f) ** 2) + tau * np.abs(np.diff(u)).sum() - prob.value
            if name == "tight":
                tight = max(tight, excess)
            else:
                default = max(default, excess)
    report(pytestconfig, 13, tight <= 1e-6,
           f"max energy excess {tight:.1e} at prox_tol 1e-9 (<= 1e-6); "
           f"{default:.1e} at the default 1e-6")

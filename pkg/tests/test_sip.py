import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tvsip import (DomainError, ParameterError, Signal, angle, angle_sym_a, angle_sym_g,
                   bregman, full_report, hsip, inner_product, l2_norm, lis_defect,
                   lis_measure, lq_handle, lq_subgradient, make_box_1d, orth_measure,
                   rayleigh_lambda, sip, tv_handle, tv_value)
from tvsip.eigen import box_1d
from tvsip.sip import lq_norm, signed_sqrt

from conftest import piecewise_constant, rectangles

TV = tv_handle()


def pairs(rng, k, gen=piecewise_constant):
    return [(gen(rng), gen(rng)) for _ in range(k)]


def far_boxes():
    return box_1d(2048, 700, 8, 1.0), box_1d(2048, 1300, 8, 1.5)


def test_sip_is_hsip_times_j(rng):
    for u, v in pairs(rng, 10):
        assert sip(u, v) == hsip(u, v) * tv_value(v)


def test_sip_self_and_cauchy_schwarz(rng):
    for u, v in pairs(rng, 20) + pairs(rng, 5, rectangles):
        ju, jv = tv_value(u), tv_value(v)
        assert sip(u, u) == pytest.approx(ju ** 2, rel=2e-3)
        assert hsip(u, u) == pytest.approx(ju, rel=1e-3)
        assert abs(sip(u, v)) <= ju * jv * (1 + 2e-3)
        assert math.sqrt(abs(sip(u, v) * sip(v, u))) <= ju * jv * (1 + 2e-3)
        assert abs(hsip(u, v)) <= ju * (1 + 1e-3)


def test_hsip_sign_homogeneous_in_second_argument(rng):
    for u, v in pairs(rng, 10):
        h = hsip(u, v)
        assert hsip(u, -v) == pytest.approx(-h, abs=1e-3 * tv_value(u))
        assert hsip(u, -2.0 * v) == pytest.approx(-h, abs=2e-3 * tv_value(u))
        assert hsip(u, 3.0 * v) == pytest.approx(h, abs=2e-3 * tv_value(u))


def test_first_argument_linearity(rng):
    u1, u2, v = (piecewise_constant(rng) for _ in range(3))
    pv = TV.subgrad(v)
    lhs = sip(u1 + u2, v, pv=pv)
    assert lhs == pytest.approx(sip(u1, v, pv=pv) + sip(u2, v, pv=pv), rel=1e-12, abs=1e-12)


def test_sip_with_null_space_argument():
    u = make_box_1d(32, 8).signal
    c = Signal.from_array(np.full(32, 2.0))
    assert sip(u, c) == 0.0
    for fn in (angle, angle_sym_a, angle_sym_g, orth_measure):
        with pytest.raises(DomainError):
            fn(u, c)
        with pytest.raises(DomainError):
            fn(c, u)
    with pytest.raises(DomainError):
        lis_measure(u, -u)
    with pytest.raises(DomainError):
        full_report(u, -u)


def test_eigenfunction_reduction():
    v = make_box_1d(64, 12, 1.3).signal
    u = piecewise_constant(np.random.default_rng(3))
    lam = rayleigh_lambda(v)
    got = sip(u, v, pv=lam * v)
    want = lam ** 2 * inner_product(u, v) * l2_norm(v) ** 2
    assert got == pytest.approx(want, rel=1e-12, abs=1e-14)


# -- L^q oracle

@pytest.mark.parametrize("q", [1.5, 2.0, 3.0, 4.5])
def test_lq_subgradient_pairing(q, rng):
    u = Signal.from_array(rng.normal(size=40), spacing=0.3)
    p = lq_subgradient(u, q)
    assert inner_product(u, p.value) == pytest.approx(lq_norm(u, q), rel=1e-12)


def test_lq2_is_normalized_signal(rng):
    u = Signal.from_array(rng.normal(size=(6, 7)))
    assert np.allclose(lq_subgradient(u, 2.0).value.values, (u / l2_norm(u)).values)


def test_lq_errors():
    with pytest.raises(DomainError):
        lq_subgradient(Signal.from_array(np.zeros(4)), 3)
    with pytest.raises(ParameterError):
        lq_subgradient(Signal.from_array(np.ones(4)), 1.0)


@given(st.integers(0, 2 ** 31), st.floats(1.2, 6.0))
def test_lq_sip_matches_giles(seed, q):
    rng = np.random.default_rng(seed)
    h = 0.5
    u = Signal.from_array(rng.normal(size=25), spacing=h)
    v = Signal.from_array(rng.normal(size=25), spacing=h)
    F = lq_handle(q)
    nv = lq_norm(v, q)
    giles = np.sum(u.values * v.values * np.abs(v.values) ** (q - 2)) * h * nv ** (2 - q)
    assert sip(u, v, F) == pytest.approx(giles, rel=1e-12, abs=1e-12)


# -- angles and Bregman distance

def test_angles_of_parallel_and_opposite(rng):
    u = piecewise_constant(rng)
    assert angle(u, u) == pytest.approx(0.0, abs=1e-6)
    assert angle(u, -u) == pytest.approx(math.pi, abs=1e-6)
    assert angle_sym_a(u, -u) == pytest.approx(math.pi, abs=1e-6)
    # sgn(ab) sqrt(|ab|) of two equal negative values is positive, so the
    # geometric variant cannot see the common sign
    assert angle_sym_g(u, -u) == pytest.approx(0.0, abs=1e-6)


def test_disjoint_boxes_are_nearly_perpendicular():
    u, v = far_boxes()
    assert angle(u, v) == pytest.approx(math.pi / 2, abs=0.05)
    assert angle(v, u) == pytest.approx(math.pi / 2, abs=0.05)


def test_signed_sqrt():
    assert signed_sqrt(4, 9) == 6
    assert signed_sqrt(-4, 9) == -6
    assert signed_sqrt(-4, -9) == 6
    assert signed_sqrt(0, 5) == 0


def test_bregman_angle_identity(rng):
    for u, v in pairs(rng, 20):
        pv = TV.subgrad(v)
        d = bregman(u, v, pv=pv)
        ju = tv_value(u)
        assert d == pytest.approx(ju * (1 - math.cos(angle(u, v, pv=pv))), abs=1e-10 * ju)
        assert -1e-9 <= d <= 2 * ju + 1e-9


def test_bregman_self_and_general_form(rng):
    v = piecewise_constant(rng)
    jv = tv_value(v)
    assert abs(bregman(v, v)) <= 1e-6 * jv
    u = piecewise_constant(rng)
    pv = TV.subgrad(v)
    gap = jv - inner_product(v, pv.value)
    assert bregman(u, v, pv=pv, one_homogeneous=False) == \
        pytest.approx(bregman(u, v, pv=pv) - gap, abs=1e-12)


# -- separability measures

def test_correlated_pairs_score_zero(rng):
    for _ in range(5):
        u = piecewise_constant(rng)
        a = float(rng.uniform(0.2, 5))
        assert orth_measure(u, a * u) <= 2e-3
        assert lis_measure(u, a * u) <= 2e-3


def test_lis_defect_of_equal_pair(rng):
    u = piecewise_constant(rng)
    e = lis_defect(u, u)
    assert abs(e) / tv_value(2 * u) == pytest.approx(1.0, abs=1e-3)


def test_disjoint_boxes_are_separable():
    u, v = far_boxes()
    rep = full_report(u, v)
    assert rep.orth_O >= 0.95 and rep.lis_L >= 0.95
    assert abs(rep.lis_E) <= 0.02 * rep.j_uv
    assert abs(rep.j_uv - rep.j_u - rep.j_v) <= 1e-3 * rep.j_uv


def test_full_report_of_identical_pair(rng):
    u = piecewise_constant(rng)
    rep = full_report(u, u)
    assert rep.angle_uv == pytest.approx(0, abs=1e-6)
    assert rep.orth_O <= 1e-9 and rep.lis_L <= 1e-3
    assert abs(rep.bregman_uv) <= 1e-6 * rep.j_u
    assert rep.converged


def test_full_report_matches_individual_calls(rng):
    u, v = piecewise_constant(rng), piecewise_constant(rng)
    rep = full_report(u, v)
    assert rep.sip_uv == pytest.approx(sip(u, v), rel=1e-12)
    assert rep.angle_sym_g == pytest.approx(angle_sym_g(u, v), rel=1e-12)
    assert rep.orth_O == pytest.approx(orth_measure(u, v), rel=1e-12, abs=1e-15)
    assert rep.lis_L == pytest.approx(lis_measure(u, v), rel=1e-12)


@settings(max_examples=25)
@given(st.integers(0, 2 ** 31))
def test_report_invariants(seed):
    rng = np.random.default_rng(seed)
    u, v = rectangles(rng, 16), rectangles(rng, 16)
    rep = full_report(u, v)
    assert 0 <= rep.orth_O <= 1
    assert rep.lis_L <= 1 + 1e-9
    assert rep.bregman_uv >= -1e-9
    assert rep.lis_E <= rep.j_uv * (1 + 1e-6)

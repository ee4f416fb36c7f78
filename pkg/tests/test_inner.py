import math

import numpy as np
import pytest

from conftest import angdist, bench_params
from rotpend.errors import WrongVariantError
from rotpend.inner import (InnerPoint, attractor_fit,
                           growth_factor, inner_flow, inner_flow_lifted,
                           inner_lemma_bounds, inner_map, inner_map_closed,
                           partial_quotients)
from rotpend.model import K, ModelParams, Variant

TWO_PI = 2 * math.pi

# large-lam parameters keep the geometric decay visible in a few iterates:
# lam = eps * rho_bar / log(1/eps) = 0.1 exactly
FAST = ModelParams(eps=0.1, rho_bar=0.1 * math.log(10.0) / 0.1, omega_star=1.0,
                   a00=0.0, a10=1.0, a01=1.0, variant=Variant.VANISHING)


def test_fast_lam_is_tenth():
    assert FAST.lam == pytest.approx(0.1, rel=1e-14)


def test_flow_on_attractor_is_linear():
    pars = bench_params(1e-3, rho_bar=0.03)
    w = pars.omega_star
    for t in (0.7, 13.0):
        out = inner_flow(InnerPoint(w, 0.4), 0.0, t, pars)
        assert out.I == pytest.approx(w, abs=1e-15)
        assert angdist(out.theta, 0.4 + w * t) < 1e-12


def test_flow_rigid_rotation_limit():
    pars = ModelParams(eps=0.0, rho_bar=0.0, omega_star=1.0)
    out = inner_flow(InnerPoint(1.3, 0.2), 0.0, 5.0, pars)
    assert out.I == pytest.approx(1.3, abs=1e-15)
    assert angdist(out.theta, 0.2 + 1.3 * 5.0) < 1e-12


def test_growth_factor_stability():
    # smooth across the series/expm1 switch and exact in the lam -> 0 limit
    assert growth_factor(0.0, 2.0) == 2.0
    assert growth_factor(1e-12, 2.0) == pytest.approx(2.0, rel=1e-10)
    assert growth_factor(0.5, 2.0) == pytest.approx((1 - math.exp(-1.0)) / 0.5,
                                                    rel=1e-14)


def test_nonvanishing_conserves_K_without_dissipation():
    pars = ModelParams(eps=1e-2, rho_bar=0.0, omega_star=1.0,
                       a00=0.0, a10=1.0, a01=1.0, variant=Variant.NON_VANISHING)
    z = InnerPoint(1.1, 0.7)
    K0 = K(z.I, z.theta, pars)
    t_checks = (5.0, 20.0, 50.0)
    for t in t_checks:
        I_t, th_t = inner_flow_lifted(z.I, z.theta, t, pars)
        assert abs(K(I_t, th_t, pars) - K0) < 1e-8


def test_closed_map_on_invariant_circle():
    w = FAST.omega_star
    out = inner_map_closed(InnerPoint(w, 1.0), FAST)
    assert out.I == pytest.approx(w, abs=1e-15)
    assert angdist(out.theta, 1.0 + TWO_PI * w) < 1e-12


def test_closed_map_reduces_to_twist_map():
    pars = ModelParams(eps=0.0, rho_bar=0.0, omega_star=1.0)
    out = inner_map_closed(InnerPoint(1.3, 0.5), pars)
    assert out.I == pytest.approx(1.3, abs=1e-15)
    assert angdist(out.theta, 0.5 + TWO_PI * 1.3) < 1e-12


def test_closed_map_equals_flow_at_period():
    z = InnerPoint(1.4, 2.2)
    a = inner_map_closed(z, FAST)
    b = inner_flow(z, 0.0, TWO_PI, FAST)
    assert a.I == b.I and a.theta == b.theta  # same closed form, bitwise


def test_wrong_variant_rejected():
    pars = ModelParams(eps=0.1, rho_bar=0.1, variant=Variant.NON_VANISHING)
    with pytest.raises(WrongVariantError):
        inner_map_closed(InnerPoint(1.0, 0.0), pars)


def test_attractor_asymptotics_bound_is_sharp():
    # orbit seeded on the slanted stable fiber theta = theta0 - (I - w)/lam
    lam, w = FAST.lam, FAST.omega_star
    I0, theta0 = 1.5, 0.8
    z = InnerPoint(I0, theta0 - (I0 - w) / lam)
    ref = InnerPoint(w, theta0)
    bound0 = math.sqrt(1 + 1 / lam ** 2) * abs(I0 - w)
    for k in range(1, 25):
        z = inner_map_closed(z, FAST)
        ref = inner_map_closed(ref, FAST)
        bound = bound0 * math.exp(-TWO_PI * lam * k)
        dist = math.hypot(z.I - ref.I, angdist(z.theta, ref.theta))
        assert dist <= bound * (1 + 1e-9)
        if bound < math.pi:  # once the angle gap fits on the circle, equality
            assert dist == pytest.approx(bound, rel=1e-9)


def test_stable_fiber_points_converge_to_same_orbit():
    lam, w = FAST.lam, FAST.omega_star
    theta0 = 2.0
    pts = [InnerPoint(I0, theta0 - (I0 - w) / lam) for I0 in (1.2, 1.4)]
    ref = InnerPoint(w, theta0)
    for _ in range(60):
        pts = [inner_map_closed(z, FAST) for z in pts]
        ref = inner_map_closed(ref, FAST)
    for z in pts:
        assert math.hypot(z.I - ref.I, angdist(z.theta, ref.theta)) < 2e-4


def test_attractor_fit_rate(bench):
    fit = attractor_fit(InnerPoint(1.05, 0.3), 400, bench)
    assert not fit.degenerate
    assert fit.decay_rate == pytest.approx(TWO_PI * bench.lam, rel=1e-2)
    assert fit.residual < 1e-9  # exactly geometric for the vanishing coupling


def test_attractor_fit_degenerate_on_circle():
    fit = attractor_fit(InnerPoint(FAST.omega_star, 1.0), 50, FAST)
    assert fit.degenerate
    assert np.all(fit.samples[:, 1] < 1e-14)


def test_nonvanishing_orbit_stays_bounded():
    # 1e4 map iterates, realized as one flow sampled on the section grid
    from scipy.integrate import solve_ivp

    from rotpend.inner import _inner_field

    pars = ModelParams(eps=1e-3, rho_bar=0.03, omega_star=1.2,
                       a00=0.0, a10=1.0, a01=1.0, variant=Variant.NON_VANISHING)
    k_max = 10_000
    t_eval = TWO_PI * np.arange(k_max + 1)
    sol = solve_ivp(_inner_field, (0.0, t_eval[-1]), [1.05, 0.5],
                    args=(pars, 0.0), method="RK45", rtol=1e-8, atol=1e-10,
                    t_eval=t_eval)
    assert sol.success
    assert np.all(sol.y[0] >= 1.05 - 1.0)
    assert np.all(sol.y[0] <= 1.35 + 1.0)


def test_map_dispatch_matches_variant():
    z = InnerPoint(1.1, 0.2)
    assert inner_map(z, FAST) == inner_map_closed(z, FAST)
    pars_nv = ModelParams(eps=0.1, rho_bar=0.1, omega_star=1.0,
                          variant=Variant.NON_VANISHING)
    out = inner_map(z, pars_nv)
    assert out.I != z.I  # forced by the sin(theta) term


def test_lam_to_zero_continuity_richardson():
    # |f_lam - f_0| must halve when rho_bar (hence lam) halves
    z = InnerPoint(1.3, 0.9)
    pars0 = ModelParams(eps=0.1, rho_bar=0.0, omega_star=1.0)
    f0 = inner_map_closed(z, pars0)

    def gap(rho_bar):
        out = inner_map_closed(z, pars0.replace(rho_bar=rho_bar))
        return math.hypot(out.I - f0.I, angdist(out.theta, f0.theta))

    ratio = gap(0.2) / gap(0.4)
    assert 0.4 < ratio < 0.6


def test_lemma_bounds_nonvanishing(bench_rho_bar):
    pars = ModelParams(eps=1e-3, rho_bar=bench_rho_bar, omega_star=1.2,
                       a00=0.0, a10=1.0, a01=1.0, variant=Variant.NON_VANISHING)
    d_max = 0.15
    for I0 in (1.05, 1.2, 1.35):
        rep = inner_lemma_bounds(InnerPoint(I0, 2.0), 1.0, pars)
        assert rep.all_finite
        assert rep.max_ratio_I < 10 * d_max
        assert rep.max_ratio_theta < 10 * d_max
        assert rep.max_ratio_K < 10 * d_max
        # d' sits close to d_max, as the two-trajectory comparison predicts
        assert rep.max_ratio_I < 1.5 * max(rep.d_ref, d_max)


def test_lemma_bounds_zero_dissipation_is_degenerate_zero():
    pars = ModelParams(eps=1e-3, rho_bar=0.0, omega_star=1.2,
                       a00=0.0, a10=1.0, a01=1.0, variant=Variant.NON_VANISHING)
    rep = inner_lemma_bounds(InnerPoint(1.1, 1.0), 1.0, pars)
    assert np.all(rep.ratio_I == 0.0)
    assert np.all(rep.ratio_theta == 0.0)
    assert np.all(rep.ratio_K == 0.0)


def test_lemma_bounds_wrong_variant():
    with pytest.raises(WrongVariantError):
        inner_lemma_bounds(InnerPoint(1.0, 0.0), 1.0, bench_params(1e-3, 0.03))


def test_partial_quotients_golden_mean():
    golden = (1 + math.sqrt(5)) / 2
    assert partial_quotients(golden, 8) == [1] * 8
    assert partial_quotients(0.5, 4)[:2] == [0, 2]

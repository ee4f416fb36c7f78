import math

import numpy as np
import pytest

from conftest import bench_params
from rotpend.errors import FootpointFitError
from rotpend.integrate import jacobian_fd
from rotpend.melnikov import tau_star
from rotpend.model import K, ModelParams
from rotpend.scattering import (ReducedPoint, default_homoclinic_time,
                                scattering_first_order, scattering_shooting,
                                sweep)

TWO_PI = 2 * math.pi


def test_first_order_identity_without_coupling():
    pars = bench_params(0.0)
    z = ReducedPoint(1.2, 3.0)
    jump = scattering_first_order(z, pars)
    assert jump.dI == 0.0 and jump.dTheta == 0.0 and jump.dK == 0.0
    assert jump.after == z


def test_first_order_degenerate_single_harmonic():
    # a01 = 0: at the critical phase sin(theta - I tau*) = 0, so the gain dies
    pars = ModelParams(eps=1e-2, rho_bar=0.0, omega_star=1.2,
                       a00=0.0, a10=1.0, a01=0.0)
    jump = scattering_first_order(ReducedPoint(1.1, 2.0), pars, rho=0.0)
    assert abs(jump.dI) < 1e-8 * pars.eps


def test_first_order_gain_on_strip(bench, bench_strip):
    lo, hi = bench_strip.theta_bar_range
    for thb in np.linspace(lo + 0.1, hi - 0.1, 5) if lo <= hi else [lo + 0.1]:
        for I in (1.1, 1.2, 1.3):
            z = ReducedPoint(I, thb)
            jump = scattering_first_order(
                z, bench, anchor=bench_strip.tau_anchor(I, thb))
            assert jump.dI > bench_strip.c * bench.eps
            assert jump.dK == pytest.approx(z.I * jump.dI, rel=1e-12)


def test_first_order_jump_invariant_exact():
    # increments are exactly -eps * J grad of the reduced potential
    from rotpend.melnikov import reduced_potential

    pars = bench_params(5e-3, rho_bar=0.02)
    z = ReducedPoint(1.15, 2.2)
    jump = scattering_first_order(z, pars)
    _, grad, _ = reduced_potential(z.I, z.theta_bar, pars,
                                   anchor=jump.tau_star)
    assert jump.dI == pytest.approx(pars.eps * grad[1], rel=1e-12)
    assert jump.dTheta == pytest.approx(-pars.eps * grad[0], rel=1e-12)


def test_first_order_area_preserving_to_eps_squared(bench_strip):
    # |det DJ - 1| must scale like eps^2 (symplectic up to second order)
    devs = []
    eps_values = (1e-2, 5e-3)
    for eps in eps_values:
        pars = bench_params(eps, rho_bar=0.02)
        anchor = bench_strip.tau_anchor(1.2, 1.5)

        def map_fn(y):
            out = scattering_first_order(ReducedPoint(y[0], y[1]), pars,
                                         anchor=anchor).after
            return np.array([out.I, out.theta_bar])

        J = jacobian_fd(map_fn, np.array([1.2, 1.5]), h=1e-4, wrap_outputs=(1,))
        devs.append(abs(np.linalg.det(J) - 1.0))
    assert devs[0] < 6.0 * eps_values[0] ** 2  # C measured ~2.6, frozen at 6
    assert devs[1] < 6.0 * eps_values[1] ** 2
    assert devs[1] < 0.5 * devs[0]  # quadratic collapse under halving


def test_first_order_energy_increment_structure():
    # K(after) - K(before) - I*dI collapses at O(eps^2)
    resid = []
    for eps in (1e-2, 5e-3):
        pars = bench_params(eps, rho_bar=0.02)
        z = ReducedPoint(1.18, 2.0)
        jump = scattering_first_order(z, pars)
        dK_actual = (K(jump.after.I, jump.after.theta_bar, pars)
                     - K(z.I, z.theta_bar, pars))
        resid.append(abs(dK_actual - z.I * jump.dI))
    assert resid[0] < 6.0 * (1e-2) ** 2  # C ~ grad^2/2, measured ~2.5
    assert resid[1] < 6.0 * (5e-3) ** 2
    assert resid[1] < 0.5 * resid[0]  # at least quadratic collapse


def test_default_homoclinic_time():
    assert default_homoclinic_time(1e-3) == math.ceil(math.log(1e3)) + 5
    for eps in (1e-2, 2.5e-3):
        assert math.exp(-default_homoclinic_time(eps)) <= eps


@pytest.mark.slow
def test_shooting_identity_without_coupling():
    pars = bench_params(0.0)
    jump = scattering_shooting(ReducedPoint(1.2, 4.0), 0.0, pars)
    assert abs(jump.dI) < 1e-9
    assert abs(jump.dTheta) < 1e-9
    assert jump.fit_residual < 1e-9


@pytest.mark.slow
def test_shooting_matches_first_order_at_eps_squared(bench_strip, bench_rho_bar):
    # log-log slope of |dI_sh - dI_fo| over eps in {1e-2, 5e-3, 2.5e-3}
    z = ReducedPoint(1.2, 1.5)
    anchor = bench_strip.tau_anchor(z.I, z.theta_bar)
    eps_values = np.array([1e-2, 5e-3, 2.5e-3])
    dI_diff, dTh_diff = [], []
    for eps in eps_values:
        pars = bench_params(eps, rho_bar=bench_rho_bar)
        fo = scattering_first_order(z, pars, anchor=anchor)
        sh = scattering_shooting(z, 0.0, pars, anchor=anchor)
        assert sh.fit_residual <= max(10 * eps ** 2, 1e-9)
        dI_diff.append(abs(sh.dI - fo.dI))
        dTh_diff.append(abs(sh.dTheta - fo.dTheta))
    slope_I = np.polyfit(np.log(eps_values), np.log(dI_diff), 1)[0]
    slope_T = np.polyfit(np.log(eps_values), np.log(dTh_diff), 1)[0]
    assert slope_I >= 1.8
    assert slope_T >= 1.8


@pytest.mark.slow
def test_sweep_rows_and_failure_marking(bench_rho_bar):
    pars = bench_params(1e-2, rho_bar=bench_rho_bar)
    rows = sweep([(1.2, 1.5)], [1e-2], pars)
    assert len(rows) == 1
    r = rows[0]
    assert set(r) == {"eps", "I", "theta_bar", "dI_fo", "dI_sh", "dTheta_fo",
                      "dTheta_sh", "resid"}
    assert np.isfinite(r["dI_sh"])


def test_footpoint_residual_tolerance_enforced(bench_rho_bar):
    pars = bench_params(1e-2, rho_bar=bench_rho_bar)
    with pytest.raises(FootpointFitError):
        scattering_shooting(ReducedPoint(1.2, 1.5), 0.0, pars,
                            residual_tol=1e-18)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotpend.model import (ExtendedState, K, ModelParams, State, Variant, h0, h1,
                           separatrix, vector_field, vector_field_array,
                           wrap_angle)


def test_vector_field_fixed_point_of_vanishing_coupling():
    # at p=q=0 and I=omega_star every perturbation term dies
    pars = ModelParams(eps=0.3, rho_bar=1.0, omega_star=1.2,
                       a00=0.5, a10=1.0, a01=2.0, variant=Variant.VANISHING)
    for theta in (0.0, 1.0, 4.0):
        for s in (0.0, 2.5):
            z = ExtendedState.make(0.0, 0.0, 1.2, theta, s)
            dz = vector_field(z, pars)
            assert np.allclose(dz, [0.0, 0.0, 0.0, 1.2, 1.0], atol=1e-15)


def test_vector_field_unperturbed_limit():
    pars = ModelParams(eps=0.0, rho_bar=0.7, omega_star=1.0)
    assert pars.lam == 0.0  # eps = 0 forces lam = 0 by definition
    z = ExtendedState.make(0.7, 2.0, 1.3, 0.4, 1.1)
    dz = vector_field(z, pars)
    expected = [math.sin(2.0), 0.7, 0.0, 1.3, 1.0]
    assert np.allclose(dz, expected, rtol=0, atol=1e-15)


def test_vector_field_against_symbolic_oracle():
    # oracle: independent sympy evaluation of the evolution equations,
    # frozen below; the live oracle is re-run to guard the frozen numbers
    sympy = pytest.importorskip("sympy")
    sp = sympy
    p, q, I, th, s = sp.symbols("p q I th s")
    eps_s, lam_s, w_s = sp.symbols("eps lam w")
    a00_s, a10_s, a01_s = sp.symbols("a00 a10 a01")
    f = sp.cos(q) - 1
    g = a00_s + a10_s * sp.cos(th) + a01_s * sp.cos(s)
    exprs = (sp.sin(q) - eps_s * sp.diff(f, q) * g - lam_s * p,
             p,
             -lam_s * (I - w_s) - eps_s * f * sp.diff(g, th),
             I)
    pars = ModelParams(eps=0.01, rho_bar=0.2, omega_star=1.2,
                       a00=0.0, a10=1.0, a01=1.0, variant=Variant.VANISHING)
    assert pars.lam == pytest.approx(0.0004342944819032518, rel=1e-15)
    subs = {p: 1.0, q: math.pi, I: 1.0, th: 0.0, s: 0.0, eps_s: 0.01,
            lam_s: pars.lam, w_s: 1.2, a00_s: 0.0, a10_s: 1.0, a01_s: 1.0}
    oracle = [float(sp.N(e.subs(subs), 20)) for e in exprs]
    frozen = [-0.00043429448190312683, 1.0, 8.685889638065036e-05, 1.0]
    assert np.allclose(oracle, frozen, rtol=0, atol=1e-16)
    dz = vector_field_array(np.array([1.0, math.pi, 1.0, 0.0, 0.0]), pars)
    assert np.allclose(dz[:4], frozen, rtol=0, atol=1e-14)
    assert dz[4] == 1.0


def test_energies():
    assert h1(0.0, 0.0) == 0.0
    assert h1(2.0, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert h0(2.0) == 2.0
    pars = ModelParams(eps=0.5, a10=2.0)
    assert K(0.0, 0.0, pars) == 0.0
    assert K(1.0, math.pi, pars) == pytest.approx(0.5 - 0.5 * 2.0 * 2.0)


def test_separatrix_endpoints():
    p0, q0 = separatrix(0.0)
    assert p0 == pytest.approx(2.0, abs=1e-15)
    assert q0 == pytest.approx(math.pi, abs=1e-15)
    for t, q_limit in ((20.0, 2 * math.pi), (-20.0, 0.0)):
        p, q = separatrix(t)
        assert abs(p) < 1e-8
        assert abs(q - q_limit) < 1e-8


@pytest.mark.parametrize("t", [-2.0, -1.0, 0.0, 1.0, 2.0])
def test_separatrix_momentum_energy_identity(t):
    # cos(q0) - 1 = -p0^2 / 2 along the separatrix
    p0, q0 = separatrix(t)
    assert math.cos(q0) - 1.0 == pytest.approx(-0.5 * p0 ** 2, abs=1e-14)


def test_separatrix_zero_energy_grid():
    t = np.linspace(-20, 20, 4001)
    p0, q0 = separatrix(t)
    assert np.max(np.abs(h1(p0, q0))) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-20.0, max_value=20.0))
def test_separatrix_zero_energy_property(t):
    p0, q0 = separatrix(t)
    assert abs(h1(p0, q0)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_wrap_angle_range(x):
    w = wrap_angle(x)
    assert 0.0 <= w < 2.0 * math.pi
    assert abs(math.sin(w) - math.sin(x)) < 1e-9


def test_action_conserved_without_coupling():
    pars = ModelParams(eps=0.0, rho_bar=0.5, omega_star=2.0)
    rng = np.random.default_rng(7)
    for _ in range(25):
        y = rng.uniform(-2, 2, size=5)
        assert vector_field_array(y, pars)[2] == 0.0


def test_vanishing_perturbation_dies_at_saddle():
    # at q = 0 the p-equation reduces to -lam*p exactly
    pars = ModelParams(eps=0.2, rho_bar=0.5, omega_star=1.0,
                       a00=1.0, a10=2.0, a01=3.0, variant=Variant.VANISHING)
    for p in (-1.0, 0.3):
        for theta in (0.2, 4.0):
            dz = vector_field_array(np.array([p, 0.0, 1.0, theta, 0.7]), pars)
            assert dz[0] == pytest.approx(-pars.lam * p, abs=1e-18)


def test_param_validation():
    with pytest.raises(ValueError):
        ModelParams(eps=1.0)
    with pytest.raises(ValueError):
        ModelParams(eps=-0.1)
    with pytest.raises(ValueError):
        ModelParams(omega_star=0.0)
    pars = ModelParams(eps=0.01, rho_bar=0.2)
    assert pars.lam == pytest.approx(0.01 * 0.2 / math.log(100.0), rel=1e-15)


def test_angles_stored_reduced():
    z = State(0.1, 7.0, 1.0, -1.0)
    assert 0.0 <= z.q < 2 * math.pi
    assert 0.0 <= z.theta < 2 * math.pi
    ez = ExtendedState(z, 13.0)
    assert 0.0 <= ez.s < 2 * math.pi
    assert np.allclose(ExtendedState.from_array(ez.as_array()).as_array(),
                       ez.as_array())


def test_variant_from_string():
    pars = ModelParams(variant="non_vanishing")
    assert pars.variant is Variant.NON_VANISHING
    assert pars.f(0.0) == 1.0
    assert ModelParams(variant="vanishing").f(0.0) == 0.0

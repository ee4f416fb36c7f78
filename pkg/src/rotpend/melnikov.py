"""Melnikov potential, critical phase, splitting distance, reduced potential.

Sign conventions used throughout (fixed by two verifiable identities):

* The potential is L(I, theta, s) = -integral over t of
  (cos q0(t) - 1) * g(theta + I t, s + t); with the two-harmonic coupling it
  has the closed form A00 + A10(I) cos(theta) + A01 cos(s), where
  A00 = 4 a00, A10(I) = 2 pi I a10 / sinh(pi I / 2), A01 = 2 pi a01 / sinh(pi/2).
* The critical phase tau* is a nondegenerate zero of
  d/dtau [ L(I, theta - I tau, s - tau) + rho (s - tau) A ],  A = integral p0^2 = 8,
  equivalently of
  F(tau) = I A10(I) sin(theta - I tau) + A01 sin(s - tau) - rho A.
* The reduced potential Lr(I, thb) = L(I, thb - I tau*, -tau*) - rho tau* A
  (section s = 0) generates the first-order scattering map through
  dI = +eps dLr/dthb, dthb = -eps dLr/dI, which makes dLr/dthb equal the
  change-in-action integral a10 * integral (cos q0(tau*+t) - 1) sin(thb + I t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRootError, NoRootError
from .model import ModelParams, separatrix, separatrix_p2

TWO_PI = 2.0 * math.pi

#: analytic value of integral p0^2 dt = integral 4 sech^2 t dt
DISSIPATION_AREA = 8.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncated-quadrature settings for the separatrix integrals.

    The integrands decay like 4 e^{-2|t|}, so the tail beyond t_cut contributes
    less than 4 e^{-2 t_cut} (< 7e-35 at the default t_cut = 40).
    """

    t_cut: float = 40.0
    scheme: str = "gauss"  # "gauss": Gauss-Legendre panels; "simpson": adaptive Simpson
    tol: float = 1e-10
    panel_width: float = 1.0
    panel_order: int = 16

    def __post_init__(self):
        if self.t_cut < 20.0:
            raise ValueError("t_cut must be >= 20 (tail of sech^2 beyond 20 is < 1e-16)")
        if self.scheme not in ("gauss", "simpson"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


def _adaptive_simpson(f, a, b, tol):
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth <= 0 or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    return rec(a, b, fa, fm, fb, whole, tol, 48)


def quad_separatrix(f, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Integrate a scalar function of t over [-t_cut, t_cut].

    ``f`` must accept numpy arrays for the Gauss-Legendre scheme.
    """
    if cfg.scheme == "simpson":
        return _adaptive_simpson(lambda t: float(f(np.asarray(t))), -cfg.t_cut,
                                 cfg.t_cut, cfg.tol)
    x, w = np.polynomial.legendre.leggauss(cfg.panel_order)
    edges = np.arange(-cfg.t_cut, cfg.t_cut + 0.5 * cfg.panel_width, cfg.panel_width)
    half = 0.5 * cfg.panel_width
    total = 0.0
    for a in edges[:-1]:
        t = a + half * (x + 1.0)
        total += half * np.sum(w * f(t))
    return float(total)


def dissipation_area(cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Quadrature of integral p0(t)^2 dt; analytically 4 tanh(t) -> 8."""
    return quad_separatrix(separatrix_p2, cfg)


def coeff_A00(params: ModelParams) -> float:
    return 4.0 * params.a00


def coeff_A10(I, params: ModelParams):
    """2 pi I a10 / sinh(pi I / 2), with the I -> 0 limit 4 a10."""
    I = np.asarray(I, dtype=float)
    x = np.pi * I / 2.0
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    ratio = np.where(small, 1.0 - x * x / 6.0, safe / np.sinh(safe))
    return 4.0 * params.a10 * ratio


def coeff_A01(params: ModelParams) -> float:
    return 2.0 * np.pi * params.a01 / math.sinh(np.pi / 2.0)


def melnikov_closed(I, theta, s, params: ModelParams):
    """Closed form A00 + A10(I) cos(theta) + A01 cos(s)."""
    return coeff_A00(params) + coeff_A10(I, params) * np.cos(theta) \
        + coeff_A01(params) * np.cos(s)


def melnikov_potential(I: float, theta: float, s: float, params: ModelParams,
                       cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """Quadrature evaluation of the potential (the oracle path).

    Uses cos(q0(t)) - 1 = -p0(t)^2/2 = -2/cosh^2 t, exact on the separatrix.
    """
    def integrand(t):
        return 0.5 * separatrix_p2(t) * (params.a00
                                          + params.a10 * np.cos(theta + I * t)
                                          + params.a01 * np.cos(s + t))

    return quad_separatrix(integrand, cfg)


# ---------------------------------------------------------------------------
# critical phase


def _crit_F(tau, I, theta, s, rho, params):
    """Derivative in tau of the dissipation-augmented potential."""
    return (I * coeff_A10(I, params) * np.sin(theta - I * tau)
            + coeff_A01(params) * np.sin(s - tau)
            - rho * DISSIPATION_AREA)


def _crit_Fp(tau, I, theta, s, params):
    return (-(I ** 2) * coeff_A10(I, params) * np.cos(theta - I * tau)
            - coeff_A01(params) * np.cos(s - tau))


@dataclass(frozen=True)
class TauStar:
    tau: float
    nondegeneracy: float


def _newton_polish(tau, I, theta, s, rho, params, max_step=0.75):
    for _ in range(80):
        f = _crit_F(tau, I, theta, s, rho, params)
        fp = _crit_Fp(tau, I, theta, s, params)
        if fp == 0.0:
            return None
        step = f / fp
        if abs(step) > max_step:
            step = math.copysign(max_step, step)
        tau -= step
        if abs(step) < 1e-14:
            return tau
    return None


def tau_star_all(I: float, theta: float, s: float, params: ModelParams,
                 rho: float | None = None, n_scan: int = 512) -> list[TauStar]:
    """All nondegenerate critical phases on the scan window, sorted by tau.

    The window [-pi(1 + 1/|I|), pi(1 + 1/|I|)] covers at least one period of
    both harmonics of the criticality function.
    """
    if rho is None:
        rho = params.rho
    half = np.pi * (1.0 + 1.0 / max(abs(I), 1e-12))
    taus = np.linspace(-half, half, n_scan)
    vals = _crit_F(taus, I, theta, s, rho, params)
    roots: list[TauStar] = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0 or vals[i] * vals[i + 1] < 0.0:
            r = _newton_polish(0.5 * (taus[i] + taus[i + 1]), I, theta, s, rho, params)
            if r is None:
                continue
            nd = abs(_crit_Fp(r, I, theta, s, params))
            if any(abs(r - q.tau) < 1e-9 for q in roots):
                continue
            roots.append(TauStar(float(r), float(nd)))
    return sorted(roots, key=lambda q: q.tau)


def tau_star(I: float, theta: float, s: float, params: ModelParams,
             rho: float | None = None, anchor: float | None = None,
             n_scan: int = 512, degeneracy_cutoff: float = 1e-8) -> TauStar:
    """Critical phase of the dissipation-augmented potential.

    With no anchor, returns the scan root maximizing nondegeneracy (ties broken
    by smaller |tau|).  With an anchor, Newton-continues from it, keeping the
    branch; this is what grid scans and orbit sweeps use.
    """
    if rho is None:
        rho = params.rho
    if anchor is not None:
        r = _newton_polish(float(anchor), I, theta, s, rho, params)
        if r is not None:
            nd = abs(_crit_Fp(r, I, theta, s, params))
            if nd >= degeneracy_cutoff:
                return TauStar(float(r), float(nd))
        # fall through to a fresh scan if continuation lost the branch
    roots = tau_star_all(I, theta, s, params, rho=rho, n_scan=n_scan)
    if not roots:
        raise NoRootError(f"no critical phase at (I={I}, theta={theta}, s={s}, rho={rho})")
    good = [q for q in roots if q.nondegeneracy >= degeneracy_cutoff]
    if not good:
        raise DegenerateRootError(
            f"all critical phases degenerate at (I={I}, theta={theta}, s={s}, rho={rho})")
    if anchor is not None:
        return min(good, key=lambda q: abs(q.tau - anchor))
    best_nd = max(q.nondegeneracy for q in good)
    contenders = [q for q in good if q.nondegeneracy >= best_nd * (1.0 - 1e-9)]
    return min(contenders, key=lambda q: (abs(q.tau), q.tau))


# ---------------------------------------------------------------------------
# splitting distance


def splitting_distance(tau: float, I: float, theta: float, s: float,
                       params: ModelParams, rho: float | None = None,
                       cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """First-order stable-minus-unstable graph difference per unit eps.

    -[ integral {h1,H1}(p0(tau+t), q0(tau+t), I, theta+I t, s+t) dt - rho A ]
    with {h1,H1} = p sin(q) g(theta, t) for the product coupling.  Vanishes at
    tau = tau* by construction.
    """
    if rho is None:
        rho = params.rho

    def integrand(t):
        p0, q0 = separatrix(tau + t)
        return p0 * np.sin(q0) * params.g(theta + I * t, s + t)

    bracket = quad_separatrix(integrand, cfg)
    return -(bracket - rho * DISSIPATION_AREA)


# ---------------------------------------------------------------------------
# reduced potential


def reduced_potential_value(I: float, theta_bar: float, params: ModelParams,
                            rho: float | None = None,
                            anchor: float | None = None) -> tuple[float, TauStar]:
    """Value of the reduced potential at section s = 0, plus the tau* used."""
    if rho is None:
        rho = params.rho
    ts = tau_star(I, theta_bar, 0.0, params, rho=rho, anchor=anchor)
    val = melnikov_closed(I, theta_bar - I * ts.tau, -ts.tau, params) \
        - rho * ts.tau * DISSIPATION_AREA
    return float(val), ts


def reduced_potential(I: float, theta_bar: float, params: ModelParams,
                      rho: float | None = None, anchor: float | None = None,
                      fd_step: float = 1e-5) -> tuple[float, np.ndarray, TauStar]:
    """Reduced potential and its gradient (d/dI, d/dtheta_bar) at (I, theta_bar).

    The gradient is central-differenced with the tau* branch pinned by the
    center point's root, so differencing never mixes branches.
    """
    val, ts = reduced_potential_value(I, theta_bar, params, rho=rho, anchor=anchor)
    h = fd_step
    vIp, _ = reduced_potential_value(I + h, theta_bar, params, rho=rho, anchor=ts.tau)
    vIm, _ = reduced_potential_value(I - h, theta_bar, params, rho=rho, anchor=ts.tau)
    vTp, _ = reduced_potential_value(I, theta_bar + h, params, rho=rho, anchor=ts.tau)
    vTm, _ = reduced_potential_value(I, theta_bar - h, params, rho=rho, anchor=ts.tau)
    grad = np.array([(vIp - vIm) / (2.0 * h), (vTp - vTm) / (2.0 * h)])
    return val, grad, ts


def reduced_gradient_closed(I: float, theta_bar: float, params: ModelParams,
                            tau: float) -> np.ndarray:
    """Envelope-formula gradient of the reduced potential at a known tau*.

    d/dthb = -A10(I) sin(thb - I tau*);
    d/dI   =  A10'(I) cos(thb - I tau*) + A10(I) sin(thb - I tau*) * tau*.
    """
    a10I = float(coeff_A10(I, params))
    x = np.pi * I / 2.0
    # A10'(I) = A10(I) * (1/I - (pi/2) coth(pi I / 2))
    da10 = a10I * (1.0 / I - (np.pi / 2.0) / np.tanh(x))
    sin_arg = math.sin(theta_bar - I * tau)
    cos_arg = math.cos(theta_bar - I * tau)
    return np.array([da10 * cos_arg + a10I * sin_arg * tau, -a10I * sin_arg])


@dataclass(frozen=True)
class MelnikovEval:
    """Bundle of potential data at one reduced point (section s = 0)."""

    L: float                 # full potential L(I, theta_bar, 0)
    dL_dtheta: float         # d L / d theta at fixed (I, s)
    dL_dI: float             # d L / d I at fixed (theta, s)
    tau_star: float
    nondegeneracy: float
    L_star_rho: float        # reduced potential value
    grad_reduced: np.ndarray  # (d/dI, d/dtheta_bar) of the reduced potential

    def __post_init__(self):
        if self.nondegeneracy <= 0.0:
            raise ValueError("nondegeneracy must be positive when tau_star is reported")


def evaluate(I: float, theta_bar: float, params: ModelParams,
             rho: float | None = None, anchor: float | None = None) -> MelnikovEval:
    """Evaluate the potential, its derivatives, tau*, and the reduced data."""
    if rho is None:
        rho = params.rho
    a10I = float(coeff_A10(I, params))
    x = np.pi * I / 2.0
    da10 = a10I * (1.0 / I - (np.pi / 2.0) / np.tanh(x)) if I != 0.0 else 0.0
    L = float(melnikov_closed(I, theta_bar, 0.0, params))
    val, grad, ts = reduced_potential(I, theta_bar, params, rho=rho, anchor=anchor)
    return MelnikovEval(
        L=L,
        dL_dtheta=-a10I * math.sin(theta_bar),
        dL_dI=da10 * math.cos(theta_bar),
        tau_star=ts.tau,
        nondegeneracy=ts.nondegeneracy,
        L_star_rho=val,
        grad_reduced=grad,
    )


def melnikov_grid(I_values, theta_bar_values, params: ModelParams,
                  rho: float | None = None, seed_anchor: float | None = None):
    """Evaluate the reduced potential over a grid with branch continuation.

    Continuation runs along each theta_bar row starting from the first row's
    seed, then down the I columns, mirroring how the strip scan anchors tau*.
    Returns a list of row dicts in (I, theta_bar) iteration order.
    """
    I_values = np.asarray(I_values, dtype=float)
    th_values = np.asarray(theta_bar_values, dtype=float)
    rows = []
    anchor_row = None
    for i, I in enumerate(I_values):
        anchor = anchor_row if anchor_row is not None else seed_anchor
        row_anchor = None
        for j, thb in enumerate(th_values):
            val, grad, ts = reduced_potential(I, thb, params, rho=rho, anchor=anchor)
            anchor = ts.tau
            if j == 0:
                row_anchor = ts.tau
            rows.append({
                "I": float(I),
                "theta_bar": float(thb),
                "L_star": val,
                "dL_dI": float(grad[0]),
                "dL_dtheta": float(grad[1]),
                "tau_star": ts.tau,
                "nondeg": ts.nondegeneracy,
            })
        anchor_row = row_anchor
    return rows

"""Scattering map on the invariant plane: first-order formula and direct shooting.

The first-order map moves a reduced point (I, theta_bar) by -eps * J grad of the
reduced potential.  The shooting map measures the same jump directly from the
flow: it corrects a seed on the unperturbed separatrix onto the intersection of
the stable and unstable manifolds of the invariant plane, integrates the
homoclinic excursion for time T_h in both directions, and fits each tail to an
inner orbit to extract the asymptotic footpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import FootpointFitError, ShootingError
from .inner import growth_factor
from .integrate import IntegratorConfig, integrate_raw
from .melnikov import reduced_potential, tau_star
from .model import K, ModelParams, Variant, separatrix, wrap_angle

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ReducedPoint:
    """A point (I, theta_bar) of the section s = 0, theta_bar mod 2*pi."""

    I: float
    theta_bar: float

    def __post_init__(self):
        object.__setattr__(self, "theta_bar", float(wrap_angle(self.theta_bar)))


@dataclass
class ScatteringJump:
    before: ReducedPoint
    after: ReducedPoint
    dI: float
    dTheta: float
    dK: float
    method: str  # "first_order" or "shooting"
    tau_star: float
    homoclinic_time: float | None = None
    fit_residual: float | None = None


def scattering_first_order(z: ReducedPoint, params: ModelParams,
                           rho: float | None = None,
                           anchor: float | None = None) -> ScatteringJump:
    """First-order scattering map (I, thb) -> (I, thb) - eps * J grad Lr(I, thb).

    dI = +eps dLr/dthb, dTheta = -eps dLr/dI, and dK = I*dI (the energy change
    of the reduced rotator system to first order).
    """
    _, grad, ts = reduced_potential(z.I, z.theta_bar, params, rho=rho, anchor=anchor)
    eps = params.eps
    dI = eps * float(grad[1])
    dTheta = -eps * float(grad[0])
    after = ReducedPoint(z.I + dI, z.theta_bar + dTheta)
    return ScatteringJump(before=z, after=after, dI=dI, dTheta=dTheta,
                          dK=z.I * dI, method="first_order", tau_star=ts.tau)


def default_homoclinic_time(eps: float) -> float:
    """T_h = ceil(log(1/eps)) + 5, so e^{-T_h} <= eps with margin."""
    if eps <= 0.0:
        return 8.0
    return float(math.ceil(math.log(1.0 / eps))) + 5.0


_SHOOT_CFG = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-13)


def _horizon_durations(T: float, tau: float) -> tuple[float, float]:
    """Flow durations so the orbit ends near separatrix times +T and -T.

    The seed sits at separatrix time tau, so the forward leg lasts T - tau and
    the backward leg T + tau; both are floored so every ladder stage moves.
    """
    return max(T - tau, 2.0), max(T + tau, 2.0)


def _excursion_residual(delta, seed, params, T, tau, cfg):
    """(unstable coeff near q=2*pi forward, stable coeff near q=0 backward).

    Escapes from the separatrix channel return a large penalty instead of
    raising, so the root solver can recover by shrinking its step.
    """
    y0 = seed.copy()
    y0[0] += delta[0]
    y0[1] += delta[1]
    dur_f, dur_b = _horizon_durations(T, tau)
    _, fwd = integrate_raw(y0, (0.0, dur_f), params, cfg)
    _, bwd = integrate_raw(y0, (0.0, -dur_b), params, cfg)
    p_f, q_f = fwd[-1, 0], fwd[-1, 1]
    p_b, q_b = bwd[-1, 0], bwd[-1, 1]
    if abs(q_f - TWO_PI) > 1.5 or abs(q_b) > 1.5:
        return np.array([1e3 * (1.0 + abs(q_f - TWO_PI)), 1e3 * (1.0 + abs(q_b))])
    # saddle linearization: eigenvectors (1, 1) unstable, (1, -1) stable in (p, q)
    u_fwd = 0.5 * (p_f + (q_f - TWO_PI))
    s_bwd = 0.5 * (p_b - q_b)
    return np.array([u_fwd, s_bwd])


# the correction solve is nearly rank-1: displacements tangent to the separatrix
# are a pure reparametrization (gauge) that both residuals ignore to O(eps), so
# Newton steps use the minimum-norm least-squares solution and a stalled solve
# with a small residual is accepted
_RESID_TOL = 1e-10
_RESID_ACCEPT = 3e-8


def _minnorm_newton(fun, x0, cap=2e-3, max_iter=40, fd=1e-8):
    x = np.asarray(x0, dtype=float).copy()
    r = fun(x)
    best_r, best_x = np.max(np.abs(r)), x.copy()
    stall = 0
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= _RESID_TOL:
            return x, float(np.max(np.abs(r)))
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = fd
            J[:, j] = (fun(x + e) - fun(x - e)) / (2.0 * fd)
        step, *_ = np.linalg.lstsq(J, -r, rcond=1e-12)
        n = np.linalg.norm(step)
        if n > cap:
            step *= cap / n
        x = x + step
        r = fun(x)
        m = float(np.max(np.abs(r)))
        if m < best_r:
            best_r, best_x = m, x.copy()
            stall = 0
        else:
            stall += 1
            if stall >= 4:
                break
    return best_x, best_r


def _fit_tail_vanishing(ts, Is, thetas, params):
    """Linear LSQ of (I(t), theta(t)) samples against the closed inner flow.

    Unknowns (dI0, theta0) with dI0 = I_foot - omega_star enter linearly:
    I(t) - w = e^{-lam t} dI0;  theta(t) - w t = phi(t) dI0 + theta0.
    Returns (I_foot, theta_foot, rms residual).
    """
    lam, w = params.lam, params.omega_star
    e = np.exp(-lam * ts)
    phi = np.array([growth_factor(lam, t) for t in ts])
    n = len(ts)
    A = np.zeros((2 * n, 2))
    b = np.zeros(2 * n)
    A[:n, 0] = e
    b[:n] = Is - w
    A[n:, 0] = phi
    A[n:, 1] = 1.0
    b[n:] = thetas - w * ts
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = float(np.sqrt(np.mean((A @ sol - b) ** 2)))
    return w + sol[0], sol[1], resid


def _fit_tail_nonvanishing(ts, Is, thetas, params, cfg):
    """Nonlinear LSQ against the numerically integrated inner flow."""
    t0, t1 = (float(ts.min()), float(ts.max()))
    sign = 1.0 if t1 > 0 else -1.0

    def model(x):
        from scipy.integrate import solve_ivp

        from .inner import _inner_field
        span = (0.0, t1) if sign > 0 else (0.0, t0)
        sol = solve_ivp(_inner_field, span, [x[0], x[1]], args=(params, 0.0),
                        method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol,
                        t_eval=ts if sign > 0 else ts[::-1], dense_output=False)
        y = sol.y if sign > 0 else sol.y[:, ::-1]
        return np.concatenate([y[0] - Is, y[1] - thetas])

    x0 = np.array([Is[0], thetas[0] - Is[0] * ts[0]])
    res = least_squares(model, x0, method="lm")
    resid = float(np.sqrt(np.mean(res.fun ** 2)))
    return float(res.x[0]), float(res.x[1]), resid


def scattering_shooting(z: ReducedPoint, s: float, params: ModelParams,
                        T_h: float | None = None,
                        rho: float | None = None,
                        anchor: float | None = None,
                        fit_window: tuple[float, float] = (0.6, 1.0),
                        n_fit: int = 40,
                        residual_tol: float | None = None,
                        cfg: IntegratorConfig = _SHOOT_CFG,
                        min_span: float | None = None,
                        return_excursion: bool = False):
    """Scattering jump measured by a homoclinic shooting solve.

    Seeds at (p0(tau*), q0(tau*), I, theta, s), solves a 2-variable correction
    (dp, dq) so the forward/backward time-T_h orbits stay asymptotic to the
    invariant plane, then least-squares fits the orbit tails over
    [fit_window[0]*T_h, fit_window[1]*T_h] (and its mirror) to inner orbits.
    The footpoint difference is the scattering jump.
    """
    if T_h is None:
        T_h = default_homoclinic_time(params.eps)
    if residual_tol is None:
        residual_tol = max(10.0 * params.eps ** 2, 1e-9)
    theta = z.theta_bar + z.I * s
    ts = tau_star(z.I, theta, s, params, rho=rho, anchor=anchor)
    p_seed, q_seed = separatrix(ts.tau)
    seed = np.array([float(p_seed), float(q_seed), z.I, theta, s])

    # homotopy in the horizon: short horizons have a mild residual landscape,
    # long ones are exponentially stiff in the transverse offsets.  Each rung
    # carries an intrinsic truncation offset ~ (4/3) e^{-3T} (the eigen-coordinate
    # measured at finite horizon is not exactly zero on the manifolds), so only
    # the final rung is held to the strict residual floor.
    delta = np.zeros(2)
    horizons = list(np.arange(4.0, T_h, 2.0)) + [float(T_h)]
    for T in horizons:
        delta, resid_T = _minnorm_newton(
            lambda d: _excursion_residual(d, seed, params, T, ts.tau, cfg), delta)
        accept = max(_RESID_ACCEPT, 10.0 * (4.0 / 3.0) * math.exp(-3.0 * T)) \
            if T == horizons[-1] else 1e-3
        if resid_T > accept:
            raise ShootingError(
                f"shooting solve stalled at horizon T={T} with residual {resid_T:.2e}")

    y0 = seed.copy()
    y0[0] += delta[0]
    y0[1] += delta[1]

    # sample the full excursion; distance to the invariant plane is governed by
    # the separatrix time sep = flow time + tau*, so fit masks use sep
    dur_f, dur_b = _horizon_durations(T_h, ts.tau)
    if min_span is not None:
        dur_f = max(dur_f, min_span)
        dur_b = max(dur_b, min_span)
    n_dense = max(8 * n_fit, int(8 * (dur_f + dur_b)))
    t_exc = np.linspace(-dur_b, dur_f, n_dense)
    t_neg = t_exc[t_exc < 0.0]
    t_pos = t_exc[t_exc >= 0.0]
    _, exc_f = integrate_raw(y0, (0.0, float(t_pos[-1])), params, cfg, t_eval=t_pos)
    _, exc_b = integrate_raw(y0, (0.0, float(t_neg[0])), params, cfg,
                             t_eval=t_neg[::-1])
    exc = np.vstack([exc_b[::-1], exc_f])

    lo, hi = fit_window
    sep = t_exc + ts.tau
    m_fwd = (sep >= lo * T_h) & (sep <= hi * T_h)
    m_bwd = (sep <= -lo * T_h) & (sep >= -hi * T_h)
    if m_fwd.sum() < 4 or m_bwd.sum() < 4:
        raise ShootingError("fit windows are empty; increase T_h or n_fit")

    if params.variant is Variant.VANISHING:
        I_p, th_p, r_p = _fit_tail_vanishing(t_exc[m_fwd], exc[m_fwd, 2],
                                             exc[m_fwd, 3], params)
        I_m, th_m, r_m = _fit_tail_vanishing(t_exc[m_bwd], exc[m_bwd, 2],
                                             exc[m_bwd, 3], params)
    else:
        I_p, th_p, r_p = _fit_tail_nonvanishing(t_exc[m_fwd], exc[m_fwd, 2],
                                                exc[m_fwd, 3], params, cfg)
        I_m, th_m, r_m = _fit_tail_nonvanishing(t_exc[m_bwd], exc[m_bwd, 2],
                                                exc[m_bwd, 3], params, cfg)
    resid = max(r_p, r_m)
    if resid > residual_tol:
        raise FootpointFitError(
            f"footpoint fit residual {resid:.3e} exceeds tolerance {residual_tol:.3e}",
            residual=resid, tol=residual_tol)

    dI = I_p - I_m
    dTheta = th_p - th_m
    before = ReducedPoint(I_m, th_m - I_m * s)
    after = ReducedPoint(I_p, th_p - I_p * s)
    dK = float(K(I_p, th_p, params) - K(I_m, th_m, params))
    jump = ScatteringJump(before=before, after=after, dI=float(dI),
                          dTheta=float(dTheta), dK=dK, method="shooting",
                          tau_star=ts.tau, homoclinic_time=float(T_h),
                          fit_residual=resid)
    if return_excursion:
        return jump, (t_exc, exc)
    return jump


def sweep(points, eps_values, base_params: ModelParams, s: float = 0.0,
          rho_from_eps: bool = True):
    """First-order vs shooting comparison over strip points and eps values.

    Returns a list of row dicts with keys
    eps, I, theta_bar, dI_fo, dI_sh, dTheta_fo, dTheta_sh, resid.
    Shooting failures leave NaNs in the *_sh columns.
    """
    rows = []
    for eps in eps_values:
        params = base_params.replace(eps=float(eps))
        for pt in points:
            z = ReducedPoint(*pt)
            fo = scattering_first_order(z, params)
            row = {"eps": float(eps), "I": z.I, "theta_bar": z.theta_bar,
                   "dI_fo": fo.dI, "dTheta_fo": fo.dTheta,
                   "dI_sh": float("nan"), "dTheta_sh": float("nan"),
                   "resid": float("nan")}
            try:
                sh = scattering_shooting(z, s, params, anchor=fo.tau_star)
                row.update(dI_sh=sh.dI, dTheta_sh=sh.dTheta, resid=sh.fit_residual)
            except (ShootingError, FootpointFitError):
                pass
            rows.append(row)
    return rows

"""Dynamics restricted to the invariant plane p = q = 0.

For the vanishing coupling the restricted system is linear,
    dI/dt = -lam*(I - omega_star),   dtheta/dt = I,
with the closed-form solution
    I(t)     = (I0 - omega_star) e^{-lam t} + omega_star,
    theta(t) = theta0 + (I0 - omega_star)(1 - e^{-lam t})/lam + omega_star t,
whose time-2*pi map is the restricted stroboscopic map.  The circle
I = omega_star attracts every restricted orbit at rate 2*pi*lam per iterate.

For the non-vanishing coupling the restricted system picks up the forcing
term +eps*a10*sin(theta) in dI/dt and is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError, WrongVariantError
from .integrate import IntegratorConfig
from .model import K, ModelParams, Variant, wrap_angle

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class InnerPoint:
    """A point (I, theta) of the invariant plane; theta stored mod 2*pi."""

    I: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    def as_array(self) -> np.ndarray:
        return np.array([self.I, self.theta], dtype=float)


def growth_factor(lam: float, t: float) -> float:
    """(1 - e^{-lam t}) / lam, evaluated stably; equals t in the limit lam -> 0."""
    x = lam * t
    if abs(x) < 1e-8:
        # two-term series; next term is x^2/6 < 2e-17 relative
        return t * (1.0 - 0.5 * x)
    return -math.expm1(-x) / lam


def inner_flow_lifted(I0: float, theta0: float, t: float, params: ModelParams,
                      s0: float = 0.0,
                      cfg: IntegratorConfig = IntegratorConfig()) -> tuple[float, float]:
    """Restricted flow for time t, returning (I, theta) with theta unreduced."""
    if params.variant is Variant.VANISHING:
        lam = params.lam
        dI = I0 - params.omega_star
        I_t = dI * math.exp(-lam * t) + params.omega_star
        theta_t = theta0 + dI * growth_factor(lam, t) + params.omega_star * t
        return I_t, theta_t
    return _inner_flow_numeric(I0, theta0, t, params, s0, cfg)


def _inner_field(t, y, params: ModelParams, s0: float):
    I, theta = y
    dI = -params.lam * (I - params.omega_star) \
        - params.eps * params.f(0.0) * params.g_dtheta(theta, s0 + t)
    return [dI, I]


def _inner_flow_numeric(I0, theta0, t, params, s0, cfg):
    sol = solve_ivp(_inner_field, (0.0, t), [I0, theta0], args=(params, s0),
                    method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol)
    if not sol.success:
        raise IntegrationError(f"inner integration failed: {sol.message}",
                               last_t=sol.t[-1] if len(sol.t) else 0.0,
                               last_state=sol.y[:, -1] if sol.y.size else None)
    return float(sol.y[0, -1]), float(sol.y[1, -1])


def inner_flow(z: InnerPoint, s0: float, t: float, params: ModelParams,
               cfg: IntegratorConfig = IntegratorConfig()) -> InnerPoint:
    """Restricted flow for time t started at section angle s0."""
    I_t, theta_t = inner_flow_lifted(z.I, z.theta, t, params, s0=s0, cfg=cfg)
    return InnerPoint(I_t, theta_t)


def inner_map_closed(z: InnerPoint, params: ModelParams) -> InnerPoint:
    """Closed-form time-2*pi map of the restricted system (vanishing variant).

    (I, theta) -> ((I - w)e^{-2 pi lam} + w,
                   theta + (I - w)(1 - e^{-2 pi lam})/lam + 2 pi w),  w = omega_star.
    """
    if params.variant is not Variant.VANISHING:
        raise WrongVariantError("closed-form inner map requires the vanishing variant")
    lam = params.lam
    w = params.omega_star
    dI = z.I - w
    I1 = dI * math.exp(-TWO_PI * lam) + w
    theta1 = z.theta + dI * growth_factor(lam, TWO_PI) + TWO_PI * w
    return InnerPoint(I1, theta1)


def inner_map_closed_arrays(I, theta, params: ModelParams):
    """Vectorized closed-form inner map on unreduced arrays (I, theta)."""
    if params.variant is not Variant.VANISHING:
        raise WrongVariantError("closed-form inner map requires the vanishing variant")
    lam = params.lam
    w = params.omega_star
    dI = np.asarray(I) - w
    return dI * math.exp(-TWO_PI * lam) + w, \
        np.asarray(theta) + dI * growth_factor(lam, TWO_PI) + TWO_PI * w


def inner_map(z: InnerPoint, params: ModelParams,
              cfg: IntegratorConfig = IntegratorConfig(),
              s0: float = 0.0) -> InnerPoint:
    """Time-2*pi map of the restricted system (either variant)."""
    if params.variant is Variant.VANISHING:
        return inner_map_closed(z, params)
    return inner_flow(z, s0, TWO_PI, params, cfg)


@dataclass
class AttractorFit:
    """Least-squares fit of the per-iterate decay rate toward I = omega_star."""

    decay_rate: float
    predicted_rate: float
    residual: float
    degenerate: bool
    samples: np.ndarray = field(repr=False)  # columns (k, |I_k - omega_star|)


def attractor_fit(z0: InnerPoint, k_max: int, params: ModelParams,
                  transient: int = 10,
                  cfg: IntegratorConfig = IntegratorConfig()) -> AttractorFit:
    """Fit log|I_k - omega_star| vs k over iterates of the time-2*pi map.

    For the vanishing variant the decay is exactly geometric and the fitted
    rate equals 2*pi*lam to rounding error.  A degenerate flag is set when the
    orbit starts on the attractor itself.
    """
    if params.eps <= 0.0:
        raise ValueError("attractor_fit requires eps > 0")
    dists = np.empty(k_max + 1)
    z = z0
    dists[0] = abs(z.I - params.omega_star)
    for k in range(1, k_max + 1):
        z = inner_map(z, params, cfg)
        dists[k] = abs(z.I - params.omega_star)
    samples = np.column_stack([np.arange(k_max + 1), dists])
    predicted = TWO_PI * params.lam
    if dists.max() < 1e-14:
        return AttractorFit(0.0, predicted, 0.0, True, samples)
    ks = np.arange(transient, k_max + 1)
    logs_all = dists[transient:]
    # drop samples at the rounding floor, where log-decay turns into noise
    floor = 1e-13 * max(1.0, abs(params.omega_star))
    keep = logs_all > floor
    if keep.sum() < 3:
        return AttractorFit(0.0, predicted, 0.0, True, samples)
    ks = ks[keep]
    logs = np.log(logs_all[keep])
    slope, intercept = np.polyfit(ks, logs, 1)
    resid = float(np.sqrt(np.mean((logs - (slope * ks + intercept)) ** 2)))
    return AttractorFit(-float(slope), predicted, resid, False, samples)


@dataclass
class LemmaBoundReport:
    """Sampled comparison of the lam-system and lam=0 system from one IC.

    Ratios divide the observed differences by their theoretical envelopes:
    |I_lam - I_0| / (1 - e^{-lam t}),  |theta_lam - theta_0| / (lam t^2 / 2),
    |K(z_lam) - K(z_0)| / (1 - e^{-lam t}).
    """

    t: np.ndarray
    ratio_I: np.ndarray
    ratio_theta: np.ndarray
    ratio_K: np.ndarray
    max_ratio_I: float
    max_ratio_theta: float
    max_ratio_K: float
    d_ref: float  # sup_t |I_0(t) - omega_star| along the dissipation-free orbit

    @property
    def all_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.ratio_I))
                    and np.all(np.isfinite(self.ratio_theta))
                    and np.all(np.isfinite(self.ratio_K)))


def inner_lemma_bounds(z0: InnerPoint, T0: float, params: ModelParams,
                       n_samples: int = 200,
                       cfg: IntegratorConfig = IntegratorConfig(rel_tol=1e-11,
                                                                abs_tol=1e-12)) -> LemmaBoundReport:
    """Integrate the restricted system with and without dissipation and report
    the bound ratios over 0 < t <= T0*log(1/eps) (non-vanishing variant).
    """
    if params.variant is not Variant.NON_VANISHING:
        raise WrongVariantError("inner_lemma_bounds requires the non-vanishing variant")
    if params.eps <= 0.0:
        raise ValueError("inner_lemma_bounds requires eps > 0")
    lam = params.lam
    T = T0 * math.log(1.0 / params.eps)
    t_eval = np.linspace(0.0, T, n_samples + 1)
    p0 = params.replace(rho_bar=0.0)
    if lam == 0.0:
        # the two systems coincide: every numerator is identically zero
        z = np.zeros(n_samples)
        sol = solve_ivp(_inner_field, (0.0, T), [z0.I, z0.theta],
                        args=(p0, 0.0), method="RK45", rtol=cfg.rel_tol,
                        atol=cfg.abs_tol, t_eval=t_eval)
        d_ref = float(np.max(np.abs(sol.y[0] - params.omega_star)))
        return LemmaBoundReport(t_eval[1:], z, z.copy(), z.copy(),
                                0.0, 0.0, 0.0, d_ref)

    def run(pp):
        sol = solve_ivp(_inner_field, (0.0, T), [z0.I, z0.theta], args=(pp, 0.0),
                        method="RK45", rtol=cfg.rel_tol, atol=cfg.abs_tol,
                        t_eval=t_eval, dense_output=False)
        if not sol.success:
            raise IntegrationError(f"inner integration failed: {sol.message}")
        return sol.y

    y_lam = run(params)
    y_0 = run(p0)
    t = t_eval[1:]
    denom = -np.expm1(-lam * t)
    dI = np.abs(y_lam[0, 1:] - y_0[0, 1:])
    dth = np.abs(y_lam[1, 1:] - y_0[1, 1:])
    dK = np.abs(K(y_lam[0, 1:], y_lam[1, 1:], params) - K(y_0[0, 1:], y_0[1, 1:], params))
    ratio_I = dI / denom
    ratio_th = dth / (lam * t ** 2 / 2.0)
    ratio_K = dK / denom
    d_ref = float(np.max(np.abs(y_0[0] - params.omega_star)))
    return LemmaBoundReport(t, ratio_I, ratio_th, ratio_K,
                            float(ratio_I.max()), float(ratio_th.max()),
                            float(ratio_K.max()), d_ref)


def partial_quotients(x: float, n: int = 12) -> list[int]:
    """First n continued-fraction partial quotients of x (diagnostic only).

    Large quotients flag frequencies that are locally well-approximated by
    rationals; the check is advisory and nothing enforces it.
    """
    out = []
    y = float(x)
    for _ in range(n):
        a = math.floor(y)
        out.append(int(a))
        frac = y - a
        if frac < 1e-12:
            break
        y = 1.0 / frac
    return out


def orbit_to_csv(path, z0: InnerPoint, k_max: int, params: ModelParams,
                 cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Iterate the time-2*pi map and dump k,I,theta rows; returns the orbit."""
    import csv

    rows = np.empty((k_max + 1, 2))
    z = z0
    rows[0] = (z.I, z.theta)
    for k in range(1, k_max + 1):
        z = inner_map(z, params, cfg)
        rows[k] = (z.I, z.theta)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "I", "theta"])
        for k, (I, th) in enumerate(rows):
            w.writerow([k, f"{I:.17g}", f"{th:.17g}"])
    return rows

"""Strip construction and the inner/outer iterated-function-system orbit.

A strip is a rectangle [I1, I2] x [thb1, thb2] of the section on which the
reduced-potential gradient d Lr / d theta_bar stays above a measured floor
c > 0, so one application of the first-order scattering map gains at least
c*eps of action.  Between jumps the inner time-2*pi map runs until the orbit
re-enters the strip's theta_bar window, capped at
k_max = ceil(T0 log(1/eps) / (2 pi)) iterates.  Keeping the dissipation budget

    rho_bar <= c / (2 * d_eff * T0)

makes the worst-case inner loss at most half of the jump gain, so the action
(or the reduced energy K, for the non-vanishing coupling) ratchets upward by
at least c*eps/2 per macro-step until it crosses from below I1 to above I2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NetGainViolationError, NoReturnToStripError, StripNotFoundError
from .inner import inner_flow_lifted
from .integrate import IntegratorConfig, JumpMarker, Trajectory
from .melnikov import reduced_potential, tau_star
from .model import K, ModelParams, Variant, wrap_angle
from .scattering import (ReducedPoint, ScatteringJump, default_homoclinic_time,
                         scattering_first_order, scattering_shooting)

TWO_PI = 2.0 * math.pi


def k_max_cap(T0: float, eps: float) -> int:
    """Return-iterate cap ceil(T0 * log(1/eps) / (2*pi))."""
    if eps <= 0.0:
        raise ValueError("k_max requires eps > 0")
    return int(math.ceil(T0 * math.log(1.0 / eps) / TWO_PI))


def rho_bar_bound(c: float, d_eff: float, T0: float) -> float:
    """Dissipation-scale bound c / (2 * d_eff * T0)."""
    if c <= 0.0 or d_eff <= 0.0 or T0 <= 0.0:
        raise ValueError("all inputs must be positive")
    return c / (2.0 * d_eff * T0)


@dataclass
class StripSpec:
    """A certified rectangle of the section plus the data diffuse() needs."""

    I_range: tuple[float, float]
    theta_bar_range: tuple[float, float]
    c: float                      # measured floor of d Lr / d theta_bar
    d_max: float                  # max distance of I1, I2 from omega_star
    k_max: int
    T0: float
    rho_bar: float                # dissipation scale the scan was run at
    grad_abs_max: float           # measured sup |grad Lr| (bounds the jump size)
    # tau* anchors on the scan grid, used to stay on the certified branch
    I_nodes: np.ndarray = field(repr=False, default=None)
    theta_nodes: np.ndarray = field(repr=False, default=None)
    tau_grid: np.ndarray = field(repr=False, default=None)

    def contains(self, I: float, theta_bar: float) -> bool:
        return self.I_range[0] <= I <= self.I_range[1] and self.in_window(theta_bar)

    def in_window(self, theta_bar: float) -> bool:
        """Window membership; lo > hi encodes an interval wrapping through 0."""
        th = float(wrap_angle(theta_bar))
        lo, hi = self.theta_bar_range
        if lo <= hi:
            return lo <= th <= hi
        return th >= lo or th <= hi

    @property
    def window_width(self) -> float:
        lo, hi = self.theta_bar_range
        return hi - lo if lo <= hi else TWO_PI - lo + hi

    def window_mid(self) -> float:
        lo, hi = self.theta_bar_range
        return 0.5 * (lo + hi) if lo <= hi else float(wrap_angle(lo + 0.5 * self.window_width))

    def tau_anchor(self, I: float, theta_bar: float) -> float:
        """Nearest-node tau* anchor from the scan grid."""
        i = int(np.clip(np.searchsorted(self.I_nodes, I), 0, len(self.I_nodes) - 1))
        j = int(np.clip(np.searchsorted(self.theta_nodes, wrap_angle(theta_bar)),
                        0, len(self.theta_nodes) - 1))
        return float(self.tau_grid[i, j])


def _continue_tau_grid(I_nodes, th_nodes, params, rho, seed_point):
    """tau* on the grid by Newton continuation from a seeded center root."""
    nI, nth = len(I_nodes), len(th_nodes)
    T = np.full((nI, nth), np.nan)
    i0 = int(np.argmin(np.abs(I_nodes - seed_point[0])))
    j0 = int(np.argmin(np.abs(th_nodes - seed_point[1])))
    T[i0, j0] = tau_star(I_nodes[i0], th_nodes[j0], 0.0, params, rho=rho,
                         anchor=seed_point[2]).tau
    for j in range(j0 + 1, nth):
        T[i0, j] = tau_star(I_nodes[i0], th_nodes[j], 0.0, params, rho=rho,
                            anchor=T[i0, j - 1]).tau
    for j in range(j0 - 1, -1, -1):
        T[i0, j] = tau_star(I_nodes[i0], th_nodes[j], 0.0, params, rho=rho,
                            anchor=T[i0, j + 1]).tau
    for j in range(nth):
        for i in range(i0 + 1, nI):
            T[i, j] = tau_star(I_nodes[i], th_nodes[j], 0.0, params, rho=rho,
                               anchor=T[i - 1, j]).tau
        for i in range(i0 - 1, -1, -1):
            T[i, j] = tau_star(I_nodes[i], th_nodes[j], 0.0, params, rho=rho,
                               anchor=T[i + 1, j]).tau
    return T


def _window_runs(ok: np.ndarray) -> list[tuple[int, int]]:
    """Contiguous True runs of a circular mask, merging across the seam."""
    nth = len(ok)
    if ok.all():
        return [(0, nth - 1)]
    runs = []
    start = None
    for j, flag in enumerate(ok):
        if flag and start is None:
            start = j
        elif not flag and start is not None:
            runs.append((start, j - 1))
            start = None
    if start is not None:
        runs.append((start, nth - 1))
    if len(runs) >= 2 and runs[0][0] == 0 and runs[-1][1] == nth - 1:
        first = runs.pop(0)
        runs[-1] = (runs[-1][0], first[1] + nth)
    return runs


def _scan_branch(I_nodes, th_nodes, params, rho, seed, c_floor, min_window,
                 edge_margin):
    """Continue one tau* branch over the grid and extract its best window.

    Returns (window, c, grad_abs_max, tau_grid) or None if the branch offers
    no window clearing the floor.
    """
    T = _continue_tau_grid(I_nodes, th_nodes, params, rho, seed)
    G = np.empty_like(T)
    GI = np.empty_like(T)
    for i in range(len(I_nodes)):
        for j in range(len(th_nodes)):
            _, grad, ts = reduced_potential(I_nodes[i], th_nodes[j], params,
                                            rho=rho, anchor=T[i, j])
            T[i, j] = ts.tau
            G[i, j] = grad[1]
            GI[i, j] = grad[0]
    nth = len(th_nodes)
    runs = [r for r in _window_runs(np.all(G >= c_floor, axis=0))
            if (r[1] - r[0]) * (TWO_PI / nth) >= min_window]
    if not runs:
        return None
    j_lo, j_hi = max(runs, key=lambda r: r[1] - r[0])
    if j_hi - j_lo > 2 * edge_margin:
        j_lo += edge_margin
        j_hi -= edge_margin
    cols = np.mod(np.arange(j_lo, j_hi + 1), nth)
    window = (float(th_nodes[cols[0]]), float(th_nodes[cols[-1]]))
    c = float(np.min(G[:, cols]))
    grad_abs_max = float(np.max(np.hypot(GI[:, cols], G[:, cols])))
    return window, c, grad_abs_max, T


def build_strip(params: ModelParams, I_range: tuple[float, float] | None = None,
                T0: float = 14.0, n_I: int = 27, n_theta: int = 181,
                c_floor: float = 0.05, min_window: float = 0.5,
                grad_cap: float = 9.0, n_seeds: int = 4,
                edge_margin: int = 1) -> StripSpec:
    """Grid-scan for a rectangle where the theta_bar-gradient exceeds c_floor.

    Candidate tau* branches are seeded from the positive-gradient roots on the
    middle action row and continued over the grid; each yields a contiguous
    theta_bar window (possibly wrapping 0) on which the gradient clears
    c_floor for every scanned I.  Among branches whose peak gradient norm stays
    under ``grad_cap`` (which bounds the later jump gaps by grad_cap * eps),
    the one with the largest measured floor c wins.  Requires a10*a01 != 0,
    otherwise no first-order gain exists at the critical phase.
    """
    from .melnikov import tau_star_all

    if params.a10 * params.a01 == 0.0:
        raise StripNotFoundError("a10*a01 = 0: first-order gain vanishes "
                                 "at the critical phase")
    w = params.omega_star
    if I_range is None:
        I_range = (w - 0.15, w + 0.15)
    if not I_range[0] < w < I_range[1]:
        raise StripNotFoundError(f"omega_star={w} outside scan range {I_range}")
    rho = params.rho
    I_nodes = np.linspace(I_range[0], I_range[1], n_I)
    th_nodes = np.linspace(0.0, TWO_PI, n_theta, endpoint=False)
    I_mid = I_nodes[n_I // 2]

    cands = []
    for thb in th_nodes[:: max(1, n_theta // 24)]:
        for root in tau_star_all(I_mid, thb, 0.0, params, rho=rho):
            _, grad, _ = reduced_potential(I_mid, thb, params, rho=rho,
                                           anchor=root.tau)
            if grad[1] > c_floor:
                cands.append((float(thb), float(root.tau), float(grad[1])))
    if not cands:
        raise StripNotFoundError("no positive-gradient critical branch found")
    cands.sort(key=lambda t: -t[2])

    results = []
    seen_windows = set()
    for thb, tau, _ in cands:
        if len(results) >= n_seeds:
            break
        out = _scan_branch(I_nodes, th_nodes, params, rho, (I_mid, thb, tau),
                           c_floor, min_window, edge_margin)
        if out is None:
            continue
        key = (round(out[0][0], 3), round(out[0][1], 3))
        if key in seen_windows:
            continue
        seen_windows.add(key)
        results.append(out)
    if not results:
        raise StripNotFoundError(
            f"no theta_bar window of width >= {min_window} clears c >= {c_floor}")
    capped = [r for r in results if r[2] <= grad_cap]
    window, c, grad_abs_max, T = max(capped or results, key=lambda r: r[1])

    I1, I2 = float(I_nodes[0]), float(I_nodes[-1])
    d_max = max(abs(I1 - w), abs(I2 - w))
    return StripSpec(
        I_range=(I1, I2), theta_bar_range=window, c=c, d_max=d_max,
        k_max=k_max_cap(T0, params.eps) if params.eps > 0 else 0, T0=T0,
        rho_bar=params.rho_bar, grad_abs_max=grad_abs_max,
        I_nodes=I_nodes, theta_nodes=th_nodes, tau_grid=T)


@dataclass
class MacroStep:
    """One scattering jump plus the inner iterates that follow it."""

    jump: ScatteringJump
    k: int
    monitored_before: float
    monitored_after: float
    in_strip: bool

    @property
    def net_gain(self) -> float:
        return self.monitored_after - self.monitored_before


@dataclass
class DiffusionReport:
    I_start: float
    I_end: float
    crossed_omega_star: bool
    segments: int
    jump_gaps: list[float]
    wall_model_time: float
    net_gain_per_step: list[float]
    eps: float
    rho_bar: float
    omega_star: float
    c: float
    k_max: int
    T0: float
    rho_bar_max: float
    rho_bound_satisfied: bool
    monitored: str  # "I" or "K"
    total_inner_iterates: int

    def to_json(self, path) -> None:
        payload = {k: v for k, v in self.__dict__.items()}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _monitored(params: ModelParams, I: float, theta_bar: float) -> float:
    if params.variant is Variant.VANISHING:
        return I
    return float(K(I, theta_bar, params))


def diffuse(params: ModelParams, strip: StripSpec,
            z0: ReducedPoint | None = None, start_below: float = 0.005,
            max_macro_steps: int = 200_000,
            cfg: IntegratorConfig = IntegratorConfig(),
            enforce_net_gain: bool = True,
            stop_after: int | None = None) -> tuple[list[MacroStep], DiffusionReport]:
    """Run the iterated function system from below I1 until I exceeds I2.

    Each macro-step applies the first-order scattering map, then the inner
    time-2*pi map until theta_bar re-enters the strip window (at most k_max
    iterates).  For steps starting inside the strip the net gain in the
    monitored functional must reach c*eps/2; a shortfall raises
    NetGainViolationError (the expected failure mode when rho_bar exceeds its
    bound).
    """
    eps = params.eps
    if eps <= 0.0:
        raise ValueError("diffusion requires eps > 0: the scattering map is "
                         "the identity at eps = 0")
    I1, I2 = strip.I_range
    w = params.omega_star
    rb_max = rho_bar_bound(strip.c, strip.d_max, strip.T0)
    rho_ok = params.rho_bar <= rb_max
    if z0 is None:
        z0 = ReducedPoint(I1 - start_below, strip.window_mid())
    if z0.I >= I1:
        raise ValueError(f"start action {z0.I} must lie below I1={I1}")

    steps: list[MacroStep] = []
    gaps: list[float] = []
    z = z0
    total_k = 0
    required = strip.c * eps / 2.0
    t_travel = jump_travel_time(eps)
    crossed = False
    for n in range(max_macro_steps):
        in_strip = z.I >= I1
        m_before = _monitored(params, z.I, z.theta_bar)
        # anchor from the certified grid, never from the previous step: inner
        # rotation between jumps is O(1) and would let Newton hop branches
        jump = scattering_first_order(z, params,
                                      anchor=strip.tau_anchor(z.I, z.theta_bar))
        gaps.append(float(math.hypot(jump.dI, jump.dTheta)))
        # inner iterates until theta_bar re-enters the window
        I_cur, th_cur = jump.after.I, jump.after.theta_bar
        k = 0
        while True:
            I_cur, th_cur = _inner_iterate(I_cur, th_cur, params, cfg)
            th_cur = float(wrap_angle(th_cur))
            k += 1
            if strip.in_window(th_cur):
                break
            if k >= strip.k_max:
                raise NoReturnToStripError(
                    f"no return to the strip window within k_max={strip.k_max} "
                    f"iterates at macro-step {n}", step=n, point=(I_cur, th_cur))
        total_k += k
        m_after = _monitored(params, I_cur, th_cur)
        step = MacroStep(jump=jump, k=k, monitored_before=m_before,
                         monitored_after=m_after, in_strip=in_strip)
        steps.append(step)
        if w > z.I and I_cur > w:
            crossed = True
        if enforce_net_gain and in_strip and step.net_gain < required:
            raise NetGainViolationError(
                f"net gain {step.net_gain:.3e} < c*eps/2 = {required:.3e} "
                f"at macro-step {n} (I={z.I:.4f})",
                step=n, gain=step.net_gain, required=required)
        z = ReducedPoint(I_cur, th_cur)
        if z.I > I2:
            break
        if stop_after is not None and len(steps) >= stop_after:
            break
    else:
        raise NoReturnToStripError("macro-step budget exhausted before I2",
                                   step=max_macro_steps, point=(z.I, z.theta_bar))

    report = DiffusionReport(
        I_start=z0.I, I_end=z.I, crossed_omega_star=crossed,
        segments=len(steps), jump_gaps=gaps,
        wall_model_time=total_k * TWO_PI + len(steps) * t_travel,
        net_gain_per_step=[s.net_gain for s in steps],
        eps=eps, rho_bar=params.rho_bar, omega_star=w, c=strip.c,
        k_max=strip.k_max,
        T0=strip.T0, rho_bar_max=rb_max, rho_bound_satisfied=rho_ok,
        monitored="I" if params.variant is Variant.VANISHING else "K",
        total_inner_iterates=total_k)
    return steps, report


def _inner_iterate(I, theta, params: ModelParams, cfg: IntegratorConfig):
    return inner_flow_lifted(I, theta, TWO_PI, params, s0=0.0, cfg=cfg)


def jump_travel_time(eps: float) -> float:
    """Model time charged per scattering jump: 2*T_h rounded up to the 2*pi grid.

    Rounding keeps the global identity s = t (mod 2*pi) across jump pauses,
    since s is an exact clock on every flow segment.
    """
    T_h = default_homoclinic_time(eps)
    return TWO_PI * math.ceil(2.0 * T_h / TWO_PI)


def _state_dist(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance of two (p,q,I,theta,s) rows, angles on the circle."""
    d = a - b
    for col in (1, 3, 4):
        d[col] = (d[col] + math.pi) % TWO_PI - math.pi
    return float(np.linalg.norm(d))


class _Emitter:
    """Accumulates trajectory rows, one flow segment at a time."""

    def __init__(self):
        self.times: list[float] = []
        self.rows: list[np.ndarray] = []
        self.seg_ids: list[int] = []
        self.markers: list[JumpMarker] = []
        self.seg = 0

    def add(self, t: float, row: np.ndarray):
        self.times.append(float(t))
        self.rows.append(row)
        self.seg_ids.append(self.seg)

    def break_segment(self):
        if self.rows:
            self.seg += 1

    def mark_jump(self, row: np.ndarray):
        """Record the discontinuity between the last emitted row and ``row``."""
        if self.rows:
            self.markers.append(JumpMarker(index=len(self.rows),
                                           gap=_state_dist(self.rows[-1], row)))

    def trajectory(self) -> Trajectory:
        return Trajectory(np.asarray(self.times), np.vstack(self.rows),
                          np.asarray(self.seg_ids, dtype=int), self.markers)


def _inner_row(z_plus: ReducedPoint, t_local: float, params, cfg) -> np.ndarray:
    I_t, th_t = inner_flow_lifted(z_plus.I, z_plus.theta_bar, t_local, params, cfg=cfg)
    return np.array([0.0, 0.0, I_t, wrap_angle(th_t), wrap_angle(t_local)])


def _prepare_splice(prev_step: MacroStep, step: MacroStep, params: ModelParams,
                    cfg) -> tuple[np.ndarray, np.ndarray, float] | None:
    """Shoot one jump's excursion and vet its junction gaps.

    The excursion will occupy local time [-2*pi, 2*pi] around the section,
    borrowing the last iterate of the previous inner window and the first of
    the next.  Returns (local times, rows, post_gap) or None when the shot
    fails or does not improve on the plain jump marker.
    """
    from .errors import FootpointFitError, ShootingError

    jump = step.jump
    try:
        _, (t_exc, exc) = scattering_shooting(
            ReducedPoint(jump.before.I, jump.before.theta_bar), 0.0, params,
            anchor=jump.tau_star, min_span=TWO_PI + 1.0, return_excursion=True)
    except (ShootingError, FootpointFitError):
        return None
    mask = (np.abs(t_exc) <= TWO_PI)
    if mask.sum() < 8:
        return None
    rows = exc[mask].copy()
    t_loc = t_exc[mask]
    rows[:, 3] = wrap_angle(rows[:, 3])
    rows[:, 4] = wrap_angle(t_loc)
    marker_gap = math.hypot(jump.dI, jump.dTheta)
    prev_end = _inner_row(prev_step.jump.after, (prev_step.k - 1) * TWO_PI,
                          params, cfg)
    pre_gap = _state_dist(prev_end, rows[0])
    post_gap = _state_dist(rows[-1], _inner_row(jump.after, TWO_PI, params, cfg))
    if max(pre_gap, post_gap) >= marker_gap:
        return None
    return t_loc, rows, post_gap


def assemble_pseudo_orbit(steps: list[MacroStep], params: ModelParams,
                          samples_per_iterate: int = 1,
                          splice: bool = False, max_splices: int | None = None,
                          cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Realize the IFS orbit as flow segments with recorded jump gaps.

    Default mode: every inner window becomes a true flow segment on the
    invariant plane, and each scattering jump becomes a marker whose gap is
    the jump size; the clock pauses one excursion travel time (a 2*pi multiple
    near 2*T_h) across each jump.

    With ``splice`` on, eligible jumps are replaced by their actual homoclinic
    excursion (from the shooting solve), which borrows one inner iterate on
    each side of the section; the two junction gaps then sit at the
    fiber-contraction scale instead of the O(eps) jump size.  A shot that
    fails or does not improve on the marker gap falls back to marker-only.
    """
    t_travel = jump_travel_time(params.eps)
    m = len(steps)
    # vet splices up front so a rejected one cleanly falls back to marker-only
    splices: dict[int, tuple[np.ndarray, np.ndarray, float]] = {}
    if splice:
        budget = max_splices if max_splices is not None else m
        for i in range(1, m):
            if budget <= 0:
                break
            room_prev = steps[i - 1].k - (1 if (i - 1) in splices else 0)
            if room_prev < 1 or steps[i].k < 1:
                continue
            prep = _prepare_splice(steps[i - 1], steps[i], params, cfg)
            if prep is not None:
                splices[i] = prep
                budget -= 1

    dt = TWO_PI / samples_per_iterate
    em = _Emitter()
    cursor = 0.0
    if m:
        z0 = steps[0].jump.before
        em.add(0.0, np.array([0.0, 0.0, z0.I, wrap_angle(z0.theta_bar), 0.0]))
    for i, step in enumerate(steps):
        z_plus = step.jump.after
        if i in splices:
            t_loc, rows, post_gap = splices[i]
            em.mark_jump(rows[0])
            em.break_segment()
            for tl, row in zip(t_loc, rows):  # local -2*pi maps to the cursor
                em.add(cursor + (tl + TWO_PI), row)
            em.break_segment()
            em.markers.append(JumpMarker(index=len(em.rows), gap=post_gap))
            cursor += 2.0 * TWO_PI
            a_lo = 1  # first iterate consumed by the excursion's forward tail
        else:
            first = _inner_row(z_plus, 0.0, params, cfg)
            em.mark_jump(first)
            em.break_segment()
            cursor += t_travel
            em.add(cursor, first)
            a_lo = 0
        b_hi = step.k - (1 if (i + 1) in splices else 0)
        t_grid = np.arange(a_lo * samples_per_iterate + 1,
                           b_hi * samples_per_iterate + 1) * dt
        for tl in t_grid:
            em.add(cursor + (tl - a_lo * TWO_PI), _inner_row(z_plus, tl, params, cfg))
        cursor = cursor + (b_hi - a_lo) * TWO_PI
    return em.trajectory()

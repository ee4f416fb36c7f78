"""Adaptive integration of the extended flow, the time-2*pi map, and FD Jacobians.

Integration is delegated to scipy's Dormand-Prince 5(4) embedded pair
(``solve_ivp`` method ``RK45``), which provides the required tolerance-controlled
stepping and dense output.  The time angle s is an exact clock (ds/dt = 1), so
the stroboscopic return to the section s = 0 is realized by integrating exactly
delta_t = 2*pi; no event detection is needed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationError
from .model import ExtendedState, ModelParams, State, vector_field_array, wrap_angle


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    dense_output: bool = False

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class JumpMarker:
    """Index of a pseudo-orbit discontinuity and the recorded gap size."""

    index: int
    gap: float


@dataclass
class Trajectory:
    """Sampled orbit segments with optional jump markers.

    ``states`` has one row (p, q, I, theta, s) per sample; angles are stored
    reduced mod 2*pi.  ``segment_ids`` labels contiguous true-flow segments;
    times are strictly increasing within a segment.  A jump marker at index i
    records the gap between rows i-1 and i (the last point of one segment and
    the first of the next).
    """

    times: np.ndarray
    states: np.ndarray
    segment_ids: np.ndarray = None
    jump_markers: list[JumpMarker] = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.segment_ids is None:
            self.segment_ids = np.zeros(len(self.times), dtype=int)
        self.segment_ids = np.asarray(self.segment_ids, dtype=int)
        if self.states.shape != (len(self.times), 5):
            raise ValueError("states must have shape (len(times), 5)")

    def __len__(self):
        return len(self.times)

    def state_at(self, i: int) -> ExtendedState:
        return ExtendedState.from_array(self.states[i])

    @property
    def n_segments(self) -> int:
        return len(np.unique(self.segment_ids))

    def reduced(self) -> "Trajectory":
        """Copy with the three angle columns wrapped to [0, 2*pi)."""
        st = self.states.copy()
        for col in (1, 3, 4):
            st[:, col] = wrap_angle(st[:, col])
        return Trajectory(self.times.copy(), st, self.segment_ids.copy(),
                          list(self.jump_markers))

    def to_csv(self, path) -> None:
        """Write the orbit as CSV with header t,p,q,I,theta,s,segment_id."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "p", "q", "I", "theta", "s", "segment_id"])
            for t, row, seg in zip(self.times, self.states, self.segment_ids):
                w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row] + [int(seg)])

    def jumps_to_csv(self, path) -> None:
        """Write jump markers as CSV with header index,gap."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "gap"])
            for m in self.jump_markers:
                w.writerow([m.index, f"{m.gap:.17g}"])


def _solve(y0: np.ndarray, t_span, params: ModelParams, cfg: IntegratorConfig,
           t_eval=None):
    sol = solve_ivp(
        lambda t, y: vector_field_array(y, params),
        t_span,
        y0,
        method="RK45",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=cfg.dense_output or t_eval is not None,
        t_eval=t_eval,
    )
    if not sol.success:
        last_t = sol.t[-1] if len(sol.t) else t_span[0]
        last_y = sol.y[:, -1] if sol.y.size else y0
        raise IntegrationError(f"integration failed: {sol.message}",
                               last_t=last_t, last_state=last_y)
    return sol


def integrate(z0: ExtendedState, t_span, params: ModelParams,
              cfg: IntegratorConfig = IntegratorConfig(), t_eval=None) -> Trajectory:
    """Integrate the extended system over t_span, sampling at solver steps.

    Angles in the returned Trajectory are reduced mod 2*pi; integration itself
    runs on the continuous lift.
    """
    sol = _solve(z0.as_array(), t_span, params, cfg, t_eval=t_eval)
    states = sol.y.T.copy()
    for col in (1, 3, 4):
        states[:, col] = wrap_angle(states[:, col])
    return Trajectory(sol.t.copy(), states)


def integrate_raw(y0: np.ndarray, t_span, params: ModelParams,
                  cfg: IntegratorConfig = IntegratorConfig(), t_eval=None):
    """Integrate and return (times, unreduced 5-column states)."""
    sol = _solve(np.asarray(y0, dtype=float), t_span, params, cfg, t_eval=t_eval)
    return sol.t.copy(), sol.y.T.copy()


def flow(z0: ExtendedState, t: float, params: ModelParams,
         cfg: IntegratorConfig = IntegratorConfig()) -> ExtendedState:
    """Time-t image of z0 under the extended flow."""
    sol = _solve(z0.as_array(), (0.0, t), params, cfg)
    return ExtendedState.from_array(sol.y[:, -1])


def stroboscopic_map(z: State, s0: float, params: ModelParams,
                     cfg: IntegratorConfig = IntegratorConfig()) -> State:
    """Time-2*pi map of the extended flow started on the section s = s0."""
    y0 = np.append(z.as_array(), s0)
    sol = _solve(y0, (0.0, 2.0 * np.pi), params, cfg)
    return State.from_array(sol.y[:4, -1])


def jacobian_fd(map_fn, z: np.ndarray, h: float = 1e-6,
                wrap_outputs: tuple[int, ...] = ()) -> np.ndarray:
    """Central-difference Jacobian of a map R^n -> R^n.

    ``wrap_outputs`` lists output components that live on the circle; their
    differences are wrapped to (-pi, pi] before dividing, so maps returning
    reduced angles differentiate cleanly across the 0/2*pi seam.
    """
    z = np.asarray(z, dtype=float)
    n = len(z)
    fp = []
    fm = []
    for i in range(n):
        dz = np.zeros(n)
        dz[i] = h
        fp.append(np.asarray(map_fn(z + dz), dtype=float))
        fm.append(np.asarray(map_fn(z - dz), dtype=float))
    J = np.empty((n, n))
    two_pi = 2.0 * np.pi
    for i in range(n):
        diff = fp[i] - fm[i]
        for k in wrap_outputs:
            diff[k] = np.mod(diff[k] + np.pi, two_pi) - np.pi
        J[:, i] = diff / (2.0 * h)
    return J

"""Conservative and dissipative standard maps: iteration, rotation numbers, basins.

The dissipative map
    I' = (1 - lam) I + mu + eps sin(theta),   theta' = theta + I'
contracts area by the constant factor 1 - lam and keeps the twist
d theta'/d I = 1 - lam > 0.  At eps = 0 its unique rotational invariant circle
sits at I = mu / lam, carrying a rigid rotation of frequency omega_star = mu / lam;
lam = 0 recovers the conservative kicked rotator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class StdMapParams:
    eps: float = 0.0
    lam: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must be in [0, 1), got {self.lam}")

    @staticmethod
    def from_omega_star(eps: float, lam: float, omega_star: float) -> "StdMapParams":
        """Parametrize the drift as mu = lam * omega_star."""
        return StdMapParams(eps=eps, lam=lam, mu=lam * omega_star)

    @property
    def omega_star(self) -> float:
        if self.lam == 0.0:
            raise ValueError("omega_star undefined at lam = 0")
        return self.mu / self.lam


def std_map(I, theta, params: StdMapParams):
    """One iterate; theta' reduced mod 2*pi.  Accepts scalars or arrays."""
    I1 = (1.0 - params.lam) * np.asarray(I) + params.mu \
        + params.eps * np.sin(theta)
    return I1, np.mod(np.asarray(theta) + I1, TWO_PI)


def std_map_lifted(I, theta, params: StdMapParams):
    """One iterate on the lift (theta not reduced), for rotation numbers."""
    I1 = (1.0 - params.lam) * np.asarray(I) + params.mu \
        + params.eps * np.sin(theta)
    return I1, np.asarray(theta) + I1


def orbit(I0: float, theta0: float, params: StdMapParams, n_iter: int):
    """Iterate n_iter times; returns arrays (I_k, theta_k) with theta reduced."""
    Is = np.empty(n_iter + 1)
    ths = np.empty(n_iter + 1)
    Is[0], ths[0] = I0, theta0 % TWO_PI
    I, th = I0, theta0
    for k in range(1, n_iter + 1):
        I, th = std_map(I, th, params)
        Is[k], ths[k] = I, th
    return Is, ths


def rotation_number(I0, theta0, params: StdMapParams, n_iter: int = 10_000):
    """Birkhoff average of the lifted angle increment, transient discarded.

    The first half of the iterates is dropped (attractor convergence goes like
    (1 - lam)^k), then omega = (theta_lift(n) - theta_lift(n/2)) / (n/2).
    Vectorized over arrays of initial conditions.
    """
    if n_iter < 1000:
        raise ValueError("n_iter must be at least 1000")
    I = np.asarray(I0, dtype=float).copy()
    th = np.asarray(theta0, dtype=float).copy()
    half = n_iter // 2
    for _ in range(half):
        I, th = std_map_lifted(I, th, params)
    th_ref = th.copy()
    for _ in range(n_iter - half):
        I, th = std_map_lifted(I, th, params)
    return (th - th_ref) / (n_iter - half)


def basin_scan(I_values, theta_values, params: StdMapParams,
               n_iter: int = 4000):
    """Raster of rotation numbers over a grid of initial conditions.

    Returns an array of shape (len(I_values), len(theta_values)).
    """
    II, TT = np.meshgrid(np.asarray(I_values, dtype=float),
                         np.asarray(theta_values, dtype=float), indexing="ij")
    return rotation_number(II, TT, params, n_iter=n_iter)


def orbit_to_csv(path, I0: float, theta0: float, params: StdMapParams,
                 n_iter: int) -> None:
    Is, ths = orbit(I0, theta0, params, n_iter)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "I", "theta"])
        for k, (I, th) in enumerate(zip(Is, ths)):
            w.writerow([k, f"{I:.17g}", f"{th:.17g}"])


def basin_to_csv(path, I_values, theta_values, params: StdMapParams,
                 n_iter: int = 4000) -> None:
    R = basin_scan(I_values, theta_values, params, n_iter=n_iter)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["I0", "theta0", "rotation_number"])
        for i, I in enumerate(I_values):
            for j, th in enumerate(theta_values):
                w.writerow([f"{I:.17g}", f"{th:.17g}", f"{R[i, j]:.17g}"])

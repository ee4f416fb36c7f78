"""Model definitions: parameters, phase-space types, energies, vector field.

The system is a pendulum (p, q) coupled to a rotator (I, theta) by a small
time-periodic potential eps * f(q) * g(theta, t), with a linear dissipation
(-lam*p, 0, -lam*(I - omega_star), 0) added to the Hamiltonian vector field.
Two couplings are supported:

* ``Variant.VANISHING``:     f(q) = cos(q) - 1   (zero at the saddle)
* ``Variant.NON_VANISHING``: f(q) = cos(q)

with g(theta, t) = a00 + a10*cos(theta) + a01*cos(t) in both cases.

The dissipation coefficient is always derived as lam = eps * rho_bar / log(1/eps);
it is never an independent knob (the dissipative standard map in ``stdmap``
has its own, unrelated parameter set).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_angle(x):
    """Reduce an angle (scalar or array) to [0, 2*pi)."""
    w = np.mod(x, TWO_PI)
    # mod of a tiny negative rounds to the period itself; keep the range open
    return np.where(w >= TWO_PI, 0.0, w)


def angle_dist(a, b):
    """Shortest distance between two angles on the circle, in [0, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi
    return np.abs(d)


def wrap_diff(a, b):
    """Signed angular difference a - b wrapped to (-pi, pi]."""
    return -(np.mod(b - a + math.pi, TWO_PI) - math.pi)


class Variant(enum.Enum):
    """Coupling variant: whether f(q) vanishes at the pendulum saddle."""

    VANISHING = "vanishing"
    NON_VANISHING = "non_vanishing"


@dataclass(frozen=True)
class ModelParams:
    """Physical and perturbation parameters.

    ``rho`` and ``lam`` are derived quantities: rho = rho_bar / log(1/eps)
    and lam = eps * rho.  At eps = 0 the formula is singular and the limit
    lam = 0 is used, which recovers the unperturbed system.
    """

    eps: float = 0.0
    rho_bar: float = 0.0
    omega_star: float = 1.0
    a00: float = 0.0
    a10: float = 1.0
    a01: float = 1.0
    variant: Variant = Variant.VANISHING

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"eps must be in [0, 1), got {self.eps}")
        if self.rho_bar < 0.0:
            raise ValueError(f"rho_bar must be >= 0, got {self.rho_bar}")
        if self.omega_star <= 0.0:
            raise ValueError(f"omega_star must be > 0, got {self.omega_star}")
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def rho(self) -> float:
        if self.eps == 0.0:
            return 0.0
        return self.rho_bar / math.log(1.0 / self.eps)

    @property
    def lam(self) -> float:
        return self.eps * self.rho

    def f(self, q):
        """Pendulum factor of the coupling."""
        if self.variant is Variant.VANISHING:
            return np.cos(q) - 1.0
        return np.cos(q)

    def f_prime(self, q):
        """d f / d q; equal to -sin(q) for both variants."""
        return -np.sin(q)

    def g(self, theta, t):
        """Rotator/time factor of the coupling."""
        return self.a00 + self.a10 * np.cos(theta) + self.a01 * np.cos(t)

    def g_dtheta(self, theta, t):
        """d g / d theta."""
        return -self.a10 * np.sin(theta)

    def replace(self, **kw) -> "ModelParams":
        from dataclasses import replace as _replace

        return _replace(self, **kw)


@dataclass(frozen=True)
class State:
    """A point (p, q, I, theta) of phase space; q and theta stored mod 2*pi."""

    p: float
    q: float
    I: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "q", float(wrap_angle(self.q)))
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q, self.I, self.theta], dtype=float)

    @staticmethod
    def from_array(y) -> "State":
        p, q, I, theta = (float(v) for v in y)
        return State(p, q, I, theta)


@dataclass(frozen=True)
class ExtendedState:
    """A point of the extended phase space, with the time angle s mod 2*pi."""

    state: State
    s: float

    def __post_init__(self):
        object.__setattr__(self, "s", float(wrap_angle(self.s)))

    def as_array(self) -> np.ndarray:
        return np.append(self.state.as_array(), self.s)

    @staticmethod
    def from_array(y) -> "ExtendedState":
        return ExtendedState(State.from_array(y[:4]), float(y[4]))

    @staticmethod
    def make(p, q, I, theta, s) -> "ExtendedState":
        return ExtendedState(State(p, q, I, theta), s)


def vector_field_array(y: np.ndarray, params: ModelParams) -> np.ndarray:
    """Right-hand side of the extended system on a raw 5-vector (p,q,I,theta,s).

    Angles are not reduced here so the field can be fed to an integrator
    working on a continuous lift.
    """
    p, q, I, theta, s = y
    lam = params.lam
    eps = params.eps
    dp = math.sin(q) - eps * params.f_prime(q) * params.g(theta, s) - lam * p
    dq = p
    dI = -lam * (I - params.omega_star) - eps * params.f(q) * params.g_dtheta(theta, s)
    dtheta = I
    return np.array([dp, dq, dI, dtheta, 1.0])


def vector_field(z: ExtendedState, params: ModelParams) -> np.ndarray:
    """Time derivative of an ExtendedState, as a 5-vector (dp,dq,dI,dtheta,ds)."""
    return vector_field_array(z.as_array(), params)


def h0(I):
    """Rotator energy I^2/2."""
    return 0.5 * np.asarray(I) ** 2


def h1(p, q):
    """Pendulum energy p^2/2 + cos(q) - 1; zero on the separatrix."""
    return 0.5 * np.asarray(p) ** 2 + (np.cos(q) - 1.0)


def K(I, theta, params: ModelParams):
    """Energy of the reduced rotator system: I^2/2 + eps*a10*(cos(theta) - 1).

    Conserved by the dissipation-free reduced dynamics of the non-vanishing
    coupling; used as the monitored functional in that case.
    """
    return 0.5 * np.asarray(I) ** 2 + params.eps * params.a10 * (np.cos(theta) - 1.0)


def omega(I):
    """Rotator frequency d h0 / d I = I."""
    return np.asarray(I)


def separatrix(t):
    """Upper separatrix of the pendulum: (p0, q0) = (2/cosh t, 4*arctan e^t).

    Satisfies h1(p0(t), q0(t)) = 0 identically and q0 is NOT reduced mod 2*pi
    (it runs from 0 to 2*pi as t goes from -inf to +inf).
    """
    t = np.asarray(t, dtype=float)
    p0 = 2.0 / np.cosh(t)
    q0 = 4.0 * np.arctan(np.exp(t))
    return p0, q0


def separatrix_p2(t):
    """p0(t)^2 = 4 / cosh(t)^2, the squared separatrix momentum."""
    return 4.0 / np.cosh(np.asarray(t, dtype=float)) ** 2


# A more general dissipation (-lam1*p, 0, -lam2*(I - omega_star), 0) with
# independent lam1, lam2 would slot in here by splitting params.lam in
# vector_field_array; only the equal-coefficient case is implemented.

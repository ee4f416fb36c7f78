"""Exception types raised by the numerical routines."""

from __future__ import annotations


class RotpendError(Exception):
    """Base class for all package-specific failures."""


class IntegrationError(RotpendError):
    """ODE integration failed (e.g. step-size underflow).

    Carries the last accepted time and state so callers can inspect how far
    the integration got.
    """

    def __init__(self, message: str, last_t: float | None = None, last_state=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_state = last_state


class WrongVariantError(RotpendError):
    """An operation only defined for one coupling variant got the other."""


class NoRootError(RotpendError):
    """No critical phase found on the scan interval."""


class DegenerateRootError(RotpendError):
    """All critical phases found are degenerate (|second derivative| below cutoff)."""


class ShootingError(RotpendError):
    """Homoclinic shooting solve diverged or left the separatrix channel."""


class FootpointFitError(RotpendError):
    """Tail-to-inner-orbit fit residual exceeded its tolerance."""

    def __init__(self, message: str, residual: float | None = None, tol: float | None = None):
        super().__init__(message)
        self.residual = residual
        self.tol = tol


class StripNotFoundError(RotpendError):
    """Grid scan found no rectangle with a positive gradient floor."""


class NoReturnToStripError(RotpendError):
    """An inner orbit failed to re-enter the strip within the iterate cap."""

    def __init__(self, message: str, step: int | None = None, point=None):
        super().__init__(message)
        self.step = step
        self.point = point


class NetGainViolationError(RotpendError):
    """A macro-step's net gain fell below the guaranteed floor."""

    def __init__(self, message: str, step: int | None = None, gain: float | None = None,
                 required: float | None = None):
        super().__init__(message)
        self.step = step
        self.gain = gain
        self.required = required


class ConfigError(RotpendError):
    """Experiment configuration could not be parsed or validated."""

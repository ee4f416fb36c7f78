"""rotpend: a numerical laboratory for action transport in a dissipative
rotator-pendulum system.

The package covers the full chain from the flow to diffusing pseudo-orbits:
``model`` (parameters, energies, vector field, separatrix), ``integrate``
(adaptive integration, the time-2*pi section map, finite-difference
Jacobians), ``inner`` (dynamics on the invariant plane and its attractor),
``melnikov`` (splitting potential, critical phase, reduced potential),
``scattering`` (first-order and shooting scattering maps), ``diffusion``
(strip construction and the inner/outer iterated function system), and
``stdmap`` (conservative/dissipative standard maps).
"""

from .model import ExtendedState, ModelParams, State, Variant

__all__ = ["ModelParams", "State", "ExtendedState", "Variant"]
__version__ = "0.1.0"

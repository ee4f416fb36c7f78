"""Figure rendering for rotpend CSV/JSON artifacts.

Consumes only the documented file contracts of the rotpend package (orbit,
jumps, inner-orbit, standard-map, Melnikov-grid, basin CSVs and the scalar
JSON reports); never imports it.
"""

from .render import KINDS, render
from .specs import PlotSpec, PlotSpecError, load_spec

__all__ = ["render", "load_spec", "PlotSpec", "PlotSpecError", "KINDS"]
__version__ = "0.1.0"

"""Plot specifications: what to read, how to draw it, where to write it.

A spec is a YAML mapping with
    kind:    one of the renderer names in render.KINDS
    inputs:  mapping of role -> CSV/JSON path (which roles depends on kind)
    output:  image path (extension picks the format)
    axes:    optional {xlim: [lo, hi], ylim: [lo, hi], title: str}
    params:  optional kind-specific scalars (e.g. omega_star for the rule)

Relative input/output paths are resolved against the current working
directory, matching how the generating configurations write their artifacts.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import yaml


class PlotSpecError(Exception):
    """Spec file invalid, an input missing, or a required column absent."""


@dataclass
class PlotSpec:
    kind: str
    inputs: dict[str, Path]
    output: Path
    axes: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


_ALLOWED_KEYS = {"kind", "inputs", "output", "axes", "params"}


def load_spec(path) -> PlotSpec:
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except FileNotFoundError:
        raise PlotSpecError(f"spec file not found: {path}")
    except yaml.YAMLError as e:
        raise PlotSpecError(f"cannot parse {path}: {e}")
    if not isinstance(raw, dict):
        raise PlotSpecError("spec must be a mapping")
    unknown = set(raw) - _ALLOWED_KEYS
    if unknown:
        raise PlotSpecError(f"unknown spec keys: {sorted(unknown)}")
    for key in ("kind", "inputs", "output"):
        if key not in raw:
            raise PlotSpecError(f"spec is missing the {key!r} key")
    inputs = {role: Path(p) for role, p in raw["inputs"].items()}
    return PlotSpec(kind=str(raw["kind"]), inputs=inputs,
                    output=Path(raw["output"]), axes=raw.get("axes") or {},
                    params=raw.get("params") or {})


def read_csv(path: Path, required: tuple[str, ...]) -> dict:
    """Read a CSV into float column arrays, checking the declared header."""
    import numpy as np

    if not path.exists():
        raise PlotSpecError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row for row in reader if row]
    for col in required:
        if col not in header:
            raise PlotSpecError(f"missing column {col!r} in {path}")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, j] for j, name in enumerate(header)}

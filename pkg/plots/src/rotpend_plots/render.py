"""Renderers: one figure per spec, reading only the documented CSV columns.

Rendering is read-only and deterministic: fixed figure geometry, no
timestamps, inputs never modified.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .specs import PlotSpec, PlotSpecError, read_csv

_FIGSIZE = (6.4, 4.8)
_DPI = 130


def _new_axes(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    if "xlim" in spec.axes:
        ax.set_xlim(*spec.axes["xlim"])
    if "ylim" in spec.axes:
        ax.set_ylim(*spec.axes["ylim"])
    if "title" in spec.axes:
        ax.set_title(spec.axes["title"])
    return fig, ax


def _finish(fig, ax, spec: PlotSpec):
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, metadata=_png_metadata(out))
    plt.close(fig)
    return out


def _png_metadata(out: Path):
    # strip the version-dependent Software chunk so reruns are byte-identical
    return {"Software": "rotpend-plots"} if out.suffix == ".png" else None


def _render_stdmap_portrait(spec: PlotSpec):
    cols = read_csv(spec.inputs["orbit"], ("k", "I", "theta"))
    fig, ax = _new_axes(spec)
    ax.plot(cols["theta"], cols["I"], ",", color="black")
    ax.set_xlabel("theta")
    ax.set_ylabel("I")
    return _finish(fig, ax, spec)


def _render_basin(spec: PlotSpec):
    cols = read_csv(spec.inputs["raster"], ("I0", "theta0", "rotation_number"))
    I = np.unique(cols["I0"])
    th = np.unique(cols["theta0"])
    R = cols["rotation_number"].reshape(len(I), len(th))
    fig, ax = _new_axes(spec)
    mesh = ax.pcolormesh(th, I, R, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="rotation number")
    ax.set_xlabel("theta0")
    ax.set_ylabel("I0")
    return _finish(fig, ax, spec)


def _render_pendulum_portrait(spec: PlotSpec):
    cols = read_csv(spec.inputs["orbit"], ("t", "p", "q"))
    fig, ax = _new_axes(spec)
    ax.plot(cols["q"], cols["p"], lw=0.4, color="tab:blue")
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    return _finish(fig, ax, spec)


def _render_orbit_panels(spec: PlotSpec):
    cols = read_csv(spec.inputs["orbit"], ("t", "p", "q", "I", "theta"))
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.2), dpi=_DPI)
    axes[0].plot(cols["q"], cols["p"], lw=0.4, color="tab:blue")
    axes[0].set_xlabel("q")
    axes[0].set_ylabel("p")
    axes[0].set_title("pendulum projection")
    axes[1].plot(cols["theta"], cols["I"], ".", ms=1.2, color="tab:red")
    axes[1].set_xlabel("theta")
    axes[1].set_ylabel("I")
    axes[1].set_title("rotator projection")
    if "title" in spec.axes:
        fig.suptitle(spec.axes["title"])
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, metadata=_png_metadata(out))
    plt.close(fig)
    return out


def _render_attractor(spec: PlotSpec):
    cols = read_csv(spec.inputs["orbit"], ("k", "I", "theta"))
    fig, ax = _new_axes(spec)
    ax.plot(cols["theta"], cols["I"], "o", ms=2.5, color="tab:blue",
            label="inner orbit")
    w = spec.params.get("omega_star")
    if w is not None:
        ax.axhline(float(w), color="tab:red", lw=1.2,
                   label="attracting circle")
        ax.legend(loc="upper right")
    ax.set_xlabel("theta")
    ax.set_ylabel("I")
    return _finish(fig, ax, spec)


def _render_potential_levels(spec: PlotSpec):
    cols = read_csv(spec.inputs["grid"],
                    ("I", "theta_bar", "L_star", "dL_dtheta"))
    I = np.unique(cols["I"])
    th = np.unique(cols["theta_bar"])
    Z = cols["L_star"].reshape(len(I), len(th))
    fig, ax = _new_axes(spec)
    cf = ax.contourf(th, I, Z, levels=24, cmap="RdBu_r")
    ax.contour(th, I, Z, levels=24, colors="k", linewidths=0.3)
    fig.colorbar(cf, ax=ax, label="reduced potential")
    ax.set_xlabel("theta_bar")
    ax.set_ylabel("I")
    return _finish(fig, ax, spec)


def _render_diffusion_trace(spec: PlotSpec):
    cols = read_csv(spec.inputs["orbit"], ("t", "I"))
    fig, ax = _new_axes(spec)
    ax.plot(cols["t"], cols["I"], lw=0.8, color="tab:blue", label="action I(t)")
    w = spec.params.get("omega_star")
    if w is None and "report" in spec.inputs:
        report_path = Path(spec.inputs["report"])
        if not report_path.exists():
            raise PlotSpecError(f"input file not found: {report_path}")
        w = json.loads(report_path.read_text()).get("omega_star")
    if w is not None:
        ax.axhline(float(w), color="tab:red", lw=1.2, ls="--",
                   label="omega_star")
    if "jumps" in spec.inputs:
        jumps = read_csv(spec.inputs["jumps"], ("index", "gap"))
        idx = jumps["index"].astype(int)
        idx = idx[(idx >= 0) & (idx < len(cols["t"]))]
        ax.plot(cols["t"][idx], cols["I"][idx], ".", ms=2.0,
                color="tab:orange", label="scattering jumps")
    ax.set_xlabel("t")
    ax.set_ylabel("I")
    ax.legend(loc="lower right")
    return _finish(fig, ax, spec)


KINDS = {
    "stdmap_portrait": _render_stdmap_portrait,
    "basin": _render_basin,
    "pendulum_portrait": _render_pendulum_portrait,
    "orbit_panels": _render_orbit_panels,
    "attractor": _render_attractor,
    "potential_levels": _render_potential_levels,
    "diffusion_trace": _render_diffusion_trace,
}


def render(spec: PlotSpec) -> Path:
    """Render one spec to its output image; returns the written path."""
    try:
        fn = KINDS[spec.kind]
    except KeyError:
        raise PlotSpecError(
            f"unknown plot kind {spec.kind!r}; expected one of {sorted(KINDS)}")
    return fn(spec)

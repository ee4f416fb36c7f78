"""Experiment runner: every module behind a subcommand with YAML configuration.

Usage:  rotpend <subcommand> <config.yaml> [--outdir DIR]

Subcommands: simulate, inner, melnikov-grid, scattering-sweep, diffuse,
stdmap, basin.  Each run writes its artifacts plus a ``config.resolved`` echo
of the fully-resolved configuration into the output directory.  Exit codes:
0 success, 2 configuration error, 3 numerical failure (the failing operation
is named on stderr).  The output directory may be overridden by the
ROTPEND_OUTDIR environment variable; nothing else reads the environment.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import diffusion, inner, melnikov, scattering, stdmap
from .errors import ConfigError, RotpendError
from .integrate import IntegratorConfig, integrate
from .melnikov import QuadratureConfig
from .model import ExtendedState, ModelParams

_MODEL_KEYS = {"eps", "rho_bar", "omega_star", "a00", "a10", "a01", "variant"}
_INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "max_step", "dense_output"}
_QUADRATURE_KEYS = {"t_cut", "scheme", "tol"}

_SCHEMAS = {
    "simulate": {"model": _MODEL_KEYS, "integrator": _INTEGRATOR_KEYS,
                 "output_dir": None,
                 "simulate": {"z0", "s0", "t_span", "n_samples"}},
    "inner": {"model": _MODEL_KEYS, "integrator": _INTEGRATOR_KEYS,
              "output_dir": None,
              "inner": {"I0", "theta0", "k_max", "transient"}},
    "melnikov-grid": {"model": _MODEL_KEYS, "quadrature": _QUADRATURE_KEYS,
                      "output_dir": None,
                      "grid": {"I_range", "n_I", "theta_bar_range", "n_theta"}},
    "scattering-sweep": {"model": _MODEL_KEYS, "output_dir": None,
                         "sweep": {"eps_values", "points"}},
    "diffuse": {"model": _MODEL_KEYS, "output_dir": None,
                "diffuse": {"I_range", "T0", "rho_bar_factor", "start_below",
                            "max_macro_steps", "samples_per_iterate",
                            "splice", "max_splices"}},
    "stdmap": {"output_dir": None,
               "stdmap": {"eps", "lam", "mu", "omega_star", "I0", "theta0",
                          "n_iter"}},
    "basin": {"output_dir": None,
              "basin": {"eps", "lam", "mu", "omega_star", "I_range", "n_I",
                        "theta_range", "n_theta", "n_iter"}},
}


def _check_keys(cfg: dict, schema: dict, path: str = "") -> None:
    for key, val in cfg.items():
        if key not in schema:
            raise ConfigError(f"unknown configuration key {path + key!r}")
        sub = schema[key]
        if isinstance(sub, (set, dict)):
            if not isinstance(val, dict):
                raise ConfigError(f"section {path + key!r} must be a mapping")
            allowed = sub if isinstance(sub, dict) else {k: None for k in sub}
            _check_keys(val, allowed, path + key + ".")


def load_config(path, subcommand: str) -> dict:
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a mapping")
    _check_keys(cfg, _SCHEMAS[subcommand])
    return cfg


def _model(cfg: dict) -> ModelParams:
    return ModelParams(**cfg.get("model", {}))


def _integrator(cfg: dict) -> IntegratorConfig:
    sec = dict(cfg.get("integrator", {}))
    if "max_step" in sec and sec["max_step"] in ("inf", None):
        sec["max_step"] = math.inf
    return IntegratorConfig(**sec)


def _quadrature(cfg: dict) -> QuadratureConfig:
    return QuadratureConfig(**cfg.get("quadrature", {}))


def _resolve_outdir(cfg: dict, cli_outdir) -> Path:
    out = os.environ.get("ROTPEND_OUTDIR") or cli_outdir or cfg.get("output_dir", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo_config(cfg: dict, outdir: Path, subcommand: str) -> None:
    resolved = {"subcommand": subcommand, "config": cfg}
    with open(outdir / "config.resolved", "w") as fh:
        yaml.safe_dump(resolved, fh, sort_keys=True, default_flow_style=False)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------------------
# subcommand runners


def _run_simulate(cfg, outdir):
    params = _model(cfg)
    icfg = _integrator(cfg)
    sec = cfg["simulate"]
    p, q, I, theta = (float(v) for v in sec["z0"])
    z0 = ExtendedState.make(p, q, I, theta, float(sec.get("s0", 0.0)))
    t0, t1 = (float(v) for v in sec["t_span"])
    t_eval = None
    if "n_samples" in sec:
        t_eval = np.linspace(t0, t1, int(sec["n_samples"]))
    traj = integrate(z0, (t0, t1), params, icfg, t_eval=t_eval)
    traj.to_csv(outdir / "orbit.csv")
    traj.jumps_to_csv(outdir / "jumps.csv")


def _run_inner(cfg, outdir):
    params = _model(cfg)
    icfg = _integrator(cfg)
    sec = cfg["inner"]
    z0 = inner.InnerPoint(float(sec["I0"]), float(sec["theta0"]))
    k_max = int(sec.get("k_max", 2000))
    inner.orbit_to_csv(outdir / "inner_orbit.csv", z0, k_max, params, icfg)
    fit = inner.attractor_fit(z0, k_max, params,
                              transient=int(sec.get("transient", 10)), cfg=icfg)
    with open(outdir / "attractor_fit.json", "w") as fh:
        json.dump({"rate": fit.decay_rate, "predicted": fit.predicted_rate,
                   "residual": fit.residual, "degenerate": fit.degenerate},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_melnikov_grid(cfg, outdir):
    params = _model(cfg)
    sec = cfg["grid"]
    I_lo, I_hi = (float(v) for v in sec["I_range"])
    th_lo, th_hi = (float(v) for v in sec.get("theta_bar_range", (0.0, 2 * math.pi)))
    I_values = np.linspace(I_lo, I_hi, int(sec.get("n_I", 20)))
    th_values = np.linspace(th_lo, th_hi, int(sec.get("n_theta", 40)),
                            endpoint=False)
    rows = melnikov.melnikov_grid(I_values, th_values, params)
    _write_csv(outdir / "melnikov_grid.csv",
               ["I", "theta_bar", "L_star", "dL_dI", "dL_dtheta", "tau_star",
                "nondeg"],
               [[r["I"], r["theta_bar"], r["L_star"], r["dL_dI"],
                 r["dL_dtheta"], r["tau_star"], r["nondeg"]] for r in rows])


def _run_scattering_sweep(cfg, outdir):
    params = _model(cfg)
    sec = cfg["sweep"]
    eps_values = [float(v) for v in sec["eps_values"]]
    points = [tuple(float(v) for v in pt) for pt in sec["points"]]
    rows = scattering.sweep(points, eps_values, params)
    _write_csv(outdir / "scattering_sweep.csv",
               ["eps", "I", "theta_bar", "dI_fo", "dI_sh", "dTheta_fo",
                "dTheta_sh", "resid"],
               [[r["eps"], r["I"], r["theta_bar"], r["dI_fo"], r["dI_sh"],
                 r["dTheta_fo"], r["dTheta_sh"], r["resid"]] for r in rows])


def _run_diffuse(cfg, outdir):
    params = _model(cfg)
    sec = cfg["diffuse"]
    I_range = tuple(float(v) for v in sec["I_range"])
    T0 = float(sec.get("T0", 14.0))
    strip = diffusion.build_strip(params, I_range=I_range, T0=T0)
    factor = sec.get("rho_bar_factor")
    if factor is not None:
        # rescan at the scaled dissipation so the certified c matches the run
        rb = float(factor) * diffusion.rho_bar_bound(strip.c, strip.d_max, T0)
        params = params.replace(rho_bar=rb)
        strip = diffusion.build_strip(params, I_range=I_range, T0=T0)
    steps, report = diffusion.diffuse(
        params, strip, start_below=float(sec.get("start_below", 0.005)),
        max_macro_steps=int(sec.get("max_macro_steps", 200_000)))
    traj = diffusion.assemble_pseudo_orbit(
        steps, params,
        samples_per_iterate=int(sec.get("samples_per_iterate", 1)),
        splice=bool(sec.get("splice", False)),
        max_splices=sec.get("max_splices"))
    report.to_json(outdir / "report.json")
    traj.to_csv(outdir / "orbit.csv")
    traj.jumps_to_csv(outdir / "jumps.csv")


def _std_params(sec) -> stdmap.StdMapParams:
    if "omega_star" in sec and "mu" in sec:
        raise ConfigError("give either mu or omega_star, not both")
    if "omega_star" in sec:
        return stdmap.StdMapParams.from_omega_star(
            float(sec.get("eps", 0.0)), float(sec.get("lam", 0.0)),
            float(sec["omega_star"]))
    return stdmap.StdMapParams(eps=float(sec.get("eps", 0.0)),
                               lam=float(sec.get("lam", 0.0)),
                               mu=float(sec.get("mu", 0.0)))


def _run_stdmap(cfg, outdir):
    sec = cfg["stdmap"]
    params = _std_params(sec)
    stdmap.orbit_to_csv(outdir / "stdmap_orbit.csv", float(sec.get("I0", 0.0)),
                        float(sec.get("theta0", 0.0)), params,
                        int(sec.get("n_iter", 2000)))


def _run_basin(cfg, outdir):
    sec = cfg["basin"]
    params = _std_params(sec)
    I_lo, I_hi = (float(v) for v in sec["I_range"])
    th_lo, th_hi = (float(v) for v in sec.get("theta_range", (0.0, 2 * math.pi)))
    I_values = np.linspace(I_lo, I_hi, int(sec.get("n_I", 40)))
    th_values = np.linspace(th_lo, th_hi, int(sec.get("n_theta", 40)))
    stdmap.basin_to_csv(outdir / "basin.csv", I_values, th_values, params,
                        n_iter=int(sec.get("n_iter", 4000)))


_RUNNERS = {
    "simulate": _run_simulate,
    "inner": _run_inner,
    "melnikov-grid": _run_melnikov_grid,
    "scattering-sweep": _run_scattering_sweep,
    "diffuse": _run_diffuse,
    "stdmap": _run_stdmap,
    "basin": _run_basin,
}


def run(subcommand: str, config_path, outdir=None) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        cfg = load_config(config_path, subcommand)
        out = _resolve_outdir(cfg, outdir)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        _echo_config(cfg, out, subcommand)
        _RUNNERS[subcommand](cfg, out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as e:
        print(f"config error in {subcommand!r}: {e}", file=sys.stderr)
        return 2
    except RotpendError as e:
        print(f"numerical failure in {subcommand!r}: "
              f"{type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rotpend", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _RUNNERS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="YAML configuration file")
        sp.add_argument("--outdir", default=None,
                        help="output directory (default: output_dir from the "
                             "config; ROTPEND_OUTDIR overrides both)")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.outdir)


if __name__ == "__main__":
    sys.exit(main())

"""Synthesized fixture files matching the rotpend CSV/JSON contracts.

The plots package consumes the primary package only through these documented
file formats, so the unit tests build small instances by hand.
"""

import json
import math

import numpy as np
import pytest

TWO_PI = 2 * math.pi


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    """A working directory pre-populated with one file per contract."""
    monkeypatch.chdir(tmp_path)

    t = np.linspace(0, 40, 401)
    p = 2 / np.cosh(t - 20)
    q = 4 * np.arctan(np.exp(t - 20))
    I = 1.0 + 0.01 * np.sin(0.3 * t)
    theta = np.mod(1.1 * t, TWO_PI)
    s = np.mod(t, TWO_PI)
    _write_csv(tmp_path / "orbit.csv",
               ["t", "p", "q", "I", "theta", "s", "segment_id"],
               np.column_stack([t, p, q, I, theta, s, np.zeros_like(t)]))

    _write_csv(tmp_path / "jumps.csv", ["index", "gap"],
               [[100, 0.004], [250, 0.0035]])

    k = np.arange(40)
    _write_csv(tmp_path / "inner_orbit.csv", ["k", "I", "theta"],
               np.column_stack([k, 1.0 + 0.5 * np.exp(-0.2 * k),
                                np.mod(2.1 * k, TWO_PI)]))

    Is, ths = np.meshgrid(np.linspace(0.5, 1.5, 8),
                          np.linspace(0, TWO_PI, 9), indexing="ij")
    rot = np.where(Is > 1.0, 1.6, 0.8)
    _write_csv(tmp_path / "basin.csv", ["I0", "theta0", "rotation_number"],
               np.column_stack([Is.ravel(), ths.ravel(), rot.ravel()]))

    Ig, tg = np.meshgrid(np.linspace(1.05, 1.35, 6),
                         np.linspace(0, TWO_PI, 12, endpoint=False),
                         indexing="ij")
    L = np.cos(tg) * Ig
    _write_csv(tmp_path / "melnikov_grid.csv",
               ["I", "theta_bar", "L_star", "dL_dI", "dL_dtheta", "tau_star",
                "nondeg"],
               np.column_stack([Ig.ravel(), tg.ravel(), L.ravel(),
                                np.cos(tg).ravel(), (-Ig * np.sin(tg)).ravel(),
                                np.full(Ig.size, -1.5), np.full(Ig.size, 2.0)]))

    # diffusion artifacts: I ramps across omega_star = 1.2
    td = np.linspace(0, 5000, 600)
    Id = 1.05 + (1.35 - 1.05) * td / td[-1]
    _write_csv(tmp_path / "diffuse_orbit.csv",
               ["t", "p", "q", "I", "theta", "s", "segment_id"],
               np.column_stack([td, 0 * td, 0 * td, Id,
                                np.mod(1.2 * td, TWO_PI), np.mod(td, TWO_PI),
                                np.arange(len(td)) // 50]))
    _write_csv(tmp_path / "diffuse_jumps.csv", ["index", "gap"],
               [[50, 0.005], [100, 0.006], [150, 0.0045]])
    (tmp_path / "report.json").write_text(json.dumps(
        {"omega_star": 1.2, "eps": 1e-3, "crossed_omega_star": True,
         "segments": 12}))
    return tmp_path

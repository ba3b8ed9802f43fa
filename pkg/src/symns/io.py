"""Snapshot and diagnostics files: plain CSV, 17 significant digits so that
doubles round-trip bit-exactly, C-locale scientific notation."""

from __future__ import annotations

import os

from .diagnostics import SERIES_COLUMNS, DiagnosticsSeries, Trajectory
from .state import State

__all__ = ["snapshot_filename", "write_snapshot", "write_diagnostics_csv",
           "write_trajectory"]

_FMT = "%.17g"


def snapshot_filename(step: int) -> str:
    return f"snapshot_{step:07d}.csv"


def write_snapshot(path, state: State):
    g = state.grid
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,rho,u,v,w,theta\n")
        for i in range(g.n):
            row = (g.centers[i], state.rho[i], state.u[i], state.v[i],
                   state.w[i], state.theta[i])
            fh.write(",".join(_FMT % v for v in row) + "\n")


def write_diagnostics_csv(path, series: DiagnosticsSeries):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SERIES_COLUMNS) + "\n")
        for i in range(len(series)):
            fh.write(",".join(_FMT % series.rows[k][i]
                              for k in SERIES_COLUMNS) + "\n")


def write_trajectory(out_dir, traj: Trajectory):
    """Write every recorded snapshot plus diagnostics.csv; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for state, step in zip(traj.states, traj.snapshot_steps):
        p = os.path.join(out_dir, snapshot_filename(step))
        write_snapshot(p, state)
        paths.append(p)
    dpath = os.path.join(out_dir, "diagnostics.csv")
    write_diagnostics_csv(dpath, traj.series)
    paths.append(dpath)
    return paths

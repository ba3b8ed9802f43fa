#!/usr/bin/env python3
"""Nonlinear-conduction refinement study: the implicit temperature step
against an explicit fine-grid reference, across grids.

Usage: python scripts/conduction_convergence.py
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from symns.constitutive import heat_capacity, ideal_gas
from symns.grid import make_grid, weighted_lp_norm
from symns.operators import face_kappa, heat_flux_div
from symns.state import State
from symns.stepper import StepControls, step_temperature


def implicit_theta(g, model, theta0, dt, nsteps):
    c = StepControls()
    rho = np.ones(g.n)
    z = np.zeros(g.n)
    th = theta0.copy()
    for j in range(nsteps):
        s = State(g, j * dt, rho, z, z, z, th)
        th, _, _ = step_temperature(s, dt, model, c)
    return th


def explicit_theta(g, model, theta0, t_end):
    kmax = float(np.max(1.0 + theta0 ** model.q)) * model.kappa0
    dte = 0.2 * g.dx ** 2 / kmax
    nst = int(np.ceil(t_end / dte))
    dte = t_end / nst
    th = theta0.copy()
    rho = np.ones(g.n)
    for _ in range(nst):
        qp = heat_capacity(model, th)
        kf = face_kappa(g, model, th)
        th = th + dte * heat_flux_div(g, kf, th) / (rho * qp)
    return th


def main():
    model = ideal_gas(q=2.0)  # kappa = 1 + theta^2
    t_end = 0.01
    print(" n    L2 relative difference vs 8x explicit reference")
    for n in (32, 64, 128):
        g = make_grid(1.0, 2.0, n, 2)
        theta0 = 1.0 + 0.5 * np.cos(np.pi * (g.centers - g.a) / (g.b - g.a))
        nsteps = max(200, 10 * n)
        th_i = implicit_theta(g, model, theta0, t_end / nsteps, nsteps)
        gf = make_grid(1.0, 2.0, 8 * n, 2)
        th0f = 1.0 + 0.5 * np.cos(np.pi * (gf.centers - gf.a) / (gf.b - gf.a))
        th_e = explicit_theta(gf, model, th0f, t_end).reshape(n, 8).mean(axis=1)
        rel = (weighted_lp_norm(g, th_i - th_e, 2)
               / weighted_lp_norm(g, th_e, 2))
        print(f"{n:4d}  {rel:.3e}")


if __name__ == "__main__":
    main()

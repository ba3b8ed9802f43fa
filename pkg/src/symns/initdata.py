"""Initial states: presets, epsilon-regularization, and compatibility residuals.

The regularization lifts rho0 and theta0 by eps and re-solves the initial
radial velocity from the elliptic balance
``beta * (u_xx + m u_x/x - m u/x^2) - P_x = sqrt(rho0) * g1`` with
wall-pinned u; the swirl components are reused unchanged.  The
compatibility residuals g1..g4 divide the four elliptic expressions by
sqrt(rho0) on non-vacuum cells; on vacuum cells the raw expressions are
reported instead (they must themselves be small for compatible data, since
the right-hand side vanishes with rho0).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .constitutive import GasModel, pressure
from .grid import Grid, weighted_integral
from .operators import (axial_laplacian, ddx, dissipation, face_kappa,
                        heat_flux_div, lame_operator, lame_stencil)
from .tridiag import solve_tridiagonal, tridiagonal_matvec

__all__ = [
    "InitialData",
    "CompatibilityResiduals",
    "regularize",
    "solve_initial_velocity",
    "compatibility_residuals",
    "preset",
    "load_initial_csv",
    "PRESETS",
]

PRESETS = ("equilibrium", "vacuum_bump", "swirl_cylinder", "manufactured")


@dataclass
class InitialData:
    rho0: np.ndarray
    u0: np.ndarray
    v0: np.ndarray
    w0: np.ndarray
    theta0: np.ndarray
    epsilon: float = 0.0
    provenance: str = "unspecified"

    def validate(self, g: Grid):
        for name in ("rho0", "u0", "v0", "w0", "theta0"):
            g.require_field(getattr(self, name))
        if np.any(self.rho0 < 0.0):
            raise ValueError("initial density must be nonnegative")
        if np.any(self.theta0 < 0.0):
            raise ValueError("initial temperature must be nonnegative")
        if not weighted_integral(g, self.rho0) > 0.0:
            raise ValueError("initial data must carry positive total mass")


def regularize(d: InitialData, eps: float) -> InitialData:
    """Lift rho0 and theta0 by eps > 0; velocities are untouched here and
    the radial one is meant to be re-solved afterwards."""
    if not eps > 0.0:
        raise ValueError(f"regularization parameter must be positive, got {eps}")
    return replace(d, rho0=d.rho0 + eps, theta0=d.theta0 + eps,
                   epsilon=d.epsilon + eps)


def solve_initial_velocity(model: GasModel, rho0e, theta0e, g1, g: Grid):
    """Solve beta*L[u] = P_x(rho0e, theta0e) + sqrt(rho0e)*g1 with u=0 walls.

    L is the wall-pinned tridiagonal Lame stencil; one long-double
    refinement pass pushes the discrete residual to the rounding floor of
    the double-precision operator (the residual check below would trip
    otherwise only if the system were near-singular, which beta > 0
    excludes).
    """
    rho0e = g.require_field(rho0e)
    theta0e = g.require_field(theta0e)
    g1 = g.require_field(g1)
    if np.any(rho0e <= 0.0):
        raise ValueError("solve_initial_velocity needs strictly positive "
                         "density (regularize first)")
    beta = model.beta
    if beta <= 0.0:
        raise ValueError(f"need beta = 2*mu + lam > 0, got {beta}")

    P = pressure(model, rho0e, theta0e)
    rhs = ddx(g, P, "neumann0") + np.sqrt(rho0e) * g1
    sub, diag, sup = lame_stencil(g)
    # solve (-beta*L) u = -rhs so the matrix is positive and dominant
    a = -beta * sub
    b = -beta * diag
    c = -beta * sup
    u = solve_tridiagonal(a, b, c, -rhs, context="initial velocity solve")

    ld = np.longdouble
    resid = (-rhs).astype(ld) - tridiagonal_matvec(a.astype(ld), b.astype(ld),
                                                   c.astype(ld), u.astype(ld))
    du = solve_tridiagonal(a.astype(ld), b.astype(ld), c.astype(ld), resid,
                           context="initial velocity refinement")
    u = (u.astype(ld) + du).astype(float)

    check = tridiagonal_matvec(a, b, c, u) + rhs
    scale = np.max(np.abs(rhs)) + np.max(np.abs(b) * np.abs(u)) + 1e-300
    rel = float(np.max(np.abs(check))) / scale
    if rel > 1e-10:
        raise RuntimeError(f"initial velocity solve residual {rel:.3e} "
                           "exceeds 1e-10: solve assumed singular")
    return u


@dataclass
class CompatibilityResiduals:
    """g1..g4 on non-vacuum cells (NaN elsewhere); vacuum cells report the
    raw elliptic expressions in vacuum_raw, one row per vacuum cell."""

    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    g4: np.ndarray
    vacuum_indices: np.ndarray
    vacuum_raw: np.ndarray  # shape (len(vacuum_indices), 4)

    def max_abs(self):
        out = []
        for gi in (self.g1, self.g2, self.g3, self.g4):
            defined = gi[np.isfinite(gi)]
            out.append(float(np.max(np.abs(defined))) if defined.size else 0.0)
        return out


def compatibility_residuals(d: InitialData, model: GasModel, g: Grid,
                            rho_vac_tol: float = 1e-12) -> CompatibilityResiduals:
    d.validate(g)
    P = pressure(model, d.rho0, d.theta0)
    expr1 = model.beta * lame_operator(g, d.u0) - ddx(g, P, "neumann0")
    expr2 = model.mu * lame_operator(g, d.v0)
    expr3 = model.mu * axial_laplacian(g, d.w0)
    kf = face_kappa(g, model, d.theta0)
    expr4 = heat_flux_div(g, kf, d.theta0) + dissipation(g, d.u0, d.v0, d.w0, model)

    vac = d.rho0 <= rho_vac_tol
    sqrt_rho = np.sqrt(np.where(vac, 1.0, d.rho0))
    gs = []
    for expr in (expr1, expr2, expr3, expr4):
        gi = expr / sqrt_rho
        gi[vac] = np.nan
        gs.append(gi)
    idx = np.nonzero(vac)[0]
    raw = np.column_stack([expr1[idx], expr2[idx], expr3[idx], expr4[idx]]) \
        if idx.size else np.empty((0, 4))
    return CompatibilityResiduals(*gs, vacuum_indices=idx, vacuum_raw=raw)


def _bump(xi):
    """C^2 raised-cosine-squared bump on |xi| <= 1, identically 0 outside."""
    out = np.zeros_like(xi)
    inside = np.abs(xi) < 1.0
    out[inside] = ((1.0 + np.cos(np.pi * xi[inside])) / 2.0) ** 2
    return out


def preset(name: str, g: Grid, **params) -> InitialData:
    """Build one of the named initial profiles.

    equilibrium      rho_bar, theta_bar constants, zero velocities.
    vacuum_bump      compactly supported density bump (vacuum outside),
                     theta = theta_bar*(floor_frac + bump), zero velocities.
    swirl_cylinder   constant rho/theta plus v = swirl*sin(pi*(x-a)/(b-a));
                     cylindrical mode only (m = 1).
    manufactured     smooth closed forms for convergence studies:
                     rho = rho_bar + amp*cos(k(x-a)), u = amp*sin(k(x-a)),
                     theta = theta_bar + amp*cos(k(x-a)), k = pi/(b-a).
    """
    x = g.centers
    zeros = np.zeros(g.n)

    def take(key, default):
        return float(params.pop(key, default))

    if name == "equilibrium":
        rho_bar = take("rho_bar", 1.0)
        theta_bar = take("theta_bar", 1.0)
        fields = dict(rho0=np.full(g.n, rho_bar), u0=zeros.copy(),
                      v0=zeros.copy(), w0=zeros.copy(),
                      theta0=np.full(g.n, theta_bar))
    elif name == "vacuum_bump":
        rho_max = take("rho_max", 1.0)
        center = take("center", 0.5 * (g.a + g.b))
        halfwidth = take("halfwidth", 0.25 * (g.b - g.a))
        theta_bar = take("theta_bar", 1.0)
        floor_frac = take("floor_frac", 0.05)
        if rho_max <= 0.0 or halfwidth <= 0.0 or floor_frac <= 0.0:
            raise ValueError("vacuum_bump needs positive rho_max, halfwidth, "
                             "floor_frac")
        if center - halfwidth <= g.a or center + halfwidth >= g.b:
            raise ValueError("bump support must lie strictly inside (a, b)")
        shape = _bump((x - center) / halfwidth)
        fields = dict(rho0=rho_max * shape, u0=zeros.copy(), v0=zeros.copy(),
                      w0=zeros.copy(),
                      theta0=theta_bar * (floor_frac + shape))
    elif name == "swirl_cylinder":
        if g.m != 1:
            raise ValueError("swirl_cylinder requires the cylindrical mode "
                             f"(m = 1), grid has m = {g.m}")
        rho_bar = take("rho_bar", 1.0)
        theta_bar = take("theta_bar", 1.0)
        swirl = take("swirl", 0.1)
        v0 = swirl * np.sin(np.pi * (x - g.a) / (g.b - g.a))
        fields = dict(rho0=np.full(g.n, rho_bar), u0=zeros.copy(), v0=v0,
                      w0=zeros.copy(), theta0=np.full(g.n, theta_bar))
    elif name == "manufactured":
        rho_bar = take("rho_bar", 1.0)
        theta_bar = take("theta_bar", 1.0)
        amp = take("amplitude", 0.05)
        if not (abs(amp) < rho_bar and abs(amp) < theta_bar):
            raise ValueError("manufactured amplitude must stay below the "
                             "background values")
        k = np.pi / (g.b - g.a)
        c = np.cos(k * (x - g.a))
        fields = dict(rho0=rho_bar + amp * c,
                      u0=amp * np.sin(k * (x - g.a)),
                      v0=zeros.copy(), w0=zeros.copy(),
                      theta0=theta_bar + amp * c)
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")

    if params:
        raise ValueError(f"preset {name!r} got unknown parameters "
                         f"{sorted(params)}")
    d = InitialData(**fields, provenance=f"preset:{name}")
    d.validate(g)
    return d


_INIT_COLUMNS = ("x", "rho", "u", "v", "w", "theta")


def load_initial_csv(path, g: Grid) -> InitialData:
    """Read initial fields from CSV with columns x,rho,u,v,w,theta
    (the snapshot format; a trailing 0 on field names is accepted).

    The x column must match the grid centers exactly -- this is a loader,
    not an interpolator.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = [h.strip().rstrip("0") or "0" for h in rows[0]]
    if tuple(header) != _INIT_COLUMNS:
        raise ValueError(f"{path}: expected columns {','.join(_INIT_COLUMNS)} "
                         f"(optionally 0-suffixed), got {','.join(rows[0])}")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    if data.shape != (g.n, 6):
        raise ValueError(f"{path}: expected {g.n} data rows x 6 columns, "
                         f"got {data.shape}")
    if not np.array_equal(data[:, 0], g.centers):
        raise ValueError(f"{path}: x column does not match the grid centers "
                         "exactly (no interpolation is performed)")
    d = InitialData(rho0=data[:, 1], u0=data[:, 2], v0=data[:, 3],
                    w0=data[:, 4], theta0=data[:, 5],
                    provenance=f"file:{path}")
    d.validate(g)
    return d

"""Time integration: sequential splitting continuity -> momentum -> temperature.

Each step advances the density with an explicit conservative upwind flux
(exact mass telescoping, zero wall flux), then the three velocity
components with explicit advection/sources and an implicit tridiagonal
viscous solve, then the temperature with a Picard-linearized implicit
solve of the Q-form energy equation (frozen face conductivity and heat
capacity per sweep, insulated walls).

Vacuum cells (rho below ``rho_vac_tol``) degenerate: velocity rows are
replaced by identity (frozen velocities keep the advective CFL
meaningful), temperature rows solve the stationary conduction balance
0 = heat_flux_div + dissipation.

The temperature system is solved for the increment theta' - theta, with
the right-hand side evaluated through the same difference operators that
build the matrix; constant states are then exact fixed points bitwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constitutive import GasModel, check_admissible, heat_capacity, pressure
from .errors import ConfigError, DtUnderflow, PicardDivergence, SolverFailure
from .grid import Grid, weighted_integral
from .operators import (axial_stencil, ddx, dissipation, face_kappa,
                        heat_flux_coeffs, heat_flux_div, lame_stencil,
                        radial_div, upwind_derivative)
from .state import State
from .tridiag import solve_tridiagonal

__all__ = [
    "StepControls",
    "StepInfo",
    "cfl_dt",
    "step_continuity",
    "step_momentum",
    "step_temperature",
    "step",
    "run",
]

_CLIP_WINDOW = 1e-10   # anything more negative is a scheme failure
_SPLITTING = "continuity-momentum-temperature"


@dataclass
class StepControls:
    cfl: float = 0.4
    picard_max: int = 10
    picard_tol: float = 1e-10
    rho_vac_tol: float = 1e-12
    dt_max: float = math.inf
    dt_min: float = 1e-12
    max_steps: int = 1_000_000
    splitting: str = _SPLITTING

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"need 0 < cfl < 1, got {self.cfl}")
        for name in ("picard_tol", "rho_vac_tol", "dt_min"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.dt_max <= 0.0:
            raise ValueError("dt_max must be positive")
        if self.splitting != _SPLITTING:
            raise ValueError(f"unsupported splitting {self.splitting!r}")


@dataclass
class StepInfo:
    """Per-step bookkeeping returned alongside the new state."""
    dt: float
    clip_rho: float = 0.0      # weighted mass added by flooring rho at 0
    clip_theta: float = 0.0    # weighted amount added by flooring theta at 0
    picard_iters: int = 0


def _sound_speed(model: GasModel, rho, theta):
    """sqrt(dP/drho) at fixed theta, centered difference with relative step
    1e-6 (one-sided against the vacuum boundary rho = 0)."""
    h = 1e-6 * (rho + 1.0)
    lo = np.maximum(rho - h, 0.0)
    dp = pressure(model, rho + h, theta) - pressure(model, lo, theta)
    cs2 = dp / (rho + h - lo)
    return np.sqrt(np.maximum(cs2, 0.0))


def cfl_dt(s: State, c: StepControls, model: GasModel) -> float:
    """Advective-acoustic CFL step, capped by dt_max, erroring below dt_min."""
    if not s.is_finite():
        raise ValueError("cfl_dt: state contains non-finite values")
    wave = float(np.max(np.abs(s.u) + _sound_speed(model, s.rho, s.theta)))
    if wave < 1e-30:
        if math.isinf(c.dt_max):
            raise SolverFailure("cfl_dt: zero wave speed and no dt_max cap")
        return c.dt_max
    dt = min(c.dt_max, c.cfl * s.grid.dx / wave)
    if dt < c.dt_min:
        raise DtUnderflow(f"cfl_dt: dt = {dt:.3e} fell below dt_min = "
                          f"{c.dt_min:.3e}")
    return dt


def _floor_field(g: Grid, values: np.ndarray, what: str):
    """Clip tiny negatives to zero; report the weighted amount added.
    Negatives beyond the clip window abort the step."""
    worst = float(values.min(initial=0.0))
    if worst < -_CLIP_WINDOW:
        cell = int(np.argmin(values))
        raise SolverFailure(f"{what} fell to {worst:.3e} at cell {cell}: "
                            "scheme failure", cell=cell)
    neg = values < 0.0
    if not np.any(neg):
        return values, 0.0
    clipped = float(np.sum(g.weights[neg] * (-values[neg])))
    values = values.copy()
    values[neg] = 0.0
    return values, clipped


def step_continuity(s: State, dt: float) -> tuple[np.ndarray, float]:
    """Explicit conservative upwind continuity update.

    Face flux x_f^m * rho_upwind * u_face with u_face the neighbor mean and
    zero wall flux; the weight-normalized differences telescope, so total
    weighted mass is conserved to rounding.  Returns (rho', clipped mass).
    """
    g = s.grid
    uf = 0.5 * (s.u[:-1] + s.u[1:])
    rho_up = np.where(uf > 0.0, s.rho[:-1], s.rho[1:])
    flux = np.zeros(g.n + 1)
    flux[1:-1] = g.faces[1:-1] ** g.m * rho_up * uf
    rho_new = s.rho - dt * np.diff(flux) / g.weights
    return _floor_field(g, rho_new, "density")


def _implicit_velocity(g, rho_new, vac, dt, coeff, stencil, star, rhs, context):
    sub_l, diag_l, sup_l = stencil
    a = -dt * coeff * sub_l
    b = rho_new - dt * coeff * diag_l
    cc = -dt * coeff * sup_l
    d = rhs.copy()
    if np.any(vac):
        a[vac] = 0.0
        cc[vac] = 0.0
        b[vac] = 1.0
        d[vac] = star[vac]
    return solve_tridiagonal(a, b, cc, d, context=context)


def step_momentum(s: State, dt: float, model: GasModel, c: StepControls,
                  force_u=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Advance (u, v, w): explicit upwind advection and geometric/pressure
    sources, then an implicit viscous tridiagonal solve per component.

    ``s.rho`` must already hold the continuity-updated density.  Vacuum
    rows are frozen at the pre-viscous value.  ``force_u`` is an optional
    external momentum source density (rho*f) for the radial component.
    """
    g = s.grid
    x = g.centers
    rho = s.rho
    vac = rho < c.rho_vac_tol
    P = pressure(model, rho, s.theta)
    Px = ddx(g, P, "neumann0")
    safe_rho = np.where(vac, 1.0, rho)

    ustar = s.u - dt * s.u * upwind_derivative(g, s.u, s.u) \
        + dt * (s.v ** 2 / x - Px / safe_rho)
    if force_u is not None:
        ustar = ustar + dt * np.asarray(force_u, dtype=float) / safe_rho
    ustar = np.where(vac, s.u, ustar)
    u_new = _implicit_velocity(g, rho, vac, dt, model.beta, lame_stencil(g),
                               ustar, rho * ustar, "radial momentum solve")

    vstar = s.v - dt * s.u * upwind_derivative(g, s.v, s.u) \
        - dt * s.u * s.v / x
    vstar = np.where(vac, s.v, vstar)
    v_new = _implicit_velocity(g, rho, vac, dt, model.mu, lame_stencil(g),
                               vstar, rho * vstar, "angular momentum solve")

    wstar = s.w - dt * s.u * upwind_derivative(g, s.w, s.u)
    wstar = np.where(vac, s.w, wstar)
    w_new = _implicit_velocity(g, rho, vac, dt, model.mu, axial_stencil(g),
                               wstar, rho * wstar, "axial momentum solve")
    return u_new, v_new, w_new


def _advection_rows(g, coef, u):
    """Row contributions of the implicit upwind advection coef * theta_x.

    Returns (sub, diag, sup); the wall-outward one-sided stencil hits the
    even-extension ghost and cancels, matching upwind_derivative."""
    n = g.n
    sub = np.zeros(n)
    diag = np.zeros(n)
    sup = np.zeros(n)
    pos = u > 0.0
    neg = u < 0.0
    w = coef / g.dx
    sub[pos] = -w[pos]
    diag[pos] = w[pos]
    sup[neg] = w[neg]
    diag[neg] = -w[neg]
    if pos[0]:
        sub[0] = 0.0
        diag[0] = 0.0
    if neg[-1]:
        sup[-1] = 0.0
        diag[-1] = 0.0
    return sub, diag, sup


def step_temperature(s: State, dt: float, model: GasModel,
                     c: StepControls) -> tuple[np.ndarray, float, int]:
    """Implicit Picard-linearized temperature update (Q-form).

    ``s`` carries the updated density and velocities and the old
    temperature.  Each sweep freezes kappa at faces and Q' from the
    current iterate and solves the linear tridiagonal system for the
    temperature increment; insulated walls.  Vacuum rows solve
    0 = heat_flux_div + dissipation.  Returns (theta', clipped amount,
    sweeps used).
    """
    g = s.grid
    rho, u = s.rho, s.u
    vac = rho < c.rho_vac_tol
    theta_old = s.theta
    divu = radial_div(g, u)
    phi = dissipation(g, u, s.v, s.w, model)

    theta_k = theta_old
    delta_prev = math.inf
    grew = 0
    iters = 0
    for iters in range(1, c.picard_max + 1):
        theta_eval = np.maximum(theta_k, 0.0)
        qp = heat_capacity(model, theta_eval)
        kf = face_kappa(g, model, theta_eval)
        cl, cr = heat_flux_coeffs(g, kf)

        mass = rho * qp / dt
        adv_coef = rho * u * qp
        a_sub, a_diag, a_sup = _advection_rows(g, adv_coef, u)
        comp = rho * qp * divu

        sub = a_sub - cl
        diag = mass + a_diag + comp + cl + cr
        sup = a_sup - cr
        # increment form: rhs = phi - (advection + compression - conduction)
        # applied to theta_old, all in difference form so constants cancel
        rhs = phi - adv_coef * upwind_derivative(g, theta_old, u, "neumann0") \
            - comp * theta_old + heat_flux_div(g, kf, theta_old)
        if np.any(vac):
            sub[vac] = -cl[vac]
            diag[vac] = cl[vac] + cr[vac]
            sup[vac] = -cr[vac]
            rhs[vac] = phi[vac] + heat_flux_div(g, kf, theta_old)[vac]

        delta = solve_tridiagonal(sub, diag, sup, rhs,
                                  context="temperature solve")
        theta_next = theta_old + delta
        change = float(np.max(np.abs(theta_next - theta_k)))
        scale = max(float(np.max(np.abs(theta_next))), 1e-300)
        rel = change / scale
        theta_k = theta_next
        if rel < c.picard_tol:
            break
        if rel > delta_prev:
            grew += 1
            if grew >= 2:
                raise PicardDivergence(
                    f"temperature Picard update grew to {rel:.3e} over two "
                    "consecutive sweeps")
        else:
            grew = 0
        delta_prev = rel
    else:
        warnings.warn(f"temperature Picard hit picard_max={c.picard_max} "
                      f"with relative update {rel:.3e}", RuntimeWarning)

    theta_new, clipped = _floor_field(g, theta_k, "temperature")
    return theta_new, clipped, iters


def step(s: State, c: StepControls, model: GasModel, force_u=None) -> State:
    """One full split step; dt chosen by :func:`cfl_dt`."""
    new, _ = step_detailed(s, c, model, force_u=force_u)
    return new


def step_detailed(s: State, c: StepControls, model: GasModel, dt=None,
                  force_u=None) -> tuple[State, StepInfo]:
    if dt is None:
        dt = cfl_dt(s, c, model)
    rho_new, clip_rho = step_continuity(s, dt)
    s_mom = State(grid=s.grid, t=s.t, rho=rho_new, u=s.u, v=s.v, w=s.w,
                  theta=s.theta)
    u_new, v_new, w_new = step_momentum(s_mom, dt, model, c, force_u=force_u)
    s_tem = State(grid=s.grid, t=s.t, rho=rho_new, u=u_new, v=v_new, w=w_new,
                  theta=s.theta)
    theta_new, clip_theta, iters = step_temperature(s_tem, dt, model, c)
    out = State(grid=s.grid, t=s.t + dt, rho=rho_new, u=u_new, v=v_new,
                w=w_new, theta=theta_new)
    return out, StepInfo(dt=dt, clip_rho=clip_rho, clip_theta=clip_theta,
                         picard_iters=iters)


def run(cfg, force: bool = False):
    """Run a configured simulation to t_end; every failure becomes a
    termination reason on the returned trajectory."""
    # deferred import: config builds models/grids, diagnostics builds series
    from .config import build_grid, build_initial, build_model
    from .diagnostics import DiagnosticsSeries, Trajectory, record_step

    g = build_grid(cfg)
    model = build_model(cfg)
    report = check_admissible(model, g.m)
    if not report.ok and not force:
        raise ConfigError("inadmissible model/grid combination:\n" + str(report))
    init = build_initial(cfg, g, model)
    c = cfg.controls.to_step_controls()
    alpha = cfg.output.diag_alpha
    t_end = cfg.controls.t_end

    state = State(grid=g, t=0.0, rho=init.rho0.copy(), u=init.u0.copy(),
                  v=init.v0.copy(), w=init.w0.copy(), theta=init.theta0.copy())
    series = DiagnosticsSeries()
    record_step(series, state, model, step=0, dt=0.0, alpha=alpha,
                clip_cum=0.0)
    states = [state.copy()]
    snapshot_steps = [0]
    mass0 = weighted_integral(g, state.rho)

    reason = "completed"
    error_msg = None
    clip_cum = 0.0
    nstep = 0
    next_snap_t = cfg.output.snapshot_dt if cfg.output.snapshot_dt > 0 else None

    while state.t < t_end - 1e-14 * max(1.0, t_end):
        if nstep >= c.max_steps:
            reason = "solver_failure"
            error_msg = f"exceeded max_steps = {c.max_steps}"
            break
        if not state.is_finite():
            reason = "nan_detected"
            break
        try:
            dt = cfl_dt(state, c, model)
            dt = min(dt, t_end - state.t)
            state, info = step_detailed(state, c, model, dt=dt)
        except DtUnderflow as exc:
            reason = "dt_underflow"
            error_msg = str(exc)
            break
        except SolverFailure as exc:
            reason = "solver_failure"
            error_msg = f"step {nstep}: {exc}"
            break
        nstep += 1
        clip_cum += info.clip_rho + info.clip_theta
        if clip_cum > 1e-10 * mass0:
            reason = "solver_failure"
            error_msg = (f"cumulative clip mass {clip_cum:.3e} exceeded "
                         f"1e-10 relative to initial mass {mass0:.6e}")
            break
        if not state.is_finite():
            reason = "nan_detected"
            break
        record_step(series, state, model, step=nstep, dt=info.dt, alpha=alpha,
                    clip_cum=clip_cum)
        want_snap = (cfg.output.snapshot_every > 0
                     and nstep % cfg.output.snapshot_every == 0)
        if next_snap_t is not None and state.t >= next_snap_t - 1e-14:
            want_snap = True
            while next_snap_t <= state.t + 1e-14:
                next_snap_t += cfg.output.snapshot_dt
        if want_snap:
            states.append(state.copy())
            snapshot_steps.append(nstep)

    if snapshot_steps[-1] != nstep:
        states.append(state.copy())
        snapshot_steps.append(nstep)
    return Trajectory(states=states, snapshot_steps=snapshot_steps,
                      series=series, reason=reason, steps=nstep,
                      diag_alpha=alpha, error=error_msg)

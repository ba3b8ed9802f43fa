"""Constitutive laws for the heat-conducting gas and their admissibility checks.

The model class is split laws: e = Q(theta) + e_c(rho), P = rho*Q(theta)
+ P_c(rho), kappa = kappa0*(1 + theta^q).  Two closed-form Q families and
two P_c families are provided; e_c is derived from P_c through
rho^2 * e_c'(rho) = P_c(rho) so the temperature-linear family satisfies
the thermodynamic consistency identity by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GasModel",
    "ideal_gas",
    "power_gas",
    "pressure",
    "internal_energy",
    "conductivity",
    "heat_capacity",
    "thermo_consistency_residual",
    "check_admissible",
    "AdmissibilityReport",
]


@dataclass(frozen=True)
class GasModel:
    """Immutable constitutive model.

    q_family selects Q(theta): "linear" is Q = theta (r = 0); "power" is
    Q = theta + theta^(1+r)/(1+r) with r >= 0.  pc_family selects the cold
    pressure: "zero", or "barotropic" P_c = A rho^gamma (A > 0, gamma > 1)
    with derived e_c = A rho^(gamma-1)/(gamma-1).  Conductivity is
    kappa0 * (1 + theta^q) with q > r.

    beta_flag is the 0/1 flag of the Q-family growth bounds (both provided
    families use 0).  It is unrelated to the viscous coefficient
    ``beta = 2*mu + lam``, exposed as a property.
    """

    mu: float
    lam: float
    kappa0: float
    q: float
    q_family: str = "linear"
    r: float = 0.0
    pc_family: str = "zero"
    A: float = 0.0
    gamma: float = 2.0
    beta_flag: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"shear viscosity must be positive, got mu={self.mu}")
        if self.kappa0 <= 0.0:
            raise ValueError(f"kappa0 must be positive, got {self.kappa0}")
        if self.q_family not in ("linear", "power"):
            raise ValueError(f"unknown Q family {self.q_family!r}")
        if self.q_family == "linear" and self.r != 0.0:
            raise ValueError("the linear Q family has r = 0 by definition")
        if self.r < 0.0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if not self.q > self.r:
            raise ValueError(f"conductivity growth must dominate: need q > r, "
                             f"got q={self.q}, r={self.r}")
        if self.pc_family not in ("zero", "barotropic"):
            raise ValueError(f"unknown cold-pressure family {self.pc_family!r}")
        if self.pc_family == "barotropic":
            if self.A <= 0.0:
                raise ValueError("barotropic family needs A > 0")
            if self.gamma <= 1.0:
                raise ValueError("barotropic family needs gamma > 1")

    @property
    def beta(self) -> float:
        """Viscous coefficient 2*mu + lam of the radial momentum equation."""
        return 2.0 * self.mu + self.lam


def ideal_gas(mu=1.0, lam=0.0, kappa0=1.0, q=2.0) -> GasModel:
    """Ideal polytropic gas: P = rho*theta, e = theta, kappa = kappa0(1+theta^q)."""
    return GasModel(mu=mu, lam=lam, kappa0=kappa0, q=q)


def power_gas(mu, lam, r, q, kappa0=1.0, A=0.0, gamma=2.0) -> GasModel:
    """Power Q family, with an optional barotropic cold pressure when A > 0."""
    pc = "barotropic" if A > 0.0 else "zero"
    return GasModel(mu=mu, lam=lam, kappa0=kappa0, q=q, q_family="power",
                    r=r, pc_family=pc, A=A, gamma=gamma)


def _check_nonneg(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def _Q(model: GasModel, theta):
    if model.q_family == "linear":
        return theta
    return theta + theta ** (1.0 + model.r) / (1.0 + model.r)


def _Qprime(model: GasModel, theta):
    if model.q_family == "linear":
        return np.ones_like(np.asarray(theta, dtype=float))
    return 1.0 + theta ** model.r


def _Pc(model: GasModel, rho):
    if model.pc_family == "zero":
        return np.zeros_like(np.asarray(rho, dtype=float))
    return model.A * rho ** model.gamma


def _ec(model: GasModel, rho):
    if model.pc_family == "zero":
        return np.zeros_like(np.asarray(rho, dtype=float))
    return model.A * rho ** (model.gamma - 1.0) / (model.gamma - 1.0)


def pressure(model: GasModel, rho, theta):
    """P = rho*Q(theta) + P_c(rho); vacuum has zero pressure."""
    rho = _check_nonneg("density", rho)
    theta = _check_nonneg("temperature", theta)
    out = rho * _Q(model, theta) + _Pc(model, rho)
    return out if out.ndim else float(out)


def internal_energy(model: GasModel, rho, theta):
    """Specific internal energy e = Q(theta) + e_c(rho)."""
    rho = _check_nonneg("density", rho)
    theta = _check_nonneg("temperature", theta)
    out = _Q(model, theta) + _ec(model, rho)
    return out if out.ndim else float(out)


def conductivity(model: GasModel, theta):
    """kappa(theta) = kappa0 * (1 + theta^q) > 0."""
    theta = _check_nonneg("temperature", theta)
    out = model.kappa0 * (1.0 + theta ** model.q)
    return out if out.ndim else float(out)


def heat_capacity(model: GasModel, theta):
    """Q'(theta): 1 for the linear family, 1 + theta^r for the power family."""
    theta = _check_nonneg("temperature", theta)
    out = _Qprime(model, theta)
    return out if out.ndim else float(out)


def thermo_consistency_residual(model: GasModel, rho: float, theta: float) -> float:
    """Residual of P = rho^2 * de/drho + theta * dP/dtheta at one state.

    Partials are centered finite differences with relative step 1e-6.
    The residual reduces analytically to rho*(Q(theta) - theta*Q'(theta)):
    identically zero for the linear family (and for "power" with r = 0),
    but -rho * r * theta^(1+r) / (1+r) for the power family with r > 0.
    That nonzero value is a property of the family, not an error; callers
    comparing against zero must restrict to the linear family.
    """
    rho = float(rho)
    theta = float(theta)
    if rho <= 0.0 or theta <= 0.0:
        raise ValueError("consistency residual needs an interior point "
                         "(rho > 0 and theta > 0)")
    hr = 1e-6 * rho
    ht = 1e-6 * theta
    de_drho = (internal_energy(model, rho + hr, theta)
               - internal_energy(model, rho - hr, theta)) / (2.0 * hr)
    dP_dtheta = (pressure(model, rho, theta + ht)
                 - pressure(model, rho, theta - ht)) / (2.0 * ht)
    return pressure(model, rho, theta) - rho * rho * de_drho - theta * dP_dtheta


@dataclass
class AdmissibilityReport:
    """Outcome of :func:`check_admissible`: one (name, passed, detail) row
    per condition; failures carry the witness value."""

    checks: list

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def failures(self):
        return [(name, detail) for name, passed, detail in self.checks if not passed]

    def __str__(self):
        lines = []
        for name, passed, detail in self.checks:
            mark = "pass" if passed else "FAIL"
            lines.append(f"[{mark}] {name}: {detail}")
        return "\n".join(lines)


def check_admissible(model: GasModel, m: int) -> AdmissibilityReport:
    """Validate the model against the admissibility conditions for exponent m.

    Structural conditions are evaluated exactly; the cold-pressure bound
    rho*|e_c'| <= C1*e_c and the Q' growth bounds are sampled (rho on a
    log grid 1e-6..1e2, theta on 0..1e2) and the report carries the
    tightest sampled constants rather than asserting prescribed ones.
    """
    checks = []
    checks.append(("mu > 0", model.mu > 0.0, f"mu = {model.mu}"))
    lame_comb = 2.0 * model.mu + (m + 1) * model.lam
    checks.append((f"2*mu + (m+1)*lam > 0 (m={m})", lame_comb > 0.0,
                   f"2*{model.mu} + {m + 1}*{model.lam} = {lame_comb}"))
    checks.append(("q > r", model.q > model.r, f"q = {model.q}, r = {model.r}"))

    rho_s = np.logspace(-6.0, 2.0, 81)
    pc = _Pc(model, rho_s)
    ec = _ec(model, rho_s)
    checks.append(("P_c >= 0 and e_c >= 0 on sample grid",
                   bool(np.all(pc >= 0.0) and np.all(ec >= 0.0)),
                   f"min P_c = {pc.min():.3g}, min e_c = {ec.min():.3g}"))
    if model.pc_family == "barotropic":
        # rho * e_c' = (gamma-1) * e_c exactly for this family.
        h = 1e-6 * rho_s
        ecp = (_ec(model, rho_s + h) - _ec(model, rho_s - h)) / (2.0 * h)
        ratio = rho_s * np.abs(ecp) / np.where(ec > 0.0, ec, 1.0)
        c1 = float(ratio.max())
        checks.append(("rho*|e_c'| <= C1*e_c sampled", np.isfinite(c1),
                       f"tightest C1 = {c1:.6g} (analytic gamma-1 = {model.gamma - 1.0})"))
    else:
        checks.append(("rho*|e_c'| <= C1*e_c sampled", True,
                       "e_c identically zero"))

    theta_s = np.linspace(0.0, 100.0, 101)
    qp = _Qprime(model, theta_s)
    envelope = 1.0 + theta_s ** model.r
    lo = float(np.min(qp / envelope))
    hi = float(np.max(qp / envelope))
    checks.append(("C4*(1+theta^r) <= Q' <= C5*(1+theta^r) sampled",
                   lo > 0.0 and np.isfinite(hi),
                   f"tightest C4 = {lo:.6g}, C5 = {hi:.6g}"))
    return AdmissibilityReport(checks)

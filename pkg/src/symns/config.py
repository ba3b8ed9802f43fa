"""Run configuration: a line-oriented TOML subset and its validation.

Accepted syntax: ``[section]`` headers, ``key = value`` lines (dotted keys
work outside sections too), ``#`` comments, quoted or bare strings,
integers, floats (``inf`` allowed for dt_max).  Unknown and duplicate keys
are errors carrying the line number; validation failures carry the key
path.  Parsing also pre-checks model admissibility for the configured
symmetry exponent and attaches the report.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constitutive import GasModel, check_admissible
from .errors import ConfigError
from .grid import make_grid
from .initdata import (compatibility_residuals, load_initial_csv, preset,
                       regularize, solve_initial_velocity, PRESETS)
from .stepper import StepControls

__all__ = [
    "SimConfig", "GridConfig", "ModelConfig", "InitConfig", "ControlsConfig",
    "OutputConfig", "parse_config", "parse_config_file", "build_grid",
    "build_model", "build_initial", "override_config",
]


@dataclass
class GridConfig:
    a: float = 1.0
    b: float = 2.0
    n: int = 128
    m: int = 2


@dataclass
class ModelConfig:
    family: str = "ideal"   # ideal|linear -> linear Q; power -> power Q
    mu: float = 1.0
    lam: float = 0.0
    r: float = 0.0
    q: float = 2.0
    kappa0: float = 1.0
    A: float = 0.0          # > 0 switches on the barotropic cold pressure
    gamma: float = 2.0


@dataclass
class InitConfig:
    preset: str = "equilibrium"
    file: str = ""
    eps: float = 0.0
    rho_bar: float = 1.0
    theta_bar: float = 1.0
    rho_max: float = 1.0
    center: float = math.nan      # nan -> preset default
    halfwidth: float = math.nan
    floor_frac: float = 0.05
    swirl: float = 0.1
    amplitude: float = 0.05


@dataclass
class ControlsConfig:
    cfl: float = 0.4
    t_end: float = 0.1
    dt_max: float = math.inf
    dt_min: float = 1e-12
    picard_max: int = 10
    picard_tol: float = 1e-10
    rho_vac_tol: float = 1e-12
    max_steps: int = 1_000_000

    def to_step_controls(self) -> StepControls:
        return StepControls(cfl=self.cfl, picard_max=self.picard_max,
                            picard_tol=self.picard_tol,
                            rho_vac_tol=self.rho_vac_tol, dt_max=self.dt_max,
                            dt_min=self.dt_min, max_steps=self.max_steps)


@dataclass
class OutputConfig:
    out_dir: str = "out"
    snapshot_every: int = 0   # every k steps; 0 keeps initial/final only
    snapshot_dt: float = 0.0  # or a time interval; 0 disables
    diag_alpha: float = 0.5


@dataclass
class SimConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    init: InitConfig = field(default_factory=InitConfig)
    controls: ControlsConfig = field(default_factory=ControlsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    admissibility: object = None


_SECTIONS = {"grid": GridConfig, "model": ModelConfig, "init": InitConfig,
             "controls": ControlsConfig, "output": OutputConfig}

_INT_KEYS = {"grid.n", "grid.m", "controls.picard_max", "controls.max_steps",
             "output.snapshot_every"}
_STR_KEYS = {"model.family", "init.preset", "init.file", "output.out_dir"}


def _parse_value(raw: str, key: str, lineno: int):
    raw = raw.strip()
    if raw.startswith('"'):
        end = raw.find('"', 1)
        if end < 0:
            raise ConfigError(f"line {lineno}: unterminated string")
        tail = raw[end + 1:].strip()
        if tail and not tail.startswith("#"):
            raise ConfigError(f"line {lineno}: trailing junk after string")
        raw = raw[1:end]
    else:
        raw = raw.split("#", 1)[0].strip()
    if not raw:
        raise ConfigError(f"line {lineno}: missing value for {key!r}")
    if key in _STR_KEYS:
        return raw
    try:
        val = float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a number, "
                          f"got {raw!r}") from None
    if key in _INT_KEYS:
        if not float(val).is_integer():
            raise ConfigError(f"line {lineno}: {key} expects an integer, "
                              f"got {raw!r}")
        return int(val)
    return val


def parse_config(text: str) -> SimConfig:
    """Parse and validate run-configuration text; see the module docstring."""
    cfg = SimConfig()
    seen = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header")
            section = stripped[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section "
                                  f"[{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', "
                              f"got {stripped!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        full = key if "." in key else (f"{section}.{key}" if section else key)
        parts = full.split(".")
        if len(parts) != 2 or parts[0] not in _SECTIONS:
            raise ConfigError(f"line {lineno}: unknown key {full!r}")
        sec_obj = getattr(cfg, parts[0])
        if not hasattr(sec_obj, parts[1]):
            raise ConfigError(f"line {lineno}: unknown key {full!r}")
        if full in seen:
            raise ConfigError(f"line {lineno}: duplicate key {full!r} "
                              f"(first set on line {seen[full]})")
        seen[full] = lineno
        setattr(sec_obj, parts[1], _parse_value(raw, full, lineno))
    _validate(cfg)
    return cfg


def parse_config_file(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _validate(cfg: SimConfig):
    try:
        build_grid(cfg)
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    try:
        model = build_model(cfg)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc
    try:
        cfg.controls.to_step_controls()
    except ValueError as exc:
        raise ConfigError(f"controls: {exc}") from exc
    if cfg.controls.t_end < 0.0:
        raise ConfigError("controls.t_end must be >= 0")
    if cfg.init.eps < 0.0:
        raise ConfigError("init.eps must be >= 0")
    if not cfg.init.file and cfg.init.preset not in PRESETS:
        raise ConfigError(f"init.preset: unknown preset {cfg.init.preset!r}; "
                          f"choose from {PRESETS}")
    hi = min(1.0, model.q - model.r)
    if not 0.0 < cfg.output.diag_alpha < hi:
        raise ConfigError(f"output.diag_alpha must lie in (0, min(1, q-r)) "
                          f"= (0, {hi}), got {cfg.output.diag_alpha}")
    if cfg.output.snapshot_every < 0 or cfg.output.snapshot_dt < 0.0:
        raise ConfigError("output snapshot cadence must be >= 0")
    cfg.admissibility = check_admissible(model, cfg.grid.m)


def build_grid(cfg: SimConfig):
    return make_grid(cfg.grid.a, cfg.grid.b, cfg.grid.n, cfg.grid.m)


def build_model(cfg: SimConfig) -> GasModel:
    mc = cfg.model
    if mc.family in ("ideal", "linear"):
        if mc.r != 0.0:
            raise ValueError("model.r must be 0 for the linear/ideal family")
        q_family, r = "linear", 0.0
    elif mc.family == "power":
        q_family, r = "power", mc.r
    else:
        raise ValueError(f"unknown model.family {mc.family!r}")
    pc_family = "barotropic" if mc.A > 0.0 else "zero"
    return GasModel(mu=mc.mu, lam=mc.lam, kappa0=mc.kappa0, q=mc.q,
                    q_family=q_family, r=r, pc_family=pc_family, A=mc.A,
                    gamma=mc.gamma)


_PRESET_KEYS = {
    "equilibrium": ("rho_bar", "theta_bar"),
    "vacuum_bump": ("rho_max", "center", "halfwidth", "theta_bar",
                    "floor_frac"),
    "swirl_cylinder": ("rho_bar", "theta_bar", "swirl"),
    "manufactured": ("rho_bar", "theta_bar", "amplitude"),
}


def build_initial(cfg: SimConfig, g, model: GasModel):
    """Initial data from the config: preset or CSV file, then the optional
    epsilon-regularization with its re-solved radial velocity."""
    ic = cfg.init
    try:
        if ic.file:
            d = load_initial_csv(ic.file, g)
        else:
            params = {}
            for key in _PRESET_KEYS[ic.preset]:
                val = getattr(ic, key)
                if isinstance(val, float) and math.isnan(val):
                    continue
                params[key] = val
            d = preset(ic.preset, g, **params)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"init: {exc}") from exc
    if ic.eps > 0.0:
        res = compatibility_residuals(d, model, g,
                                      rho_vac_tol=cfg.controls.rho_vac_tol)
        g1 = np.nan_to_num(res.g1, nan=0.0)
        d = regularize(d, ic.eps)
        u0e = solve_initial_velocity(model, d.rho0, d.theta0, g1, g)
        d = replace(d, u0=u0e)
    return d


def override_config(cfg: SimConfig, key: str, raw_value: str) -> SimConfig:
    """Deep-copied config with one dotted key overridden (sweep support)."""
    parts = key.split(".")
    if len(parts) != 2 or parts[0] not in _SECTIONS:
        raise ConfigError(f"unknown key {key!r}")
    out = copy.deepcopy(cfg)
    sec = getattr(out, parts[0])
    if not hasattr(sec, parts[1]):
        raise ConfigError(f"unknown key {key!r}")
    setattr(sec, parts[1], _parse_value(raw_value, key, 0))
    _validate(out)
    return out

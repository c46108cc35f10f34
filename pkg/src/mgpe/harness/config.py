"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Lists are
comma-separated.  Recognised keys:

==========================  ===================================================
mode                        solve | profile | sweep | classify | probe | validate
dim                         spatial dimension (default 1)
beta, delta                 interaction strengths (scalars)
potential                   harmonic | box | zero
gamma                       trap frequency (harmonic)
domain                      ``a, b`` for the box potential
grid.n                      number of grid points
grid.L                      half-width of the (rescaled) truncated grid
solver.tau                  initial flow step
solver.tol                  residual tolerance
solver.max_iter             iteration cap
solver.init                 gaussian | uniform | tf-ansatz | random
solver.mode                 direct | transformed
solver.residual_scaling     absolute | relative
seed                        unsigned 64-bit integer
out_dir                     output directory
case                        regime label under test (C1, C3, C1', B3, ...)
schedule                    ``beta: v1, v2, ...`` or ``delta: v1, v2, ...``
thresholds                  ``low, high`` classification cutoffs
profile.delta_inf           delta_inf for profile mode (C2, C2', B2, B2')
probe.eps                   eps list for probe mode
assert.final_l2             sweep assertion: last L2 distance bound
assert.metric               l2 | h1: metric of the monotonicity assertion
criteria                    subset of acceptance criteria for validate mode
==========================  ===================================================
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import ConfigurationError
from ..model import Box, Harmonic, PhysicalParams, ZeroPotential
from ..solver import INIT_KINDS, MODES, SolverOptions

MODES_CLI = ("solve", "profile", "sweep", "classify", "probe", "validate")
KEYS = (
    "mode", "dim", "beta", "delta", "potential", "gamma", "domain", "grid.n", "grid.L", "solver.tau",
    "solver.tol", "solver.max_iter", "solver.init", "solver.mode", "solver.residual_scaling", "seed",
    "out_dir", "case", "schedule", "thresholds", "profile.delta_inf", "probe.eps", "assert.final_l2",
    "assert.metric", "criteria",
)
U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "solve"
    dim: int = 1
    beta: float = 0.0
    delta: float = 0.0
    potential: str = "harmonic"
    gamma: float = 1.0
    domain: tuple = (0.0, 1.0)
    grid_n: int = 1025
    grid_L: float = 16.0
    solver_tau: float = 1.0
    solver_tol: float = 1e-8
    solver_max_iter: int = 20000
    solver_init: str = "tf-ansatz"
    solver_mode: str = "direct"
    solver_residual_scaling: str = "absolute"
    seed: int = 0
    out_dir: str = "out"
    case: Optional[str] = None
    schedule_param: Optional[str] = None
    schedule: tuple = ()
    thresholds: tuple = (0.1, 10.0)
    profile_delta_inf: Optional[float] = None
    probe_eps: tuple = (1.0, 0.5, 0.1, 0.05, 0.01)
    assert_final_l2: Optional[float] = None
    assert_metric: str = "l2"
    criteria: tuple = ()
    source: Optional[str] = field(default=None, compare=False)

    def params(self, beta: Optional[float] = None, delta: Optional[float] = None) -> PhysicalParams:
        return PhysicalParams(self.beta if beta is None else beta, self.delta if delta is None else delta, self.dim)

    def make_potential(self):
        if self.potential == "harmonic":
            return Harmonic((self.gamma,))
        if self.potential == "box":
            return Box(self.domain)
        return ZeroPotential()

    @property
    def domain_kind(self) -> str:
        return "box" if self.potential == "box" else "whole-space"

    def solver_options(self, index: int = 0) -> SolverOptions:
        return SolverOptions(tau=self.solver_tau, max_iterations=self.solver_max_iter,
                             residual_tolerance=self.solver_tol, init=self.solver_init,
                             seed=(self.seed + index) % (U64_MAX + 1), mode=self.solver_mode,
                             residual_scaling=self.solver_residual_scaling)

    def points(self) -> list:
        """``(beta, delta)`` for each schedule entry (or the single configured pair)."""
        if not self.schedule:
            return [(self.beta, self.delta)]
        if self.schedule_param == "beta":
            return [(v, self.delta) for v in self.schedule]
        return [(self.beta, v) for v in self.schedule]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _floats(text: str, key: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigurationError(f"{key}: expected numbers, got {text!r}") from None


def _float(text: str, key: str) -> float:
    vals = _floats(text, key)
    if len(vals) != 1:
        raise ConfigurationError(f"{key}: expected one number, got {text!r}")
    return vals[0]


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        try:
            f = float(text)
        except ValueError:
            raise ConfigurationError(f"{key}: expected an integer, got {text!r}") from None
        if f != int(f):
            raise ConfigurationError(f"{key}: expected an integer, got {text!r}") from None
        return int(f)


def parse_text(text: str, source: Optional[str] = None) -> ExperimentConfig:
    return from_mapping(parse_raw(text), source)


def parse_raw(text: str) -> dict:
    """``key -> value`` strings, with unknown and duplicate keys rejected."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def from_mapping(raw: dict, source: Optional[str] = None) -> ExperimentConfig:
    kw = {"source": source}
    conv = {
        "dim": ("dim", _int), "beta": ("beta", _float), "delta": ("delta", _float),
        "gamma": ("gamma", _float), "grid.n": ("grid_n", _int), "grid.L": ("grid_L", _float),
        "solver.tau": ("solver_tau", _float), "solver.tol": ("solver_tol", _float),
        "solver.max_iter": ("solver_max_iter", _int), "profile.delta_inf": ("profile_delta_inf", _float),
        "assert.final_l2": ("assert_final_l2", _float),
    }
    for key, value in raw.items():
        value = str(value).strip()
        if key in conv:
            name, fn = conv[key]
            kw[name] = fn(value, key)
        elif key == "mode":
            kw["mode"] = value
        elif key == "potential":
            kw["potential"] = value.lower()
        elif key == "domain":
            kw["domain"] = _floats(value, key)
        elif key == "solver.init":
            kw["solver_init"] = value
        elif key == "solver.mode":
            kw["solver_mode"] = value
        elif key == "solver.residual_scaling":
            kw["solver_residual_scaling"] = value
        elif key == "seed":
            kw["seed"] = _int(value, key)
        elif key == "out_dir":
            kw["out_dir"] = value
        elif key == "case":
            kw["case"] = value
        elif key == "schedule":
            if ":" not in value:
                raise ConfigurationError("schedule: expected 'beta: v1, v2, ...' or 'delta: v1, v2, ...'")
            name, vals = (p.strip() for p in value.split(":", 1))
            kw["schedule_param"] = name
            kw["schedule"] = _floats(vals, key)
        elif key == "thresholds":
            kw["thresholds"] = _floats(value, key)
        elif key == "probe.eps":
            kw["probe_eps"] = _floats(value, key)
        elif key == "assert.metric":
            kw["assert_metric"] = value.lower()
        elif key == "criteria":
            kw["criteria"] = tuple(_int(t.strip(), key) for t in value.split(",") if t.strip())
        else:  # pragma: no cover - KEYS and this table are kept in sync
            raise ConfigurationError(f"unknown key {key!r}")
    cfg = ExperimentConfig(**kw)
    validate_config(cfg)
    return cfg


def load(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read a config file; ``overrides`` (raw key -> value) win over the file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from None
    raw = parse_raw(text)
    raw.update({k: str(v) for k, v in (overrides or {}).items()})
    return from_mapping(raw, source=path)


def validate_config(cfg: ExperimentConfig):
    if cfg.mode not in MODES_CLI:
        raise ConfigurationError(f"mode must be one of {MODES_CLI}")
    if cfg.dim not in (1, 2, 3):
        raise ConfigurationError("dim must be 1, 2 or 3")
    if cfg.potential not in ("harmonic", "box", "zero"):
        raise ConfigurationError("potential must be harmonic, box or zero")
    if len(cfg.domain) != 2 or not cfg.domain[1] > cfg.domain[0]:
        raise ConfigurationError("domain must be 'a, b' with b > a")
    if cfg.grid_n < 8:
        raise ConfigurationError("grid.n must be >= 8")
    if not cfg.grid_L > 0:
        raise ConfigurationError("grid.L must be positive")
    if cfg.solver_init not in INIT_KINDS:
        raise ConfigurationError(f"solver.init must be one of {INIT_KINDS}")
    if cfg.solver_mode not in MODES:
        raise ConfigurationError(f"solver.mode must be one of {MODES}")
    if not 0 <= cfg.seed <= U64_MAX:
        raise ConfigurationError("seed must be an unsigned 64-bit integer")
    if cfg.schedule_param not in (None, "beta", "delta"):
        raise ConfigurationError("schedule parameter must be beta or delta")
    if cfg.mode == "sweep":
        if not cfg.schedule:
            raise ConfigurationError("sweep mode needs a non-empty schedule")
        if cfg.case is None:
            raise ConfigurationError("sweep mode needs a case")
        mags = [abs(v) for v in cfg.schedule]
        if any(b <= a for a, b in zip(mags, mags[1:])):
            raise ConfigurationError("schedule must be strictly monotone in magnitude (increasing)")
    if len(cfg.thresholds) != 2:
        raise ConfigurationError("thresholds must be 'low, high'")
    if cfg.assert_metric not in ("l2", "h1"):
        raise ConfigurationError("assert.metric must be l2 or h1")


def ensure_writable(path: str) -> str:
    """Create ``path`` if needed and check it is a writable directory (before any solve)."""
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OSError(f"output directory {path!r} is not writable: {exc}") from None
    if not os.path.isdir(path) or not os.access(path, os.W_OK):
        raise OSError(f"output directory {path!r} is not writable")
    return path

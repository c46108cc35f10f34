"""Regime-convergence sweeps and density distances.

A sweep solves the ground state for each value of a monotone parameter
schedule, maps it through the case's rescaling, and measures the distance of
the rescaled density to the case's limiting profile.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import grid as gridmod
from .. import profiles, regimes
from ..errors import ConfigurationError, MGPEError, PreconditionError
from ..grid import Grid, SampledFunction
from ..solver import minimize
from .config import ExperimentConfig, ensure_writable

NORMS = ("L2", "H1")


@dataclass(frozen=True)
class ConvergenceRecord:
    param: float
    eps: float
    case: str
    dist_l2: float
    dist_h1: float
    energy: float
    mu: float
    iterations: int
    failed: bool = False
    error: str = ""

    def __post_init__(self):
        if not self.failed and not (self.dist_l2 >= 0 and self.dist_h1 >= 0):
            raise PreconditionError("distances must be nonnegative")


def _resample(f: SampledFunction, target: Grid) -> SampledFunction:
    lo, hi = max(f.grid.a, target.a), min(f.grid.b, target.b)
    if not hi > lo:
        raise ConfigurationError("grids do not overlap; cannot compare densities")
    return SampledFunction(target, np.interp(target.x, f.grid.x, f.values, left=0.0, right=0.0))


def density_distance(rho1: SampledFunction, rho2: SampledFunction, norm: str = "L2") -> float:
    """``||rho1 - rho2||`` in L2 or H1; ``rho2`` is resampled onto ``rho1``'s grid if needed."""
    key = norm.upper()
    if key not in NORMS:
        raise ConfigurationError(f"norm must be one of {NORMS}")
    if rho1.grid.kind != rho2.grid.kind or rho1.grid.dim != rho2.grid.dim:
        raise ConfigurationError("densities live on incompatible grids")
    if not rho1.grid.same_nodes(rho2.grid):
        rho2 = _resample(rho2, rho1.grid)
    g = rho1.grid
    e = np.asarray(rho1.values) - np.asarray(rho2.values)
    l2 = gridmod.inner(g, e, e)
    if key == "L2":
        return math.sqrt(max(l2, 0.0))
    de = gridmod.diff_array(e, g.h, even_at_left=(g.kind == gridmod.RADIAL))
    return math.sqrt(max(l2 + gridmod.inner(g, de, de), 0.0))


# --- limiting profiles per case --------------------------------------------------------

def limiting_profile(case: str, cfg: ExperimentConfig, params=None) -> profiles.LimitingProfile:
    """The limiting density a sweep of ``case`` is compared against."""
    pot = cfg.make_potential()
    d = cfg.dim
    if case.startswith("B"):
        if cfg.potential != "box":
            raise ConfigurationError("B cases need potential = box")
        if case in ("B1'",):
            return profiles.profile_case1prime(d)
        base = {"B3'": "B3"}.get(case, case)
        delta_inf = cfg.profile_delta_inf
        if base in ("B2", "B2'") and delta_inf is None:
            if params is None:
                raise ConfigurationError(f"{case} needs profile.delta_inf")
            delta_inf = abs(params.delta / params.beta)
        return profiles.profile_box(base, delta_inf, omega=cfg.domain)
    if cfg.potential == "box":
        raise ConfigurationError("C cases need a whole-space potential")
    if case == "C1":
        return profiles.tf_case1(pot, d)
    if case in ("C3", "C3'"):
        return profiles.profile_case3(pot, d)
    if case == "C1'":
        return profiles.profile_case1prime(d)
    if case in ("C2", "C2'"):
        delta_inf = cfg.profile_delta_inf
        if delta_inf is None:
            if params is None:
                raise ConfigurationError(f"{case} needs profile.delta_inf")
            delta_inf = params.delta / abs(params.beta) ** regimes.critical_exponent(d)
        if case == "C2":
            return profiles.profile_case2(delta_inf, pot, d)
        return profiles.profile_case2prime(delta_inf, pot, d)
    raise ConfigurationError(f"case {case!r} has no implemented limiting profile")


def sweep_grid(cfg: ExperimentConfig, eps: float, direction: str) -> Grid:
    """Physical grid whose rescaled image is ``[-grid.L, grid.L]`` (or the box)."""
    if cfg.potential == "box":
        a, b = cfg.domain
        return gridmod.make_grid(a, b, cfg.grid_n, gridmod.BOX)
    if direction == regimes.UP:
        half = cfg.grid_L / eps
    elif direction == regimes.DOWN:
        half = cfg.grid_L * eps
    else:
        half = cfg.grid_L
    return gridmod.symmetric_grid(half, cfg.grid_n)


def run_point(cfg: ExperimentConfig, index: int, profile=None) -> ConvergenceRecord:
    """Solve, rescale and measure one schedule entry (a pure computation)."""
    beta, delta = cfg.points()[index]
    param = cfg.schedule[index] if cfg.schedule else (beta if cfg.schedule_param == "beta" else delta)
    case = cfg.case
    eps, direction = regimes.eps_for_case(case, beta, delta, cfg.dim)
    try:
        params = cfg.params(beta, delta)
        prof = profile if profile is not None else limiting_profile(case, cfg, params)
        g = sweep_grid(cfg, eps, direction)
        res = minimize(params, cfg.make_potential(), g, cfg.solver_options(index))
        f = res.field if direction == regimes.IDENTITY else regimes.rescale(res.field, eps, direction)
        rho = SampledFunction(f.grid, np.asarray(f.values) ** 2)
        ref = prof.on_grid(f.grid)
        return ConvergenceRecord(float(param), float(eps), case, density_distance(rho, ref, "L2"),
                                 density_distance(rho, ref, "H1"), res.energy.total, res.mu, res.iterations)
    except (MGPEError, FloatingPointError, np.linalg.LinAlgError) as exc:
        return ConvergenceRecord(float(param), float(eps), case, math.nan, math.nan, math.nan, math.nan, -1,
                                 failed=True, error=f"{type(exc).__name__}: {exc}")


def thread_count(npoints: int) -> int:
    raw = os.environ.get("MGPE_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            raise ConfigurationError("MGPE_THREADS must be a positive integer") from None
    return max(1, min(cap, npoints))


def distances(records, metric: str = "l2") -> list:
    return [r.dist_h1 if metric == "h1" else r.dist_l2 for r in records]


def is_decreasing(values, strict: bool = True) -> bool:
    vals = list(values)
    if any(math.isnan(v) for v in vals):
        return False
    pairs = zip(vals, vals[1:])
    return all(b < a for a, b in pairs) if strict else all(b <= a for a, b in pairs)


def run_sweep(config: ExperimentConfig, out_dir: Optional[str] = None, emit: bool = False) -> list:
    """Run every schedule point; records come back in schedule order.

    Points may run concurrently (``MGPE_THREADS`` caps the pool).  A failing
    point is recorded with ``failed=True`` and the sweep continues.  With
    ``emit`` the output directory is checked before any solve and the report
    is written afterwards.
    """
    if config.case is None:
        raise ConfigurationError("a sweep needs a case")
    if not config.schedule:
        raise ConfigurationError("a sweep needs a non-empty schedule")
    target = out_dir or config.out_dir
    if emit:
        ensure_writable(target)
    n = len(config.schedule)
    shared = None
    if config.case not in ("C2", "C2'", "B2", "B2'") or config.profile_delta_inf is not None:
        shared = limiting_profile(config.case, config)
    workers = thread_count(n)
    if workers == 1:
        records = [run_point(config, i, shared) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(run_point, config, i, shared): i for i in range(n)}
            done = {futures[f]: f.result() for f in futures}
        records = [done[i] for i in range(n)]
    tail = distances(records, config.assert_metric)[1:]
    if not is_decreasing(tail, strict=False):
        warnings.warn(f"{config.case} sweep: distances are not non-increasing from the second entry on",
                      RuntimeWarning, stacklevel=2)
    if emit:
        from .report import emit_report
        emit_report(records, config, target)
    return records

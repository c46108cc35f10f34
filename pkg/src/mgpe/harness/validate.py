"""The acceptance suite: thirteen numbered checks with literal thresholds.

Each ``criterion_N`` returns a :class:`CriterionResult` carrying the measured
quantity next to its threshold, so a failure shows by how much it missed.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .. import grid as gridmod
from .. import model, profiles, regimes
from ..model import Box, Harmonic, PhysicalParams
from ..solver import SolverOptions, minimize
from .config import ExperimentConfig, from_mapping
from .report import csv_text, fmt, write_text
from .sweep import distances, is_decreasing, run_sweep

CRITERIA_CSV = "criteria.csv"
SWEEPS_CSV = "sweeps.csv"
CRITERIA_HEADER = "criterion,name,status,value,threshold"


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    value: float
    threshold: str
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    records: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.name}: value={self.value:.6g} threshold {self.threshold}"


# --- fixed experiment set-ups ---------------------------------------------------------------

HARMONIC = Harmonic((1.0,))
BOX = Box((0.0, 1.0))


def _whole(n: int = 513, half: float = 12.0):
    return gridmod.symmetric_grid(half, n)


def _box(n: int = 257):
    return gridmod.make_grid(0.0, 1.0, n, gridmod.BOX)


def _density(res):
    return np.asarray(res.field.values) ** 2


def _l2(grid, a, b) -> float:
    return gridmod.l2_norm(grid, a - b)


SWEEP_CONFIGS = {
    5: {"mode": "sweep", "case": "C1", "delta": "1", "schedule": "beta: 1e2, 1e3, 1e4", "grid.n": "1025",
        "grid.L": "2.5", "solver.residual_scaling": "relative", "assert.final_l2": "0.05", "assert.metric": "l2"},
    6: {"mode": "sweep", "case": "C3", "beta": "0", "schedule": "delta: 1e2, 1e3, 1e4", "grid.n": "1025",
        "grid.L": "3", "solver.residual_scaling": "relative", "assert.final_l2": "0.05", "assert.metric": "h1"},
    7: {"mode": "sweep", "case": "C1'", "delta": "1", "schedule": "beta: -1e2, -1e3, -1e4", "grid.n": "1025",
        "grid.L": "6", "solver.residual_scaling": "relative", "assert.final_l2": "0.05", "assert.metric": "l2"},
    8: {"mode": "sweep", "case": "B3", "beta": "0", "potential": "box", "domain": "0, 1",
        "schedule": "delta: 1e2, 1e3", "grid.n": "1025", "solver.residual_scaling": "relative",
        "assert.final_l2": "0.05", "assert.metric": "l2"},
}


def sweep_config(number: int, seed: int = 0) -> ExperimentConfig:
    raw = dict(SWEEP_CONFIGS[number])
    raw["seed"] = str(seed)
    return from_mapping(raw, source=f"criterion-{number}")


# --- criteria -------------------------------------------------------------------------------

def criterion_1(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    # a random start: the Gaussian guess would already be the exact answer
    res_h = minimize(PhysicalParams(0.0, 0.0), HARMONIC, _whole(), SolverOptions(init="random", seed=seed))
    t_h = time.perf_counter() - t0
    t1 = time.perf_counter()
    res_b = minimize(PhysicalParams(0.0, 0.0), BOX, _box(), SolverOptions(init="random", seed=seed))
    t_b = time.perf_counter() - t1
    err_h = abs(res_h.energy.total - 0.5)
    err_b = abs(res_b.energy.total - math.pi**2 / 2)
    ok = err_h <= 1e-6 and err_b <= 1e-6 and t_h < 10 and t_b < 10
    return CriterionResult(1, "linear sanity", ok, max(err_h, err_b), "<= 1e-06 (each < 10 s)",
                           {"harmonic_error": err_h, "box_error": err_b, "iterations": (res_h.iterations, res_b.iterations),
                            "harmonic_seconds": t_h,
                            "box_seconds": t_b})


MU_CASES = [
    (HARMONIC, (0.0, 0.0)), (HARMONIC, (1.0, 1.0)), (HARMONIC, (10.0, 1.0)), (HARMONIC, (1.0, 10.0)),
    (HARMONIC, (-1.0, 1.0)), (HARMONIC, (100.0, 0.5)), (BOX, (10.0, 10.0)), (BOX, (-5.0, 1.0)),
]


def _solve_case(pot, beta, delta, **opts):
    g = _box() if isinstance(pot, Box) else _whole()
    return minimize(PhysicalParams(beta, delta), pot, g, SolverOptions(**opts))


def criterion_2(seed: int = 0) -> CriterionResult:
    """``<H phi, phi> - E`` against the contact + HOI integrals."""
    worst, per = 0.0, {}
    for pot, (beta, delta) in MU_CASES:
        res = _solve_case(pot, beta, delta)
        g = res.field.grid
        phi = np.asarray(res.field.values)
        hphi = model.apply_hamiltonian(g, phi, model.potential_values(pot, g), beta, delta)
        mu_op = gridmod.inner(g, hphi, phi)
        e = res.energy
        gap = abs((mu_op - e.total) - (e.contact + e.hoi))
        per[f"{type(pot).__name__}({beta:g},{delta:g})"] = gap
        worst = max(worst, gap)
    return CriterionResult(2, "mu identity", worst <= 1e-10, worst, "<= 1e-10", per)


def criterion_3(seed: int = 0) -> CriterionResult:
    mass_err, rise, per = 0.0, -math.inf, {}
    for pot, (beta, delta) in MU_CASES:
        for mode in ("direct", "transformed") if delta > 0 else ("direct",):
            res = _solve_case(pot, beta, delta, mode=mode, residual_scaling="relative")
            m = float(np.max(res.trace.mass_errors))
            r = float(np.max(res.trace.accepted_changes)) if len(res.trace.accepted_changes) else 0.0
            per[f"{type(pot).__name__}({beta:g},{delta:g}) {mode}"] = (m, r)
            mass_err, rise = max(mass_err, m), max(rise, r)
    ok = mass_err <= 1e-12 and rise <= 1e-12
    return CriterionResult(3, "mass and monotonicity", ok, max(mass_err, rise),
                           "mass <= 1e-12 and energy rise <= 1e-12",
                           {"max_mass_error": mass_err, "max_energy_rise": rise, "runs": per})


def criterion_4(seed: int = 0) -> CriterionResult:
    g = _whole(513, 10.0)
    rhos = []
    for k in range(5):
        res = minimize(PhysicalParams(1.0, 1.0), HARMONIC, g,
                       SolverOptions(init="random", seed=seed + k, residual_tolerance=1e-10))
        rhos.append(_density(res))
    worst = max(_l2(g, a, b) for a, b in itertools.combinations(rhos, 2))
    return CriterionResult(4, "uniqueness", worst <= 1e-6, worst, "<= 1e-06 (pairwise L2 in density)")


def _sweep_criterion(number: int, name: str, metric: str, seed: int, runtime_cap: Optional[float] = None):
    cfg = sweep_config(number, seed)
    t0 = time.perf_counter()
    records = run_sweep(cfg)
    secs = time.perf_counter() - t0
    dist = distances(records, metric)
    final = records[-1].dist_l2
    ok = (not any(r.failed for r in records) and is_decreasing(dist) and final <= 0.05
          and (runtime_cap is None or secs < runtime_cap))
    thr = f"{metric} strictly decreasing, final L2 <= 0.05" + (f", < {runtime_cap:g} s" if runtime_cap else "")
    return CriterionResult(number, name, ok, final, thr,
                           {"metric": metric, "distances": dist, "l2": distances(records, "l2"),
                            "seconds": secs}, records=records)


def criterion_5(seed: int = 0):
    return _sweep_criterion(5, "case C1 sweep", "l2", seed, runtime_cap=300.0)


def criterion_6(seed: int = 0):
    return _sweep_criterion(6, "case C3 sweep", "h1", seed)


def criterion_7(seed: int = 0):
    return _sweep_criterion(7, "case C1' sweep", "l2", seed)


def criterion_8(seed: int = 0):
    return _sweep_criterion(8, "box B3 sweep", "l2", seed)


def criterion_9(seed: int = 0) -> CriterionResult:
    pts = regimes.nonexistence_probe(PhysicalParams(0.0, -1.0), HARMONIC, eps_list=(1.0, 0.5, 0.1, 0.05, 0.01))
    diag = regimes.probe_diagnostics(pts)
    dev_total = abs(diag["slope_total"] / -3.0 - 1.0)
    dev_hoi = abs(diag["slope_hoi"] / -3.0 - 1.0)
    ok = diag["min_energy"] < -1e3 and diag["monotone"] and dev_total <= 0.05 and dev_hoi <= 0.05
    return CriterionResult(9, "non-existence probe", ok, diag["slope_total"],
                           "E < -1e3, monotone, slope within 5% of -3",
                           {**diag, "energies": [p.energy for p in pts]})


def all_profiles() -> list:
    h = HARMONIC
    out = []
    for d in (1, 3):
        out += [profiles.tf_case1(h, d), profiles.profile_case2(1.0, h, d), profiles.profile_case3(h, d),
                profiles.profile_case1prime(d), profiles.profile_case2prime(1.0, h, d)]
    out += [profiles.profile_case2(0.1, h, 1), profiles.profile_case2(1e-4, h, 1), profiles.profile_case2(10.0, h, 1),
            profiles.profile_case3(h, 1, method="shoot"), profiles.profile_delta_limit(-2.0, 1),
            profiles.profile_case2prime(1.0, None, 1)]
    out += [profiles.profile_box("B1"), profiles.profile_box("B2", 1.0), profiles.profile_box("B2", 0.01),
            profiles.profile_box("B3"), profiles.profile_box("B2'", 0.01)]
    return out


def boundary_defect(p: profiles.LimitingProfile) -> float:
    """Largest violation of the profile's edge conditions.

    Whole-space: ``rho(x0) = 0`` (and ``rho'(x0) = 0`` with a gradient term),
    ``rho'(0) = 0``.  Box: Dirichlet at the walls when there is a gradient
    term; an interior support (B2') also needs ``rho' = 0`` there.
    """
    if p.radial:
        vals = [p.rho[-1], p.drho[0]] + ([p.drho[-1]] if p.kappa > 0 else [])
    elif p.kappa == 0:
        vals = [0.0]
    else:
        vals = [p.rho[0], p.rho[-1]]
        interior = p.nodes[0] > p.support[0] or p.nodes[-1] < p.support[1]
        if interior:
            vals += [p.drho[0], p.drho[-1]]
    return float(np.max(np.abs(vals)))


def criterion_10(seed: int = 0) -> CriterionResult:
    worst = {"mass": 0.0, "boundary": 0.0, "ode": 0.0, "multiplier": 0.0}
    per = {}
    for p in all_profiles():
        parts = profiles.independent_energy_parts(p)
        vals = {"mass": abs(parts["mass"] - 1.0), "boundary": boundary_defect(p),
                "ode": float(np.max(np.abs(profiles.ode_residual(p)))), "multiplier": abs(profiles.multiplier_defect(p))}
        per[f"{p.case} d={p.dim} {p.method}" + (f" dinf={p.delta_inf:g}" if p.delta_inf else "")] = vals
        for k, v in vals.items():
            worst[k] = max(worst[k], v)
    ok = worst["mass"] <= 1e-10 and worst["boundary"] <= 1e-8 and worst["ode"] <= 1e-8 and worst["multiplier"] <= 1e-8
    return CriterionResult(10, "profile self-consistency", ok, max(worst.values()),
                           "mass <= 1e-10, boundary/ODE/multiplier <= 1e-8", {"worst": worst, "profiles": per})


def criterion_11(seed: int = 0) -> CriterionResult:
    g = _whole(513, 10.0)
    de_max, dr_max, per = 0.0, 0.0, {}
    for beta, delta in itertools.product((0.1, 1.0, 10.0), repeat=2):
        opts = SolverOptions(residual_tolerance=1e-10)
        a = minimize(PhysicalParams(beta, delta), HARMONIC, g, opts)
        b = minimize(PhysicalParams(beta, delta), HARMONIC, g, SolverOptions(residual_tolerance=1e-10,
                                                                              mode="transformed"))
        de = abs(a.energy.total - b.energy.total)
        dr = _l2(g, _density(a), _density(b))
        per[f"({beta:g},{delta:g})"] = (de, dr)
        de_max, dr_max = max(de_max, de), max(dr_max, dr)
    ok = de_max <= 1e-6 and dr_max <= 1e-5
    return CriterionResult(11, "transform equivalence", ok, max(de_max, dr_max),
                           "energy <= 1e-06, density L2 <= 1e-05",
                           {"max_energy_gap": de_max, "max_density_gap": dr_max, "pairs": per})


def criterion_12(seed: int = 0) -> CriterionResult:
    res = minimize(PhysicalParams(1.0, 1.0), HARMONIC, _whole(1025, 12.0), SolverOptions(residual_tolerance=1e-10))
    # density window [1e-10, 1e-3] is the amplitude window [1e-5, 10^-1.5]
    fit = model.decay_fit(res.field, window=(math.sqrt(1e-10), math.sqrt(1e-3)))
    r2 = fit.r_squared if fit is not None else 0.0
    return CriterionResult(12, "decay diagnostic", r2 >= 0.99, r2, ">= 0.99 (r^2 over density [1e-10, 1e-3])",
                           {"alpha": fit.alpha if fit else math.nan, "npoints": fit.npoints if fit else 0})


def determinism_outputs(seed: int = 0, numbers=(5, 6, 7, 8)) -> str:
    """The sweep CSV that ``validate`` emits (no timings, so it is reproducible)."""
    out = []
    for k in numbers:
        out.append(csv_text(run_sweep(sweep_config(k, seed))))
    return "".join(out)


def criterion_13(seed: int = 0) -> CriterionResult:
    with tempfile.TemporaryDirectory() as tmp:
        blobs = []
        for run in range(2):
            path = os.path.join(tmp, f"run{run}.csv")
            write_text(path, determinism_outputs(seed))
            with open(path, "rb") as fh:
                blobs.append(fh.read())
    same = blobs[0] == blobs[1]
    return CriterionResult(13, "determinism", same, 0.0 if same else 1.0, "byte-identical CSV",
                           {"bytes": len(blobs[0])})


CRITERIA: dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
    13: criterion_13,
}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number](seed)
    res.seconds = time.perf_counter() - t0
    return res


def run_validation(numbers=None, seed: int = 0) -> list:
    numbers = sorted(CRITERIA) if not numbers else list(numbers)
    return [run_criterion(k, seed) for k in numbers]


def criteria_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CRITERIA_HEADER.split(","))
    for r in results:
        w.writerow([r.number, r.name, "PASS" if r.passed else "FAIL", fmt(r.value), r.threshold])
    return buf.getvalue()


def emit_validation(results, out_dir: str) -> dict:
    """``criteria.csv`` (no timings), ``sweeps.csv`` and ``summary.txt``."""
    sweeps = "".join(csv_text(r.records) for r in results if r.records)
    paths = {"criteria": os.path.join(out_dir, CRITERIA_CSV), "sweeps": os.path.join(out_dir, SWEEPS_CSV),
             "summary": os.path.join(out_dir, "summary.txt")}
    write_text(paths["criteria"], criteria_csv(results))
    write_text(paths["sweeps"], sweeps)
    write_text(paths["summary"], "\n".join(r.line() for r in results) + "\n")
    return paths

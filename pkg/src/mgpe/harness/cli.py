"""``mgpe <subcommand> --config <path> [--out <dir>] [--seed <u64>]``.

Exit status: 0 when every declared assertion passes, 1 when one fails (or a
solve does not converge), 2 for configuration / I/O errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .. import grid as gridmod
from .. import profiles, regimes
from ..errors import ConfigurationError, ConvergenceError, MGPEError
from ..solver import minimize
from . import report, sweep, validate
from .config import MODES_CLI, ensure_writable, load

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _write_columns(path: str, header: str, columns):
    rows = [header] + [",".join(report.fmt(v) for v in row) for row in zip(*columns)]
    report.write_text(path, "\n".join(rows) + "\n")


def _finish(out_dir: str, lines: list, checks: list) -> int:
    lines = lines + [c.line() for c in checks]
    report.write_text(os.path.join(out_dir, report.SUMMARY_NAME), "\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def _grid(cfg):
    if cfg.potential == "box":
        return gridmod.make_grid(cfg.domain[0], cfg.domain[1], cfg.grid_n, gridmod.BOX)
    return gridmod.symmetric_grid(cfg.grid_L, cfg.grid_n)


def cmd_solve(cfg, out_dir) -> int:
    g = _grid(cfg)
    try:
        res = minimize(cfg.params(), cfg.make_potential(), g, cfg.solver_options())
    except ConvergenceError as exc:
        return _finish(out_dir, [f"error: {exc}"], [report.Assertion("converged", False, str(exc))])
    phi = np.asarray(res.field.values)
    _write_columns(os.path.join(out_dir, "solution.csv"), "x,phi,rho", (g.x, phi, phi * phi))
    e = res.energy
    lines = [f"beta: {report.fmt(cfg.beta)}", f"delta: {report.fmt(cfg.delta)}",
             f"energy: {report.fmt(e.total)}", f"kinetic: {report.fmt(e.kinetic)}",
             f"potential: {report.fmt(e.potential)}", f"contact: {report.fmt(e.contact)}",
             f"hoi: {report.fmt(e.hoi)}", f"mu: {report.fmt(res.mu)}",
             f"residual: {report.fmt(res.residual_norm)}", f"iterations: {res.iterations}", f"mode: {res.mode}"]
    if res.decay_fit is not None:
        lines.append(f"decay: alpha={report.fmt(res.decay_fit.alpha)} r2={report.fmt(res.decay_fit.r_squared)}")
    return _finish(out_dir, lines, [report.Assertion("converged", True),
                                    report.Assertion("monotone", res.trace.is_monotone())])


def _profile(cfg):
    if cfg.case is None:
        raise ConfigurationError("profile mode needs a case")
    if cfg.case == "delta-limit":
        return profiles.profile_delta_limit(cfg.beta, cfg.dim)
    return sweep.limiting_profile(cfg.case, cfg, cfg.params())


def cmd_profile(cfg, out_dir) -> int:
    p = _profile(cfg)
    _write_columns(os.path.join(out_dir, "profile.csv"), "x,rho,drho", (p.nodes, p.rho, p.drho))
    ode = float(np.max(np.abs(profiles.ode_residual(p))))
    mult = abs(profiles.multiplier_defect(p))
    mass = abs(p.mass() - 1.0)
    bnd = validate.boundary_defect(p)
    lines = [f"case: {p.case}", f"dim: {p.dim}", f"method: {p.method}", f"mu: {report.fmt(p.mu)}",
             f"support: {report.fmt(p.support[0])} {report.fmt(p.support[1])}",
             f"energy: {report.fmt(p.energy)}"]
    checks = [report.Assertion("mass", mass <= 1e-10, "%.3e" % mass),
              report.Assertion("boundary", bnd <= 1e-8, "%.3e" % bnd),
              report.Assertion("ode_residual", ode <= 1e-8, "%.3e" % ode),
              report.Assertion("multiplier", mult <= 1e-8, "%.3e" % mult)]
    return _finish(out_dir, lines, checks)


def cmd_sweep(cfg, out_dir) -> int:
    records = sweep.run_sweep(cfg, out_dir=out_dir)
    paths = report.emit_report(records, cfg, out_dir)
    with open(paths["summary"], encoding="utf-8") as fh:
        print(fh.read(), end="")
    return EXIT_OK if paths["passed"] else EXIT_FAIL


def cmd_classify(cfg, out_dir) -> int:
    rep = regimes.classify(cfg.params(), cfg.domain_kind, cfg.thresholds)
    lines = [f"case: {rep.case}", f"eps: {report.fmt(rep.eps)}", f"ratio: {report.fmt(rep.ratio)}",
             f"delta_inf: {'none' if rep.delta_inf is None else report.fmt(rep.delta_inf)}",
             f"direction: {rep.direction}", f"dim: {rep.dim}", f"domain: {rep.domain_kind}"]
    if rep.note:
        lines.append(f"note: {rep.note}")
    return _finish(out_dir, lines, [])


def cmd_probe(cfg, out_dir) -> int:
    pts = regimes.nonexistence_probe(cfg.params(), cfg.make_potential(), eps_list=cfg.probe_eps)
    _write_columns(os.path.join(out_dir, "probe.csv"), "eps,energy,kinetic,potential,contact,hoi",
                   ([p.eps for p in pts], [p.energy for p in pts], [p.kinetic for p in pts],
                    [p.potential for p in pts], [p.contact for p in pts], [p.hoi for p in pts]))
    diag = regimes.probe_diagnostics(pts)
    target = -(2.0 + cfg.dim)
    slope = diag["slope_total"]
    ok_slope = not math.isnan(slope) and abs(slope / target - 1.0) <= 0.05
    lines = [f"min_energy: {report.fmt(diag['min_energy'])}", f"slope_total: {report.fmt(slope)}",
             f"slope_hoi: {report.fmt(diag['slope_hoi'])}"]
    checks = [report.Assertion("monotone", diag["monotone"]),
              report.Assertion("slope", ok_slope, "%.4f vs %g" % (slope, target))]
    return _finish(out_dir, lines, checks)


def cmd_validate(cfg, out_dir) -> int:
    results = []
    for k in (cfg.criteria or sorted(validate.CRITERIA)):
        r = validate.run_criterion(k, cfg.seed)
        print(r.line(), flush=True)
        results.append(r)
    validate.emit_validation(results, out_dir)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {"solve": cmd_solve, "profile": cmd_profile, "sweep": cmd_sweep, "classify": cmd_classify,
            "probe": cmd_probe, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mgpe", description="MGPE ground states with higher-order interaction.")
    ap.add_argument("command", choices=MODES_CLI)
    ap.add_argument("--config", required=True, help="flat key = value configuration file")
    ap.add_argument("--out", help="output directory (overrides out_dir)")
    ap.add_argument("--seed", help="unsigned 64-bit seed (overrides seed)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"mode": args.command}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        cfg = load(args.config, overrides)
        out_dir = ensure_writable(cfg.out_dir)
    except (ConfigurationError, OSError) as exc:
        print(f"mgpe: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](cfg, out_dir)
    except (ConfigurationError, OSError) as exc:
        print(f"mgpe: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except MGPEError as exc:
        print(f"mgpe: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

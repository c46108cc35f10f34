"""CSV / summary / gnuplot emission for sweep records."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

from ..errors import PreconditionError
from .config import ExperimentConfig, ensure_writable
from .sweep import distances, is_decreasing

CSV_HEADER = "param,eps,case,dist_l2,dist_h1,energy,mu,iters"
CSV_NAME = "sweep.csv"
SUMMARY_NAME = "summary.txt"
GNUPLOT_NAME = "sweep.gp"


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double exactly."""
    return "%.17g" % x


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tail = f"  ({self.detail})" if self.detail else ""
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}{tail}"


def csv_text(records) -> str:
    rows = [CSV_HEADER]
    for r in records:
        rows.append(",".join([fmt(r.param), fmt(r.eps), r.case, fmt(r.dist_l2), fmt(r.dist_h1),
                              fmt(r.energy), fmt(r.mu), str(r.iterations)]))
    return "\n".join(rows) + "\n"


def assertions(records, config: ExperimentConfig) -> list:
    """Declared assertions of a sweep: no failed points, monotone distances, final bound."""
    failed = [r for r in records if r.failed]
    out = [Assertion("solves", not failed, f"{len(failed)} failed" if failed else "")]
    metric = config.assert_metric
    dist = distances(records, metric)
    out.append(Assertion("monotone", is_decreasing(dist), f"{metric} " + ", ".join("%.3e" % d for d in dist)))
    if config.assert_final_l2 is not None:
        last = records[-1].dist_l2
        ok = not math.isnan(last) and last <= config.assert_final_l2
        out.append(Assertion("final_l2", ok, "%.3e <= %g" % (last, config.assert_final_l2)))
    return out


def gnuplot_script(csv_name: str = CSV_NAME) -> str:
    return (
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set key autotitle columnhead\n"
        "set xlabel 'parameter magnitude'\n"
        "set ylabel 'density distance'\n"
        f"plot '{csv_name}' using (abs($1)):4 with linespoints title 'L2', \\\n"
        f"     '{csv_name}' using (abs($1)):5 with linespoints title 'H1'\n"
    )


def write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def emit_report(records, config: ExperimentConfig, out_dir: str = None, gnuplot: bool = True) -> dict:
    """Write ``sweep.csv``, ``summary.txt`` and (optionally) ``sweep.gp``.

    Returns ``{"csv", "summary", "gnuplot", "assertions", "passed"}``.
    """
    records = list(records)
    if not records:
        raise PreconditionError("no records to report")
    target = ensure_writable(out_dir or config.out_dir)
    checks = assertions(records, config)
    paths = {"csv": os.path.join(target, CSV_NAME), "summary": os.path.join(target, SUMMARY_NAME),
             "gnuplot": os.path.join(target, GNUPLOT_NAME) if gnuplot else None}
    write_text(paths["csv"], csv_text(records))
    lines = [f"case: {config.case}", f"points: {len(records)}"]
    lines += [f"error at {r.param!r}: {r.error}" for r in records if r.failed]
    lines += [a.line() for a in checks]
    write_text(paths["summary"], "\n".join(lines) + "\n")
    if gnuplot:
        write_text(paths["gnuplot"], gnuplot_script())
    paths["assertions"] = checks
    paths["passed"] = all(a.passed for a in checks)
    return paths

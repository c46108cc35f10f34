"""Compiled vs pure-Python kernels: agreement and wall time.

    python benchmarks/bench_kernels.py [--repeat N]

Both backends are imported directly, so the result does not depend on
``MGPE_PURE_PYTHON``.  Exits non-zero if the compiled extension is missing
or the two backends disagree.
"""
import argparse
import sys
import timeit

import numpy as np

from mgpe import _kernels_py as py

try:
    from mgpe import _kernels as cy
except ImportError:  # extension not built
    cy = None


def tridiag_case(n, seed=0):
    rng = np.random.default_rng(seed)
    off = rng.uniform(-1.0, 0.0, n - 1)
    diag = 2.5 + rng.uniform(0.0, 1.0, n)
    rhs = rng.standard_normal(n)
    return diag, off, rhs


def rk4_case(backend, nsteps=4000):
    rho = np.empty(nsteps + 1)
    drho = np.empty(nsteps + 1)
    x0 = 2.0
    backend.rk4_radial(x0, x0 / nsteps, nsteps, 1.0, 1.0, 1.0, 3, 1.0, rho, drho)
    return rho, drho


def timed(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not built; only the Python fallback is available")
        return 1
    ok = True
    print(f"{'kernel':<28}{'python [ms]':>14}{'cython [ms]':>14}{'speed-up':>10}{'max |diff|':>13}")
    for n in (1023, 4095, 16383):
        diag, off, rhs = tridiag_case(n)
        x_py = py.spd_tridiag_solve(diag, off, rhs)
        x_cy = cy.spd_tridiag_solve(diag, off, rhs)
        diff = float(np.max(np.abs(x_py - x_cy)))
        ok &= diff < 1e-12
        t_py = timed(lambda: py.spd_tridiag_solve(diag, off, rhs), args.repeat)
        t_cy = timed(lambda: cy.spd_tridiag_solve(diag, off, rhs), args.repeat)
        print(f"{'spd_tridiag_solve n=%d' % n:<28}{1e3 * t_py:14.3f}{1e3 * t_cy:14.3f}{t_py / t_cy:10.1f}{diff:13.2e}")
    for nsteps in (1000, 4000):
        a, da = rk4_case(py, nsteps)
        b, db = rk4_case(cy, nsteps)
        diff = float(max(np.max(np.abs(a - b)), np.max(np.abs(da - db))))
        ok &= diff < 1e-12
        t_py = timed(lambda: rk4_case(py, nsteps), args.repeat)
        t_cy = timed(lambda: rk4_case(cy, nsteps), args.repeat)
        print(f"{'rk4_radial steps=%d' % nsteps:<28}{1e3 * t_py:14.3f}{1e3 * t_cy:14.3f}{t_py / t_cy:10.1f}{diff:13.2e}")
    print("backends agree" if ok else "BACKENDS DISAGREE")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())

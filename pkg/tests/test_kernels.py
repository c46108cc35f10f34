import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgpe import _kernels_py, kernels

compiled = pytest.importorskip("mgpe._kernels")
BACKENDS = [_kernels_py, compiled]


def _system(n, seed):
    rng = np.random.default_rng(seed)
    off = rng.uniform(-1.0, 1.0, n - 1)
    diag = 2.5 + rng.uniform(0.0, 1.0, n)
    return diag, off


def _dense(diag, off):
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


@pytest.mark.parametrize("backend", BACKENDS)
def test_tridiag_solves_system(backend):
    diag, off = _system(200, 1)
    rhs = np.linspace(-1.0, 1.0, 200)
    x = backend.spd_tridiag_solve(diag, off, rhs)
    np.testing.assert_allclose(_dense(diag, off) @ x, rhs, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 300), st.integers(0, 2**32 - 1))
def test_tridiag_backends_agree(n, seed):
    diag, off = _system(n, seed)
    rhs = np.random.default_rng(seed + 1).standard_normal(n)
    np.testing.assert_allclose(compiled.spd_tridiag_solve(diag, off, rhs),
                               _kernels_py.spd_tridiag_solve(diag, off, rhs), rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_tridiag_rejects_indefinite(backend):
    with pytest.raises(np.linalg.LinAlgError):
        backend.spd_tridiag_solve(np.array([1.0, -1.0, 1.0]), np.zeros(2), np.ones(3))


@pytest.mark.parametrize("dim", [1, 3])
def test_rk4_backends_agree(dim):
    out = []
    for backend in BACKENDS:
        rho, drho = np.empty(401), np.empty(401)
        backend.rk4_radial(2.0, 0.005, 400, 0.7, 1.3, 1.0, dim, 0.9, rho, drho)
        out.append((rho, drho))
    np.testing.assert_allclose(out[0][0], out[1][0], rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(out[0][1], out[1][1], rtol=1e-13, atol=1e-15)


def test_rk4_matches_closed_form():
    # kappa rho'' = s rho - mu (no trap): rho = mu/s (1 - cosh(k (x - x0))), k = sqrt(s / kappa)
    kappa, s, mu, x0, h, n = 0.5, 2.0, 1.0, 1.0, 1e-3, 1000
    rho, drho = np.empty(n + 1), np.empty(n + 1)
    kernels.rk4_radial(x0, h, n, kappa, s, 0.0, 1, mu, rho, drho)
    r = x0 - h * np.arange(n + 1)
    k = np.sqrt(s / kappa)
    np.testing.assert_allclose(rho, mu / s * (1 - np.cosh(k * (r - x0))), atol=1e-12)


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("MGPE_PURE_PYTHON", None)
    if env_value is not None:
        env["MGPE_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "from mgpe import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_backend_selection():
    assert _backend_in_subprocess("1") == "python"
    assert _backend_in_subprocess(None) == "cython"

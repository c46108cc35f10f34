"""Pure-Python reference implementations of the compiled kernels.

Used when the Cython extension is unavailable or ``MGPE_PURE_PYTHON=1``.
Signatures match :mod:`mgpe._kernels` exactly.
"""
import numpy as np
from scipy.linalg import solveh_banded


def spd_tridiag_solve(diag, off, rhs):
    """Solve ``T x = rhs`` for a symmetric positive definite tridiagonal ``T``."""
    diag = np.asarray(diag, dtype=float)
    ab = np.zeros((2, diag.size))
    ab[0, 1:] = off
    ab[1] = diag
    return solveh_banded(ab, np.asarray(rhs, dtype=float), check_finite=False)


def rk4_radial(x0, h, nsteps, kappa, s, gamma2, dim, mu, rho_out, drho_out):
    """Integrate the linear radial profile ODE inward from ``r = x0``.

    ODE: ``kappa (rho'' + (dim-1)/r rho') = s rho - mu + gamma2 r^2 / 2``
    with ``rho(x0) = rho'(x0) = 0``.  Nodes ``r_k = x0 - k h`` for
    ``k = 0..nsteps``; results are written into ``rho_out`` / ``drho_out``
    (index k).  For ``dim == 3`` the unknown is ``w = r rho`` internally
    so that the ``2/r`` term is removed; outputs are ``w`` and ``w'``.
    """
    c = dim - 1.0 if dim != 3 else 0.0

    def rhs(r, y, dy):
        if dim == 3:
            # kappa w'' = s w - r (mu - gamma2 r^2 / 2)
            return (s * y - r * (mu - 0.5 * gamma2 * r * r)) / kappa
        damp = c / r * dy if c != 0.0 else 0.0
        return (s * y - mu + 0.5 * gamma2 * r * r) / kappa - damp

    y = 0.0
    dy = 0.0
    r = x0
    rho_out[0] = y
    drho_out[0] = dy
    hh = -h
    for k in range(1, nsteps + 1):
        k1y = dy
        k1v = rhs(r, y, dy)
        k2y = dy + 0.5 * hh * k1v
        k2v = rhs(r + 0.5 * hh, y + 0.5 * hh * k1y, k2y)
        k3y = dy + 0.5 * hh * k2v
        k3v = rhs(r + 0.5 * hh, y + 0.5 * hh * k2y, k3y)
        k4y = dy + hh * k3v
        k4v = rhs(r + hh, y + hh * k3y, k4y)
        y += hh * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        dy += hh * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        r = x0 - k * h
        rho_out[k] = y
        drho_out[k] = dy

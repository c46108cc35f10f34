# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; see ``_kernels_py`` for the reference versions."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def spd_tridiag_solve(diag, off, rhs):
    """Thomas algorithm for a symmetric positive definite tridiagonal system.

    ``rhs`` may be 1-D (n,) or 2-D (n, k); the factorization is shared.
    """
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    arr = np.array(rhs, dtype=np.float64, order="C")
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr.reshape(-1, 1)
    cdef double[:, ::1] b = arr
    cdef Py_ssize_t n = d.shape[0], m = b.shape[1], i, j
    if b.shape[0] != n or (n > 0 and e.shape[0] != n - 1):
        raise ValueError("band and right-hand side shapes do not match")
    cdef double[::1] c = np.empty(max(n, 1), dtype=np.float64)
    cdef double[::1] piv = np.empty(max(n, 1), dtype=np.float64)
    cdef double p
    if n == 0:
        return arr[:, 0] if squeeze else arr
    p = d[0]
    if not p > 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    piv[0] = p
    for i in range(1, n):
        c[i - 1] = e[i - 1] / p
        p = d[i] - e[i - 1] * c[i - 1]
        if not p > 0:
            raise np.linalg.LinAlgError("matrix is not positive definite")
        piv[i] = p
    with nogil:
        for j in range(m):
            b[0, j] = b[0, j] / piv[0]
            for i in range(1, n):
                b[i, j] = (b[i, j] - e[i - 1] * b[i - 1, j]) / piv[i]
            for i in range(n - 2, -1, -1):
                b[i, j] -= c[i] * b[i + 1, j]
    return arr[:, 0] if squeeze else arr


cdef inline double _rhs(double r, double y, double dy, double kappa, double s,
                        double gamma2, int dim, double mu) nogil:
    if dim == 3:
        return (s * y - r * (mu - 0.5 * gamma2 * r * r)) / kappa
    if dim == 1:
        return (s * y - mu + 0.5 * gamma2 * r * r) / kappa
    return (s * y - mu + 0.5 * gamma2 * r * r) / kappa - (dim - 1.0) / r * dy


def rk4_radial(double x0, double h, Py_ssize_t nsteps, double kappa, double s,
               double gamma2, int dim, double mu, double[::1] rho_out, double[::1] drho_out):
    cdef double y = 0.0, dy = 0.0, r = x0, hh = -h
    cdef double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v
    cdef Py_ssize_t k
    rho_out[0] = 0.0
    drho_out[0] = 0.0
    with nogil:
        for k in range(1, nsteps + 1):
            k1y = dy
            k1v = _rhs(r, y, dy, kappa, s, gamma2, dim, mu)
            k2y = dy + 0.5 * hh * k1v
            k2v = _rhs(r + 0.5 * hh, y + 0.5 * hh * k1y, k2y, kappa, s, gamma2, dim, mu)
            k3y = dy + 0.5 * hh * k2v
            k3v = _rhs(r + 0.5 * hh, y + 0.5 * hh * k2y, k3y, kappa, s, gamma2, dim, mu)
            k4y = dy + hh * k3v
            k4v = _rhs(r + hh, y + hh * k3y, k4y, kappa, s, gamma2, dim, mu)
            y += hh * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
            dy += hh * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
            r = x0 - k * h
            rho_out[k] = y
            drho_out[k] = dy

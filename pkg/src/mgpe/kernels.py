"""Kernel selection: compiled extension when importable, else pure Python.

Set ``MGPE_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the cross-check tests).
"""
import os

BACKEND = "python"
if os.environ.get("MGPE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import rk4_radial, spd_tridiag_solve  # noqa: F401
        BACKEND = "cython"
    except ImportError:  # extension not built
        pass
if BACKEND == "python":
    from ._kernels_py import rk4_radial, spd_tridiag_solve  # noqa: F401

__all__ = ["BACKEND", "rk4_radial", "spd_tridiag_solve"]

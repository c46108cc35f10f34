"""Uniform 1D grids, differentiation and quadrature.

Every grid includes both endpoints.  Fields used by the solver vanish at the
endpoints, so a truncated whole-space grid and a Dirichlet box grid share the
same sine-spectral Laplacian; they differ only in how the interval is read
(an artificial truncation of the real line vs. the physical domain).

Radial grids live on ``[0, R]`` and carry the dimension ``dim`` so that
:func:`integrate` can apply the surface measure ``|S^{d-1}| r^{d-1}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as sfft

from .errors import ConfigurationError

TRUNCATED = "truncated"
BOX = "box"
RADIAL = "radial"
KINDS = (TRUNCATED, BOX, RADIAL)

MIN_POINTS = 8


def sphere_area(dim: int) -> float:
    """Surface area of the unit sphere in ``dim`` dimensions (2 for d=1)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True, eq=False)
class Grid:
    a: float
    b: float
    n: int
    kind: str = TRUNCATED
    dim: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown grid kind {self.kind!r}")
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or not self.b > self.a:
            raise ConfigurationError(f"grid bounds must satisfy b > a, got ({self.a}, {self.b})")
        if int(self.n) != self.n or self.n < MIN_POINTS:
            raise ConfigurationError(f"grid needs at least {MIN_POINTS} points, got {self.n}")
        if self.kind == RADIAL and self.a != 0.0:
            raise ConfigurationError("radial grids start at r = 0")
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"dim must be 1, 2 or 3, got {self.dim}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.b - self.a

    @cached_property
    def x(self) -> np.ndarray:
        nodes = np.linspace(self.a, self.b, self.n)
        nodes.flags.writeable = False
        return nodes

    @property
    def dirichlet(self) -> bool:
        return self.kind == BOX

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights including the radial surface measure."""
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        if self.kind == RADIAL:
            w = w * sphere_area(self.dim) * self.x ** (self.dim - 1)
        w.flags.writeable = False
        return w

    @cached_property
    def sine_symbol(self) -> np.ndarray:
        """Eigenvalues ``(k pi / (b - a))^2`` of ``-d^2/dx^2`` on the interior sine basis."""
        k = np.arange(1, self.n - 1)
        s = (k * math.pi / self.length) ** 2
        s.flags.writeable = False
        return s

    def neg_laplacian(self, values: np.ndarray) -> np.ndarray:
        """Sine-spectral ``-f''`` for a function vanishing at both endpoints."""
        out = np.zeros_like(values, dtype=float)
        coeff = sfft.dst(values[1:-1], type=1, norm="ortho")
        out[1:-1] = sfft.idst(coeff * self.sine_symbol, type=1, norm="ortho")
        return out

    def dirichlet_form(self, values: np.ndarray) -> float:
        """``int |f'|^2`` for the sine interpolant of ``values`` (ends taken as zero)."""
        coeff = sfft.dst(values[1:-1], type=1, norm="ortho")
        return float(self.h * np.dot(self.sine_symbol, coeff * coeff))

    def dirichlet_form_pair(self, u: np.ndarray, v: np.ndarray) -> float:
        """Bilinear form ``int u' v'`` of the sine interpolants."""
        cu = sfft.dst(u[1:-1], type=1, norm="ortho")
        cv = sfft.dst(v[1:-1], type=1, norm="ortho")
        return float(self.h * np.dot(self.sine_symbol, cu * cv))

    def fd_laplacian_bands(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of the 3-point ``-d^2/dx^2`` on interior nodes."""
        m = self.n - 2
        inv_h2 = 1.0 / self.h**2
        return np.full(m, 2.0 * inv_h2), np.full(m - 1, -inv_h2)

    def scaled(self, factor: float) -> "Grid":
        """Grid with nodes multiplied by ``factor`` (> 0)."""
        if not factor > 0:
            raise ConfigurationError("scale factor must be positive")
        return Grid(self.a * factor, self.b * factor, self.n, self.kind, self.dim)

    def same_nodes(self, other: "Grid") -> bool:
        return self.n == other.n and np.allclose(self.x, other.x, rtol=0, atol=1e-12 * max(1.0, abs(self.b)))

    def __repr__(self):
        return f"Grid(a={self.a!r}, b={self.b!r}, n={self.n}, kind={self.kind!r}, dim={self.dim})"


def make_grid(a: float, b: float, n: int, kind: str = TRUNCATED, dim: int = 1) -> Grid:
    return Grid(float(a), float(b), int(n), kind, dim)


def symmetric_grid(half_width: float, n: int) -> Grid:
    """Truncated whole-space grid on ``[-L, L]``."""
    return make_grid(-half_width, half_width, n, TRUNCATED)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise ConfigurationError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("samples must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + _values(other))

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - _values(other))

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * _values(other))

    __rmul__ = __mul__


def _values(f):
    return f.values if isinstance(f, SampledFunction) else f


# 4th-order stencils; rows are the first two one-sided points at the left end.
_LEFT = np.array([[-25.0, 48.0, -36.0, 16.0, -3.0],
                  [-3.0, -10.0, 18.0, -6.0, 1.0]]) / 12.0


def diff_array(values: np.ndarray, h: float, even_at_left: bool = False) -> np.ndarray:
    """Fourth-order finite-difference derivative of uniformly sampled values.

    Central stencils in the interior, one-sided stencils at the ends.  With
    ``even_at_left`` the data is reflected evenly about the first node
    (radial grids), so the derivative there is exactly zero.
    """
    f = np.asarray(values, dtype=float)
    n = f.size
    if n < 5:
        raise ConfigurationError("need at least 5 samples to differentiate")
    d = np.empty(n)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / 12.0
    if even_at_left:
        d[0] = 0.0
        d[1] = (f[1] - 8.0 * f[0] + 8.0 * f[2] - f[3]) / 12.0
    else:
        d[0] = _LEFT[0] @ f[:5]
        d[1] = _LEFT[1] @ f[:5]
    d[-1] = -(_LEFT[0] @ f[::-1][:5])
    d[-2] = -(_LEFT[1] @ f[::-1][:5])
    return d / h


def derivative(f: SampledFunction) -> SampledFunction:
    g = f.grid
    return SampledFunction(g, diff_array(f.values, g.h, even_at_left=(g.kind == RADIAL)))


def integrate(f) -> float:
    """Composite trapezoid rule (with surface measure on radial grids)."""
    return float(np.dot(f.grid.weights, f.values))


def integrate_richardson(f: SampledFunction) -> float:
    """Trapezoid on ``h`` and ``2h`` combined by one Richardson step.

    Requires an odd number of points; the result equals composite Simpson.
    """
    g = f.grid
    if (g.n - 1) % 2:
        raise ConfigurationError("Richardson quadrature needs an odd number of points")
    fine = integrate(f)
    coarse_grid = Grid(g.a, g.b, (g.n - 1) // 2 + 1, g.kind, g.dim)
    coarse = integrate(SampledFunction(coarse_grid, f.values[::2]))
    return (4.0 * fine - coarse) / 3.0


def inner(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    return float(np.dot(grid.weights, u * v))


def l2_norm(grid: Grid, u: np.ndarray) -> float:
    return math.sqrt(max(inner(grid, u, u), 0.0))

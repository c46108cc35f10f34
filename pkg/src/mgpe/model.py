"""Physical parameters, potentials, fields and the MGPE energy functional.

Discretization: fields live on a :class:`~mgpe.grid.Grid` and vanish at both
endpoints.  The gradient terms are sine-spectral quadratic forms,

    K(phi) = int |phi'|^2,        D(rho) = int |rho'|^2   with rho = phi^2,

both taken of the sine interpolant of the samples, so the discrete energy

    E = K/2 + int V phi^2 + beta/2 int phi^4 + delta/2 D

has the exact discrete gradient ``2 H(phi) phi`` with

    H(phi) = -1/2 Lap + V + beta phi^2 - delta Lap(phi^2).

This keeps the flow, the chemical potential and the residual mutually
consistent to round-off.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Optional

import numpy as np

from . import grid as gridmod
from .errors import ConfigurationError, DomainError, PreconditionError
from .grid import BOX, RADIAL, Grid, SampledFunction

NORM_TOL = 1e-8


@dataclass(frozen=True)
class PhysicalParams:
    beta: float
    delta: float
    dim: int = 1

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigurationError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (math.isfinite(self.beta) and math.isfinite(self.delta)):
            raise ConfigurationError("beta and delta must be finite")


# --- potentials -----------------------------------------------------------------

@dataclass(frozen=True)
class Harmonic:
    """``V = 1/2 sum gamma_i^2 x_i^2``; only ``gammas[0]`` is used on 1D grids."""

    gammas: tuple = (1.0,)

    def __post_init__(self):
        g = tuple(float(v) for v in np.atleast_1d(self.gammas))
        if not g or any(not v > 0 for v in g):
            raise ConfigurationError("trap frequencies must be positive")
        object.__setattr__(self, "gammas", g)

    @property
    def gamma(self) -> float:
        return self.gammas[0]

    def on_grid(self, grid: Grid) -> np.ndarray:
        if grid.kind == BOX:
            raise ConfigurationError("harmonic potential needs a whole-space grid, got a box grid")
        return 0.5 * self.gamma**2 * grid.x**2

    def radial(self, r) -> np.ndarray:
        if len(set(self.gammas)) > 1:
            raise ConfigurationError("radial evaluation needs an isotropic trap")
        return 0.5 * self.gamma**2 * np.asarray(r, dtype=float) ** 2

    def gamma_product(self, dim: int) -> float:
        g = list(self.gammas) + [self.gammas[-1]] * (dim - len(self.gammas))
        return float(np.prod(g[:dim]))


@dataclass(frozen=True)
class Box:
    """``V = 0`` on ``domain``, infinite outside (Dirichlet walls)."""

    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.domain)
        if not hi > lo:
            raise ConfigurationError("box domain must be a non-empty interval")
        object.__setattr__(self, "domain", (lo, hi))

    @property
    def volume(self) -> float:
        return self.domain[1] - self.domain[0]

    def on_grid(self, grid: Grid) -> np.ndarray:
        lo, hi = self.domain
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if grid.kind != BOX or abs(grid.a - lo) > tol or abs(grid.b - hi) > tol:
            raise ConfigurationError(f"box potential on {self.domain} needs a box grid on the same interval")
        return np.zeros(grid.n)

    def radial(self, r) -> np.ndarray:
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class ZeroPotential:
    """``V = 0`` on whatever grid is given (rescaled limiting problems)."""

    def on_grid(self, grid: Grid) -> np.ndarray:
        return np.zeros(grid.n)

    def radial(self, r) -> np.ndarray:
        return np.zeros_like(np.asarray(r, dtype=float))


def potential_values(pot, grid: Grid) -> np.ndarray:
    if grid.kind == RADIAL:
        raise ConfigurationError("energy evaluation runs on 1D Cartesian grids only")
    v = pot.on_grid(grid)
    if np.any(v < 0):
        raise ConfigurationError("potential must be nonnegative")
    return v


# --- fields -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Field(SampledFunction):
    """Nonnegative real wavefunction samples."""

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise ConfigurationError("field samples must be nonnegative; use Field.from_samples")

    @classmethod
    def from_samples(cls, grid: Grid, values) -> "Field":
        return cls(grid, np.abs(np.asarray(values, dtype=float)))

    @cached_property
    def norm(self) -> float:
        return gridmod.l2_norm(self.grid, self.values)

    @property
    def density(self) -> np.ndarray:
        return self.values**2


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    potential: float
    contact: float
    hoi: float

    @property
    def total(self) -> float:
        return self.kinetic + self.potential + self.contact + self.hoi


@dataclass(frozen=True)
class DecayFit:
    alpha: float
    C: float
    r_squared: float
    npoints: int


@dataclass
class GroundStateResult:
    field: Field
    energy: EnergyBreakdown
    mu: float
    iterations: int
    residual_norm: float
    decay_fit: Optional[DecayFit] = None
    trace: object = dc_field(default=None, repr=False)
    mode: str = "direct"


# --- energy and Euler-Lagrange operator --------------------------------------------

def _check_dim(params: PhysicalParams):
    if params.dim != 1:
        raise ConfigurationError("fields and the energy are implemented for d = 1 only")


def _warn_if_open(grid: Grid, phi: np.ndarray):
    scale = float(np.max(np.abs(phi))) if phi.size else 0.0
    if scale > 0 and max(abs(phi[0]), abs(phi[-1])) > 1e-6 * scale:
        warnings.warn("field does not vanish at the grid ends; enlarge the grid", RuntimeWarning, stacklevel=3)


def energy_terms(grid: Grid, phi: np.ndarray, v: np.ndarray) -> tuple[float, float, float, float]:
    """Raw integrals ``(int|phi'|^2, int V phi^2, int phi^4, int|(phi^2)'|^2)``."""
    rho = phi * phi
    w = grid.weights
    return (grid.dirichlet_form(phi), float(np.dot(w, v * rho)),
            float(np.dot(w, rho * rho)), grid.dirichlet_form(rho))


def energy_difference(grid: Grid, new: np.ndarray, old: np.ndarray, v: np.ndarray,
                      beta: float, delta: float) -> float:
    """``E(new) - E(old)`` assembled from term differences.

    Every quadratic form is evaluated as ``<a - b, a + b>`` so the result carries
    round-off relative to the change, not to ``|E|``.
    """
    dphi, sphi = new - old, new + old
    drho = dphi * sphi
    srho = new * new + old * old
    w = grid.weights
    kin = grid.dirichlet_form_pair(dphi, sphi)
    pot = float(np.dot(w, v * drho))
    contact = 0.5 * beta * float(np.dot(w, drho * srho))
    hoi = 0.5 * delta * grid.dirichlet_form_pair(drho, srho) if delta != 0.0 else 0.0
    return 0.5 * kin + pot + contact + hoi


def energy_from_terms(terms, beta: float, delta: float, kinetic_weight: float = 0.5) -> EnergyBreakdown:
    k, p, q, d = terms
    return EnergyBreakdown(kinetic_weight * k, p, 0.5 * beta * q, 0.5 * delta * d)


def energy(field: SampledFunction, params: PhysicalParams, pot) -> EnergyBreakdown:
    _check_dim(params)
    phi = np.asarray(field.values)
    _warn_if_open(field.grid, phi)
    v = potential_values(pot, field.grid)
    return energy_from_terms(energy_terms(field.grid, phi, v), params.beta, params.delta)


def _require_normalized(field: SampledFunction):
    nrm = gridmod.l2_norm(field.grid, field.values)
    if abs(nrm - 1.0) > NORM_TOL:
        raise PreconditionError(f"field must be normalized (norm = {nrm:.3e})")


def mu_from_breakdown(e: EnergyBreakdown) -> float:
    return e.total + e.contact + e.hoi


def chemical_potential(field: SampledFunction, params: PhysicalParams, pot) -> float:
    """``mu = E + int (beta/2 phi^4 + delta/2 |grad phi^2|^2)``."""
    _require_normalized(field)
    return mu_from_breakdown(energy(field, params, pot))


def apply_hamiltonian(grid: Grid, phi: np.ndarray, v: np.ndarray, beta: float, delta: float) -> np.ndarray:
    """``H(phi) phi`` with the ends held at zero."""
    rho = phi * phi
    out = 0.5 * grid.neg_laplacian(phi) + (v + beta * rho) * phi
    if delta != 0.0:
        out += delta * grid.neg_laplacian(rho) * phi
    out[0] = out[-1] = 0.0
    return out


def residual_vector(grid: Grid, phi: np.ndarray, v: np.ndarray, beta: float, delta: float, mu: float) -> np.ndarray:
    return apply_hamiltonian(grid, phi, v, beta, delta) - mu * phi


def el_residual(field: SampledFunction, params: PhysicalParams, pot) -> float:
    """L2 norm of ``H(phi) phi - mu phi`` with ``mu`` from :func:`chemical_potential`."""
    mu = chemical_potential(field, params, pot)
    v = potential_values(pot, field.grid)
    r = residual_vector(field.grid, np.asarray(field.values), v, params.beta, params.delta, mu)
    return gridmod.l2_norm(field.grid, r)


# --- change of variable u = F(phi), F' = sqrt(1/2 + 2 delta t^2) ---------------------

def transform_derivative(t, delta: float):
    return np.sqrt(0.5 + 2.0 * delta * np.asarray(t, dtype=float) ** 2)


def _check_delta(delta: float):
    if not delta >= 0:
        raise DomainError("the change of variable needs delta >= 0")


def transform_forward(t, delta: float):
    """``F(t) = int_0^t sqrt(1/2 + 2 delta s^2) ds`` in closed form (odd in t)."""
    _check_delta(delta)
    t = np.asarray(t, dtype=float)
    if delta == 0.0:
        out = t / math.sqrt(2.0)
    else:
        b = 2.0 * delta
        out = 0.5 * t * np.sqrt(0.5 + b * t * t) + (0.5 / (2.0 * math.sqrt(b))) * np.arcsinh(t * math.sqrt(2.0 * b))
    return out if out.ndim else float(out)


def transform_inverse(v, delta: float, tol: float = 1e-13, max_iter: int = 100):
    """``G = F^{-1}`` by safeguarded Newton iteration (vectorized)."""
    _check_delta(delta)
    v = np.asarray(v, dtype=float)
    if delta == 0.0:
        out = v * math.sqrt(2.0)
        return out if out.ndim else float(out)
    sign = np.sign(v)
    target = np.abs(v)
    # F(t) >= t/sqrt(2) and F(t) >= sqrt(delta/2) t^2 bracket the root from above.
    # (a subnormal delta makes the second bound infinite, which the minimum discards)
    with np.errstate(divide="ignore"):
        hi = np.minimum(target * math.sqrt(2.0), np.sqrt(target / math.sqrt(delta / 2.0)) + 1e-300)
    lo = np.zeros_like(target)
    t = 0.5 * hi
    for _ in range(max_iter):
        f = transform_forward(t, delta) - target
        lo = np.where(f < 0, t, lo)
        hi = np.where(f > 0, t, hi)
        step = f / transform_derivative(t, delta)
        t_new = t - step
        outside = (t_new <= lo) | (t_new >= hi)
        t_new = np.where(outside, 0.5 * (lo + hi), t_new)
        done = np.all(np.abs(t_new - t) <= tol * np.maximum(1.0, t_new))
        t = t_new
        if done:
            break
    out = sign * t
    return out if out.ndim else float(out)


def transformed_energy(grid: Grid, u: np.ndarray, v: np.ndarray, beta: float, delta: float) -> float:
    """``int |u'|^2 + V G(u)^2 + beta/2 G(u)^4`` with the sine-spectral gradient form."""
    g = transform_inverse(u, delta)
    rho = g * g
    w = grid.weights
    return grid.dirichlet_form(u) + float(np.dot(w, v * rho + 0.5 * beta * rho * rho))


# --- far-field decay diagnostic --------------------------------------------------------

def decay_fit(field: SampledFunction, window=(1e-10, 1e-3)) -> Optional[DecayFit]:
    """Least-squares fit ``log phi ~ log C - alpha |x - x_c|`` over the tail window.

    ``x_c`` is the grid midpoint.  Returns ``None`` when fewer than 3 samples
    fall in the window.
    """
    g = field.grid
    phi = np.asarray(field.values)
    lo, hi = window
    mask = (phi >= lo) & (phi <= hi)
    if mask.sum() < 3:
        return None
    dist = np.abs(g.x - 0.5 * (g.a + g.b))[mask]
    y = np.log(phi[mask])
    slope, intercept = np.polyfit(dist, y, 1)
    pred = intercept + slope * dist
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(alpha=-float(slope), C=float(math.exp(intercept)), r_squared=r2, npoints=int(mask.sum()))

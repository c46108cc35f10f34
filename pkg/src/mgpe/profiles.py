"""Limiting densities of the strong-interaction regimes.

Every whole-space limiting problem solved here is a radial free-boundary
problem of the form

    -kappa Lap rho + s rho = (mu - V) chi_{rho > 0},   rho = rho' = 0 at |x| = x0,
    int rho = 1,

with ``V = gamma^2 r^2 / 2`` or ``V = 0``:

=================  =========  =====  =========
profile            kappa      s      V
=================  =========  =====  =========
case 2             delta_inf  +1     harmonic
case 3             1           0     harmonic
case 1'            1          -1     0
case 2'            delta_inf  -1     harmonic
delta limit        1          beta   0
=================  =========  =====  =========

and each is the Euler-Lagrange equation of ``E = int V rho + s/2 rho^2 +
kappa/2 |grad rho|^2``, so ``mu = 2E - int V rho`` throughout.

Closed forms are used where they exist; otherwise the profile is found by
inward RK4 shooting from the free boundary (d = 3 in the variable
``w = r rho``).  The ODE is linear in ``mu``, so two integrations per trial
``x0`` give the whole ``mu`` family, ``mu`` is fixed by the mass and ``x0`` by
the symmetry condition at the centre.  When the boundary layer is thin
compared to the support (``x0 sqrt(s/kappa)`` large) the inward integration
amplifies round-off like ``exp(x0 sqrt(s/kappa))``; ``method="auto"`` then
switches to a fourth-order Numerov boundary-value solve.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, linalg, optimize
from scipy.interpolate import CubicHermiteSpline

from . import grid as gridmod
from .errors import ConfigurationError, DomainError, ShootingError
from .grid import BOX, RADIAL, Grid, SampledFunction
from .model import Box, Harmonic, ZeroPotential

SHOOT_STEPS = 4000          # RK4 steps across the support (h = x0 / 4000)
BVP_POINTS = 20001          # Numerov nodes for thin boundary layers
STIFF_LIMIT = 12.0          # x0 sqrt(s / kappa) above which "auto" avoids shooting
METHODS = ("auto", "shoot", "bvp")


@dataclass(frozen=True)
class LimitingProfile:
    """A limiting density ``rho_inf`` sampled on its support.

    ``nodes`` are ascending; for whole-space profiles they cover the radial
    half-support ``[0, x0]`` (the density is even / radial), for box profiles
    the whole interval.  ``drho`` holds the derivative at the nodes, so the
    evaluator is a C^1 cubic Hermite interpolant that is zero outside the
    support.
    """

    case: str
    dim: int
    mu: float
    support: tuple
    energy: float
    nodes: np.ndarray = dc_field(repr=False)
    rho: np.ndarray = dc_field(repr=False)
    drho: np.ndarray = dc_field(repr=False)
    kappa: float = 1.0
    s: float = 0.0
    gamma: Optional[float] = None
    delta_inf: Optional[float] = None
    radial: bool = True
    method: str = "closed-form"
    formula: Optional[Callable] = dc_field(default=None, repr=False, compare=False)

    @property
    def x0(self) -> float:
        return self.support[1] if self.radial else 0.5 * (self.support[1] - self.support[0])

    def potential(self, r):
        r = np.asarray(r, dtype=float)
        if self.gamma is None:
            return np.zeros_like(r)
        return 0.5 * self.gamma**2 * r * r

    def _spline(self):
        sp = self.__dict__.get("_sp")
        if sp is None:
            sp = CubicHermiteSpline(self.nodes, self.rho, self.drho, extrapolate=False)
            object.__setattr__(self, "_sp", sp)
        return sp

    def density(self, x):
        """``rho(x)``; ``x`` is the signed coordinate (d=1) or the radius."""
        x = np.asarray(x, dtype=float)
        if self.formula is not None:
            return self.formula(x)
        t = np.abs(x) if self.radial else x
        out = self._spline()(t)
        return np.where(np.isnan(out), 0.0, out)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        t = np.abs(x) if self.radial else x
        out = self._spline().derivative()(t)
        out = np.where(np.isnan(out), 0.0, out)
        return np.sign(x) * out if self.radial else out

    def samples(self) -> SampledFunction:
        """Node samples on a radial (or box) grid carrying the right measure."""
        g = Grid(float(self.nodes[0]), float(self.nodes[-1]), self.nodes.size,
                 RADIAL if self.radial else BOX, self.dim)
        return SampledFunction(g, self.rho)

    def on_grid(self, grid: Grid) -> SampledFunction:
        return SampledFunction(grid, self.density(grid.x))

    def mass(self) -> float:
        return _measure_integral(self, self.rho)


# --- quadrature on profile nodes ----------------------------------------------------

def _measure(profile_or_nodes, dim=None, radial=True):
    if isinstance(profile_or_nodes, LimitingProfile):
        p = profile_or_nodes
        nodes, dim, radial = p.nodes, p.dim, p.radial
    else:
        nodes = profile_or_nodes
    if not radial:
        return np.ones_like(nodes)
    return gridmod.sphere_area(dim) * nodes ** (dim - 1)


def _simpson(nodes, values):
    return float(integrate.simpson(values, x=nodes))


def _measure_integral(p: LimitingProfile, values) -> float:
    return _simpson(p.nodes, _measure(p) * values)


def energy_parts(p: LimitingProfile) -> dict:
    """Integrals ``int V rho``, ``int rho^2``, ``int |grad rho|^2`` by Simpson's rule."""
    return {
        "potential": _measure_integral(p, p.potential(p.nodes) * p.rho),
        "square": _measure_integral(p, p.rho**2),
        "gradient": _measure_integral(p, p.drho**2),
    }


def limiting_energy(p: LimitingProfile) -> float:
    parts = energy_parts(p)
    return parts["potential"] + 0.5 * p.s * parts["square"] + 0.5 * p.kappa * parts["gradient"]


# --- helpers ----------------------------------------------------------------------------

def _check_dim(d, allowed=(1, 3)):
    if d not in allowed:
        raise ConfigurationError(f"dimension {d} not supported here (allowed: {allowed})")


def _harmonic_gamma(pot) -> float:
    if not isinstance(pot, Harmonic):
        raise ConfigurationError("a harmonic potential is required")
    if len(set(pot.gammas)) > 1:
        raise ConfigurationError("radial profiles need an isotropic trap")
    return pot.gamma


def _gamma_or_none(pot):
    if pot is None or isinstance(pot, ZeroPotential):
        return None
    return _harmonic_gamma(pot)


def _make(case, dim, mu, x0, nodes, rho, drho, kappa, s, gamma, delta_inf=None, method="closed-form",
          formula=None, radial=True, support=None):
    p = LimitingProfile(case=case, dim=dim, mu=float(mu), support=support or (0.0, float(x0)), energy=0.0,
                        nodes=_ro(nodes), rho=_ro(rho), drho=_ro(drho), kappa=float(kappa), s=float(s),
                        gamma=gamma, delta_inf=delta_inf, radial=radial, method=method, formula=formula)
    object.__setattr__(p, "energy", limiting_energy(p))
    return p


def _ro(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _nodes(x0, n=SHOOT_STEPS):
    return np.linspace(0.0, x0, n + 1)


# --- Thomas-Fermi (case 1) ---------------------------------------------------------------

def tf_case1(pot, d: int = 1) -> LimitingProfile:
    """``rho = (mu - V)_+`` with unit mass (harmonic), or ``1/|Omega|`` in a box."""
    if isinstance(pot, Box):
        return profile_box("B1", omega=pot.domain)
    if not isinstance(pot, Harmonic):
        raise ConfigurationError("tf_case1 needs a harmonic or box potential")
    if d not in (1, 2, 3):
        raise ConfigurationError("d must be 1, 2 or 3")
    gammas = list(pot.gammas) + [pot.gammas[-1]] * (d - len(pot.gammas))
    gprod = float(np.prod(gammas[:d]))
    # int (mu - sum g_i^2 x_i^2 / 2)_+ = |S^{d-1}| 2^{d/2} mu^{1+d/2} * 2 / (d (d+2) prod g)
    coef = gridmod.sphere_area(d) * 2.0 ** (d / 2.0) * 2.0 / (d * (d + 2) * gprod)
    mu = coef ** (-2.0 / (d + 2))
    gamma = _harmonic_gamma(pot) if d == 1 or len(set(gammas[:d])) == 1 else None
    if gamma is None:
        raise ConfigurationError("sampled TF profiles need an isotropic trap")
    x0 = math.sqrt(2.0 * mu) / gamma
    r = _nodes(x0)
    rho = mu - 0.5 * gamma**2 * r**2
    drho = -gamma**2 * r
    formula = lambda x: np.maximum(mu - 0.5 * gamma**2 * np.asarray(x, dtype=float) ** 2, 0.0)
    return _make("C1", d, mu, x0, r, np.maximum(rho, 0.0), drho, kappa=0.0, s=1.0, gamma=gamma, formula=formula)


# --- generic radial free-boundary solver ----------------------------------------------------

@dataclass
class _RadialProblem:
    kappa: float
    s: float
    gamma: Optional[float]
    dim: int

    @property
    def gamma2(self) -> float:
        return 0.0 if self.gamma is None else self.gamma**2

    def layer_ratio(self, x0) -> float:
        return x0 * math.sqrt(max(self.s, 0.0) / self.kappa)


def _shoot_pair(prob: _RadialProblem, x0: float, n: int):
    """Inward RK4 for mu = 0 and mu = 1; returns node arrays ascending in r."""
    from .kernels import rk4_radial
    h = x0 / n
    out = []
    for mu in (0.0, 1.0):
        y = np.empty(n + 1)
        dy = np.empty(n + 1)
        rk4_radial(x0, h, n, prob.kappa, prob.s, prob.gamma2, prob.dim, mu, y, dy)
        out.append((y[::-1].copy(), dy[::-1].copy()))
    return out


def _bvp_pair(prob: _RadialProblem, x0: float, n: int):
    """Numerov solves of the two-point problem (centre condition, y(x0) = 0) for mu = 0, 1.

    Unknown ``y = rho`` (d=1, ``y'(0) = 0``) or ``y = w = r rho`` (d=3, ``y(0) = 0``).
    ``y'' = q y + p`` with ``q = s/kappa`` and ``p = (V - mu)/kappa`` (times ``r`` for d=3).
    """
    r = np.linspace(0.0, x0, n + 1)
    h = r[1]
    q = prob.s / prob.kappa
    v = 0.5 * prob.gamma2 * r * r
    a = 1.0 - h * h * q / 12.0           # coefficient of neighbours
    b = -2.0 - 10.0 * h * h * q / 12.0   # coefficient of the centre
    out = []
    for mu in (0.0, 1.0):
        p = (v - mu) / prob.kappa
        if prob.dim == 3:
            p = r * p
        rhs = h * h / 12.0 * (p[:-2] + 10.0 * p[1:-1] + p[2:])
        if prob.dim == 1:
            # unknowns y_0..y_{n-1}; y_n = 0; ghost y_{-1} = y_1 at the centre
            m = n
            ab = np.zeros((3, m))
            ab[1, :] = b
            ab[0, 1:] = a
            ab[2, :-1] = a
            ab[0, 1] = 2.0 * a                  # row 0: b y0 + 2a y1
            f = np.empty(m)
            f[0] = h * h / 12.0 * (10.0 * p[0] + 2.0 * p[1])
            f[1:] = rhs
            y = np.append(linalg.solve_banded((1, 1), ab, f), 0.0)
        else:
            m = n - 1                            # unknowns y_1..y_{n-1}; y_0 = y_n = 0
            ab = np.zeros((3, m))
            ab[1, :] = b
            ab[0, 1:] = a
            ab[2, :-1] = a
            y = np.concatenate([[0.0], linalg.solve_banded((1, 1), ab, rhs), [0.0]])
        dy = gridmod.diff_array(y, h)
        dy[-1] = _edge_slope(y, h)
        if prob.dim == 1:
            dy[0] = 0.0
        out.append((y, dy))
    return out


def _edge_slope(y, h):
    """Sixth-order one-sided derivative at the last node."""
    c = np.array([147.0, -360.0, 450.0, -400.0, 225.0, -72.0, 10.0]) / 60.0
    return float(c @ y[::-1][:7]) / h


def _centre_and_mass(prob: _RadialProblem, r, y):
    """Symmetry defect at the centre and mass of a trial solution."""
    if prob.dim == 1:
        return None, 2.0 * _simpson(r, y)
    # d = 3, y = w = r rho: mass = 4 pi int r w
    return y[0], 4.0 * math.pi * _simpson(r, r * y)


def _family(prob, x0, n, method):
    pair = _shoot_pair(prob, x0, n) if method == "shoot" else _bvp_pair(prob, x0, n)
    r = np.linspace(0.0, x0, n + 1)
    return r, pair


def _defect(prob, x0, n, method):
    """Scalar function of x0 whose root is the free boundary (mu fixed by mass).

    Written without dividing by the mass sensitivity so it has no poles.
    """
    r, ((y0, dy0), (y1, dy1)) = _family(prob, x0, n, method)
    _, m0 = _centre_and_mass(prob, r, y0)
    _, m1 = _centre_and_mass(prob, r, y1)
    dm = m1 - m0
    if method == "shoot":
        # centre condition: rho'(0) = 0 (d=1) or w(0) = 0 (d=3)
        s0 = dy0[0] if prob.dim == 1 else y0[0]
        s1 = dy1[0] if prob.dim == 1 else y1[0]
        return s0 * dm + (1.0 - m0) * (s1 - s0)
    # BVP: both solutions satisfy the centre condition; the defect is the edge slope
    return dy0[-1] * dm + (1.0 - m0) * (dy1[-1] - dy0[-1])


def _assemble(prob, x0, n, method):
    r, ((y0, dy0), (y1, dy1)) = _family(prob, x0, n, method)
    _, m0 = _centre_and_mass(prob, r, y0)
    _, m1 = _centre_and_mass(prob, r, y1)
    mu = (1.0 - m0) / (m1 - m0)
    y = y0 + mu * (y1 - y0)
    dy = dy0 + mu * (dy1 - dy0)
    if prob.dim == 3:
        rho = np.empty_like(y)
        drho = np.empty_like(y)
        rho[1:] = y[1:] / r[1:]
        drho[1:] = (dy[1:] * r[1:] - y[1:]) / r[1:] ** 2
        rho[0] = dy[0]
        drho[0] = 0.0
    else:
        rho, drho = y, dy
        drho[0] = 0.0 if method == "bvp" else drho[0]
    return r, rho, drho, mu


def _acceptable(rho, drho) -> bool:
    scale = np.max(np.abs(rho))
    return bool(scale > 0 and np.all(rho >= -1e-9 * scale) and np.all(drho[1:] <= 1e-9 * scale * len(rho)))


def _solve_radial(prob: _RadialProblem, scale: float, method: str, case: str):
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}")
    chosen = method
    if method == "auto":
        chosen = "bvp" if prob.layer_ratio(3.0 * scale) > STIFF_LIMIT else "shoot"
    n = SHOOT_STEPS if chosen == "shoot" else BVP_POINTS - 1
    brackets = []
    lo, hi = 0.05 * scale, 3.0 * scale
    for _attempt in range(4):
        xs = np.linspace(lo, hi, 241)
        vals = np.array([_defect(prob, x, n if chosen == "shoot" else 2000, chosen) for x in xs])
        for i in range(len(xs) - 1):
            if not (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])) or vals[i] * vals[i + 1] > 0:
                continue
            a, b = xs[i], xs[i + 1]
            brackets.append((a, b))
            x0 = optimize.brentq(lambda x: _defect(prob, x, n, chosen), a, b, xtol=1e-15, rtol=1e-15)
            r, rho, drho, mu = _assemble(prob, x0, n, chosen)
            if _acceptable(rho, drho):
                return x0, r, np.maximum(rho, 0.0), drho, mu, chosen
        lo, hi = hi, 3.0 * hi
    raise ShootingError(f"{case}: no admissible free boundary found", brackets=brackets)


def _profile_from_problem(case, prob, scale, method, delta_inf=None):
    x0, r, rho, drho, mu, chosen = _solve_radial(prob, scale, method, case)
    return _make(case, prob.dim, mu, x0, r, rho, drho, prob.kappa, prob.s, prob.gamma,
                 delta_inf=delta_inf, method=chosen)


def _case3_radius(gamma, d):
    # -Lap rho = mu - g^2 r^2/2 with rho = rho' = 0 at R: rho = g^2 (R^2 - r^2)^2 / (8 (d+2))
    # mass = |S| g^2 / (8 (d+2)) * int_0^R (R^2 - r^2)^2 r^{d-1} dr
    c = gridmod.sphere_area(d) * gamma**2 / (8.0 * (d + 2))
    moment = 8.0 / (d * (d + 2) * (d + 4))        # int_0^1 (1 - t^2)^2 t^{d-1} dt
    return (1.0 / (c * moment)) ** (1.0 / (d + 4))


# --- case 2 ----------------------------------------------------------------------------

def profile_case2(delta_inf: float, pot, d: int = 1, method: str = "auto") -> LimitingProfile:
    """Free-boundary profile of ``-delta_inf Lap rho + rho = (mu - V) chi``."""
    if not delta_inf > 0:
        raise DomainError("delta_inf must be positive")
    _check_dim(d)
    gamma = _harmonic_gamma(pot)
    prob = _RadialProblem(kappa=float(delta_inf), s=1.0, gamma=gamma, dim=d)
    tf = tf_case1(pot, d)
    scale = max(tf.x0, delta_inf ** (1.0 / (4 + d)) * _case3_radius(gamma, d))
    return _profile_from_problem("C2", prob, scale, method, delta_inf=float(delta_inf))


# --- case 3 ----------------------------------------------------------------------------

def profile_case3(pot, d: int = 1, method: str = "closed-form") -> LimitingProfile:
    """``-Lap rho = (mu - V) chi`` (unit coefficient), closed form for a harmonic trap."""
    _check_dim(d)
    gamma = _harmonic_gamma(pot)
    if method != "closed-form":
        prob = _RadialProblem(kappa=1.0, s=0.0, gamma=gamma, dim=d)
        return _profile_from_problem("C3", prob, _case3_radius(gamma, d), method)
    R = _case3_radius(gamma, d)
    c = gamma**2 / (8.0 * (d + 2))
    mu = 4.0 * d * c * R * R  # -Lap rho(0) = mu with rho = c (R^2 - r^2)^2
    r = _nodes(R)
    rho = c * (R * R - r * r) ** 2
    drho = -4.0 * c * r * (R * R - r * r)
    formula = lambda x: c * np.maximum(R * R - np.asarray(x, dtype=float) ** 2, 0.0) ** 2
    return _make("C3", d, mu, R, r, rho, drho, kappa=1.0, s=0.0, gamma=gamma, formula=formula)


# --- case 1' and the delta -> 0 limit ------------------------------------------------------

TAN_ROOT = optimize.brentq(lambda t: math.tan(t) - t, 4.4, 4.6)


def _oscillatory(case, d, k, s, kappa, gamma=None, delta_inf=None):
    """Closed form of ``kappa (-Lap rho - k^2 rho) = mu chi`` with ``rho = rho' = 0`` at the edge.

    Covers case 1' (k = 1), the delta -> 0 limit (k^2 = -beta) and case 2'
    without trap (k^2 = 1/delta_inf, kappa = delta_inf).
    """
    _check_dim(d)
    if d == 1:
        R = math.pi / k
        amp = k / (2.0 * math.pi)
        mu_c = -amp  # rho = amp (1 + cos kx): -rho'' - k^2 rho = -k^2 amp
        r = _nodes(R)
        rho = amp * (1.0 + np.cos(k * r))
        drho = -amp * k * np.sin(k * r)
        formula = lambda x: np.where(np.abs(x) <= R, amp * (1.0 + np.cos(k * np.asarray(x, dtype=float))), 0.0)
        mu = kappa * mu_c * k * k
    else:
        R = TAN_ROOT / k
        # rho = A sin(kr)/(kr) - c; mass = -c 4 pi R^3 / 3 = 1
        c = -3.0 / (4.0 * math.pi * R**3)
        A = c / math.cos(TAN_ROOT)
        r = _nodes(R)
        kr = k * r
        with np.errstate(invalid="ignore", divide="ignore"):
            sinc = np.where(kr > 0, np.sin(kr) / np.where(kr > 0, kr, 1.0), 1.0)
            dsinc = np.where(kr > 0, (kr * np.cos(kr) - np.sin(kr)) / np.where(kr > 0, kr, 1.0) ** 2, 0.0)
        rho = A * sinc - c
        drho = A * k * dsinc
        mu = kappa * c * k * k  # -Lap rho - k^2 rho = k^2 c
        formula = None
    return _make(case, d, mu, R, r, np.maximum(rho, 0.0), drho, kappa=kappa, s=s,
                 gamma=gamma, delta_inf=delta_inf, formula=formula)


def profile_case1prime(d: int = 1) -> LimitingProfile:
    """Minimizer of ``int 1/2 |grad rho|^2 - 1/2 rho^2``: ``-Lap rho - rho = mu chi``."""
    return _oscillatory("C1'", d, 1.0, s=-1.0, kappa=1.0)


def profile_delta_limit(beta: float, d: int = 1) -> LimitingProfile:
    """``beta rho - Lap rho = mu chi`` (beta < 0): the case-1' profile mapped by
    ``rho_beta(x) = |beta|^{d/2} rho_{-1}(sqrt|beta| x)``."""
    if not beta < 0:
        raise DomainError("the delta -> 0 limit profile needs beta < 0")
    p = _oscillatory("delta-limit", d, math.sqrt(-beta), s=float(beta), kappa=1.0)
    return p


# --- case 2' ----------------------------------------------------------------------------

def profile_case2prime(delta_inf: float, pot=None, d: int = 1, method: str = "auto") -> LimitingProfile:
    """``-delta_inf Lap rho - rho = (mu - V) chi`` (derived stationarity condition of E_2')."""
    if not delta_inf > 0:
        raise DomainError("delta_inf must be positive")
    _check_dim(d)
    gamma = _gamma_or_none(pot)
    if gamma is None:
        # V = 0: the case-1' profile with length scale sqrt(delta_inf)
        k = 1.0 / math.sqrt(delta_inf)
        p = _oscillatory("C2'", d, k, s=-1.0, kappa=float(delta_inf), delta_inf=float(delta_inf))
        return p
    prob = _RadialProblem(kappa=float(delta_inf), s=-1.0, gamma=gamma, dim=d)
    free = (math.pi if d == 1 else TAN_ROOT) * math.sqrt(delta_inf)
    return _profile_from_problem("C2'", prob, free, method, delta_inf=float(delta_inf))


# --- bounded domain -----------------------------------------------------------------------

BOX_CASES = ("B1", "B2", "B3", "B2prime")


def profile_box(case: str, delta_inf: Optional[float] = None, omega=(0.0, 1.0), n: int = SHOOT_STEPS) -> LimitingProfile:
    """Closed-form box limits on ``omega = (a, b)`` (d = 1)."""
    case = case.replace("'", "prime")
    if case not in BOX_CASES:
        raise ConfigurationError(f"unknown box case {case!r}")
    a, b = (float(v) for v in omega)
    if not b > a:
        raise ConfigurationError("omega must be a non-empty interval")
    ell, m = b - a, 0.5 * (a + b)
    x = np.linspace(a, b, n + 1)
    label = "B2'" if case == "B2prime" else case
    if case in ("B2", "B2prime") and not (delta_inf is not None and delta_inf > 0):
        raise DomainError(f"{label} needs delta_inf > 0")
    if case == "B1":
        rho = np.full_like(x, 1.0 / ell)
        drho = np.zeros_like(x)
        mu, kappa, s = 1.0 / ell, 0.0, 1.0
        formula = lambda t: np.where((t >= a) & (t <= b), 1.0 / ell, 0.0)
    elif case == "B3":
        rho = 6.0 * (x - a) * (b - x) / ell**3
        drho = 6.0 * (a + b - 2.0 * x) / ell**3
        mu, kappa, s = 12.0 / ell**3, 1.0, 0.0
        formula = lambda t: np.where((t >= a) & (t <= b), 6.0 * (t - a) * (b - t) / ell**3, 0.0)
    elif case == "B2":
        sc = math.sqrt(delta_inf)
        half = ell / (2.0 * sc)
        c = 1.0 / (ell - 2.0 * sc * math.tanh(half))
        # cosh((x-m)/s)/cosh(l/2s) written with exponentials of non-positive arguments
        u = np.abs(x - m) / sc
        ratio = np.exp(u - half) * (1.0 + np.exp(-2.0 * u)) / (1.0 + np.exp(-2.0 * half))
        rho = c * (1.0 - ratio)
        drho = -c * np.sign(x - m) * np.exp(u - half) * (1.0 - np.exp(-2.0 * u)) / (1.0 + np.exp(-2.0 * half)) / sc
        mu, kappa, s = c, float(delta_inf), 1.0
        formula = None
    else:
        sc = math.sqrt(delta_inf)
        w = min(0.5 * ell, math.pi * sc)
        amp = 1.0 / (2.0 * sc * math.sin(w / sc) - 2.0 * w * math.cos(w / sc))
        # nodes on the support only, so the free boundary is a node
        x = np.linspace(m - w, m + w, n + 1)
        t = x - m
        inside = np.abs(t) <= w
        rho = np.where(inside, amp * (np.cos(t / sc) - math.cos(w / sc)), 0.0)
        drho = np.where(inside, -amp / sc * np.sin(t / sc), 0.0)
        # -delta_inf rho'' - rho = mu on the support
        mu, kappa, s = amp * math.cos(w / sc), float(delta_inf), -1.0
        formula = None
    p = LimitingProfile(case=label, dim=1, mu=float(mu), support=(a, b), energy=0.0, nodes=_ro(x),
                        rho=_ro(np.maximum(rho, 0.0)), drho=_ro(drho), kappa=kappa, s=s, gamma=None,
                        delta_inf=None if delta_inf is None else float(delta_inf), radial=False,
                        method="closed-form", formula=formula)
    object.__setattr__(p, "energy", limiting_energy(p))
    return p


# --- verification helpers -------------------------------------------------------------------

def ode_residual(p: LimitingProfile) -> np.ndarray:
    """Pointwise residual ``-kappa Lap rho + s rho - (mu - V)`` on interior support nodes.

    ``rho''`` is obtained by fourth-order differencing of the stored ``rho'``
    samples (independent of how the profile was produced).  For d = 3 the
    radial Laplacian is ``(r rho)'' / r``.
    """
    h = p.nodes[1] - p.nodes[0]
    if p.dim == 3 and p.radial:
        r = p.nodes
        dw = p.rho + r * p.drho                 # (r rho)'
        lap = gridmod.diff_array(dw, h)[1:] / r[1:]
        rho, v = p.rho[1:], p.potential(r[1:])
    else:
        lap = gridmod.diff_array(p.drho, h)
        rho, v = p.rho, (p.potential(p.nodes) if p.radial else np.zeros_like(p.nodes))
    res = -p.kappa * lap + p.s * rho - (p.mu - v)
    return res[1:-1]


def multiplier_defect(p: LimitingProfile, quad: str = "adaptive") -> float:
    """``mu - (2E - int V rho)`` with the energy from adaptive quadrature of the evaluator."""
    if quad != "adaptive":
        parts = energy_parts(p)
    else:
        parts = independent_energy_parts(p)
    e = parts["potential"] + 0.5 * p.s * parts["square"] + 0.5 * p.kappa * parts["gradient"]
    return p.mu - (2.0 * e - parts["potential"])


def independent_energy_parts(p: LimitingProfile) -> dict:
    """Energy integrals by adaptive Gauss-Kronrod quadrature of the Hermite evaluator."""
    meas = (lambda r: gridmod.sphere_area(p.dim) * r ** (p.dim - 1)) if p.radial else (lambda r: 1.0)
    pts = np.linspace(float(p.nodes[0]), float(p.nodes[-1]), 65)

    def q(f):
        total = 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for a, b in zip(pts[:-1], pts[1:]):
                total += integrate.quad(lambda t: meas(t) * f(t), a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
        return total

    return {
        "mass": q(lambda t: float(p.density(t))),
        "potential": q(lambda t: float(p.potential(t)) * float(p.density(t))),
        "square": q(lambda t: float(p.density(t)) ** 2),
        "gradient": q(lambda t: float(p.derivative(t)) ** 2),
    }

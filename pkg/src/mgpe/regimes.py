"""Regime taxonomy, the rescaling map and the delta < 0 concentration probe.

Two mutually inverse dilations are used (``d`` = dimension):

    "down":  phi^eps(x) = eps^{d/2}  phi(eps x)
    "up":    phi^eps(x) = eps^{-d/2} phi(x / eps)

Both preserve the L2 norm.  In the whole-space cases 1, 2, 3, 2', 3' the
physical ground state is spread over a length ``1/eps`` (eps -> 0), so the
limit profile is reached with "up"; in cases 1' and B1' with
``eps = delta^{1/2} / |beta|^{1/2}`` the condensate concentrates on the scale
``eps`` and the limit profile is reached with "down".  :func:`classify`
records the direction in the report.

The rescaled energy is

    E^eps(phi^eps) = int eps^4/2 |grad phi^eps|^2 + V |phi^eps|^2
                     + beta eps^{d+2}/2 |phi^eps|^4 + delta eps^{d+4}/2 |grad |phi^eps|^2|^2,

which equals ``eps^2 E(phi)`` when ``phi^eps`` is the "up" image of ``phi``
and ``V`` is harmonic.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import grid as gridmod
from . import model
from .errors import ConfigurationError, DomainError, PreconditionError
from .grid import Grid, SampledFunction
from .model import Box, Field, Harmonic, PhysicalParams, ZeroPotential


@dataclass(frozen=True)
class CbConstant:
    """Best constant of the 2D Gagliardo-Nirenberg inequality (attractive threshold at delta = 0)."""

    value: float = math.pi * 1.86225


C_B = CbConstant().value

WHOLE_SPACE = "whole-space"
BOX_DOMAIN = "box"
DEFAULT_THRESHOLDS = (0.1, 10.0)

UP = "up"
DOWN = "down"
IDENTITY = "identity"
_DIRECTIONS = {"up": UP, "blow-up": UP, "down": DOWN, "blow-down": DOWN}

CASES = ("C1", "C2", "C3", "C1'", "C2'", "C3'", "B1", "B2", "B3", "B1'", "B2'", "B3'", "none")


@dataclass(frozen=True)
class RegimeReport:
    case: str
    eps: float
    ratio: float
    delta_inf: Optional[float] = None
    direction: str = IDENTITY
    dim: int = 1
    domain_kind: str = WHOLE_SPACE
    note: str = ""


def critical_exponent(d: int) -> float:
    return (4.0 + d) / (2.0 + d)


def eps_for_case(case: str, beta: float, delta: float, d: int) -> tuple[float, str]:
    """Scaling factor and map direction for a case label."""
    if case in ("C1", "C2"):
        return beta ** (-1.0 / (2 + d)), UP
    if case in ("C3", "C3'"):
        return delta ** (-1.0 / (4 + d)), UP
    if case == "C2'":
        return abs(beta) ** (-1.0 / (2 + d)), UP
    if case in ("C1'", "B1'"):
        return math.sqrt(delta) / math.sqrt(abs(beta)), DOWN
    if case in ("B1", "B2", "B3", "B2'", "B3'", "none"):
        return 1.0, IDENTITY
    raise ConfigurationError(f"unknown case {case!r}")


def classify(params: PhysicalParams, domain_kind: str = WHOLE_SPACE,
             thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> RegimeReport:
    """Arithmetic classification of ``(beta, delta, d)`` into the limiting regimes."""
    beta, delta, d = float(params.beta), float(params.delta), params.dim
    low, high = (float(t) for t in thresholds)
    if not 0 < low <= high:
        raise ConfigurationError("thresholds must satisfy 0 < low <= high")
    if domain_kind not in (WHOLE_SPACE, BOX_DOMAIN):
        raise ConfigurationError(f"unknown domain kind {domain_kind!r}")
    box = domain_kind == BOX_DOMAIN

    def report(case, ratio, note="", delta_inf=None):
        eps, direction = eps_for_case(case, beta, delta, d)
        return RegimeReport(case, eps, ratio, delta_inf, direction, d, domain_kind, note)

    if delta < 0:
        return report("none", math.nan, "no ground state for delta < 0 (energy unbounded below)")
    if delta == 0:
        if beta > 0:
            return report("B1" if box else "C1", 0.0)
        if beta == 0:
            return report("none", math.nan, "linear problem (beta = delta = 0)")
        if box:
            return report("none", math.nan, "attractive contact without HOI: no HOI regime")
        if d == 2 and beta <= -C_B:
            return report("none", math.nan, f"no ground state for d=2, delta=0, beta <= -C_b = {-C_B:.6f}")
        if d == 3:
            return report("none", math.nan, "no ground state for d=3, delta=0, beta < 0")
        return report("none", math.nan, "attractive GPE without HOI: outside the HOI regime list")
    if beta == 0:
        return report("B3" if box else "C3", math.inf)
    ratio = delta / abs(beta) if box else delta / abs(beta) ** critical_exponent(d)
    prime = "'" if beta < 0 else ""
    prefix = "B" if box else "C"
    if ratio < low:
        idx = "1"
    elif ratio <= high:
        idx = "2"
    else:
        idx = "3"
    return report(prefix + idx + prime, ratio, delta_inf=ratio if idx == "2" else None)


# --- rescaling ------------------------------------------------------------------------------

def _direction(direction: str) -> str:
    try:
        return _DIRECTIONS[direction]
    except KeyError:
        raise ConfigurationError(f"unknown direction {direction!r}") from None


def rescale(field: SampledFunction, eps: float, direction: str = DOWN, target: Optional[Grid] = None,
            dim: int = 1):
    """Apply the norm-preserving dilation to sampled values.

    Without ``target`` the nodes are relabelled exactly (``x -> x/eps`` for
    "down", ``x -> eps x`` for "up"), so the map is exact and invertible.
    With ``target`` the result is linearly interpolated onto that grid (zero
    outside the source support) and renormalized; a warning is issued when
    more than ``1e-8`` of the mass falls outside ``target``.
    """
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError("eps must be positive and finite")
    if dim != 1:
        raise ConfigurationError("rescaling of sampled fields is implemented for d = 1")
    way = _direction(direction)
    factor = 1.0 / eps if way == DOWN else eps
    amp = math.sqrt(eps) if way == DOWN else 1.0 / math.sqrt(eps)
    g = field.grid
    new_grid = g.scaled(factor)
    values = amp * np.asarray(field.values)
    cls = Field if isinstance(field, Field) else SampledFunction
    if target is None:
        return cls(new_grid, values)
    interp = np.interp(target.x, new_grid.x, values, left=0.0, right=0.0)
    total = gridmod.inner(new_grid, values, values)
    kept = gridmod.inner(target, interp, interp)
    inside = (new_grid.x >= target.a) & (new_grid.x <= target.b)
    lost = gridmod.inner(new_grid, values * ~inside, values * ~inside)
    if lost > 1e-8 * max(total, 1e-300):
        warnings.warn(f"rescaled field truncated: {lost:.3e} of the mass lies outside the target grid",
                      RuntimeWarning, stacklevel=2)
    if not kept > 0:
        raise ConfigurationError("rescaled field does not overlap the target grid")
    return cls(target, np.abs(interp) * math.sqrt(total / kept) if cls is Field else interp * math.sqrt(total / kept))


def _rescaled_potential(pot, grid: Grid) -> np.ndarray:
    if isinstance(pot, Box):
        return np.zeros(grid.n)
    return model.potential_values(pot, grid)


def rescaled_energy(field_eps: SampledFunction, eps: float, params: PhysicalParams, pot) -> float:
    """``E^eps`` of a (normalized) rescaled field on its own grid."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    model._require_normalized(field_eps)
    if params.dim != 1:
        raise ConfigurationError("rescaled energy is implemented for d = 1")
    g = field_eps.grid
    phi = np.asarray(field_eps.values)
    k, p, q, dterm = model.energy_terms(g, phi, _rescaled_potential(pot, g))
    d = params.dim
    return (0.5 * eps**4 * k + p + 0.5 * params.beta * eps ** (d + 2) * q
            + 0.5 * params.delta * eps ** (d + 4) * dterm)


# --- non-existence probe ----------------------------------------------------------------------

@dataclass(frozen=True)
class ProbePoint:
    eps: float
    energy: float
    kinetic: float
    potential: float
    contact: float
    hoi: float


def standard_bump(n: int = 2049, half_width: float = 1.5) -> Field:
    """Normalized smooth compactly supported bump ``exp(-1/(1 - x^2))`` on ``|x| < 1``."""
    g = gridmod.symmetric_grid(half_width, n)
    x = g.x
    with np.errstate(divide="ignore", over="ignore"):
        v = np.where(np.abs(x) < 1.0, np.exp(-1.0 / np.maximum(1.0 - x * x, 1e-300)), 0.0)
    f = SampledFunction(g, v)
    return Field(g, v / gridmod.l2_norm(g, f.values))


def nonexistence_probe(params: PhysicalParams, pot, seed_field: Optional[Field] = None,
                       eps_list: Sequence[float] = (1.0, 0.5, 0.1, 0.05, 0.01)) -> list:
    """Energies of the concentrating family ``phi_eps(x) = eps^{-d/2} phi(x / eps)``.

    Each term scales exactly (kinetic ``eps^-2``, contact ``eps^-d``, HOI
    ``eps^-(d+2)``), so the seed integrals are computed once on the seed grid
    and the potential term as ``int V(eps y) phi(y)^2 dy``.
    """
    if not params.delta < 0:
        raise DomainError("the probe is only meaningful for delta < 0")
    if params.dim != 1:
        raise ConfigurationError("the probe is implemented for d = 1")
    seed = standard_bump() if seed_field is None else seed_field
    model._require_normalized(seed)
    g = seed.grid
    phi = np.asarray(seed.values)
    d = params.dim
    k, _, q, dterm = model.energy_terms(g, phi, np.zeros(g.n))
    out = []
    for eps in eps_list:
        if not eps > 0:
            raise DomainError("eps values must be positive")
        if isinstance(pot, Harmonic):
            v = 0.5 * pot.gamma**2 * (eps * g.x) ** 2
        elif isinstance(pot, (ZeroPotential, Box)) or pot is None:
            v = np.zeros(g.n)
        else:
            raise ConfigurationError("unsupported potential for the probe")
        pot_term = gridmod.inner(g, v, phi * phi)
        kin = 0.5 * k / eps**2
        con = 0.5 * params.beta * q / eps**d
        hoi = 0.5 * params.delta * dterm / eps ** (d + 2)
        out.append(ProbePoint(float(eps), kin + pot_term + con + hoi, kin, pot_term, con, hoi))
    return out


def loglog_slope(eps, values, tail: int = 3) -> float:
    """Least-squares slope of ``log|values|`` against ``log eps`` over the ``tail`` smallest eps."""
    eps = np.asarray(eps, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    order = np.argsort(eps)[:tail]
    if len(order) < 2:
        raise PreconditionError("need at least two points for a slope")
    return float(np.polyfit(np.log(eps[order]), np.log(values[order]), 1)[0])


def probe_diagnostics(points: list, tail: int = 3) -> dict:
    """Divergence diagnostics: monotone decrease as eps -> 0 and log-log slopes."""
    pts = sorted(points, key=lambda p: -p.eps)
    energies = [p.energy for p in pts]
    eps = [p.eps for p in pts]
    neg = [(p.eps, p.energy) for p in pts if p.energy < 0]
    slope_total = loglog_slope([e for e, _ in neg], [v for _, v in neg], tail) if len(neg) >= 2 else math.nan
    return {
        "monotone": bool(np.all(np.diff(energies) < 0)),
        "min_energy": min(energies),
        "slope_total": slope_total,
        "slope_hoi": loglog_slope(eps, [p.hoi for p in pts], tail),
    }

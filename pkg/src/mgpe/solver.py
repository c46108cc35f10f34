"""Constrained energy minimization on the unit L2 sphere.

The flow is a projected, preconditioned, semi-implicit gradient step:

    d = -P^{-1} (g - lam phi),   lam = <P^{-1} g, phi> / <P^{-1} phi, phi>,
    phi <- |phi + d| / ||phi + d||,

where ``g = H(phi) phi`` is half the discrete energy gradient and

    P = I/tau + c/2 L + diag(V + (beta + 2 beta_+) phi^2 - lam0 + delta (-Lap rho))
        + 2 c delta Phi L Phi

is a symmetric tridiagonal approximation of the constrained Hessian (``L``
the 3-point ``-d^2/dx^2``, ``Phi = diag(phi)``, ``lam0 = <g, phi>``,
``c = FD_SCALE``).  When the curvature part ``P - I/tau`` is indefinite it
is shifted up to positive definiteness, so ``P >= I/tau`` always.  The
Laplacian and the stiff HOI term are thus treated implicitly; for
``tau -> 0`` the step reduces to the explicit flow ``phi - tau (H - lam) phi``.
Steps that raise the energy are rejected and retried with ``tau / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import grid as gridmod
from . import model
from .errors import (ConfigurationError, ConvergenceError, DegenerateInputError, NonExistenceError,
                     StepSizeError)
from .grid import Grid
from .kernels import spd_tridiag_solve
from .model import Field, GroundStateResult, PhysicalParams

C_B = math.pi * 1.86225

INIT_KINDS = ("gaussian", "uniform", "tf-ansatz", "random")
MODES = ("direct", "transformed")
ENERGY_SLACK = 1e-12
# The 3-point Laplacian underestimates the sine-spectral one by up to pi^2/4
# on the highest mode; scaling it by the midpoint of [1, pi^2/4] balances the
# mode-wise ratio within [0.58, 1.43].
FD_SCALE = 0.5 * (1.0 + math.pi**2 / 4.0)


@dataclass(frozen=True)
class SolverOptions:
    tau: float = 1.0
    max_iterations: int = 20000
    energy_tolerance: float = 1e-13
    residual_tolerance: float = 1e-8
    init: str = "tf-ansatz"
    seed: Optional[int] = None
    mode: str = "direct"
    tau_min: float = 1e-14
    tau_max: float = 1e6
    # "absolute": stop on ||H phi - mu phi|| <= residual_tolerance;
    # "relative": on ||H phi - mu phi|| <= residual_tolerance * max(1, |mu|),
    # needed when |mu| is so large that round-off dominates the residual.
    residual_scaling: str = "absolute"

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError("tau must be positive")
        if not (self.energy_tolerance > 0 and self.residual_tolerance > 0):
            raise ConfigurationError("tolerances must be positive")
        if self.init not in INIT_KINDS:
            raise ConfigurationError(f"unknown initialization {self.init!r}")
        if self.init == "random" and self.seed is None:
            raise ConfigurationError("random initialization needs an explicit seed")
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.residual_scaling not in ("absolute", "relative"):
            raise ConfigurationError(f"unknown residual scaling {self.residual_scaling!r}")
        if int(self.max_iterations) < 1:
            raise ConfigurationError("max_iterations must be >= 1")


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    energy: float
    mass_before_projection: float
    residual: float
    tau: float
    accepted: bool
    energy_change: float
    mass_after_projection: float = 1.0


@dataclass
class FlowTrace:
    records: list = dc_field(default_factory=list)

    def append(self, *args):
        self.records.append(TraceRecord(*args))

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy for r in self.records if r.accepted])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records if r.accepted])

    @property
    def accepted_changes(self) -> np.ndarray:
        """Energy change of every accepted step (cancellation-free evaluation)."""
        return np.array([r.energy_change for r in self.records[1:] if r.accepted])

    @property
    def mass_errors(self) -> np.ndarray:
        """``| ||phi||^2 - 1 |`` after every accepted projection."""
        return np.array([abs(r.mass_after_projection - 1.0) for r in self.records if r.accepted])

    def is_monotone(self, slack: float = ENERGY_SLACK) -> bool:
        return bool(np.all(self.accepted_changes <= slack))

    def __len__(self):
        return len(self.records)


# --- helpers -------------------------------------------------------------------------

def project_normalize(field: model.SampledFunction) -> Field:
    nrm = gridmod.l2_norm(field.grid, np.asarray(field.values))
    if not nrm > 0 or not math.isfinite(nrm):
        raise DegenerateInputError("cannot normalize a zero field")
    return Field.from_samples(field.grid, np.asarray(field.values) / nrm)


def _normalized(grid: Grid, values: np.ndarray) -> np.ndarray:
    v = np.abs(values)
    v[0] = v[-1] = 0.0
    nrm = gridmod.l2_norm(grid, v)
    if not nrm > 0:
        raise DegenerateInputError("field vanished during the flow")
    return v / nrm


def check_existence(params: PhysicalParams):
    """Raise :class:`NonExistenceError` for parameters without a ground state."""
    if params.delta < 0:
        raise NonExistenceError("no ground state exists for delta < 0; use regimes.nonexistence_probe")
    if params.delta == 0:
        if params.dim == 2 and params.beta <= -C_B:
            raise NonExistenceError(f"no ground state for d=2, delta=0, beta <= -C_b ({-C_B:.6f})")
        if params.dim == 3 and params.beta < 0:
            raise NonExistenceError("no ground state for d=3, delta=0, beta < 0")


def _validate(params: PhysicalParams, pot, grid: Grid) -> np.ndarray:
    check_existence(params)
    if params.dim != 1:
        raise ConfigurationError("the solver is implemented for d = 1 only")
    return model.potential_values(pot, grid)


def initial_field(params: PhysicalParams, pot, grid: Grid, opts: SolverOptions) -> np.ndarray:
    x = grid.x
    mid = 0.5 * (grid.a + grid.b)
    kind = opts.init
    if kind == "tf-ansatz":
        if isinstance(pot, model.Box):
            kind = "uniform"
        elif isinstance(pot, model.Harmonic) and params.beta > 0:
            # Thomas-Fermi density (mu - V)_+ / beta with unit mass, widened by
            # a Gaussian floor so that the support can still move.
            g = pot.gamma
            mu = (3.0 * params.beta * g / (4.0 * math.sqrt(2.0))) ** (2.0 / 3.0)
            rho = np.maximum(mu - 0.5 * g * g * (x - mid) ** 2, 0.0) / params.beta
            width = math.sqrt(2.0 * mu) / g
            phi = np.sqrt(rho) + 1e-3 * np.sqrt(rho.max()) * np.exp(-0.5 * ((x - mid) / width) ** 2)
            return _normalized(grid, phi)
        else:
            kind = "gaussian"
    if kind == "uniform":
        phi = np.ones(grid.n)
    elif kind == "gaussian":
        width = 1.0
        if isinstance(pot, model.Harmonic):
            width = 1.0 / math.sqrt(pot.gamma)
        width = min(width, grid.length / 8.0)
        phi = np.exp(-0.5 * ((x - mid) / width) ** 2)
    else:
        rng = np.random.default_rng(opts.seed)
        width = min(1.0, grid.length / 8.0) * rng.uniform(0.5, 2.0)
        shift = rng.uniform(-0.5, 0.5) * width
        noise = rng.uniform(0.5, 1.5, size=grid.n)
        noise = np.convolve(noise, np.ones(5) / 5.0, mode="same")
        phi = noise * np.exp(-0.5 * ((x - mid - shift) / width) ** 2)
    return _normalized(grid, phi)


def _preconditioner(grid: Grid, phi: np.ndarray, v: np.ndarray, params: PhysicalParams, tau: float,
                    g: np.ndarray):
    """Bands of the curvature model ``M = P - I/tau`` (interior nodes), unshifted."""
    ld, lo = grid.fd_laplacian_bands()
    ld, lo = FD_SCALE * ld, FD_SCALE * lo
    p = phi[1:-1]
    lam = float(np.dot(g, phi) / np.dot(phi, phi))
    diag = 0.5 * ld + v[1:-1] + (params.beta + 2.0 * max(params.beta, 0.0)) * p * p - lam
    off = 0.5 * lo
    if params.delta != 0.0:
        diag = diag + params.delta * grid.neg_laplacian(phi * phi)[1:-1] + 2.0 * params.delta * ld * p * p
        off = off + 2.0 * params.delta * lo * p[:-1] * p[1:]
    return diag, off, lam


def _direction(diag, off, lam0, tau, g, c):
    """Projected preconditioned direction ``-P^{-1}(g - lam c)`` with ``<d, c> = 0``.

    ``P = I/tau + M + sigma I`` where the curvature model ``M`` (bands
    ``diag``, ``off``) is shifted by the smallest ``sigma`` in a geometric
    ladder that makes it positive definite (``M`` is indefinite far from the
    minimizer, e.g. for attractive contact or rough fields).  Hence
    ``P >= I/tau`` and small steps reduce to the explicit projected flow.
    """
    rhs = np.stack([g[1:-1], c[1:-1]], axis=1)
    shift = 0.0
    while True:
        try:
            spd_tridiag_solve(diag + shift, off, rhs[:, :1])
            break
        except np.linalg.LinAlgError:
            shift = max(4.0 * shift, 1e-3 * (abs(lam0) + 1.0))
    sol = spd_tridiag_solve(diag + shift + 1.0 / tau, off, rhs)
    pg, pc = sol[:, 0], sol[:, 1]
    lam = float(np.dot(pg, c[1:-1]) / np.dot(pc, c[1:-1]))
    d = np.zeros_like(g)
    d[1:-1] = -(pg - lam * pc)
    return d


class _Problem:
    """Energy/gradient evaluation for one (params, pot, grid)."""

    def __init__(self, params, pot, grid):
        self.params = params
        self.grid = grid
        self.v = model.potential_values(pot, grid)

    def breakdown(self, phi):
        terms = model.energy_terms(self.grid, phi, self.v)
        return model.energy_from_terms(terms, self.params.beta, self.params.delta)

    def energy(self, phi) -> float:
        return self.breakdown(phi).total

    def energy_change(self, new, old) -> float:
        return model.energy_difference(self.grid, new, old, self.v, self.params.beta, self.params.delta)

    def gradient(self, phi):
        return model.apply_hamiltonian(self.grid, phi, self.v, self.params.beta, self.params.delta)

    def residual(self, phi, g=None, breakdown=None):
        g = self.gradient(phi) if g is None else g
        b = self.breakdown(phi) if breakdown is None else breakdown
        mu = model.mu_from_breakdown(b)
        return gridmod.l2_norm(self.grid, g - mu * phi), mu

    def stationarity(self, phi):
        """Stopping measure of the flow (the E-L residual for the direct problem)."""
        return self.residual(phi)


def _step(prob: _Problem, phi: np.ndarray, tau: float, g=None):
    g = prob.gradient(phi) if g is None else g
    diag, off, lam0 = _preconditioner(prob.grid, phi, prob.v, prob.params, tau, g)
    d = _direction(diag, off, lam0, tau, g, phi)
    trial = phi + d
    if not np.all(np.isfinite(trial)):
        raise StepSizeError(f"flow step produced non-finite values at tau={tau:g}; retry with a smaller tau")
    mass = gridmod.inner(prob.grid, trial, trial)
    return _normalized(prob.grid, trial), mass


def flow_step(field: Field, params: PhysicalParams, pot, tau: float) -> Field:
    """One preconditioned projected flow step (no step-size control)."""
    model._require_normalized(field)
    if not tau > 0:
        raise ConfigurationError("tau must be positive")
    prob = _Problem(params, pot, field.grid)
    new, _ = _step(prob, np.array(field.values, dtype=float), tau)
    return Field(field.grid, new)


def _finish(prob: _Problem, phi: np.ndarray, iters: int, trace: FlowTrace, mode: str) -> GroundStateResult:
    f = Field(prob.grid, phi)
    b = prob.breakdown(phi)
    res, mu = prob.residual(phi, breakdown=b)
    return GroundStateResult(field=f, energy=b, mu=mu, iterations=iters, residual_norm=res,
                             decay_fit=model.decay_fit(f), trace=trace, mode=mode)


def _run_flow(prob, phi, opts, trace, mode, step, change):
    """Shared accept/reject loop.  ``step(phi, tau) -> (new, mass)``."""
    relative = opts.residual_scaling == "relative"

    def residual(p):
        r, mu = prob.stationarity(p)
        return r / max(1.0, abs(mu)) if relative else r

    tau = opts.tau
    res = residual(phi)
    e = prob.energy(phi)
    trace.append(0, e, 1.0, res, tau, True, 0.0)
    last_drop = math.inf
    for it in range(1, opts.max_iterations + 1):
        if res <= opts.residual_tolerance and last_drop <= opts.energy_tolerance * max(1.0, abs(e)):
            return _finish(prob, phi, it - 1, trace, mode)
        try:
            new, mass = step(phi, tau)
            de = change(new, phi)
        except StepSizeError:
            new, mass, de = None, math.nan, math.inf
        if de <= ENERGY_SLACK:
            phi = new
            e += de
            last_drop = max(-de, 0.0)
            res = residual(phi)
            trace.append(it, e, mass, res, tau, True, de, gridmod.inner(prob.grid, phi, phi))
            tau = min(tau * 2.0, opts.tau_max)
        else:
            trace.append(it, e + de, mass, res, tau, False, de)
            tau *= 0.5
            # energy can no longer be lowered at this step size
            last_drop = 0.0
            if tau < opts.tau_min:
                if res <= opts.residual_tolerance:
                    return _finish(prob, phi, it, trace, mode)
                raise ConvergenceError(f"step size underflow with residual {res:.3e}", trace=trace,
                                       field=Field(prob.grid, phi))
    raise ConvergenceError(f"no convergence in {opts.max_iterations} iterations (residual {res:.3e})",
                           trace=trace, field=Field(prob.grid, phi))


def minimize(params: PhysicalParams, pot, grid: Grid, opts: SolverOptions = SolverOptions(),
             initial: Optional[np.ndarray] = None) -> GroundStateResult:
    """Ground state by the preconditioned normalized gradient flow."""
    if opts.mode == "transformed":
        return minimize_transformed(params, pot, grid, opts, initial=initial)
    _validate(params, pot, grid)
    prob = _Problem(params, pot, grid)
    phi = _start(params, pot, grid, opts, initial)
    return _run_flow(prob, phi, opts, FlowTrace(), "direct",
                     step=lambda p, tau: _step(prob, p, tau),
                     change=prob.energy_change)


def _start(params, pot, grid, opts, initial):
    if initial is None:
        return initial_field(params, pot, grid, opts)
    values = np.array(initial, dtype=float)
    if values.shape != (grid.n,):
        raise ConfigurationError(f"initial field needs {grid.n} samples")
    return _normalized(grid, values)


# --- transformed-variable mode ------------------------------------------------------

class _TransformedProblem(_Problem):
    """Flow in ``u = F(phi)``; the iterate handed around is still ``phi``."""

    def energy(self, phi) -> float:
        u = model.transform_forward(phi, self.params.delta)
        rho = phi * phi
        w = self.grid.weights
        return self.grid.dirichlet_form(u) + float(np.dot(w, self.v * rho + 0.5 * self.params.beta * rho * rho))

    def energy_change(self, new, old) -> float:
        delta, beta = self.params.delta, self.params.beta
        un, uo = model.transform_forward(new, delta), model.transform_forward(old, delta)
        drho = (new - old) * (new + old)
        srho = new * new + old * old
        w = self.grid.weights
        return (self.grid.dirichlet_form_pair(un - uo, un + uo) + float(np.dot(w, self.v * drho))
                + 0.5 * beta * float(np.dot(w, drho * srho)))

    def _u_gradient(self, phi):
        delta, beta, grid = self.params.delta, self.params.beta, self.grid
        u = model.transform_forward(phi, delta)
        fp = model.transform_derivative(phi, delta)
        cons = phi / fp
        grad = grid.neg_laplacian(u) + (self.v + beta * phi * phi) * cons
        grad[0] = grad[-1] = cons[0] = cons[-1] = 0.0
        return u, fp, grad, cons

    def stationarity(self, phi):
        """Projected gradient of the discrete transformed energy, mapped to phi.

        ``F'(phi) (grad_u - lam G'(u) G(u))`` equals ``H(phi)phi - lam phi`` in
        the continuum limit, so it is on the scale of the direct residual, but
        it vanishes exactly at the stationary points of the transformed
        discretization, which is what this flow converges to.
        """
        _, fp, grad, _ = self._u_gradient(phi)
        w = fp * grad
        lam = gridmod.inner(self.grid, w, phi) / gridmod.inner(self.grid, phi, phi)
        return gridmod.l2_norm(self.grid, w - lam * phi), lam

    def step(self, phi, tau):
        delta, beta, grid = self.params.delta, self.params.beta, self.grid
        u = model.transform_forward(phi, delta)
        fp = model.transform_derivative(phi, delta)
        dg = 1.0 / fp                                   # G'(u)
        ddg = -2.0 * delta * phi / fp**4                # G''(u)
        cons = phi * dg
        pot = self.v + beta * phi * phi
        grad = grid.neg_laplacian(u) + pot * cons
        grad[0] = grad[-1] = cons[0] = cons[-1] = 0.0
        lam0 = float(np.dot(grad, cons) / np.dot(cons, cons))
        ld, lo = grid.fd_laplacian_bands()
        curv = (self.v + 3.0 * beta * phi * phi) * dg * dg + pot * phi * ddg - lam0 * (dg * dg + phi * ddg)
        diag = FD_SCALE * ld + curv[1:-1]
        d = _direction(diag, FD_SCALE * lo, lam0, tau, grad, cons)
        trial = u + d
        if not np.all(np.isfinite(trial)):
            raise StepSizeError(f"flow step produced non-finite values at tau={tau:g}; retry with a smaller tau")
        g_trial = model.transform_inverse(trial, delta)
        mass = gridmod.inner(grid, g_trial, g_trial)
        return _normalized(grid, g_trial), mass


def minimize_transformed(params: PhysicalParams, pot, grid: Grid, opts: SolverOptions = SolverOptions(),
                         initial: Optional[np.ndarray] = None) -> GroundStateResult:
    """Minimize ``int |u'|^2 + V G(u)^2 + beta/2 G(u)^4`` subject to ``int G(u)^2 = 1``.

    ``u = F(phi)`` removes the HOI term.  The step is a preconditioned
    projected flow in ``u``; the retraction maps back through ``phi = G(u)``
    and normalizes.  The returned result is expressed in ``phi`` (energy, mu
    and E-L residual of the untransformed problem).
    """
    _validate(params, pot, grid)
    if not params.delta > 0:
        raise ConfigurationError("transformed mode needs delta > 0")
    prob = _TransformedProblem(params, pot, grid)
    phi = _start(params, pot, grid, opts, initial)
    return _run_flow(prob, phi, opts, FlowTrace(), "transformed",
                     step=prob.step, change=prob.energy_change)

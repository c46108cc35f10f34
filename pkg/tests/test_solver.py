import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle_values as ov
from mgpe import grid as gridmod
from mgpe import model, solver
from mgpe.errors import (ConfigurationError, ConvergenceError, DegenerateInputError, NonExistenceError,
                         PreconditionError)
from mgpe.grid import SampledFunction, make_grid, symmetric_grid
from mgpe.model import Box, Field, Harmonic, PhysicalParams
from mgpe.solver import SolverOptions, flow_step, minimize, minimize_transformed, project_normalize

H = Harmonic()
WHOLE = symmetric_grid(12.0, 513)
BOXGRID = make_grid(0.0, 1.0, 257, "box")


def _energy(f, params, pot):
    return model.energy(f, params, pot).total


def test_harmonic_linear_ground_state():
    res = minimize(PhysicalParams(0, 0), H, WHOLE, SolverOptions(init="uniform"))
    assert res.energy.total == pytest.approx(0.5, abs=1e-6)
    gauss2 = np.exp(-WHOLE.x**2) / math.sqrt(math.pi)
    assert gridmod.l2_norm(WHOLE, res.field.density - gauss2) <= 1e-6


def test_box_linear_ground_state():
    res = minimize(PhysicalParams(0, 0), Box(), BOXGRID, SolverOptions(init="gaussian"))
    assert res.energy.total == pytest.approx(math.pi**2 / 2, abs=1e-6)
    mode = math.sqrt(2) * np.sin(math.pi * BOXGRID.x)
    assert np.max(np.abs(res.field.values - mode)) <= 1e-6


def test_interacting_energy_matches_basis_oracle():
    res = minimize(PhysicalParams(10, 1), H, symmetric_grid(12.0, 1025), SolverOptions(residual_tolerance=1e-10))
    assert res.energy.total == pytest.approx(ov.E_BETA10_DELTA1, abs=1e-8)


def test_converged_residual_below_tolerance():
    params = PhysicalParams(100, 1)
    res = minimize(params, H, symmetric_grid(16.0, 1025), SolverOptions())
    assert res.residual_norm <= 1e-8
    assert model.el_residual(res.field, params, H) <= 1e-8


def test_result_fields():
    res = minimize(PhysicalParams(1, 1), H, WHOLE)
    assert res.mode == "direct"
    assert res.iterations == len([r for r in res.trace.records if r.accepted]) - 1
    assert res.mu == pytest.approx(res.energy.total + res.energy.contact + res.energy.hoi, abs=1e-14)
    assert res.decay_fit is not None and res.decay_fit.alpha > 0
    assert res.field.norm == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("init", solver.INIT_KINDS)
def test_initializations_reach_same_state(init):
    ref = minimize(PhysicalParams(5, 2), H, WHOLE)
    res = minimize(PhysicalParams(5, 2), H, WHOLE, SolverOptions(init=init, seed=11))
    assert gridmod.l2_norm(WHOLE, res.field.density - ref.field.density) <= 1e-6


def test_seeded_runs_are_identical():
    a = minimize(PhysicalParams(1, 1), H, WHOLE, SolverOptions(init="random", seed=42))
    b = minimize(PhysicalParams(1, 1), H, WHOLE, SolverOptions(init="random", seed=42))
    assert np.array_equal(a.field.values, b.field.values)


def test_random_init_needs_seed():
    with pytest.raises(ConfigurationError):
        SolverOptions(init="random")


@pytest.mark.parametrize("kw", [{"tau": 0.0}, {"init": "bogus"}, {"mode": "bogus"},
                                {"residual_scaling": "bogus"}, {"max_iterations": 0}])
def test_options_validated(kw):
    with pytest.raises(ConfigurationError):
        SolverOptions(**kw)


def test_negative_delta_has_no_ground_state():
    with pytest.raises(NonExistenceError):
        minimize(PhysicalParams(0, -1), H, WHOLE)


def test_nonexistence_thresholds():
    with pytest.raises(NonExistenceError):
        solver.check_existence(PhysicalParams(-ov.C_B, 0.0, dim=2))
    with pytest.raises(NonExistenceError):
        solver.check_existence(PhysicalParams(-0.1, 0.0, dim=3))
    solver.check_existence(PhysicalParams(-0.9 * ov.C_B, 0.0, dim=2))


def test_solver_is_one_dimensional():
    with pytest.raises(ConfigurationError):
        minimize(PhysicalParams(1, 1, dim=3), H, WHOLE)


def test_zero_initial_field():
    with pytest.raises(DegenerateInputError):
        minimize(PhysicalParams(1, 1), H, WHOLE, initial=np.zeros(WHOLE.n))


def test_iteration_cap_raises_with_trace():
    with pytest.raises(ConvergenceError) as info:
        minimize(PhysicalParams(100, 1), H, WHOLE, SolverOptions(max_iterations=2, init="uniform"))
    assert info.value.trace is not None and len(info.value.trace) >= 2
    assert info.value.field is not None


def test_trace_is_monotone_and_normalized():
    res = minimize(PhysicalParams(100, 1), H, symmetric_grid(16.0, 513), SolverOptions(init="gaussian"))
    assert res.trace.is_monotone()
    assert np.max(res.trace.mass_errors) <= 1e-12


# --- flow step / projection ------------------------------------------------------------

def test_flow_step_fixed_point():
    f = Field(BOXGRID, math.sqrt(2) * np.sin(math.pi * BOXGRID.x))
    out = flow_step(f, PhysicalParams(0, 0), Box(), 0.1)
    assert np.max(np.abs(out.values - f.values)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 50.0), st.floats(0.0, 5.0))
def test_flow_step_descends(seed, beta, delta):
    rng = np.random.default_rng(seed)
    phi = np.exp(-WHOLE.x**2 / 2) * rng.uniform(0.5, 1.5, WHOLE.n)
    phi[0] = phi[-1] = 0.0
    f = Field(WHOLE, phi / gridmod.l2_norm(WHOLE, phi))
    params = PhysicalParams(beta, delta)
    out = flow_step(f, params, H, 1e-3)
    assert _energy(out, params, H) <= _energy(f, params, H) + 1e-12


def test_flow_strictly_decreases_for_many_steps():
    params = PhysicalParams(100, 1)
    g = symmetric_grid(16.0, 513)
    f = Field(g, math.pi ** -0.25 * np.exp(-g.x**2 / 2))
    f = project_normalize(f)
    energies = [_energy(f, params, H)]
    for _ in range(100):
        f = flow_step(f, params, H, 1e-3)
        energies.append(_energy(f, params, H))
    assert np.all(np.diff(energies) < 0)


def test_flow_step_validation():
    f = Field(WHOLE, 2 * np.exp(-WHOLE.x**2))
    with pytest.raises(PreconditionError):
        flow_step(f, PhysicalParams(0, 0), H, 0.1)
    g = project_normalize(f)
    with pytest.raises(ConfigurationError):
        flow_step(g, PhysicalParams(0, 0), H, 0.0)


def test_project_normalize_halves():
    phi = math.pi ** -0.25 * np.exp(-WHOLE.x**2 / 2)
    phi /= gridmod.l2_norm(WHOLE, phi)
    out = project_normalize(SampledFunction(WHOLE, 2 * phi))
    np.testing.assert_allclose(out.values, phi, rtol=1e-15, atol=1e-300)


def test_project_normalize_idempotent():
    f = project_normalize(SampledFunction(WHOLE, np.exp(-WHOLE.x**2)))
    assert np.max(np.abs(project_normalize(f).values - f.values)) <= 1e-15


def test_project_normalize_constant_on_unit_box():
    g = make_grid(0.0, 1.0, 101, "box")
    out = project_normalize(SampledFunction(g, np.ones(g.n)))
    np.testing.assert_allclose(out.values, 1.0, atol=1e-12)


def test_project_normalize_zero():
    with pytest.raises(DegenerateInputError):
        project_normalize(SampledFunction(WHOLE, np.zeros(WHOLE.n)))


# --- transformed mode ------------------------------------------------------------------

def test_transformed_small_delta_matches_linear():
    a = minimize(PhysicalParams(0, 1e-6), H, WHOLE)
    b = minimize_transformed(PhysicalParams(0, 1e-6), H, WHOLE)
    assert gridmod.l2_norm(WHOLE, a.field.density - b.field.density) <= 1e-4


def test_transformed_energy_agrees():
    a = minimize(PhysicalParams(1, 1), H, WHOLE)
    b = minimize(PhysicalParams(1, 1), H, WHOLE, SolverOptions(mode="transformed"))
    assert b.mode == "transformed"
    assert abs(a.energy.total - b.energy.total) <= 1e-6


def test_transformed_energy_of_direct_minimizer():
    params = PhysicalParams(1, 1)
    a = minimize(params, H, WHOLE)
    u = model.transform_forward(a.field.values, params.delta)
    et = model.transformed_energy(WHOLE, u, H.on_grid(WHOLE), params.beta, params.delta)
    assert et == pytest.approx(a.energy.total, abs=1e-6)


def test_transformed_needs_positive_delta():
    with pytest.raises(ConfigurationError):
        minimize_transformed(PhysicalParams(1, 0), H, WHOLE)


def test_transformed_box_converges_with_resolution():
    gaps = []
    for n in (257, 513):
        g = make_grid(0.0, 1.0, n, "box")
        opts = SolverOptions(residual_scaling="relative")
        a = minimize(PhysicalParams(10, 10), Box(), g, opts)
        b = minimize_transformed(PhysicalParams(10, 10), Box(), g, opts)
        gaps.append(abs(a.energy.total - b.energy.total))
    assert gaps[1] < gaps[0] / 10

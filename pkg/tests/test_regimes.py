import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle_values as ov
from mgpe import grid as gridmod
from mgpe import model, regimes
from mgpe.errors import ConfigurationError, DomainError
from mgpe.grid import symmetric_grid
from mgpe.model import Field, Harmonic, PhysicalParams

H = Harmonic()
GRID = symmetric_grid(10.0, 1025)
GAUSS = Field(GRID, math.pi ** -0.25 * np.exp(-GRID.x**2 / 2))


# --- classification -------------------------------------------------------------------------

def test_strong_contact_is_case1():
    r = regimes.classify(PhysicalParams(1e6, 1.0))
    assert r.case == "C1"
    assert r.eps == pytest.approx(0.01, rel=1e-12)
    assert r.direction == regimes.UP


@pytest.mark.parametrize("beta", [1e2, 1e3, 1e4])
def test_critical_scaling_is_case2(beta):
    r = regimes.classify(PhysicalParams(beta, beta ** (5 / 3)))
    assert r.case == "C2"
    assert r.delta_inf == pytest.approx(1.0, rel=1e-12)


def test_hoi_dominated_is_case3():
    assert regimes.classify(PhysicalParams(10.0, 1e6)).case == "C3"
    assert regimes.classify(PhysicalParams(0.0, 1.0)).case == "C3"
    assert regimes.classify(PhysicalParams(-10.0, 1e6)).case == "C3'"


def test_attractive_cases():
    assert regimes.classify(PhysicalParams(-1e4, 1.0)).case == "C1'"
    r = regimes.classify(PhysicalParams(-1e3, 1e3 ** (5 / 3)))
    assert r.case == "C2'"


def test_box_case1prime():
    r = regimes.classify(PhysicalParams(-1e4, 10.0), "box")
    assert r.case == "B1'"
    assert r.eps == pytest.approx(math.sqrt(10.0 / 1e4), rel=1e-12)
    assert r.direction == regimes.DOWN


def test_box_cases():
    assert regimes.classify(PhysicalParams(1e4, 0.0), "box").case == "B1"
    assert regimes.classify(PhysicalParams(10.0, 10.0), "box").case == "B2"
    assert regimes.classify(PhysicalParams(0.0, 10.0), "box").case == "B3"


@pytest.mark.parametrize("params", [PhysicalParams(1.0, -1.0), PhysicalParams(0.0, 0.0),
                                    PhysicalParams(-ov.C_B, 0.0, dim=2), PhysicalParams(-0.1, 0.0, dim=3)])
def test_no_regime(params):
    r = regimes.classify(params)
    assert r.case == "none"
    assert r.note


def test_classify_validation():
    with pytest.raises(ConfigurationError):
        regimes.classify(PhysicalParams(1.0, 1.0), thresholds=(10.0, 0.1))
    with pytest.raises(ConfigurationError):
        regimes.classify(PhysicalParams(1.0, 1.0), domain_kind="torus")
    with pytest.raises(ConfigurationError):
        regimes.eps_for_case("C9", 1.0, 1.0, 1)


@pytest.mark.parametrize("d,expected", [(1, 5 / 3), (2, 3 / 2), (3, 7 / 5)])
def test_critical_exponent(d, expected):
    assert regimes.critical_exponent(d) == pytest.approx(expected, rel=1e-15)


def test_gagliardo_nirenberg_constant():
    assert regimes.C_B == pytest.approx(ov.C_B, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 1e8), st.floats(1e-3, 1e8))
def test_classification_matches_ratio(beta, delta):
    r = regimes.classify(PhysicalParams(beta, delta))
    ratio = delta / beta ** (5 / 3)
    expected = "C1" if ratio < 0.1 else ("C2" if ratio <= 10 else "C3")
    assert r.case == expected
    assert r.ratio == pytest.approx(ratio, rel=1e-12)


# --- rescaling ------------------------------------------------------------------------------

@pytest.mark.parametrize("direction", ["up", "down"])
def test_rescale_identity_at_one(direction):
    out = regimes.rescale(GAUSS, 1.0, direction)
    np.testing.assert_array_equal(out.values, GAUSS.values)
    np.testing.assert_array_equal(out.grid.x, GRID.x)


@pytest.mark.parametrize("eps", [0.1, 10.0])
@pytest.mark.parametrize("direction", ["up", "down"])
def test_rescale_keeps_norm(eps, direction):
    out = regimes.rescale(GAUSS, eps, direction)
    assert gridmod.l2_norm(out.grid, out.values) == pytest.approx(1.0, abs=1e-12)


def test_rescale_up_moment():
    eps = 0.3
    out = regimes.rescale(GAUSS, eps, "up")
    m0 = gridmod.inner(GRID, GRID.x**2, GAUSS.values**2)
    m1 = gridmod.inner(out.grid, out.grid.x**2, out.values**2)
    assert m1 == pytest.approx(eps**2 * m0, rel=1e-12)


def test_rescale_round_trip():
    back = regimes.rescale(regimes.rescale(GAUSS, 0.2, "up"), 0.2, "down")
    np.testing.assert_allclose(back.values, GAUSS.values, rtol=1e-14)
    np.testing.assert_allclose(back.grid.x, GRID.x, atol=1e-12)


def test_rescale_onto_target_warns_on_truncation():
    target = symmetric_grid(1.0, 201)
    with pytest.warns(RuntimeWarning):
        out = regimes.rescale(GAUSS, 1.0, "up", target=target)
    assert gridmod.l2_norm(target, out.values) == pytest.approx(1.0, abs=1e-12)


def test_rescale_validation():
    with pytest.raises(DomainError):
        regimes.rescale(GAUSS, 0.0)
    with pytest.raises(ConfigurationError):
        regimes.rescale(GAUSS, 0.5, "sideways")


# --- rescaled energy -------------------------------------------------------------------------

def test_rescaled_energy_at_unit_eps():
    params = PhysicalParams(3.0, 2.0)
    assert regimes.rescaled_energy(GAUSS, 1.0, params, H) == pytest.approx(model.energy(GAUSS, params, H).total,
                                                                            abs=1e-13)


@pytest.mark.parametrize("eps", [0.5, 2.0])
def test_rescaled_energy_scaling(eps):
    params = PhysicalParams(3.0, 2.0)
    up = regimes.rescale(GAUSS, eps, "up")
    e = model.energy(GAUSS, params, H).total
    assert regimes.rescaled_energy(up, eps, params, H) / eps**2 == pytest.approx(e, rel=1e-10)


def test_rescaled_energy_interaction_dropout():
    # with beta = delta = 0 only the eps^4 kinetic and the potential terms remain
    eps = 0.5
    e = regimes.rescaled_energy(GAUSS, eps, PhysicalParams(0.0, 0.0), H)
    parts = model.energy(GAUSS, PhysicalParams(0.0, 0.0), H)
    assert e == pytest.approx(eps**4 * parts.kinetic + parts.potential, abs=1e-12)


# --- non-existence probe ---------------------------------------------------------------------

def test_probe_diverges_for_negative_delta():
    pts = regimes.nonexistence_probe(PhysicalParams(0.0, -1.0), H)
    diag = regimes.probe_diagnostics(pts)
    assert diag["min_energy"] < -1e3
    assert diag["monotone"]
    assert diag["slope_total"] == pytest.approx(-3.0, rel=0.05)
    assert diag["slope_hoi"] == pytest.approx(-3.0, abs=1e-10)


def test_probe_term_scaling():
    pts = regimes.nonexistence_probe(PhysicalParams(2.0, -1.0), H, eps_list=(1.0, 0.1))
    a, b = pts
    assert b.kinetic == pytest.approx(a.kinetic * 100, rel=1e-12)
    assert b.contact == pytest.approx(a.contact * 10, rel=1e-12)
    assert b.hoi == pytest.approx(a.hoi * 1000, rel=1e-12)


def test_probe_requires_negative_delta():
    with pytest.raises(DomainError):
        regimes.nonexistence_probe(PhysicalParams(0.0, 1.0), H)


def test_positive_delta_family_is_bounded():
    # the same concentrating family has energy growing without bound when delta > 0
    f = regimes.standard_bump()
    energies = []
    for eps in (1.0, 0.1, 0.01):
        g = f.grid.scaled(eps)
        phi = Field(g, np.asarray(f.values) / math.sqrt(eps))
        energies.append(model.energy(phi, PhysicalParams(0.0, 1.0), H).total)
    assert min(energies) > 0
    assert np.all(np.diff(energies) > 0)


def test_loglog_slope():
    eps = np.array([1.0, 0.1, 0.01])
    assert regimes.loglog_slope(eps, 5 * eps**-2.5) == pytest.approx(-2.5, abs=1e-12)

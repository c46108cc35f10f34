"""Re-derive the frozen reference values independently of the package."""
import math

import numpy as np
import pytest
from numpy.polynomial import hermite
from scipy.optimize import minimize

import oracle_values as ov

mp = pytest.importorskip("mpmath")


@pytest.fixture(autouse=True)
def _precision():
    old = mp.mp.dps
    mp.mp.dps = 30
    yield
    mp.mp.dps = old


def test_transform_quadrature():
    val = mp.quad(lambda s: mp.sqrt(mp.mpf(1) / 2 + 2 * s**2), [0, 1])
    assert float(val) == pytest.approx(ov.F_ONE_DELTA_ONE, abs=1e-15)


def test_thomas_fermi_mu():
    assert float((3 / (4 * mp.sqrt(2))) ** (mp.mpf(2) / 3)) == pytest.approx(ov.TF_MU_D1, abs=1e-15)


def test_case2_closed_form_root():
    x0 = mp.findroot(lambda x: 2 * (x**3 / 3 - x**2 * mp.coth(x) + x) - 1, 2)
    assert float(x0) == pytest.approx(ov.C2_X0_D1, abs=1e-14)
    assert float(1 + x0**2 / 2 - x0 * mp.coth(x0)) == pytest.approx(ov.C2_MU_D1, abs=1e-14)


def test_case2prime_closed_form_root():
    x0 = mp.findroot(lambda x: 2 * (-x**3 / 3 - x**2 * mp.cot(x) + x) - 1, 1.74)
    assert float(x0) == pytest.approx(ov.C2P_X0_D1, abs=1e-14)
    assert float(-1 + x0**2 / 2 + x0 * mp.cot(x0)) == pytest.approx(ov.C2P_MU_D1, abs=1e-14)


def test_case3_constants():
    x0 = (mp.mpf(45) / 2) ** (mp.mpf(1) / 5)
    assert float(x0) == pytest.approx(ov.C3_X0_D1, abs=1e-15)
    assert float(x0**2 / 6) == pytest.approx(ov.C3_MU_D1, abs=1e-15)
    r = (mp.mpf(1050) / (8 * mp.pi)) ** (mp.mpf(1) / 7)
    assert float(r) == pytest.approx(ov.C3_R_D3, abs=1e-15)
    assert float(3 * r**2 / 10) == pytest.approx(ov.C3_MU_D3, abs=1e-15)
    # mass of gamma^2 (R^2 - r^2)^2 / 40 over the unit ball scaled to R
    mass = 4 * mp.pi * mp.quad(lambda t: (r**2 - t**2) ** 2 / 40 * t**2, [0, r])
    assert float(mass) == pytest.approx(1.0, abs=1e-15)


def test_case1prime_constants():
    rho = lambda x: (1 + mp.cos(x)) / (2 * mp.pi)
    drho = lambda x: -mp.sin(x) / (2 * mp.pi)
    energy = mp.quad(lambda x: -rho(x) ** 2 / 2 + drho(x) ** 2 / 2, [-mp.pi, mp.pi])
    assert float(energy) == pytest.approx(ov.C1P_E_D1, abs=1e-15)
    assert float(2 * energy) == pytest.approx(ov.C1P_MU_D1, abs=1e-15)
    assert float(mp.findroot(lambda t: mp.tan(t) - t, 4.49)) == pytest.approx(ov.TAN_ROOT, abs=1e-14)


def test_box_constants():
    c = 1 / (1 - 2 * mp.tanh(mp.mpf(1) / 2))
    assert float(c) == pytest.approx(ov.B2_MU, abs=1e-13)
    mass = mp.quad(lambda x: c * (1 - mp.cosh(x - mp.mpf(1) / 2) / mp.cosh(mp.mpf(1) / 2)), [0, 1])
    assert float(mass) == pytest.approx(1.0, abs=1e-15)
    assert float(mp.sqrt(mp.quad(lambda x: 36 * x**2 * (1 - x) ** 2, [0, 1])))\
        == pytest.approx(ov.B3_L2_NORM, abs=1e-15)


def test_gaussian_integrals():
    phi2 = lambda x: mp.exp(-x**2) / mp.sqrt(mp.pi)
    quartic = mp.quad(lambda x: phi2(x) ** 2, [-mp.inf, mp.inf]) / 2
    hoi = mp.quad(lambda x: mp.diff(phi2, x) ** 2, [-mp.inf, mp.inf]) / 2
    assert float(quartic) == pytest.approx(ov.GAUSS_HALF_QUARTIC, abs=1e-15)
    assert float(hoi) == pytest.approx(ov.GAUSS_HALF_QUARTIC, abs=1e-12)


def hermite_basis_energy(k: int = 22, beta: float = 10.0, delta: float = 1.0) -> float:
    """Minimum of the energy over ``k`` even Hermite functions (Gauss-Legendre on [-9, 9])."""
    x, w = np.polynomial.legendre.leggauss(600)
    x, w = 9 * x, 9 * w
    vals, ders = [], []
    for n in range(0, 2 * k, 2):
        c = np.zeros(n + 1)
        c[n] = 1.0
        norm = 1.0 / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))
        h = hermite.hermval(x, c)
        hp = hermite.hermval(x, hermite.hermder(c)) if n else np.zeros_like(x)
        e = np.exp(-x * x / 2)
        vals.append(norm * h * e)
        ders.append(norm * (hp - x * h) * e)
    p, d = np.array(vals), np.array(ders)

    def energy(c):
        c = c / np.sqrt(c @ c)
        phi, dphi = c @ p, c @ d
        rho = phi * phi
        return float(w @ (0.5 * dphi**2 + 0.5 * x * x * rho + 0.5 * beta * rho**2 + 2.0 * delta * (phi * dphi) ** 2))

    c0 = np.zeros(k)
    c0[0] = 1.0
    return float(minimize(energy, c0, method="BFGS", options={"gtol": 1e-12, "maxiter": 20000}).fun)


def test_hermite_basis_energy():
    assert hermite_basis_energy() == pytest.approx(ov.E_BETA10_DELTA1, abs=1e-9)

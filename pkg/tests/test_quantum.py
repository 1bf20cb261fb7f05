import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite_e import hermegauss

from mtcavity.core import Polynomial, poly_eval, poly_real_roots
from mtcavity.errors import DegenerateInput, NegativeVariance, NoConnection
from mtcavity.quantum import SmearingKernel, corrected_kink, smear, smear_derivative
from mtcavity.travelwave import TravelingWaveProblem, export_grid, phi4_potential, residual, shoot, tanh_kink

U = phi4_potential()
PROBLEM = TravelingWaveProblem(0.0, U.derivative(), -1.0, 1.0)
NODES, WEIGHTS = hermegauss(20)  # probabilists' Hermite: weight exp(-g^2/2)
WEIGHTS = WEIGHTS / math.sqrt(2 * math.pi)


def gauss_expectation(p, z, sigma2):
    return float(np.sum(WEIGHTS * poly_eval(p, z + math.sqrt(sigma2) * NODES)))


def test_smear_examples():
    assert smear_derivative(U, 1, 0.0).coeffs == U.derivative().coeffs
    s2 = 0.37
    assert smear(Polynomial([0, 0, 0, 1]), s2).coeffs == pytest.approx((0, 3 * s2, 0, 1), abs=1e-15)
    assert smear_derivative(U, 1, 0.1).coeffs == pytest.approx((0, -0.7, 0, 1), abs=1e-15)


def test_smear_errors():
    with pytest.raises(NegativeVariance):
        smear(U, -0.1)
    with pytest.raises(NegativeVariance):
        smear_derivative(U, 1, -1e-9)
    with pytest.raises(DegenerateInput):
        smear_derivative(U, 5, 0.1)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=1, max_size=7),
    st.floats(0, 2),
    st.floats(-2, 2),
)
def test_smear_matches_gauss_hermite(coeffs, sigma2, z):
    p = Polynomial(coeffs)
    expected = gauss_expectation(p, z, sigma2)
    assert poly_eval(smear(p, sigma2), z) == pytest.approx(expected, rel=1e-10, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_smearing_semigroup(a, b):
    p = Polynomial([0.1, -1, 0.3, 1, -0.2, 0.05])
    lhs = smear(smear(p, a), b).coeffs
    rhs = smear(p, a + b).coeffs
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_kernel_validation():
    xi = np.linspace(-1, 1, 5)
    with pytest.raises(NegativeVariance):
        SmearingKernel(xi, np.array([0, 0, -0.1, 0, 0]))
    with pytest.raises(DegenerateInput):
        SmearingKernel(xi, np.full(5, 2e3))
    with pytest.raises(DegenerateInput):
        SmearingKernel(xi[::-1], np.zeros(5))
    with pytest.raises(NegativeVariance):
        SmearingKernel.uniform(-1.0)
    k = SmearingKernel.sech2_bump(0.2, 1.0, base=0.05)
    assert k(0.0) == pytest.approx(0.25) and k(1e3) == pytest.approx(0.05)
    assert not k.is_uniform and SmearingKernel.uniform(0.1).is_uniform


def test_zero_kernel_reproduces_classical():
    tol = 1e-8
    classical = shoot(PROBLEM, tol)
    prof = corrected_kink(classical, SmearingKernel.uniform(0.0), PROBLEM, tol=tol)
    grid = export_grid(prof, 2001)
    assert prof.info["converged"]
    assert np.max(np.abs(prof(grid) - classical(grid))) <= 10 * tol
    assert residual(prof, PROBLEM, grid) <= 10 * tol


def test_uniform_shift_to_smeared_vacua():
    prof = corrected_kink(tanh_kink(), SmearingKernel.uniform(0.1), PROBLEM)
    a, b = prof.info["corrected_asymptotes"]
    roots = poly_real_roots(smear(U.derivative(), 0.1), (-2, 2), 1e-12)
    assert (a, b) == pytest.approx((roots[0], roots[-1]), abs=1e-8)
    assert b == pytest.approx(math.sqrt(0.7), abs=1e-8)
    xi_max = prof.info["xi_max"]
    assert prof(-xi_max) == pytest.approx(a, abs=1e-7)
    assert prof(xi_max) == pytest.approx(b, abs=1e-7)
    # width rescales: the smeared cubic is sqrt(0.7) times a scaled phi4 kink
    xi = np.linspace(-10, 10, 401)
    exact = math.sqrt(0.7) * np.tanh(math.sqrt(0.7) * xi / math.sqrt(2))
    assert np.max(np.abs(prof(xi) - exact)) <= 1e-6


def test_vacua_collapse():
    with pytest.raises(NoConnection):
        corrected_kink(tanh_kink(), SmearingKernel.uniform(1.0), PROBLEM)


def test_amplitude_non_increasing_in_sigma2():
    amps = []
    for s2 in np.linspace(0.0, 0.3, 10):
        prof = corrected_kink(tanh_kink(), SmearingKernel.uniform(float(s2)), PROBLEM)
        a, b = prof.info["corrected_asymptotes"]
        amps.append(abs(b - a))
    assert np.all(np.diff(amps) <= 0)


def test_bump_kernel_converges():
    kernel = SmearingKernel.sech2_bump(0.1, width=1.0)
    prof = corrected_kink(tanh_kink(), kernel, PROBLEM, max_iter=30, tol=1e-8)
    assert prof.info["converged"] and prof.info["kernel_kind"] == "sech2"
    assert prof.info["corrected_asymptotes"] == pytest.approx((-1.0, 1.0), abs=1e-12)
    xi = np.linspace(-10, 10, 401)
    diff = prof(xi) - tanh_kink()(xi)
    assert 1e-4 < np.max(np.abs(diff)) < 0.2
    assert np.max(np.abs(diff + diff[::-1])) <= 1e-6  # odd symmetry survives


def test_unconverged_result_is_tagged():
    kernel = SmearingKernel.sech2_bump(0.1, width=1.0)
    prof = corrected_kink(tanh_kink(), kernel, PROBLEM, max_iter=1, tol=1e-8)
    assert prof.info["converged"] is False and prof.info["iterations"] == 1
    assert prof.info["last_change"] > 1e-8

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasegen import oracle
from phasegen.fock import (
    fock_generating,
    fock_wigner,
    laguerre,
    laguerre_oracle,
    squeezed_fock_generating,
    squeezed_fock_generating_closed,
    squeezed_fock_marginal,
    squeezed_fock_wigner,
)
from phasegen.gaussian import PhasePoint, multiply, phase_space_integral
from phasegen.jets import JetSpace
from phasegen.states import SqueezeParams, squeezed_thermal
from phasegen.subtraction import default_grid, subtract

SQ3 = SqueezeParams.from_A(3.0)


def test_generating_examples():
    alpha = np.array([0.0, 0.5 + 0.1j, -1.2j])
    form = fock_generating(JetSpace.build({"nu": 3}))
    np.testing.assert_allclose(form(alpha).coefficient((0,)), 2 * np.exp(-2 * abs(alpha) ** 2))
    np.testing.assert_allclose(fock_generating(1.0)(alpha), 1.0)
    at_one = fock_generating(JetSpace.build({"nu": 1}, centers={"nu": 1.0}))(alpha)
    np.testing.assert_allclose(at_one.extract((1,)), abs(alpha) ** 2 - 0.5, atol=1e-14)


def test_fock_examples():
    assert fock_wigner(0, 0.0) == pytest.approx(2.0)
    assert fock_wigner(1, 0.0) == pytest.approx(-2.0)
    pt = PhasePoint(1.3, -0.7)
    assert fock_wigner(4, pt) == pytest.approx(laguerre_oracle(4, pt), abs=1e-10)
    with pytest.raises(ValueError):
        fock_wigner(-1, 0.0)


def test_laguerre_oracle_examples():
    alpha = np.linspace(-2, 2, 9) + 0.3j
    np.testing.assert_allclose(laguerre_oracle(0, alpha), 2 * np.exp(-2 * abs(alpha) ** 2))
    assert laguerre_oracle(1, 0.0) == pytest.approx(-2.0)
    # L_3(x) = (-x^3 + 9x^2 - 18x + 6) / 6
    x = np.linspace(0, 5, 11)
    np.testing.assert_allclose(laguerre(3, x), (-(x**3) + 9 * x**2 - 18 * x + 6) / 6, atol=1e-12)


def test_fock_against_oracles():
    alpha = default_grid(-3, 3, 0.25).ravel()
    refs = oracle.wigner_from_dm([oracle.fock_dm(n, N=60) for n in range(9)], alpha)
    for n in range(9):
        w = fock_wigner(n, alpha)
        assert np.abs(w - laguerre_oracle(n, alpha)).max() < 1e-8
        assert np.abs(w - refs[n]).max() < 1e-8


@pytest.mark.parametrize("n", range(9))
def test_unit_trace(n):
    form = fock_generating(JetSpace.build({"nu": n}))
    assert phase_space_integral(form).coefficient((n,)) == pytest.approx(1.0, abs=1e-10)


def test_orthogonality():
    space = JetSpace.build({"nu": 6, "mu": 6})
    overlap = phase_space_integral(multiply(fock_generating(space, "nu"), fock_generating(space, "mu")))
    np.testing.assert_allclose(overlap.coeffs, np.eye(7), atol=1e-8)


def test_squeezed_single_photon_is_subtracted_squeezed_vacuum():
    assert squeezed_fock_wigner(1, SQ3, 0.0) == pytest.approx(-2.0, abs=1e-12)
    grid = default_grid()
    sub = subtract(squeezed_thermal(1.0, SQ3.A, SQ3.B), 1)(grid)
    assert np.abs(squeezed_fock_wigner(1, SQ3, grid) - sub).max() < 1e-10


def test_zero_squeezing_reduces_to_fock():
    alpha = default_grid(step=0.5)
    for n in range(5):
        np.testing.assert_allclose(
            squeezed_fock_wigner(n, SqueezeParams(0.0), alpha), fock_wigner(n, alpha), atol=1e-14
        )


def test_squeezed_fock_differs_from_subtraction_beyond_one():
    q = np.arange(-4, 4.001, 0.05)
    alpha = q / math.sqrt(2)
    sub = subtract(squeezed_thermal(1.0, SQ3.A, SQ3.B), 3)(alpha)
    assert np.abs(squeezed_fock_wigner(3, SQ3, alpha) - sub).max() > 1e-3


def test_closed_form_matches_bogoliubov_route():
    space = JetSpace.build({"nu": 4})
    alpha = np.array([0.2 - 0.1j, 1.0 + 0.4j])
    for params in (SQ3, SqueezeParams(0.4, 1.2)):
        a = squeezed_fock_generating(params, space)(alpha)
        b = squeezed_fock_generating_closed(params.A, params.B, space)(alpha)
        np.testing.assert_allclose(a.coeffs, b.coeffs, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.floats(0, 1.5), st.floats(0, 2 * math.pi))
def test_origin_value_survives_squeezing(n, r, phi):
    value = squeezed_fock_wigner(n, SqueezeParams(r, phi), 0.0)
    assert value == pytest.approx(2 * (-1) ** n, abs=1e-12)


def test_squeezed_fock_against_oracle():
    alpha = default_grid(-2, 2, 0.25).ravel()
    sv = [oracle.squeeze_dm(oracle.fock_dm(n, N=120), SQ3.xi) for n in range(4)]
    refs = oracle.wigner_from_dm(sv, alpha)
    for n in range(4):
        assert np.abs(squeezed_fock_wigner(n, SQ3, alpha) - refs[n]).max() < 1e-8


def test_squeezed_fock_marginal_normalized():
    q = np.linspace(-30, 30, 2401)
    for n in range(4):
        for axis in ("p", "q"):
            m = squeezed_fock_marginal(n, SQ3, axis, q)
            assert m.min() >= -1e-12
            assert np.trapezoid(m, q) == pytest.approx(1.0, abs=1e-8)

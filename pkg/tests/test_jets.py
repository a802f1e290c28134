import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasegen.jets import (
    Jet,
    JetSpace,
    JetSpaceMismatch,
    SingularJetError,
    TruncationError,
    jet_add,
    jet_exp,
    jet_extract,
    jet_inv,
    jet_inv_sqrt,
    jet_mul,
    jet_scale,
    jet_variable,
)

ETA_SPACE = JetSpace.build({"eta": 1, "etabar": 1})


def test_variable_identity_series():
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    np.testing.assert_allclose(j.coeffs, [0, 1, 0])


def test_variable_shifted_center():
    j = jet_variable(JetSpace.build({"J": 2}, centers={"J": 1.0}), "J")
    np.testing.assert_allclose(j.coeffs, [1, 1, 0])


def test_variable_in_two_variable_space():
    eta = jet_variable(ETA_SPACE, "eta")
    expected = np.zeros((2, 2))
    expected[1, 0] = 1
    np.testing.assert_allclose(eta.coeffs, expected)


def test_unknown_variable_names_it():
    with pytest.raises(KeyError, match="nu"):
        jet_variable(ETA_SPACE, "nu")


def test_space_invariants():
    with pytest.raises(ValueError):
        JetSpace(("J", "J"), (1, 1))
    with pytest.raises(ValueError):
        JetSpace(("J",), (-1,))
    with pytest.raises(ValueError):
        JetSpace.build({"J": 1}, centers={"K": 1.0})


def test_mul_examples():
    space = JetSpace.build({"J": 2})
    j = jet_variable(space, "J")
    np.testing.assert_allclose(jet_mul(1 + j, 1 - j).coeffs, [1, 0, -1])
    j1 = jet_variable(JetSpace.build({"J": 1}), "J")
    np.testing.assert_allclose(((1 + j1) * (1 + j1)).coeffs, [1, 2])
    eta = jet_variable(ETA_SPACE, "eta")
    etabar = jet_variable(ETA_SPACE, "etabar")
    assert (eta * etabar).coefficient((1, 1)) == 1


def test_mismatched_spaces():
    a = jet_variable(JetSpace.build({"J": 2}), "J")
    b = jet_variable(JetSpace.build({"J": 3}), "J")
    with pytest.raises(JetSpaceMismatch):
        jet_mul(a, b)
    with pytest.raises(JetSpaceMismatch):
        jet_add(a, b)


def test_exp_examples():
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    np.testing.assert_allclose(jet_exp(j).coeffs, [1, 1, 0.5])
    np.testing.assert_allclose(jet_exp(0 * j).coeffs, [1, 0, 0])
    eta = jet_variable(ETA_SPACE, "eta")
    etabar = jet_variable(ETA_SPACE, "etabar")
    np.testing.assert_allclose(jet_exp(eta + etabar).coeffs, [[1, 1], [1, 1]])


def test_inv_sqrt_examples():
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    r = jet_inv_sqrt(1 + j)
    np.testing.assert_allclose(r.coeffs, [1, -0.5, 3 / 8])
    np.testing.assert_allclose(jet_inv_sqrt(Jet.constant(j.space, 4.0)).coeffs, [0.5, 0, 0])
    np.testing.assert_allclose((r * r * (1 + j)).coeffs, [1, 0, 0], atol=1e-15)


def test_singular_inverse():
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    with pytest.raises(SingularJetError):
        jet_inv_sqrt(j)
    with pytest.raises(SingularJetError):
        jet_inv(j)


def test_extract_examples():
    eta = jet_variable(ETA_SPACE, "eta")
    etabar = jet_variable(ETA_SPACE, "etabar")
    assert jet_extract(jet_exp(eta * etabar), (1, 1)) == pytest.approx(1)
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    assert jet_extract(1 + j + 0.5 * j * j, (2,)) == pytest.approx(1)
    assert jet_extract(3 + 2 * j, (0,)) == pytest.approx(3)


def test_extract_beyond_truncation():
    j = jet_variable(JetSpace.build({"J": 2}), "J")
    with pytest.raises(TruncationError):
        jet_extract(j, (3,))
    with pytest.raises(TruncationError):
        j.derivative_jet("J", 5)


def test_scale_and_division():
    j = jet_variable(JetSpace.build({"J": 3}), "J")
    np.testing.assert_allclose(jet_scale(j, 2j).coeffs, [0, 2j, 0, 0])
    np.testing.assert_allclose((1 / (1 - j)).coeffs, [1, 1, 1, 1])


def test_batched_coefficients():
    space = JetSpace.build({"J": 2})
    j = jet_variable(space, "J")
    x = np.array([1.0, 2.0, 3.0])
    f = jet_exp(j * x)
    assert f.batch_shape == (3,)
    np.testing.assert_allclose(f.coefficient((2,)), x**2 / 2)


# -- properties ------------------------------------------------------------

ORDERS = (3, 2)
SPACE2 = JetSpace(("a", "b"), ORDERS)
complexes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)
coeff_arrays = st.lists(complexes, min_size=12, max_size=12).map(
    lambda v: Jet(SPACE2, np.array(v).reshape(4, 3))
)


def _close(a, b, tol=1e-12):
    scale = max(1.0, np.abs(a.coeffs).max(), np.abs(b.coeffs).max())
    np.testing.assert_allclose(a.coeffs, b.coeffs, atol=tol * scale, rtol=0)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, coeff_arrays, coeff_arrays)
def test_ring_axioms(a, b, c):
    _close((a * b) * c, a * (b * c))
    _close(a * (b + c), a * b + a * c)
    _close(a * b, b * a)
    _close((a + b) + c, a + (b + c))


def _nilpotent(j):
    coeffs = j.coeffs.copy()
    coeffs[0, 0] = 0
    return Jet(j.space, coeffs)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, coeff_arrays)
def test_exp_is_homomorphism(a, b):
    _close(jet_exp(a + b), jet_exp(a) * jet_exp(b), tol=1e-11)


@settings(max_examples=60, deadline=None)
@given(coeff_arrays, st.complex_numbers(min_magnitude=0.5, max_magnitude=3.0))
def test_inv_sqrt_squares_to_inverse(a, c0):
    a = _nilpotent(a) + c0
    r = jet_inv_sqrt(a)
    _close(r * r * a, Jet.constant(a.space, 1.0))
    _close(jet_inv(a) * a, Jet.constant(a.space, 1.0))


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=5, max_size=5),
    st.floats(-1.5, 1.5),
)
def test_recentering_matches_analytic_derivatives(poly, c):
    space = JetSpace.build({"x": 4}, centers={"x": c})
    x = jet_variable(space, "x")
    p = np.polynomial.Polynomial(poly)
    jet = sum(coef * x**k for k, coef in enumerate(poly))
    for k in range(5):
        expected = p.deriv(k)(c) if k else p(c)
        assert jet_extract(jet, (k,)) == pytest.approx(expected, abs=1e-10 * max(1.0, abs(expected)))


def test_pow_matches_binomial_series():
    j = jet_variable(JetSpace.build({"J": 5}), "J")
    r = (1 + j).pow(-1.5)
    coef = 1.0
    expected = []
    for k in range(6):
        expected.append(coef)
        coef *= (-1.5 - k) / (k + 1)
    np.testing.assert_allclose(r.coeffs, expected, rtol=1e-14)

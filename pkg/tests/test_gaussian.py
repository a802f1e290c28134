import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad

from phasegen.gaussian import (
    DivergenceError,
    GaussianForm,
    Marginal,
    PhasePoint,
    PolyGaussian,
    affine_substitute,
    differentiate,
    evaluate,
    form_marginal,
    marginal,
    multiply,
    phase_space_integral,
)
from phasegen.jets import JetSpace, jet_variable
from phasegen.polynomial import Poly
from phasegen.states import SqueezeParams, squeezed_thermal, squeezed_vacuum, thermal, vacuum
from phasegen.subtraction import formal_subtracted_polygaussian

R8 = 2.0 * np.sqrt(2.0)
RNG_SEED = 20240611


def _alpha(q, p):
    return (q + 1j * p) / np.sqrt(2.0)


def _quad_integral(f, L=9.0):
    """Oracle: adaptive 2D quadrature of a complex form over (q, p) / 2 pi."""

    def part(kind):
        def g(p, q):
            z = complex(f(_alpha(q, p)))
            return z.real if kind == "re" else z.imag

        val, _ = dblquad(g, -L, L, -L, L, epsabs=1e-12, epsrel=1e-12)
        return val

    return (part("re") + 1j * part("im")) / (2 * np.pi)


def _random_form(rng, linear=True):
    while True:
        u = rng.uniform(1.0, 3.0)
        v = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(-0.5, 0.5)
        w = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(-0.5, 0.5)
        x = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) if linear else 0.0
        y = (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) if linear else 0.0
        c = rng.uniform(0.5, 2.0) + 1j * rng.uniform(-0.5, 0.5)
        qq, pp = (u + v + w).real, (u - v - w).real
        qp = -(v - w).imag
        if qq > 0.5 and pp > 0.5 and qq * pp - qp * qp > 0.25:
            return GaussianForm(c, u, v, w, x, y)


# -- evaluate --------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(squeezed_vacuum(3.0, R8), PhasePoint(0.0, 0.0)) == pytest.approx(2.0)
    assert evaluate(thermal(0.9), PhasePoint(0.0, 0.0)) == pytest.approx(1.8)
    single = formal_subtracted_polygaussian(squeezed_thermal(1.0, 3.0, R8), 1)
    assert evaluate(single, PhasePoint(0.0, 0.0)) == pytest.approx(-2.0, abs=1e-12)


def test_phase_point_round_trip():
    pt = PhasePoint(1.3, -0.7)
    back = PhasePoint.from_alpha(pt.alpha)
    assert back.q == pytest.approx(1.3) and back.p == pytest.approx(-0.7)


def test_reality_on_grid():
    axis = np.linspace(-4, 4, 33)
    q, p = np.meshgrid(axis, axis)
    for form in (squeezed_thermal(0.9, 3.0, R8), thermal(0.3)):
        raw = form(_alpha(q, p))
        assert np.abs(np.imag(raw)).max() < 1e-12
        assert np.isrealobj(evaluate(form, PhasePoint(q, p)))


# -- affine maps and products ---------------------------------------------


def test_affine_identity():
    f = squeezed_thermal(0.8, 2.0, np.sqrt(3.0))
    g = affine_substitute(f, 1.0, 0.0, 0.0)
    np.testing.assert_allclose(g.coefficients, f.coefficients)


def test_affine_bogoliubov_of_vacuum():
    xi = SqueezeParams.from_A(3.0)
    g = affine_substitute(vacuum(), xi.U, xi.V, 0.0)
    f = squeezed_vacuum(3.0, R8)
    np.testing.assert_allclose(g.coefficients, f.coefficients, atol=1e-12)


def test_multiply_examples():
    f = squeezed_thermal(0.9, 3.0, R8)
    unit = GaussianForm(1.0, 0.0)
    np.testing.assert_allclose(multiply(f, unit).coefficients, f.coefficients)
    vv = multiply(vacuum(), vacuum())
    np.testing.assert_allclose(vv.coefficients, (4.0, 4.0, 0, 0, 0, 0))


def test_affine_and_multiply_commute_with_evaluate():
    rng = np.random.default_rng(RNG_SEED)
    f = _random_form(rng)
    g = _random_form(rng)
    mu, nu, delta = 1.2 - 0.3j, 0.4 + 0.1j, 0.2 - 0.5j
    sub = affine_substitute(f, mu, nu, delta)
    prod = multiply(f, g)
    alpha = rng.normal(size=50) + 1j * rng.normal(size=50)
    np.testing.assert_allclose(sub(alpha), f(mu * alpha + nu * np.conj(alpha) + delta), rtol=1e-12)
    np.testing.assert_allclose(prod(alpha), f(alpha) * g(alpha), rtol=1e-12)


# -- integrals -------------------------------------------------------------


def test_integral_examples():
    assert phase_space_integral(vacuum()) == pytest.approx(1.0)
    assert phase_space_integral(squeezed_vacuum(3.0, R8)) == pytest.approx(1.0, abs=1e-12)


def test_linear_terms_against_adaptive_quadrature():
    x = 0.3 + 0.1j
    f = GaussianForm(1.0, 2.0, 0.0, 0.0, x, np.conj(x))
    assert abs(phase_space_integral(f) - _quad_integral(f)) < 1e-10


@pytest.mark.parametrize("k", range(20))
def test_random_forms_against_adaptive_quadrature(k):
    rng = np.random.default_rng(RNG_SEED + k)
    f = _random_form(rng, linear=k % 2 == 0)
    exact = complex(phase_space_integral(f))
    assert abs(exact - _quad_integral(f)) < 1e-8 * max(1.0, abs(exact))


def test_polygaussian_moments_against_quadrature():
    base = squeezed_thermal(0.9, 3.0, R8)
    terms = Poly(2, {(0, 0): 0.5, (1, 1): 1.0, (2, 0): 0.3 - 0.1j, (0, 2): 0.3 + 0.1j, (2, 2): -0.2})
    f = PolyGaussian(base, terms)
    # the p direction is broad, so the box must be wide
    assert abs(phase_space_integral(f) - _quad_integral(f, L=16.0)) < 1e-10


def test_jet_valued_integral():
    space = JetSpace.build({"s": 2})
    s = jet_variable(space, "s")
    f = GaussianForm(2.0, 2.0 + s)
    # 2 / (2 + s) = 1 - s/2 + s^2/4
    np.testing.assert_allclose(phase_space_integral(f).coeffs, [1, -0.5, 0.25])


def test_divergent_form_raises():
    with pytest.raises(DivergenceError):
        phase_space_integral(GaussianForm(1.0, -1.0))
    with pytest.raises(DivergenceError):
        phase_space_integral(GaussianForm(1.0, 1.0, 0.8, 0.8))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(1.0, 6.0), st.floats(0, 2 * np.pi))
def test_unit_trace_of_squeezed_thermal(T, A, phi):
    B = np.sqrt(A * A - 1.0) * np.exp(1j * phi)
    assert abs(phase_space_integral(squeezed_thermal(T, A, B)) - 1.0) < 1e-10


# -- derivatives -----------------------------------------------------------


def test_differentiate_examples():
    x = 0.4 - 0.2j
    f = GaussianForm(1.0, 1.0, 0.0, 0.0, x, 0.0)
    d = differentiate(f, "alpha")
    alpha = np.array([0.0, 0.3 + 0.2j, -1.0j])
    # d/da of exp(-|a|^2 + x a) at fixed a* is (x - a*) times the form
    np.testing.assert_allclose(d(alpha), (x - np.conj(alpha)) * f(alpha))
    dd = differentiate(differentiate(vacuum(), "alphabar"), "alpha")
    assert dd(0.0) == pytest.approx(-4.0)


def test_differentiate_finite_difference():
    f = squeezed_thermal(0.7, 2.0, np.sqrt(3.0))
    a0, h = 0.3 - 0.4j, 1e-5
    # Wirtinger derivative: d/da = (d/dRe a - i d/dIm a) / 2
    fd = (f(a0 + h) - f(a0 - h)) / (2 * h) - 1j * (f(a0 + 1j * h) - f(a0 - 1j * h)) / (2 * h)
    assert differentiate(f, "alpha")(a0) == pytest.approx(fd / 2, rel=1e-8)


def test_differentiate_bad_variable():
    with pytest.raises(ValueError):
        differentiate(vacuum(), "q")


# -- marginals -------------------------------------------------------------


def test_vacuum_marginal():
    m = marginal(vacuum(), "p")
    assert m(0.0) == pytest.approx(1 / np.sqrt(np.pi))
    assert quad(m, -10, 10)[0] == pytest.approx(1.0, abs=1e-12)


def test_squeezed_vacuum_marginal_variance():
    A, B = 3.0, R8
    m = marginal(squeezed_vacuum(A, B), "p")
    var_q = (A - B) / 2
    q = np.linspace(-3, 3, 41)
    expected = np.exp(-(q**2) / (2 * var_q)) / np.sqrt(2 * np.pi * var_q)
    np.testing.assert_allclose(m(q), expected, rtol=1e-10)
    mp = marginal(squeezed_vacuum(A, B), "q")
    var_p = (A + B) / 2
    assert mp(0.0) == pytest.approx(1 / np.sqrt(2 * np.pi * var_p))


def test_marginal_matches_line_quadrature():
    f = squeezed_thermal(0.6, 2.0, np.sqrt(3.0) * np.exp(0.7j))
    for axis in ("p", "q"):
        m = Marginal(f, axis)
        for s in (-1.1, 0.0, 0.8):
            if axis == "p":
                line = quad(lambda t: f(_alpha(s, t)).real, -12, 12, epsabs=1e-13)[0]
            else:
                line = quad(lambda t: f(_alpha(t, s)).real, -12, 12, epsabs=1e-13)[0]
            assert m(s) == pytest.approx(line / (2 * np.pi), abs=1e-12)


def test_form_marginal_agrees_with_marginal():
    f = squeezed_thermal(0.6, 2.0, np.sqrt(3.0) * np.exp(0.7j))
    s = np.linspace(-3, 3, 13)
    for axis in ("p", "q"):
        np.testing.assert_allclose(form_marginal(f, axis, s), Marginal(f, axis)(s), atol=1e-14)


def test_subtracted_marginal_nonnegative():
    f = formal_subtracted_polygaussian(squeezed_thermal(1.0, 3.0, R8), 1)
    m = marginal(f, "p")
    q = np.linspace(-4, 4, 161)
    assert m(q).min() >= -1e-12
    assert quad(m, -12, 12)[0] == pytest.approx(1.0, abs=1e-10)


def test_marginal_rejects_bad_axis_and_divergence():
    with pytest.raises(ValueError):
        marginal(vacuum(), "x")
    with pytest.raises(DivergenceError):
        marginal(GaussianForm(1.0, -1.0), "p")

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasegen.gaussian import evaluate, marginal, multiply, phase_space_integral
from phasegen.states import (
    SqueezeParams,
    StateSpec,
    StateValidationError,
    ab_from_mean_n,
    bogoliubov,
    loss_equivalence,
    lossy_purity,
    lossy_squeezed,
    make_state,
    squeezed_thermal,
    squeezed_vacuum,
    thermal,
    vacuum,
)

R8 = 2.0 * math.sqrt(2.0)


def _purity(f):
    # tr(rho^2) is the phase-space integral of W^2 in this normalization
    return complex(phase_space_integral(multiply(f, f))).real


def _grid(step=0.2):
    axis = np.arange(-4, 4 + step / 2, step)
    q, p = np.meshgrid(axis, axis)
    return (q + 1j * p) / math.sqrt(2)


def test_ab_from_mean_n_examples():
    A, B = ab_from_mean_n(1.0)
    assert A == 3.0 and B.real == pytest.approx(2.8284, abs=5e-4) and B.imag == 0
    assert ab_from_mean_n(0.0) == (1.0, 0j)
    A, B = ab_from_mean_n(0.25)
    assert A == pytest.approx(1.5)
    assert B.real == pytest.approx(2 * math.sqrt(0.3125))
    with pytest.raises(StateValidationError):
        ab_from_mean_n(-0.1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 20), st.floats(0, 2 * math.pi))
def test_ab_invariant(n, phi):
    A, B = ab_from_mean_n(n, phi)
    assert A * A - abs(B) ** 2 == pytest.approx(1.0, rel=1e-12)
    p = SqueezeParams.from_mean_n(n, phi)
    assert p.A == pytest.approx(A, rel=1e-12)
    assert abs(p.B - B) < 1e-10 * max(1.0, A)
    assert abs(p.U) ** 2 - abs(p.V) ** 2 == pytest.approx(1.0, rel=1e-12)


def test_make_state_examples():
    np.testing.assert_allclose(make_state(StateSpec("vacuum")).coefficients, (2, 2, 0, 0, 0, 0))
    sts = make_state(StateSpec("squeezed_thermal", mean_n=1.0, purity=0.9))
    np.testing.assert_allclose(
        sts.coefficients, (1.8, 2 * 0.9 * 3, 0.9 * R8, 0.9 * R8, 0, 0), rtol=1e-12
    )
    assert phase_space_integral(sts) == pytest.approx(1.0, abs=1e-12)
    lossy = make_state(StateSpec("lossy_squeezed", mean_n=1.0, transmission=0.8))
    assert phase_space_integral(lossy) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", ["vacuum", "thermal", "squeezed_vacuum", "squeezed_thermal", "lossy_squeezed"])
def test_every_kind_has_unit_trace(kind):
    spec = StateSpec(kind, mean_n=0.7, purity=0.6, transmission=0.55, phi=0.3)
    f = make_state(spec)
    assert abs(phase_space_integral(f) - 1.0) < 1e-10
    assert _purity(f) == pytest.approx(spec.T, rel=1e-10)


def test_spec_validation_lists_failures():
    with pytest.raises(StateValidationError, match="purity") as err:
        StateSpec("squeezed_thermal", purity=1.5, transmission=0.0)
    assert "transmission" in str(err.value)
    with pytest.raises(StateValidationError, match="kind"):
        StateSpec("cat")
    with pytest.raises(StateValidationError):
        StateSpec(mean_n=-1.0)


def test_spec_round_trip():
    spec = StateSpec("lossy_squeezed", mean_n=0.5, transmission=0.7, phi=0.2)
    assert StateSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(StateValidationError):
        StateSpec.from_dict({"kind": "vacuum", "color": "red"})


def test_bogoliubov_examples():
    T = 0.7
    params = SqueezeParams.from_A(3.0)
    np.testing.assert_allclose(
        bogoliubov(thermal(T), params).coefficients, squeezed_thermal(T, 3.0, R8).coefficients, atol=1e-12
    )
    np.testing.assert_allclose(bogoliubov(thermal(T), SqueezeParams(0.0)).coefficients, thermal(T).coefficients)
    np.testing.assert_allclose(
        bogoliubov(vacuum(), params).coefficients, squeezed_vacuum(3.0, R8).coefficients, atol=1e-12
    )


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0, 1.5), st.floats(0, 2 * math.pi))
def test_bogoliubov_preserves_purity(T, r, phi):
    f = thermal(T)
    g = bogoliubov(f, SqueezeParams(r, phi))
    assert abs(_purity(g) - _purity(f)) < 1e-10


def test_loss_equivalence_examples():
    T, A0, B0 = loss_equivalence(1.0, 3.0, R8)
    assert (T, A0) == (1.0, 3.0) and B0 == pytest.approx(R8)
    assert loss_equivalence(0.4, 1.0, 0.0) == (1.0, 1.0, 0j)
    T, A0, B0 = loss_equivalence(0.8, 3.0, R8)
    assert T == pytest.approx(1 / math.sqrt(1.64))
    alpha = np.linspace(-3, 3, 41)[:, None] + 1j * np.linspace(-3, 3, 41)[None, :]
    diff = squeezed_thermal(T, A0, B0)(alpha) - lossy_squeezed(0.8, 3.0, R8)(alpha)
    assert np.abs(diff).max() < 1e-12
    assert _purity(lossy_squeezed(0.8, 3.0, R8)) == pytest.approx(lossy_purity(0.8, 3.0), rel=1e-12)


def test_loss_equivalence_domain():
    with pytest.raises(StateValidationError):
        loss_equivalence(0.0, 3.0, R8)
    with pytest.raises(StateValidationError):
        loss_equivalence(1.2, 3.0, R8)
    with pytest.raises(StateValidationError):
        loss_equivalence(0.5, 3.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0, 5), st.floats(0, 2 * math.pi))
def test_loss_equivalence_invariants(t, n, phi):
    A, B = ab_from_mean_n(n, phi)
    T, A0, B0 = loss_equivalence(t, A, B)
    assert A0 * A0 - abs(B0) ** 2 == pytest.approx(1.0, abs=1e-12 * A0 * A0)
    assert 0 < T <= 1
    alpha = _grid(0.5)
    diff = squeezed_thermal(T, A0, B0)(alpha) - lossy_squeezed(t, A, B)(alpha)
    assert np.abs(diff).max() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.01, 4.0))
def test_squeezed_along_q(T, n):
    f = make_state(StateSpec("squeezed_thermal", mean_n=n, purity=T))
    q = np.linspace(-15, 15, 3001)
    mq = marginal(f, "p")(q)
    mp = marginal(f, "q")(q)
    var_q = np.trapezoid(q * q * mq, q)
    var_p = np.trapezoid(q * q * mp, q)
    assert var_q < var_p


def test_evaluate_is_real():
    f = make_state(StateSpec("lossy_squeezed", mean_n=1.0, transmission=0.6, phi=1.0))
    vals = evaluate(f, _grid())
    assert np.isrealobj(vals)

"""Photon-number statistics from the projector generating function.

Tracing a Wigner function against ``2/(1+K) exp(-2|a|^2 (1-K)/(1+K))``
gives ``F(K) = sum_n K^n P(n)``. Probabilities are the Taylor coefficients
at ``K = 0``; moments come from derivatives at ``K = 1``:
``<n> = F'(1)`` and ``<n^2> = F''(1) + F'(1)``.

For subtracted states the same trace is taken against the subtraction
generating form, which yields a double generating function in the
subtraction parameters and K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import number_projector_form
from .gaussian import GaussianForm, PolyGaussian, multiply, phase_space_integral
from .jets import Jet, JetSpace, rexp
from .subtraction import (
    ETA,
    ETABAR,
    J,
    ZERO_TRACE,
    SubtractionError,
    _as_form,
    _check_trace,
    check_herald_resolution,
    check_subtractable,
    mean_photon_number,
    formal_generating,
    heralded_generating,
)

__all__ = [
    "K",
    "PhotonDistribution",
    "projection_generating",
    "statistics_generating",
    "distribution",
    "double_generating_formal",
    "double_generating_formal_sts",
    "mean_generating_formal",
    "mean_generating_formal_sts",
    "double_generating_heralded",
    "double_generating_heralded_sts",
    "mean_generating_heralded_sts",
    "formal_subtracted_distribution",
    "heralded_subtracted_distribution",
    "npnr_distribution",
]

K = "K"
N_REPORT = 40


@dataclass(frozen=True)
class PhotonDistribution:
    probs: np.ndarray
    mean: float
    second_moment: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2

    @property
    def tail(self) -> float:
        """Probability mass beyond the reported photon numbers."""
        return 1.0 - float(np.sum(self.probs))


def projection_generating(space_or_K, name: str = K) -> GaussianForm:
    """Wigner form of ``sum_n K^n |n><n|``."""
    if isinstance(space_or_K, JetSpace):
        return number_projector_form(Jet.variable(space_or_K, name))
    return number_projector_form(space_or_K)


def _with_projector(state, space):
    proj = projection_generating(space)
    if isinstance(state, PolyGaussian):
        return state.multiply_form(proj)
    return multiply(_as_form(state), proj)


def statistics_generating(state, space: JetSpace) -> Jet:
    """``F(K) = tr{P(K) rho}`` for a scalar Wigner form (Gaussian or polynomial)."""
    return phase_space_integral(_with_projector(state, space))


def _real(x) -> np.ndarray:
    x = np.asarray(x)
    if np.any(np.abs(x.imag) > 1e-9):
        raise ArithmeticError("photon statistics came out complex")
    return x.real


def distribution(state, n_report: int = N_REPORT) -> PhotonDistribution:
    """Photon-number distribution ``P(0..n_report)`` with mean and second moment."""
    probs_jet = statistics_generating(state, JetSpace.build({K: n_report}))
    probs = _real([probs_jet.coefficient((k,)) for k in range(n_report + 1)])
    moments = statistics_generating(state, JetSpace.build({K: 2}, centers={K: 1.0}))
    d1 = float(_real(moments.extract((1,))))
    d2 = float(_real(moments.extract((2,))))
    return PhotonDistribution(probs, d1, d2 + d1)


# -- formal subtraction -----------------------------------------------------


def double_generating_formal(state, space: JetSpace) -> Jet:
    """``R(eta, eta*, K)``: statistics of all formally subtracted states."""
    return phase_space_integral(multiply(formal_generating(state, space), projection_generating(space)))


def double_generating_formal_sts(T: float, A: float, B: complex, space: JetSpace) -> Jet:
    """Closed form of :func:`double_generating_formal` for a squeezed thermal input."""
    eta = Jet.variable(space, ETA)
    etabar = Jet.variable(space, ETABAR)
    k = Jet.variable(space, K)
    B = complex(B)
    ee = eta * etabar
    denom = (1.0 + k) * (1.0 + k) * T * T + 2.0 * (1.0 - k * k) * T * A + (1.0 - k) * (1.0 - k)
    numer = (
        -2.0 * T * A * k * ee
        + T * B.conjugate() * eta * eta
        + T * B * etabar * etabar
        - (1.0 - k - T * T - T * T * k) * ee
    )
    return 2.0 * T * denom.inv_sqrt() * rexp(-numer / denom)


def mean_generating_formal(state, space: JetSpace) -> Jet:
    """``M(eta, eta*) = dR/dK`` at ``K = 1``, a jet over the space's (eta, eta*)."""
    full = JetSpace(space.variables + (K,), space.orders + (1,), space.centers + (1.0,))
    return double_generating_formal(state, full).derivative_jet(K, 1)


def mean_generating_formal_sts(T: float, A: float, B: complex, space: JetSpace) -> Jet:
    eta = Jet.variable(space, ETA)
    etabar = Jet.variable(space, ETABAR)
    B = complex(B)
    ee = eta * etabar
    prefactor = (
        (A - T) / (2.0 * T)
        + (A * A - 1.0 + (A - T) ** 2) / (4.0 * T * T) * ee
        - (A - T) / (4.0 * T * T) * B.conjugate() * eta * eta
        - (A - T) / (4.0 * T * T) * B * etabar * etabar
    )
    trace = rexp((2.0 * ee * (A - T) - B.conjugate() * eta * eta - B * etabar * etabar) / (4.0 * T))
    return prefactor * trace


def formal_subtracted_distribution(state, n: int, n_report: int = N_REPORT) -> PhotonDistribution:
    """Photon statistics of the normalized n-photon-subtracted state."""
    check_subtractable(state, n)
    form_space = JetSpace.build({ETA: n, ETABAR: n, K: n_report})
    R = double_generating_formal(state, form_space)
    mom_space = JetSpace.build({ETA: n, ETABAR: n, K: 2}, centers={K: 1.0})
    Rm = double_generating_formal(state, mom_space)
    trace = Rm.derivative_jet(K, 0).extract((n, n))
    _check_trace(trace, n, "subtracted photons")
    probs = _real([R.coefficient((n, n, k)) for k in range(n_report + 1)])
    probs = probs * _factorial(n) ** 2 / float(_real(trace))
    d1 = float(_real(Rm.extract((n, n, 1)) / trace))
    d2 = float(_real(Rm.extract((n, n, 2)) / trace))
    return PhotonDistribution(probs, d1, d2 + d1)


def _factorial(n: int) -> float:
    out = 1.0
    for k in range(2, n + 1):
        out *= k
    return out


# -- heralded subtraction ---------------------------------------------------


def double_generating_heralded(state, zeta: float, space: JetSpace) -> Jet:
    """``R(J, K)`` for heralded subtraction with reflectivity ``zeta``."""
    return phase_space_integral(multiply(heralded_generating(state, zeta, space), projection_generating(space)))


def double_generating_heralded_sts(T: float, A: float, zeta: float, space: JetSpace) -> Jet:
    j = Jet.variable(space, J)
    k = Jet.variable(space, K)
    g = 2.0 * T * A - 1.0 - T * T
    s = k - zeta * k + zeta * j
    inner = (1.0 - s * s) * g - 2.0 * (j - k) * (1.0 - T * T) * zeta + 2.0 * (1.0 - k + T * T + T * T * k)
    return 2.0 * T * inner.inv_sqrt()


def mean_generating_heralded_sts(T: float, A: float, zeta: float, space_or_J):
    """``dR/dK`` at ``K = 1`` as a function (or jet) of J.

    Obtained by differentiating :func:`double_generating_heralded_sts`; the
    numerator is linear (not quadratic) in ``s = 1 - zeta + zeta J``.
    """
    j = Jet.variable(space_or_J, J) if isinstance(space_or_J, JetSpace) else space_or_J
    g = 2.0 * T * A - 1.0 - T * T
    s = 1.0 - zeta + zeta * j
    numer = 2.0 * T * (1.0 - zeta) * (s * g + 1.0 - T * T)
    base = (1.0 - s * s) * g + 2.0 * (1.0 - j) * (1.0 - T * T) * zeta + 4.0 * T * T
    if isinstance(base, Jet):
        return numer * base.pow(-1.5)
    return numer * base**-1.5


def heralded_subtracted_distribution(state, zeta: float, n: int, n_report: int = N_REPORT) -> PhotonDistribution:
    """Photon statistics of the state heralded by ``n`` tap photons."""
    check_subtractable(state, n, "heralded photons")
    R = double_generating_heralded(state, zeta, JetSpace.build({J: n, K: n_report}))
    Rm = double_generating_heralded(state, zeta, JetSpace.build({J: n, K: 2}, centers={K: 1.0}))
    trace = Rm.extract((n, 0))
    _check_trace(trace, n, "heralded photons")
    check_herald_resolution(Rm.coefficient((n, 0)), n)
    probs = _real([R.coefficient((n, k)) for k in range(n_report + 1)]) * _factorial(n) / float(_real(trace))
    d1 = float(_real(Rm.extract((n, 1)) / trace))
    d2 = float(_real(Rm.extract((n, 2)) / trace))
    return PhotonDistribution(probs, d1, d2 + d1)


def npnr_distribution(state, zeta: float, n_report: int = N_REPORT) -> PhotonDistribution:
    """Photon statistics of the state heralded by a click (any nonzero tap count)."""

    def unnormalized(j, space):
        return phase_space_integral(multiply(heralded_generating(state, zeta, j), projection_generating(space)))

    probs_space = JetSpace.build({K: n_report})
    mom_space = JetSpace.build({K: 2}, centers={K: 1.0})
    R = unnormalized(1.0, probs_space) - unnormalized(0.0, probs_space)
    Rm = unnormalized(1.0, mom_space) - unnormalized(0.0, mom_space)
    p_click = Rm.constant_term
    if mean_photon_number(state) <= ZERO_TRACE or not complex(p_click).real > 0:
        raise SubtractionError("detector never clicks for this input")
    probs = _real([R.coefficient((k,)) for k in range(n_report + 1)]) / float(_real(p_click))
    d1 = float(_real(Rm.extract((1,)) / p_click))
    d2 = float(_real(Rm.extract((2,)) / p_click))
    return PhotonDistribution(probs, d1, d2 + d1)

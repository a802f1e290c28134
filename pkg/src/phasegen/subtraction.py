"""Formal and heralded photon subtraction through generating functions.

Formal subtraction (``a^n rho a^dag^n``) uses the generating form

    exp(eta* a + a* eta + |eta|^2 / 2) W(a + eta / 2)

whose ``(n, n)`` derivative in ``(eta, eta*)`` is the unnormalized
n-photon-subtracted Wigner function. Heralded subtraction sends the state
through a beam splitter with reflectivity ``zeta`` (vacuum in the other
port), multiplies by the photon-number projector generating form in the
tapped mode and integrates that mode out; the ``J^n`` coefficient is the
state heralded by ``n`` detected photons.

Both routes are implemented generically for any Gaussian input and, for the
squeezed thermal family, also as explicit closed forms used as regression
anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fock import number_projector_form
from .gaussian import (
    GaussianForm,
    PolyGaussian,
    _as_alpha,
    affine_substitute,
    differentiate,
    extract_polygaussian,
    form_marginal,
    integrate_out_second_mode,
    multiply,
    phase_space_integral,
)
from .jets import Jet, JetSpace, rexp
from .polynomial import Poly
from .states import StateSpec, make_state, vacuum

__all__ = [
    "ETA",
    "ETABAR",
    "J",
    "ZERO_TRACE",
    "HERALD_RESOLUTION",
    "SubtractionError",
    "check_subtractable",
    "check_herald_resolution",
    "mean_photon_number",
    "SubtractionResult",
    "formal_space",
    "heralded_space",
    "formal_generating",
    "formal_generating_sts",
    "formal_trace_generating",
    "formal_trace_sts",
    "formal_subtracted_wigner",
    "formal_subtracted_polygaussian",
    "single_subtraction_operator",
    "negativity_at_origin",
    "heralded_generating",
    "heralded_generating_sts",
    "heralded_trace_generating",
    "heralded_trace_sts",
    "herald_probabilities",
    "heralded_subtracted_wigner",
    "npnr_wigner",
    "small_zeta_deviation",
    "subtract",
    "default_grid",
]

ETA = "eta"
ETABAR = "etabar"
J = "J"
ZERO_TRACE = 1e-14
# J-coefficients of the herald jet carry an absolute rounding error of a few
# 1e-16; below this probability the normalized state loses all accuracy.
HERALD_RESOLUTION = 1e-11


class SubtractionError(ArithmeticError):
    """The requested subtraction (or herald) has zero probability."""


def _as_form(state) -> GaussianForm:
    if isinstance(state, StateSpec):
        return make_state(state)
    if isinstance(state, GaussianForm):
        return state
    raise TypeError(f"expected a GaussianForm or StateSpec, got {type(state).__name__}")


def mean_photon_number(state) -> float:
    """``<n>`` of a Gaussian form, from the (1, 1) derivative of the trace generating jet."""
    space = JetSpace.build({ETA: 1, ETABAR: 1})
    return float(_real(phase_space_integral(formal_generating(_as_form(state), space)).extract((1, 1)), "<n>"))


def check_subtractable(state, n: int, what: str = "subtracted photons") -> None:
    """Raise unless the Gaussian input can lose ``n`` photons.

    A Gaussian state with ``<n> > 0`` has nonzero weight on every photon
    number, so only the vacuum gives zero traces. Deciding this up front
    avoids confusing round-off with genuinely tiny (``~zeta^n``) traces.
    """
    if n > 0 and mean_photon_number(state) <= ZERO_TRACE:
        raise SubtractionError(f"state cannot yield {n} {what} (zero trace)")


def _check_trace(denom, n: int, what: str):
    if not complex(denom).real > 0:
        raise SubtractionError(f"state cannot yield {n} {what} (trace {complex(denom).real:.3g})")


def check_herald_resolution(prob, n: int) -> None:
    if complex(prob).real < HERALD_RESOLUTION:
        raise SubtractionError(
            f"probability {complex(prob).real:.3g} of heralding {n} photons is below the "
            f"numerical resolution {HERALD_RESOLUTION:g} of the generating-function path"
        )


def _real(value, what="value"):
    value = np.asarray(value)
    if np.any(np.abs(value.imag) > 1e-9 * np.maximum(1.0, np.abs(value.real))):
        raise ArithmeticError(f"{what} is not real (max imaginary part {np.abs(value.imag).max():.3g})")
    value = value.real
    return value[()] if value.ndim == 0 else value


def formal_space(n: int, margin: int = 2) -> JetSpace:
    return JetSpace.build({ETA: n + margin, ETABAR: n + margin})


def heralded_space(n: int, margin: int = 2) -> JetSpace:
    return JetSpace.build({J: n + margin})


def _index(space: JetSpace, **orders) -> tuple[int, ...]:
    return tuple(orders.get(name, 0) for name in space.variables)


# -- formal subtraction -----------------------------------------------------


def formal_generating(state, space: JetSpace) -> GaussianForm:
    """Generating form for ``G rho G^dag`` with ``G = exp(eta* a)``."""
    f = _as_form(state)
    eta = Jet.variable(space, ETA)
    etabar = Jet.variable(space, ETABAR)
    shifted = affine_substitute(f, 1.0, 0.0, 0.5 * eta, mu_bar=1.0, nu_bar=0.0, delta_bar=0.5 * etabar)
    kernel = GaussianForm(rexp(0.5 * eta * etabar), 0.0, 0.0, 0.0, etabar, eta)
    return multiply(shifted, kernel)


def formal_generating_sts(T: float, A: float, B: complex, space: JetSpace) -> GaussianForm:
    """Closed form of :func:`formal_generating` for a squeezed thermal input."""
    eta = Jet.variable(space, ETA)
    etabar = Jet.variable(space, ETABAR)
    B = complex(B)
    Bc = B.conjugate()
    x = etabar * (1.0 - T * A) - T * Bc * eta
    y = eta * (1.0 - T * A) - T * B * etabar
    const = (0.5 - 0.5 * T * A) * eta * etabar - 0.25 * T * Bc * eta * eta - 0.25 * T * B * etabar * etabar
    return GaussianForm(2.0 * T * rexp(const), 2.0 * T * A, T * Bc, T * B, x, y)


def formal_trace_generating(state, space: JetSpace) -> Jet:
    """Traces of all formally subtracted states, as a jet in (eta, eta*)."""
    return phase_space_integral(formal_generating(state, space))


def formal_trace_sts(T: float, A: float, B: complex, space: JetSpace) -> Jet:
    """``exp[(2|eta|^2 (A - T) - eta^2 B* - eta*^2 B) / 4T]``."""
    eta = Jet.variable(space, ETA)
    etabar = Jet.variable(space, ETABAR)
    B = complex(B)
    return rexp((2.0 * (A - T) * eta * etabar - B.conjugate() * eta * eta - B * etabar * etabar) / (4.0 * T))


def single_subtraction_operator(state) -> PolyGaussian:
    """Unnormalized ``a rho a^dag`` via ``1/2 (1/2 d d* + a d + a* d* + 1 + 2|a|^2) W``."""
    f = PolyGaussian(_as_form(state))
    dd = differentiate(differentiate(f, "alphabar"), "alpha")
    a_da = differentiate(f, "alpha").times_monomial(1, 0)
    ab_dab = differentiate(f, "alphabar").times_monomial(0, 1)
    total = dd.scaled(0.5) + a_da + ab_dab + f + f.times_monomial(1, 1, 2.0)
    return total.scaled(0.5)


def formal_subtracted_polygaussian(state, n: int) -> PolyGaussian:
    """Normalized n-photon-subtracted Wigner function as polynomial x Gaussian."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    check_subtractable(state, n)
    space = JetSpace.build({ETA: n, ETABAR: n})
    form = formal_generating(state, space)
    denom = complex(phase_space_integral(form).extract((n, n)))
    _check_trace(denom, n, "subtracted photons")
    return extract_polygaussian(form, (n, n)).scaled(1.0 / denom)


# -- heralded subtraction ---------------------------------------------------


def _parameter(space_or_value, name):
    if isinstance(space_or_value, JetSpace):
        return Jet.variable(space_or_value, name)
    return space_or_value


def heralded_generating(state, zeta: float, space_or_J) -> GaussianForm:
    """Herald generating form in J after a beam splitter of reflectivity ``zeta``.

    ``space_or_J`` is either a JetSpace containing ``"J"`` or a scalar value
    of J (``J = 1`` gives the unconditioned transmitted state).
    """
    if not 0 < zeta < 1:
        raise ValueError(f"reflectivity must lie in (0, 1), got {zeta}")
    f = _as_form(state)
    Jv = _parameter(space_or_J, J)
    t, r = math.sqrt(1.0 - zeta), math.sqrt(zeta)
    # variables: (a, a*, b, b*) with b the tapped mode
    signal = Poly.linear([t, 0.0, 1j * r, 0.0])
    signal_bar = Poly.linear([0.0, t, 0.0, -1j * r])
    tap = Poly.linear([1j * r, 0.0, t, 0.0])
    tap_bar = Poly.linear([0.0, -1j * r, 0.0, t])
    b = Poly.var(4, 2)
    bbar = Poly.var(4, 3)
    vac = vacuum()
    proj = number_projector_form(Jv)
    exponent = (
        f.exponent_poly(signal, signal_bar)
        + vac.exponent_poly(tap, tap_bar)
        + proj.exponent_poly(b, bbar)
    )
    return integrate_out_second_mode(f.c * vac.c * proj.c, exponent)


def heralded_generating_sts(T: float, A: float, B: complex, zeta: float, space_or_J) -> GaussianForm:
    """Closed form of :func:`heralded_generating` for a squeezed thermal input."""
    Jv = _parameter(space_or_J, J)
    B = complex(B)
    g = 2.0 * T * A - 1.0 - T * T
    K = 1.0 + (1.0 + Jv) * (T * A - 1.0) * zeta - 0.25 * (1.0 + Jv) * (1.0 + Jv) * g * zeta**2
    inv_K = 1.0 / K
    u = (
        2.0 * (1.0 - zeta) * T * A
        + zeta * (1.0 - Jv + T * T + T * T * Jv)
        + 0.5 * (1.0 - Jv * Jv) * zeta**2 * g
    ) * inv_K
    v = (1.0 - zeta) * T * B.conjugate() * inv_K
    w = (1.0 - zeta) * T * B * inv_K
    c = 2.0 * T * (K ** -0.5 if isinstance(K, Jet) else np.power(complex(K), -0.5))
    return GaussianForm(c, u, v, w)


def heralded_trace_generating(state, zeta: float, space_or_J):
    return phase_space_integral(heralded_generating(state, zeta, space_or_J))


def heralded_trace_sts(T: float, A: float, zeta: float, space_or_J):
    Jv = _parameter(space_or_J, J)
    g = 2.0 * T * A - 1.0 - T * T
    base = 1.0 + (1.0 - Jv) * (A - T) * zeta / T - (1.0 - Jv) * (1.0 - Jv) * g * zeta**2 / (4.0 * T * T)
    return base ** -0.5 if isinstance(base, Jet) else np.power(complex(base), -0.5)


def herald_probabilities(state, zeta: float, n_max: int) -> np.ndarray:
    """Probabilities of detecting ``0..n_max`` photons in the tapped mode."""
    trace = heralded_trace_generating(state, zeta, heralded_space(n_max, margin=0))
    return _real([trace.coefficient((k,)) for k in range(n_max + 1)], "herald probability")


# -- normalized states ------------------------------------------------------


@dataclass(frozen=True)
class SubtractionResult:
    """Normalized subtracted state, evaluated lazily at phase points."""

    n: int
    method: str
    zeta: float | None
    wigner: Callable
    trace_used: float
    herald_probability: float | None = None
    marginal_fn: Callable | None = None

    def __call__(self, pt):
        return self.wigner(pt)

    def marginal(self, axis: str, s):
        """Quadrature distribution with ``axis`` integrated out, at coordinates ``s``."""
        return self.marginal_fn(axis, s)


def subtract(state, n: int, method: str = "formal", zeta: float | None = None) -> SubtractionResult:
    """Build the normalized state for one of ``formal``, ``heralded`` or ``npnr``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    f = _as_form(state)
    if method == "formal":
        space = formal_space(n)
        form = formal_generating(f, space)
        idx = _index(space, **{ETA: n, ETABAR: n})
        check_subtractable(f, n)
        denom = complex(phase_space_integral(form).extract(idx))
        _check_trace(denom, n, "subtracted photons")

        def wigner(pt):
            return _real(form(_as_alpha(pt)).extract(idx) / denom, "Wigner function")

        def marg(axis, s):
            return _real(form_marginal(form, axis, s).extract(idx) / denom, "marginal")

        return SubtractionResult(n, method, None, wigner, _real(denom), marginal_fn=marg)
    if zeta is None:
        raise ValueError(f"method {method!r} needs a reflectivity zeta")
    if method == "heralded":
        space = heralded_space(n)
        form = heralded_generating(f, zeta, space)
        trace = phase_space_integral(form)
        check_subtractable(f, n, "heralded photons")
        denom = complex(trace.extract((n,)))
        _check_trace(denom, n, "heralded photons")
        check_herald_resolution(trace.coefficient((n,)), n)

        def wigner(pt):
            return _real(form(_as_alpha(pt)).extract((n,)) / denom, "Wigner function")

        def marg(axis, s):
            return _real(form_marginal(form, axis, s).extract((n,)) / denom, "marginal")

        prob = _real(trace.coefficient((n,)))
        return SubtractionResult(n, method, zeta, wigner, _real(denom), prob, marg)
    if method == "npnr":
        on = heralded_generating(f, zeta, 1.0)
        off = heralded_generating(f, zeta, 0.0)
        p_click = 1.0 - _real(phase_space_integral(off))
        if mean_photon_number(f) <= ZERO_TRACE or not p_click > 0:
            raise SubtractionError("detector never clicks for this input")

        def wigner(pt):
            alpha = _as_alpha(pt)
            return _real((on(alpha) - off(alpha)) / p_click, "Wigner function")

        def marg(axis, s):
            diff = form_marginal(on, axis, s) - form_marginal(off, axis, s)
            return _real(diff / p_click, "marginal")

        return SubtractionResult(n, method, zeta, wigner, p_click, p_click, marg)
    raise ValueError(f"unknown subtraction method {method!r}")


def formal_subtracted_wigner(state, n: int, pt):
    """Normalized n-photon-subtracted Wigner function (formal definition)."""
    return subtract(state, n, "formal")(pt)


def heralded_subtracted_wigner(state, zeta: float, n: int, pt):
    """Normalized state heralded by detecting ``n`` photons in the tap."""
    return subtract(state, n, "heralded", zeta)(pt)


def npnr_wigner(state, zeta: float, pt):
    """State heralded by a click of a detector without photon-number resolution."""
    return subtract(state, 1, "npnr", zeta)(pt)


def negativity_at_origin(state, n: int = 1) -> str:
    """``"negative"`` or ``"nonnegative"`` for the subtracted state at the origin.

    For single subtraction from a squeezed thermal state the sign is checked
    against the closed condition ``T A > 1``.
    """
    value = formal_subtracted_wigner(state, n, 0.0)
    verdict = "negative" if value < 0 else "nonnegative"
    if n == 1 and isinstance(state, StateSpec) and state.kind != "lossy_squeezed":
        TA = state.T * state.A
        expected = "negative" if TA > 1 else "nonnegative"
        if abs(TA - 1.0) > 1e-9 and expected != verdict:
            raise AssertionError(f"sign at origin {verdict} contradicts T*A = {TA}")
    return verdict


def default_grid(lo: float = -4.0, hi: float = 4.0, step: float = 0.05) -> np.ndarray:
    """Complex amplitudes on the square grid ``q, p in [lo, hi]``."""
    axis = np.round(np.arange(lo, hi + step / 2, step), 12)
    q, p = np.meshgrid(axis, axis, indexing="ij")
    return (q + 1j * p) / math.sqrt(2.0)


def small_zeta_deviation(state, zeta: float, n: int = 1, grid=None) -> float:
    """Sup-norm distance between heralded and formal n-subtracted states."""
    alpha = default_grid() if grid is None else _as_alpha(grid)
    heralded = subtract(state, n, "heralded", zeta)(alpha)
    formal = subtract(state, n, "formal")(alpha)
    return float(np.max(np.abs(heralded - formal)))

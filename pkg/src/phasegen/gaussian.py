"""Gaussian-exponential Wigner forms and their phase-space calculus.

A :class:`GaussianForm` is

    c * exp(-u|a|^2 - v a^2 - w a*^2 + x a + y a*)

with the complex amplitude ``a = (q + i p)/sqrt(2)``. The six coefficients
may be complex scalars or :class:`~phasegen.jets.Jet` values; ``a`` and
``a*`` are treated as independent symbols, so forms whose coefficients break
conjugation symmetry (generating functions) are representable.

Phase-space integrals use the measure ``d^2a = dq dp / (2 pi)``, under which
the vacuum ``2 exp(-2|a|^2)`` has unit trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .jets import Jet, constant_part, is_jet, rexp, rpow
from .polynomial import Poly

__all__ = [
    "DivergenceError",
    "PhasePoint",
    "GaussianForm",
    "PolyGaussian",
    "Marginal",
    "evaluate",
    "affine_substitute",
    "multiply",
    "phase_space_integral",
    "differentiate",
    "marginal",
    "form_marginal",
    "extract_polygaussian",
    "integrate_out_second_mode",
    "SQRT2",
]

SQRT2 = math.sqrt(2.0)
REALITY_TOL = 1e-12


class DivergenceError(ArithmeticError):
    """The requested Gaussian integral does not converge."""


@dataclass(frozen=True)
class PhasePoint:
    """A point (or array of points) in phase space."""

    q: float | np.ndarray
    p: float | np.ndarray

    @property
    def alpha(self):
        return (np.asarray(self.q) + 1j * np.asarray(self.p)) / SQRT2

    @classmethod
    def from_alpha(cls, alpha) -> "PhasePoint":
        alpha = np.asarray(alpha, dtype=complex)
        return cls(SQRT2 * alpha.real, SQRT2 * alpha.imag)


def _as_alpha(pt):
    if isinstance(pt, PhasePoint):
        return pt.alpha
    return np.asarray(pt, dtype=complex)


def _is_scalar_ring(*values) -> bool:
    return not any(is_jet(v) for v in values)


def _is_zero_scalar(v) -> bool:
    return not is_jet(v) and np.ndim(v) == 0 and v == 0


def _check_convergent(u, v, w, what="Gaussian integral"):
    """Real part of the quadratic form in (q, p) must be positive definite."""
    u0, v0, w0 = (np.asarray(constant_part(z), dtype=complex) for z in (u, v, w))
    qq = (u0 + v0 + w0).real
    pp = (u0 - v0 - w0).real
    qp = -(v0 - w0).imag
    ok = (qq > 0) & (pp > 0) & (qq * pp - qp * qp > 0)
    if not np.all(ok):
        raise DivergenceError(f"{what} diverges: quadratic form not positive definite")


@dataclass(frozen=True)
class GaussianForm:
    """``c * exp(-u|a|^2 - v a^2 - w a*^2 + x a + y a*)``."""

    c: object
    u: object
    v: object = 0.0
    w: object = 0.0
    x: object = 0.0
    y: object = 0.0

    @property
    def coefficients(self) -> tuple:
        return (self.c, self.u, self.v, self.w, self.x, self.y)

    @property
    def is_scalar(self) -> bool:
        return _is_scalar_ring(*self.coefficients)

    def is_physical(self, tol: float = 1e-12) -> bool:
        """Scalar form that is real on phase space."""
        if not self.is_scalar:
            return False
        c, u, v, w, x, y = (complex(z) for z in self.coefficients)
        return (
            abs(c.imag) <= tol * max(1.0, abs(c))
            and abs(u.imag) <= tol * max(1.0, abs(u))
            and abs(w - v.conjugate()) <= tol * max(1.0, abs(v))
            and abs(y - x.conjugate()) <= tol * max(1.0, abs(x))
        )

    def exponent(self, alpha, alphabar=None):
        if alphabar is None:
            alphabar = np.conj(alpha)
        return (
            -self.u * (alpha * alphabar)
            - self.v * (alpha * alpha)
            - self.w * (alphabar * alphabar)
            + self.x * alpha
            + self.y * alphabar
        )

    def __call__(self, alpha, alphabar=None):
        alpha = np.asarray(alpha, dtype=complex)
        return self.c * rexp(self.exponent(alpha, alphabar))

    def exponent_poly(self, s: Poly, sbar: Poly) -> Poly:
        """Exponent (without ``log c``) with ``a -> s`` and ``a* -> sbar``."""
        return (s * sbar) * (-self.u) + (s * s) * (-self.v) + (sbar * sbar) * (-self.w) + s * self.x + sbar * self.y

    @classmethod
    def from_exponent_poly(cls, c, poly: Poly) -> "GaussianForm":
        """Inverse of :meth:`exponent_poly` for a polynomial in (a, a*)."""
        if poly.nvars != 2 or poly.degree > 2:
            raise ValueError("need a polynomial of degree <= 2 in (a, a*)")
        const = poly.coeff((0, 0))
        if not _is_zero_scalar(const):
            c = c * rexp(const)
        return cls(
            c,
            -poly.coeff((1, 1)),
            -poly.coeff((2, 0)),
            -poly.coeff((0, 2)),
            poly.coeff((1, 0)),
            poly.coeff((0, 1)),
        )

    def scaled(self, k) -> "GaussianForm":
        return GaussianForm(self.c * k, self.u, self.v, self.w, self.x, self.y)

    def map(self, fn) -> "GaussianForm":
        """Apply ``fn`` to every coefficient (e.g. instantiate a jet)."""
        return GaussianForm(*(fn(z) for z in self.coefficients))

    def __mul__(self, other):
        if isinstance(other, GaussianForm):
            return multiply(self, other)
        return NotImplemented


@dataclass(frozen=True)
class PolyGaussian:
    """Polynomial in (a, a*) times a :class:`GaussianForm`."""

    base: GaussianForm
    terms: Poly = field(default_factory=lambda: Poly.const(2, 1.0))

    @property
    def coefficients(self) -> dict:
        """``{(m, n): coefficient of a^m a*^n}``."""
        return dict(self.terms.terms)

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=complex)
        alphabar = np.conj(alpha)
        poly = self.terms.evaluate((alpha, alphabar))
        return poly * self.base(alpha)

    def scaled(self, k) -> "PolyGaussian":
        return PolyGaussian(self.base, self.terms * k)

    def with_terms(self, terms: Poly) -> "PolyGaussian":
        return PolyGaussian(self.base, terms)

    def __add__(self, other: "PolyGaussian") -> "PolyGaussian":
        if other.base is not self.base and other.base != self.base:
            raise ValueError("can only add PolyGaussians over the same base form")
        return PolyGaussian(self.base, self.terms + other.terms)

    def times_monomial(self, m: int, n: int, coeff=1.0) -> "PolyGaussian":
        mono = Poly(2, {(m, n): coeff})
        return PolyGaussian(self.base, self.terms * mono)

    def multiply_form(self, g: GaussianForm) -> "PolyGaussian":
        return PolyGaussian(multiply(self.base, g), self.terms)


def _as_poly_gaussian(f) -> PolyGaussian:
    return f if isinstance(f, PolyGaussian) else PolyGaussian(f)


# -- operations -------------------------------------------------------------


def evaluate(f, pt):
    """Value of a form at a phase point (or array of points).

    Scalar physical forms return real values after checking that the
    imaginary residue is below ``1e-12`` relative to the magnitude.
    """
    alpha = _as_alpha(pt)
    value = f(alpha)
    if is_jet(value):
        return value
    base = f.base if isinstance(f, PolyGaussian) else f
    if base.is_physical() and _is_scalar_ring(*_poly_coeffs(f)) and _poly_is_hermitian(f):
        value = np.asarray(value)
        scale = np.maximum(1.0, np.abs(value))
        if np.any(np.abs(value.imag) > REALITY_TOL * scale):
            raise ValueError("physical form evaluated to a complex value")
        value = value.real
        return value[()] if value.ndim == 0 else value
    return value


def _poly_coeffs(f):
    return tuple(f.terms.terms.values()) if isinstance(f, PolyGaussian) else ()


def _poly_is_hermitian(f, tol: float = 1e-12) -> bool:
    if not isinstance(f, PolyGaussian):
        return True
    terms = f.terms.terms
    for (m, n), c in terms.items():
        partner = terms.get((n, m), 0.0)
        if abs(complex(c) - np.conj(complex(partner))) > tol * max(1.0, abs(complex(c))):
            return False
    return True


def affine_substitute(
    f: GaussianForm, mu, nu, delta, mu_bar=None, nu_bar=None, delta_bar=None
) -> GaussianForm:
    """Substitute ``a -> mu a + nu a* + delta`` (and its conjugate partner).

    The partner map is ``a* -> mu_bar a* + nu_bar a + delta_bar``; the bars
    default to complex conjugates and must be given explicitly for jets.
    """

    def partner(z, z_bar, name):
        if z_bar is not None:
            return z_bar
        if is_jet(z):
            raise ValueError(f"{name}_bar must be given when {name} is a jet")
        return np.conj(z)

    mu_bar = partner(mu, mu_bar, "mu")
    nu_bar = partner(nu, nu_bar, "nu")
    delta_bar = partner(delta, delta_bar, "delta")
    s = Poly(2, {(1, 0): mu, (0, 1): nu, (0, 0): delta})
    sbar = Poly(2, {(0, 1): mu_bar, (1, 0): nu_bar, (0, 0): delta_bar})
    return GaussianForm.from_exponent_poly(f.c, f.exponent_poly(s, sbar))


def multiply(f: GaussianForm, g: GaussianForm) -> GaussianForm:
    """Pointwise product: prefactors multiply, exponent coefficients add."""
    return GaussianForm(*(
        [f.c * g.c] + [a + b for a, b in zip(f.coefficients[1:], g.coefficients[1:])]
    ))


def _linear_source_terms(u, v, w, x, y):
    """Determinant and exponent of the integral with linear sources."""
    det = u * u - 4.0 * v * w
    quad = u * x * y - w * x * x - v * y * y
    return det, quad


def phase_space_integral(f):
    """Integral over phase space with measure ``dq dp / (2 pi)``.

    For a pure Gaussian this is ``c / sqrt(u^2 - 4vw)`` times
    ``exp((u x y - w x^2 - v y^2) / (u^2 - 4vw))``. Monomials
    ``a^m a*^n`` of a :class:`PolyGaussian` become ``d^m/dx^m d^n/dy^n`` of
    that closed form.
    """
    if isinstance(f, PolyGaussian):
        return _poly_integral(f)
    c, u, v, w, x, y = f.coefficients
    _check_convergent(u, v, w)
    det, quad = _linear_source_terms(u, v, w, x, y)
    result = c * rpow(det, -0.5)
    if not (_is_zero_scalar(x) and _is_zero_scalar(y)):
        result = result * rexp(quad / det)
    return result


def _poly_integral(f: PolyGaussian):
    c, u, v, w, x, y = f.base.coefficients
    _check_convergent(u, v, w)
    det, quad = _linear_source_terms(u, v, w, x, y)
    inv_det = 1.0 / det
    base_value = c * rpow(det, -0.5)
    if not (_is_zero_scalar(x) and _is_zero_scalar(y)):
        base_value = base_value * rexp(quad * inv_det)
    max_m, max_n = f.terms.max_exponents()
    # exponent of the closed form shifted by (sx, sy), minus its value at 0
    dphi_dx = (u * y - 2.0 * w * x) * inv_det
    dphi_dy = (u * x - 2.0 * v * y) * inv_det
    shift = Poly(2, {
        (1, 0): dphi_dx,
        (0, 1): dphi_dy,
        (2, 0): -w * inv_det,
        (0, 2): -v * inv_det,
        (1, 1): u * inv_det,
    })
    series = shift.exp_truncated((max_m, max_n))
    total = 0.0
    for (m, n), coeff in f.terms.terms.items():
        moment = series.coeff((m, n))
        if _is_zero_scalar(moment):
            continue
        total = total + coeff * moment * (math.factorial(m) * math.factorial(n))
    return total * base_value


def differentiate(f, wrt: Literal["alpha", "alphabar"]) -> PolyGaussian:
    """Exact derivative with respect to ``a`` or ``a*``."""
    f = _as_poly_gaussian(f)
    b = f.base
    if wrt in ("alpha", "a"):
        index = 0
        grad = Poly(2, {(0, 1): -b.u, (1, 0): -2.0 * b.v, (0, 0): b.x})
    elif wrt in ("alphabar", "a*", "alpha*"):
        index = 1
        grad = Poly(2, {(1, 0): -b.u, (0, 1): -2.0 * b.w, (0, 0): b.y})
    else:
        raise ValueError(f"wrt must be 'alpha' or 'alphabar', got {wrt!r}")
    return PolyGaussian(b, f.terms.derivative(index) + f.terms * grad)


class Marginal:
    """Quadrature distribution obtained by integrating out one quadrature.

    ``Marginal(f, axis="p")`` integrates over ``p`` and is a function of
    ``q``. Normalized so that integrating the marginal over its variable
    (plain ``dq``) gives the phase-space trace of ``f``.
    """

    def __init__(self, f, axis: Literal["q", "p"]):
        if axis not in ("q", "p"):
            raise ValueError(f"axis must be 'q' or 'p', got {axis!r}")
        f = _as_poly_gaussian(f)
        if not (f.base.is_scalar and _is_scalar_ring(*_poly_coeffs(f))):
            raise TypeError("marginals need scalar coefficients")
        self.form = f
        self.axis = axis
        # variables: (s, t) with s kept and t integrated out
        if axis == "p":
            alpha = Poly(2, {(1, 0): 1 / SQRT2, (0, 1): 1j / SQRT2})
            alphabar = Poly(2, {(1, 0): 1 / SQRT2, (0, 1): -1j / SQRT2})
        else:
            alpha = Poly(2, {(0, 1): 1 / SQRT2, (1, 0): 1j / SQRT2})
            alphabar = Poly(2, {(0, 1): 1 / SQRT2, (1, 0): -1j / SQRT2})
        base = f.base
        self._exponent = base.exponent_poly(alpha, alphabar)
        self._prefactor = complex(base.c)
        self._poly = Poly(2)
        for (m, n), coeff in f.terms.terms.items():
            self._poly = self._poly + (alpha**m) * (alphabar**n) * coeff
        self._a = -complex(self._exponent.coeff((0, 2)))
        if self._a.real <= 0:
            raise DivergenceError(f"marginal over {axis} diverges")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        e = self._exponent
        a = self._a
        b = e.coeff((1, 1)) * s + e.coeff((0, 1))
        e0 = e.coeff((2, 0)) * s**2 + e.coeff((1, 0)) * s + e.coeff((0, 0))
        # moments of exp(-a t^2 + b t) divided by the zeroth moment
        groups = self._poly.collect([1])
        kmax = max((k for (k,) in groups), default=0)
        moments = [np.ones_like(b), b / (2 * a)]
        for k in range(1, kmax):
            moments.append((b * moments[k] + k * moments[k - 1]) / (2 * a))
        total = np.zeros_like(b)
        for (k,), pk in groups.items():
            total = total + pk.evaluate((s,)) * moments[k]
        log_gauss = e0 + b * b / (4 * a)
        value = self._prefactor * np.sqrt(np.pi / a) / (2 * np.pi) * np.exp(log_gauss) * total
        value = np.asarray(value)
        if np.any(np.abs(value.imag) > 1e-10 * np.maximum(1.0, np.abs(value))):
            raise ValueError("marginal of a physical form came out complex")
        value = value.real
        return value[()] if value.ndim == 0 else value

    def table(self, lo: float, hi: float, step: float) -> np.ndarray:
        s = np.round(np.arange(lo, hi + step / 2, step), 12)
        return np.column_stack([s, self(s)])


def form_marginal(f: GaussianForm, axis: Literal["q", "p"], s):
    """Marginal of a (possibly jet-valued) Gaussian form at coordinates ``s``.

    Integrates out ``axis`` in closed form, so generating forms can be
    marginalized before extracting a Taylor coefficient. This avoids the
    monomial expansion of :class:`Marginal`, which loses precision for
    strongly squeezed high-order states.
    """
    if axis not in ("q", "p"):
        raise ValueError(f"axis must be 'q' or 'p', got {axis!r}")
    c, u, v, w, x, y = f.coefficients
    s = np.asarray(s, dtype=float)
    if axis == "p":
        a = 0.5 * (u - v - w)
        b = 1j * ((w - v) * s + (x - y) / SQRT2)
        e0 = -0.5 * (u + v + w) * s**2 + (x + y) * s / SQRT2
    else:
        a = 0.5 * (u + v + w)
        b = 1j * (w - v) * s + (x + y) / SQRT2
        e0 = -0.5 * (u - v - w) * s**2 + 1j * (x - y) * s / SQRT2
    if complex(constant_part(a)).real <= 0:
        raise DivergenceError(f"marginal over {axis} diverges")
    return c * rpow(a / math.pi, -0.5) / (2 * math.pi) * rexp(e0 + b * b / (4.0 * a))


def marginal(f, axis: Literal["q", "p"]) -> Marginal:
    """Marginal distribution with quadrature ``axis`` integrated out."""
    return Marginal(f, axis)


def extract_polygaussian(form: GaussianForm, idx) -> PolyGaussian:
    """Derivative ``d^idx`` of a jet-valued form as an explicit PolyGaussian.

    The form is split into its scalar part (the constant terms of all
    coefficients), which becomes the base, and a nilpotent remainder whose
    exponential is a polynomial in (a, a*) with jet coefficients.
    """
    c, u, v, w, x, y = form.coefficients
    if not is_jet(c):
        raise TypeError("extract_polygaussian needs a jet-valued prefactor")
    space = c.space
    base = form.map(lambda z: complex(constant_part(z)))

    def nil(z):
        return z - constant_part(z) if is_jet(z) else Jet.constant(space, 0.0)

    exponent = Poly(2, {
        (1, 1): -nil(u),
        (2, 0): -nil(v),
        (0, 2): -nil(w),
        (1, 0): nil(x),
        (0, 1): nil(y),
    })
    series = Poly.const(2, Jet.constant(space, 1.0))
    power = Poly.const(2, Jet.constant(space, 1.0))
    for k in range(1, sum(space.orders) + 1):
        power = power * exponent * (1.0 / k)
        series = series + power
    relative_prefactor = c / complex(base.c)
    terms = {}
    for e, coeff in series.terms.items():
        value = (coeff * relative_prefactor).extract(idx)
        if value != 0:
            terms[e] = complex(value)
    return PolyGaussian(base, Poly(2, terms))


def integrate_out_second_mode(c, exponent: Poly) -> GaussianForm:
    """Integrate ``c * exp(exponent)`` over the second mode.

    ``exponent`` is a polynomial of degree <= 2 in (a, a*, b, b*); the result
    is a GaussianForm in a. Uses the same linear-source closed form as
    :func:`phase_space_integral`, with sources that depend on a.
    """
    if exponent.nvars != 4 or exponent.degree > 2:
        raise ValueError("need a quadratic polynomial in (a, a*, b, b*)")
    groups = exponent.collect([2, 3])
    zero = Poly.const(2, 0.0)

    def ring(key):
        p = groups.get(key, zero)
        if p.degree > 0:
            raise ValueError("second-mode quadratic coefficients must not depend on a")
        return p.coeff((0, 0))

    u = -ring((1, 1))
    v = -ring((2, 0))
    w = -ring((0, 2))
    _check_convergent(u, v, w, what="integral over the second mode")
    x = groups.get((1, 0), zero)
    y = groups.get((0, 1), zero)
    rest = groups.get((0, 0), zero)
    det = u * u - 4.0 * v * w
    inv_det = 1.0 / det
    quad = (x * y) * (u * inv_det) - (x * x) * (w * inv_det) - (y * y) * (v * inv_det)
    return GaussianForm.from_exponent_poly(c * rpow(det, -0.5), rest + quad)

"""Fock and squeezed Fock states from a single generating function.

The kernel ``2/(1+s) exp(-2|a|^2 (1-s)/(1+s))`` is the Wigner function of
``sum_n s^n |n><n|``. It serves three roles in the package: the Fock-state
generating function (parameter ``nu``), the photon-number projector
generating function (``J`` for heralding, ``K`` for statistics), and, at
``s = 1``, the identity.
"""

from __future__ import annotations

import numpy as np

from .gaussian import GaussianForm, _as_alpha, form_marginal
from .jets import Jet, JetSpace
from .states import SqueezeParams, bogoliubov

__all__ = [
    "NU",
    "number_projector_form",
    "fock_generating",
    "fock_wigner",
    "squeezed_fock_generating",
    "squeezed_fock_generating_closed",
    "squeezed_fock_wigner",
    "squeezed_fock_marginal",
    "laguerre",
    "laguerre_oracle",
]

NU = "nu"


def number_projector_form(s) -> GaussianForm:
    """``2/(1+s) exp(-2|a|^2 (1-s)/(1+s))`` for a scalar or jet ``s``."""
    inv = 1.0 / (1.0 + s)
    return GaussianForm(2.0 * inv, 2.0 * (1.0 - s) * inv)


def _parameter(space_or_value, name):
    if isinstance(space_or_value, JetSpace):
        return Jet.variable(space_or_value, name)
    return space_or_value


def fock_generating(space_or_nu, name: str = NU) -> GaussianForm:
    """Generating form whose ``nu^n`` Taylor coefficient is the Fock state ``|n>``."""
    return number_projector_form(_parameter(space_or_nu, name))


def _fock_space(n: int) -> JetSpace:
    return JetSpace.build({NU: n})


def fock_wigner(n: int, pt):
    """Wigner function of the Fock state ``|n>``."""
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    value = fock_generating(_fock_space(n))(_as_alpha(pt))
    return np.real_if_close(value.coefficient((n,)), tol=1e4)


def squeezed_fock_generating(params: SqueezeParams, space_or_nu, name: str = NU) -> GaussianForm:
    """Bogoliubov-transformed Fock generating form."""
    return bogoliubov(fock_generating(space_or_nu, name), params)


def squeezed_fock_generating_closed(A: float, B: complex, space_or_nu, name: str = NU) -> GaussianForm:
    """``2/(1+nu) exp[-(1-nu)/(1+nu) (2A|a|^2 + B* a^2 + B a*^2)]``."""
    nu = _parameter(space_or_nu, name)
    B = complex(B)
    ratio = (1.0 - nu) / (1.0 + nu)
    return GaussianForm(2.0 / (1.0 + nu), 2.0 * A * ratio, B.conjugate() * ratio, B * ratio)


def squeezed_fock_wigner(n: int, params: SqueezeParams, pt):
    form = squeezed_fock_generating(params, _fock_space(n))
    value = form(_as_alpha(pt))
    return np.real_if_close(value.coefficient((n,)), tol=1e4)


def squeezed_fock_marginal(n: int, params: SqueezeParams, axis: str, s):
    """Quadrature distribution of the squeezed Fock state with ``axis`` integrated out."""
    form = squeezed_fock_generating(params, _fock_space(n))
    return np.real_if_close(form_marginal(form, axis, s).coefficient((n,)), tol=1e4)


def laguerre(n: int, x):
    """Laguerre polynomial ``L_n(x)`` by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def laguerre_oracle(n: int, pt):
    """``2 (-1)^n L_n(4|a|^2) exp(-2|a|^2)``."""
    r2 = np.abs(_as_alpha(pt)) ** 2
    return 2.0 * (-1) ** n * laguerre(n, 4.0 * r2) * np.exp(-2.0 * r2)

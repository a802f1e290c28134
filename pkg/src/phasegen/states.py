"""Gaussian input states: vacuum, thermal, squeezed and lossy squeezed.

Squeezing constants follow ``A = cosh(2|xi|)`` and ``B = exp(i phi) sinh(2|xi|)``
so that ``A^2 - |B|^2 = 1``. The canonical way to specify squeezing is the
mean photon number of the corresponding pure squeezed vacuum, from which
``A = 1 + 2n`` and ``B = 2 exp(i phi) sqrt(n (n + 1))``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

from .gaussian import GaussianForm, affine_substitute

__all__ = [
    "StateValidationError",
    "SqueezeParams",
    "StateSpec",
    "STATE_KINDS",
    "ab_from_mean_n",
    "vacuum",
    "thermal",
    "squeezed_vacuum",
    "squeezed_thermal",
    "lossy_squeezed",
    "make_state",
    "bogoliubov",
    "loss_equivalence",
    "lossy_purity",
]

STATE_KINDS = ("vacuum", "thermal", "squeezed_vacuum", "squeezed_thermal", "lossy_squeezed")


class StateValidationError(ValueError):
    """A state specification violates a parameter constraint."""


def ab_from_mean_n(mean_n: float, phi: float = 0.0) -> tuple[float, complex]:
    """Squeezing constants ``(A, B)`` for a squeezed vacuum with mean photon number ``mean_n``."""
    if mean_n < 0:
        raise StateValidationError(f"mean photon number must be >= 0, got {mean_n}")
    A = 1.0 + 2.0 * mean_n
    B = 2.0 * cmath.exp(1j * phi) * math.sqrt(mean_n * (mean_n + 1.0))
    return A, B


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing parameter ``xi = magnitude * exp(i phase)``."""

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise StateValidationError(f"squeezing magnitude must be >= 0, got {self.magnitude}")

    @classmethod
    def from_mean_n(cls, mean_n: float, phi: float = 0.0) -> "SqueezeParams":
        if mean_n < 0:
            raise StateValidationError(f"mean photon number must be >= 0, got {mean_n}")
        return cls(math.asinh(math.sqrt(mean_n)), phi)

    @classmethod
    def from_A(cls, A: float, phi: float = 0.0) -> "SqueezeParams":
        if A < 1:
            raise StateValidationError(f"A must be >= 1, got {A}")
        return cls(0.5 * math.acosh(A), phi)

    @property
    def xi(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)

    @property
    def U(self) -> float:
        return math.cosh(self.magnitude)

    @property
    def V(self) -> complex:
        return cmath.exp(1j * self.phase) * math.sinh(self.magnitude)

    @property
    def A(self) -> float:
        return math.cosh(2 * self.magnitude)

    @property
    def B(self) -> complex:
        return cmath.exp(1j * self.phase) * math.sinh(2 * self.magnitude)


# -- raw constructors -------------------------------------------------------


def vacuum() -> GaussianForm:
    return GaussianForm(2.0, 2.0)


def thermal(T: float) -> GaussianForm:
    """``2T exp(-2T|a|^2)``; T is the purity."""
    return GaussianForm(2.0 * T, 2.0 * T)


def squeezed_thermal(T: float, A: float, B: complex) -> GaussianForm:
    """``2T exp(-2TA|a|^2 - T B* a^2 - T B a*^2)``."""
    B = complex(B)
    return GaussianForm(2.0 * T, 2.0 * T * A, T * B.conjugate(), T * B)


def squeezed_vacuum(A: float, B: complex) -> GaussianForm:
    return squeezed_thermal(1.0, A, B)


def lossy_squeezed(t: float, A: float, B: complex) -> GaussianForm:
    """Squeezed vacuum after a neutral-density filter with transmission ``t``."""
    B = complex(B)
    a = 1.0 - t
    s = 1.0 + 2.0 * t * a * (A - 1.0)
    return GaussianForm(
        2.0 / math.sqrt(s),
        2.0 * (a + t * A) / s,
        t * B.conjugate() / s,
        t * B / s,
    )


def lossy_purity(t: float, A: float) -> float:
    return 1.0 / math.sqrt(1.0 + 2.0 * t * (1.0 - t) * (A - 1.0))


def loss_equivalence(t: float, A: float, B: complex) -> tuple[float, float, complex]:
    """Squeezed-thermal parameters ``(T, A0, B0)`` equal to a lossy squeezed vacuum."""
    if not 0 < t <= 1:
        raise StateValidationError(f"transmission must lie in (0, 1], got {t}")
    _check_ab(A, B)
    a = 1.0 - t
    T = 1.0 / math.sqrt(1.0 + 2.0 * t * a * (A - 1.0))
    return T, (a + t * A) * T, t * complex(B) * T


def _check_ab(A, B, tol=1e-9):
    if abs(A * A - abs(B) ** 2 - 1.0) > tol * max(1.0, A * A):
        raise StateValidationError(f"A^2 - |B|^2 must equal 1, got {A * A - abs(B) ** 2}")


def bogoliubov(f: GaussianForm, params: SqueezeParams) -> GaussianForm:
    """Squeeze a Wigner form: ``W(a) -> W(U a + V a*)``."""
    return affine_substitute(f, params.U, params.V, 0.0)


# -- specifications ---------------------------------------------------------


@dataclass(frozen=True)
class StateSpec:
    """Named Gaussian input state.

    ``mean_n`` and ``phi`` fix the squeezing through :func:`ab_from_mean_n`;
    ``purity`` is T for the thermal families and ``transmission`` is t for
    the lossy squeezed vacuum.
    """

    kind: str = "squeezed_vacuum"
    mean_n: float = 1.0
    purity: float = 1.0
    transmission: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        problems = []
        if self.kind not in STATE_KINDS:
            problems.append(f"kind must be one of {STATE_KINDS}, got {self.kind!r}")
        if not self.mean_n >= 0:
            problems.append(f"mean_n must be >= 0, got {self.mean_n}")
        if not 0 < self.purity <= 1:
            problems.append(f"purity must lie in (0, 1], got {self.purity}")
        if not 0 < self.transmission <= 1:
            problems.append(f"transmission must lie in (0, 1], got {self.transmission}")
        if problems:
            raise StateValidationError("; ".join(problems))

    @property
    def A(self) -> float:
        if self.kind in ("vacuum", "thermal"):
            return 1.0
        return ab_from_mean_n(self.mean_n, self.phi)[0]

    @property
    def B(self) -> complex:
        if self.kind in ("vacuum", "thermal"):
            return 0j
        return ab_from_mean_n(self.mean_n, self.phi)[1]

    @property
    def T(self) -> float:
        """Purity of the state."""
        if self.kind in ("thermal", "squeezed_thermal"):
            return self.purity
        if self.kind == "lossy_squeezed":
            return lossy_purity(self.transmission, self.A)
        return 1.0

    def squeezed_thermal_parameters(self) -> tuple[float, float, complex]:
        """Equivalent ``(T, A, B)`` in the squeezed-thermal family."""
        if self.kind == "lossy_squeezed":
            return loss_equivalence(self.transmission, self.A, self.B)
        return self.T, self.A, self.B

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "StateSpec":
        known = {"kind", "mean_n", "purity", "transmission", "phi"}
        unknown = set(data) - known
        if unknown:
            raise StateValidationError(f"unknown state fields {sorted(unknown)}")
        return cls(**data)


def make_state(spec: StateSpec) -> GaussianForm:
    """Wigner form of the named state; always unit trace."""
    kind = spec.kind
    if kind == "vacuum":
        return vacuum()
    if kind == "thermal":
        return thermal(spec.purity)
    if kind == "squeezed_vacuum":
        return squeezed_vacuum(spec.A, spec.B)
    if kind == "squeezed_thermal":
        return squeezed_thermal(spec.purity, spec.A, spec.B)
    return lossy_squeezed(spec.transmission, spec.A, spec.B)

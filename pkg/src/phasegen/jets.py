"""Truncated multivariate power series ("jets") over complex numbers.

A :class:`Jet` stores the Taylor coefficients of a function of a few
generating parameters around a per-variable expansion center, truncated
independently in each variable. Coefficient arrays may carry trailing batch
dimensions, so one jet can hold the expansion at many phase-space points at
once; numpy broadcasting aligns those dimensions from the right.

Nonlinear functions (exp, powers) are evaluated with the Euler-operator
recurrence used in Taylor-mode automatic differentiation rather than by
summing powers of the nilpotent part, which keeps long univariate series
(order ~40) accurate.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "JetSpace",
    "Jet",
    "JetSpaceMismatch",
    "SingularJetError",
    "TruncationError",
    "jet_variable",
    "jet_constant",
    "jet_add",
    "jet_scale",
    "jet_mul",
    "jet_exp",
    "jet_inv",
    "jet_inv_sqrt",
    "jet_extract",
    "rexp",
    "rpow",
    "is_jet",
]


class JetSpaceMismatch(ValueError):
    """Arithmetic between jets living in different spaces."""


class SingularJetError(ArithmeticError):
    """Inverse or fractional power of a jet with vanishing constant term."""


class TruncationError(IndexError):
    """Requested derivative lies beyond the truncation order."""


@dataclass(frozen=True)
class JetSpace:
    """Ordered generating variables with truncation orders and centers."""

    variables: tuple[str, ...]
    orders: tuple[int, ...]
    centers: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        variables = tuple(self.variables)
        orders = tuple(int(o) for o in self.orders)
        centers = tuple(complex(c) for c in self.centers) or (0j,) * len(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate jet variable names in {variables}")
        if len(orders) != len(variables) or len(centers) != len(variables):
            raise ValueError("variables, orders and centers must have equal length")
        if any(o < 0 for o in orders):
            raise ValueError(f"truncation orders must be non-negative, got {orders}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "centers", centers)

    @classmethod
    def build(cls, orders: Mapping[str, int], centers: Mapping[str, complex] | None = None):
        """``JetSpace.build({"J": 3}, centers={"J": 1})``."""
        centers = centers or {}
        unknown = set(centers) - set(orders)
        if unknown:
            raise ValueError(f"centers given for unknown variables {sorted(unknown)}")
        names = tuple(orders)
        return cls(names, tuple(orders[n] for n in names), tuple(centers.get(n, 0) for n in names))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(o + 1 for o in self.orders)

    @property
    def ndim(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown jet variable {name!r}; space has {self.variables}") from None

    def __contains__(self, name) -> bool:
        return name in self.variables

    def drop(self, name: str) -> "JetSpace":
        i = self.index(name)
        return JetSpace(
            self.variables[:i] + self.variables[i + 1 :],
            self.orders[:i] + self.orders[i + 1 :],
            self.centers[:i] + self.centers[i + 1 :],
        )


@functools.lru_cache(maxsize=64)
def _recurrence_plan(shape: tuple[int, ...]):
    """Indices sorted by total degree, each with its nonzero sub-indices."""
    indices = sorted(itertools.product(*(range(s) for s in shape)), key=sum)
    plan = []
    for k in indices[1:]:
        subs = []
        for i in itertools.product(*(range(kk + 1) for kk in k)):
            if any(i):
                rest = tuple(a - b for a, b in zip(k, i))
                subs.append((i, sum(i), rest, sum(rest)))
        plan.append((k, sum(k), subs))
    return plan


class Jet:
    """Truncated power series in the variables of a :class:`JetSpace`.

    ``coeffs[idx]`` is the Taylor coefficient of ``prod(delta_i ** idx_i)``
    where ``delta_i`` is the offset of variable ``i`` from its center.
    """

    __array_ufunc__ = None  # make numpy defer to the reflected operators

    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[: space.ndim] != space.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} does not start with {space.shape}")
        self.space = space
        self.coeffs = coeffs

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, space: JetSpace, value=0.0) -> "Jet":
        value = np.asarray(value, dtype=complex)
        coeffs = np.zeros(space.shape + value.shape, dtype=complex)
        coeffs[(0,) * space.ndim] = value
        return cls(space, coeffs)

    @classmethod
    def variable(cls, space: JetSpace, name: str) -> "Jet":
        i = space.index(name)
        jet = cls.constant(space, space.centers[i])
        if space.orders[i] >= 1:
            unit = [0] * space.ndim
            unit[i] = 1
            jet.coeffs[tuple(unit)] = 1.0
        return jet

    # -- inspection ---------------------------------------------------------

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[self.space.ndim :]

    @property
    def constant_term(self):
        c = self.coeffs[(0,) * self.space.ndim]
        return c[()] if c.ndim == 0 else c

    def coefficient(self, idx: Sequence[int]):
        """Taylor coefficient at multi-index ``idx``."""
        idx = self._check_index(idx)
        c = self.coeffs[idx]
        return c[()] if c.ndim == 0 else c

    def extract(self, idx: Sequence[int]):
        """Mixed partial derivative ``d^idx`` evaluated at the center."""
        idx = self._check_index(idx)
        scale = math.prod(math.factorial(k) for k in idx)
        c = self.coeffs[idx] * scale
        return c[()] if c.ndim == 0 else c

    def derivative_jet(self, name: str, k: int) -> "Jet":
        """``d^k/d(name)^k`` at the center, as a jet in the remaining variables."""
        i = self.space.index(name)
        if not 0 <= k <= self.space.orders[i]:
            raise TruncationError(
                f"derivative order {k} in {name!r} exceeds truncation {self.space.orders[i]}"
            )
        sub = np.take(self.coeffs, k, axis=i) * math.factorial(k)
        return Jet(self.space.drop(name), sub)

    def _check_index(self, idx) -> tuple[int, ...]:
        idx = tuple(int(k) for k in idx)
        if len(idx) != self.space.ndim:
            raise TruncationError(f"multi-index {idx} has wrong length for {self.space.variables}")
        for k, o, name in zip(idx, self.space.orders, self.space.variables):
            if not 0 <= k <= o:
                raise TruncationError(
                    f"derivative order {k} in {name!r} exceeds truncation order {o}"
                )
        return idx

    def __repr__(self):
        return f"Jet({self.space.variables}, orders={self.space.orders}, batch={self.batch_shape})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space != self.space:
                raise JetSpaceMismatch(f"{self.space} vs {other.space}")
            return other
        return Jet.constant(self.space, other)

    def _aligned(self, other: "Jet"):
        batch = np.broadcast_shapes(self.batch_shape, other.batch_shape)

        def lift(jet):
            pad = (1,) * (len(batch) - len(jet.batch_shape))
            coeffs = jet.coeffs.reshape(jet.space.shape + pad + jet.batch_shape)
            return np.broadcast_to(coeffs, jet.space.shape + batch)

        return lift(self), lift(other)

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self._aligned(other)
        return Jet(self.space, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _with_batch(self, other):
        """Coefficients reshaped so a batch array multiplies along batch axes."""
        other = np.asarray(other)
        batch = np.broadcast_shapes(self.batch_shape, other.shape)
        pad = (1,) * (len(batch) - len(self.batch_shape))
        return self.coeffs.reshape(self.space.shape + pad + self.batch_shape), other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            coeffs, other = self._with_batch(other)
            return Jet(self.space, coeffs * other)
        other = self._coerce(other)
        a, b = self._aligned(other)
        shape = self.space.shape
        out = np.zeros_like(a)
        for idx in itertools.product(*(range(s) for s in shape)):
            ai = a[idx]
            if ai.ndim == 0 and ai == 0:
                continue
            dst = tuple(slice(k, None) for k in idx)
            src = tuple(slice(0, s - k) for s, k in zip(shape, idx))
            out[dst] += ai * b[src]
        return Jet(self.space, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inv()
        coeffs, other = self._with_batch(other)
        return Jet(self.space, coeffs / other)

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet.constant(self.space, np.ones(self.batch_shape))
            base = self
            while p:
                if p & 1:
                    out = out * base
                p >>= 1
                if p:
                    base = base * base
            return out
        return self.pow(p)

    # -- nonlinear functions ------------------------------------------------

    def exp(self) -> "Jet":
        a = self.coeffs
        f = np.zeros_like(a)
        zero = (0,) * self.space.ndim
        f[zero] = np.exp(a[zero])
        for k, dk, subs in _recurrence_plan(self.space.shape):
            acc = 0
            for i, di, rest, _ in subs:
                acc = acc + di * a[i] * f[rest]
            f[k] = acc / dk
        return Jet(self.space, f)

    def pow(self, p: complex) -> "Jet":
        """Principal-branch power anchored at the constant term."""
        a = self.coeffs
        zero = (0,) * self.space.ndim
        a0 = a[zero]
        if np.any(a0 == 0):
            raise SingularJetError("fractional power or inverse of a jet with zero constant term")
        f = np.zeros_like(a)
        f[zero] = np.power(a0, p)
        for k, dk, subs in _recurrence_plan(self.space.shape):
            acc = 0
            for i, di, rest, dr in subs:
                acc = acc + (p * di - dr) * a[i] * f[rest]
            f[k] = acc / (a0 * dk)
        return Jet(self.space, f)

    def inv(self) -> "Jet":
        return self.pow(-1)

    def inv_sqrt(self) -> "Jet":
        return self.pow(-0.5)

    def sqrt(self) -> "Jet":
        return self.pow(0.5)

    def evaluate(self, offsets: Iterable[complex]):
        """Sum the truncated series at the given offsets from the center."""
        offsets = list(offsets)
        total = 0
        for idx in itertools.product(*(range(s) for s in self.space.shape)):
            term = self.coeffs[idx]
            for d, k in zip(offsets, idx):
                term = term * d**k
            total = total + term
        return total


# -- functional surface -----------------------------------------------------


def jet_variable(space: JetSpace, name: str) -> Jet:
    return Jet.variable(space, name)


def jet_constant(space: JetSpace, value) -> Jet:
    return Jet.constant(space, value)


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_scale(a: Jet, s) -> Jet:
    return a * s


def jet_mul(a: Jet, b: Jet) -> Jet:
    if not (isinstance(a, Jet) and isinstance(b, Jet)):
        raise TypeError("jet_mul expects two jets")
    return a * b


def jet_exp(a: Jet) -> Jet:
    return a.exp()


def jet_inv(a: Jet) -> Jet:
    return a.inv()


def jet_inv_sqrt(a: Jet) -> Jet:
    return a.inv_sqrt()


def jet_extract(a: Jet, idx: Sequence[int]):
    return a.extract(idx)


# -- ring helpers used by code generic over scalars and jets -----------------


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def rexp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def rpow(x, p):
    if isinstance(x, Jet):
        return x.pow(p)
    return np.power(np.asarray(x, dtype=complex), p)[()]


def constant_part(x):
    """Scalar (or batch) value of a ring element at the expansion center."""
    return x.constant_term if isinstance(x, Jet) else x

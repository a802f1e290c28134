"""Sparse multivariate polynomials whose coefficients live in a ring.

Coefficients may be complex scalars, numpy arrays or :class:`~phasegen.jets.Jet`
values; only ``+``, ``-`` and ``*`` are required of them.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np


def _is_zero(c) -> bool:
    return np.ndim(c) == 0 and not hasattr(c, "space") and c == 0


class Poly:
    """Polynomial in ``nvars`` commuting symbols, stored as {exponents: coeff}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not match {nvars} variables")
            if not _is_zero(c):
                self.terms[tuple(e)] = c

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int, coeff=1.0) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): coeff})

    @classmethod
    def linear(cls, coeffs: Sequence, const=0.0) -> "Poly":
        """``const + sum(coeffs[i] * x_i)``."""
        n = len(coeffs)
        p = cls.const(n, const)
        for i, c in enumerate(coeffs):
            p = p + cls.var(n, i, c)
        return p

    def coeff(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0.0)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def max_exponents(self) -> tuple[int, ...]:
        out = [0] * self.nvars
        for e in self.terms:
            out = [max(a, b) for a, b in zip(out, e)]
        return tuple(out)

    def __repr__(self):
        return f"Poly({self.nvars}, {len(self.terms)} terms, degree {self.degree})"

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable counts")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return Poly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        other = self._lift(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                terms[e] = terms[e] + prod if e in terms else prod
        return Poly(self.nvars, terms)

    def __rmul__(self, other):
        # coefficient rings are commutative
        return self.__mul__(other)

    def __pow__(self, k: int):
        out = Poly.const(self.nvars, 1.0)
        for _ in range(k):
            out = out * self
        return out

    # -- structure ----------------------------------------------------------

    def truncate(self, max_exps: Sequence[int]) -> "Poly":
        return Poly(
            self.nvars,
            {e: c for e, c in self.terms.items() if all(a <= m for a, m in zip(e, max_exps))},
        )

    def map(self, fn: Callable) -> "Poly":
        return Poly(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def collect(self, which: Iterable[int]) -> dict:
        """Group by the powers of the variables in ``which``.

        Returns ``{exps_of_which: Poly over the remaining variables}``.
        """
        which = tuple(which)
        rest = tuple(i for i in range(self.nvars) if i not in which)
        groups: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in which)
            sub = tuple(e[i] for i in rest)
            groups.setdefault(key, {})
            groups[key][sub] = groups[key][sub] + c if sub in groups[key] else c
        return {k: Poly(len(rest), v) for k, v in groups.items()}

    def derivative(self, i: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = c * e[i]
        return Poly(self.nvars, terms)

    def evaluate(self, values: Sequence):
        total = 0.0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * v**k
            total = total + term
        return total

    def exp_truncated(self, max_exps: Sequence[int]) -> "Poly":
        """``exp(self)`` truncated to the exponent box; constant term must vanish."""
        if not _is_zero(self.coeff((0,) * self.nvars)):
            raise ValueError("exp_truncated needs a polynomial without constant term")
        result = Poly.const(self.nvars, 1.0)
        power = Poly.const(self.nvars, 1.0)
        for k in range(1, sum(max_exps) + 1):
            power = (power * self).truncate(max_exps)
            if not power.terms:
                break
            result = result + power * (1.0 / math.factorial(k))
        return result

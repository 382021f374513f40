"""Exact scalars carrying powers of pi.

Sphere and ball moments of monomials are rational multiples of the
surface measure omega_n, and omega_n is a rational multiple of an
integer power of pi for every n.  Carrying pi as a formal unit makes
every moment-based identity checkable with exact zeros; floats enter
only through explicit conversion.
"""

from __future__ import annotations

import math
from fractions import Fraction

Rational = (int, Fraction)


class PiRat:
    """Laurent polynomial in pi with Fraction coefficients.

    Supports +, -, * with PiRat / int / Fraction, division by rationals
    and by single-term PiRats, exact equality, and explicit float
    conversion.  Mixing with floats raises: conversions are explicit.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for p, c in terms.items():
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c:
                    clean[int(p)] = c
        self.terms = clean

    @staticmethod
    def rational(q) -> "PiRat":
        return PiRat({0: Fraction(q)})

    @staticmethod
    def pi_power(p, coeff=1) -> "PiRat":
        return PiRat({p: Fraction(coeff)})

    def _coerced(self, other):
        if isinstance(other, PiRat):
            return other
        if isinstance(other, Rational):
            return PiRat({0: Fraction(other)})
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for p, c in o.terms.items():
            s = t.get(p, Fraction(0)) + c
            if s:
                t[p] = s
            else:
                t.pop(p, None)
        return PiRat(t)

    __radd__ = __add__

    def __neg__(self):
        return PiRat({p: -c for p, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        t = {}
        for p1, c1 in self.terms.items():
            for p2, c2 in o.terms.items():
                p = p1 + p2
                s = t.get(p, Fraction(0)) + c1 * c2
                if s:
                    t[p] = s
                else:
                    t.pop(p, None)
        return PiRat(t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            return PiRat({p: c / Fraction(other) for p, c in self.terms.items()})
        if isinstance(other, PiRat):
            if len(other.terms) != 1:
                raise ZeroDivisionError("division only by single-term PiRat")
            (p0, c0), = other.terms.items()
            return PiRat({p - p0: c / c0 for p, c in self.terms.items()})
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Rational):
            return PiRat.rational(other) / self
        return NotImplemented

    def __eq__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __float__(self):
        return float(sum(float(c) * math.pi ** p for p, c in self.terms.items()))

    def is_rational(self) -> bool:
        return all(p == 0 for p in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self!r} carries pi powers")
        return self.terms[0]

    def __repr__(self):
        if not self.terms:
            return "PiRat(0)"
        bits = []
        for p in sorted(self.terms):
            c = self.terms[p]
            if p == 0:
                bits.append(f"{c}")
            elif p == 1:
                bits.append(f"{c}*pi")
            else:
                bits.append(f"{c}*pi^{p}")
        return "PiRat(" + " + ".join(bits) + ")"


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def omega_exact(n: int) -> PiRat:
    """Surface measure of the unit sphere S^{n-1} in R^n, exact in pi."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if n % 2 == 0:
        return PiRat.pi_power(n // 2, Fraction(2, math.factorial(n // 2 - 1)))
    return PiRat.pi_power((n - 1) // 2,
                          Fraction(2 ** ((n + 1) // 2), double_factorial(n - 2)))


def omega_float(n: int) -> float:
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def to_float(x) -> float:
    """Explicit scalar-to-float conversion for every backend."""
    if isinstance(x, PiRat):
        return float(x)
    return float(x)


def scalar_is_zero(x) -> bool:
    if isinstance(x, PiRat):
        return not x.terms
    return x == 0

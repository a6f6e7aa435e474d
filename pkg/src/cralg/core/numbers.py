"""Exact Gaussian rationals, the coefficient field Q(i) for every polynomial.

Real and imaginary parts are ``gmpy2.mpq`` values, which keep themselves
in lowest terms with a positive denominator.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)

_GR_PATTERN = re.compile(
    r"^(?P<re>[+-]?\d+(?:/\d+)?)?(?:(?P<im>[+-]?\d+(?:/\d+)?)\*i)?$"
)


def _q(value) -> mpq:
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, float):
        raise TypeError("floating point values are not exact; pass a Fraction or string")
    return mpq(value)


class GaussianRational:
    """Immutable a + b*i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _q(re))
        object.__setattr__(self, "im", _q(im))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if type(value) is cls:
            return value
        if isinstance(value, GaussianRational):
            return cls._raw(value.re, value.im)
        if isinstance(value, complex):
            raise TypeError("complex floats are not exact")
        if isinstance(value, str):
            return cls.parse(value)
        return cls._raw(_q(value), _ZERO)

    @classmethod
    def parse(cls, text: str) -> GaussianRational:
        """Parse the report format ``"a/b+c/d*i"`` (and its short forms)."""
        compact = text.replace(" ", "")
        if compact in ("i", "+i", "-i"):
            return cls(0, -1 if compact[0] == "-" else 1)
        m = _GR_PATTERN.match(compact)
        if m is None or not compact or (m.group("re") is None and m.group("im") is None):
            raise ValueError(f"not a Gaussian rational: {text!r}")
        return cls((m.group("re") or "0").lstrip("+"), (m.group("im") or "0").lstrip("+"))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (str(self.re), str(self.im)))

    # --- predicates -------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)) or type(other) is type(_ZERO):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # --- arithmetic -------------------------------------------------
    def __add__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._raw(a * c, _ZERO)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> GaussianRational:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if not self.im:
            return GaussianRational._raw(_ONE / self.re, _ZERO)
        n = self.re * self.re + self.im * self.im
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussianRational._raw(_ONE, _ZERO)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        return (Fraction(int(self.re.numerator), int(self.re.denominator)),
                Fraction(int(self.im.numerator), int(self.im.denominator)))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    # --- text -------------------------------------------------------
    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self) -> str:
        return f"GaussianRational('{self}')"


ZERO = GaussianRational._raw(_ZERO, _ZERO)
ONE = GaussianRational._raw(_ONE, _ZERO)
I = GaussianRational._raw(_ZERO, _ONE)


def gr(value) -> GaussianRational:
    """Shorthand coercion: ints, Fractions, mpq, strings like ``"1/2-3/4*i"``."""
    return GaussianRational.coerce(value)

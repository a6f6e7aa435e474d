"""Exact rational functions num/den, expanded to series on demand."""

from __future__ import annotations

from typing import Mapping

from ..errors import CompositionError
from .numbers import GaussianRational
from .polynomial import MultiPolynomial, TruncatedSeries, conjugate_swap, series_compose


class RationalFunction:
    """A pair of exact polynomials; no gcd reduction is attempted."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPolynomial, den: MultiPolynomial | None = None):
        if den is None:
            den = MultiPolynomial.constant(1, num.table)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.order is not None or den.order is not None:
            raise TypeError("RationalFunction needs exact polynomials")
        table = num.table.merge(den.table)
        self.num = num.retabled(table)
        self.den = den.retabled(table)
        if self.den.is_constant():
            c = self.den.constant_term()
            if c != 1:
                self.num = self.num.scale(c.inverse())
                self.den = MultiPolynomial.constant(1, table)

    @classmethod
    def lift(cls, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, MultiPolynomial):
            return cls(value)
        return cls(MultiPolynomial.constant(value))

    @property
    def table(self):
        return self.num.table

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_polynomial(self) -> MultiPolynomial:
        if not self.is_polynomial():
            raise ValueError("not a polynomial")
        return self.num

    def __add__(self, other):
        o = RationalFunction.lift(other)
        if self.is_polynomial() and o.is_polynomial():
            return RationalFunction(self.num + o.num)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFunction.lift(other))

    def __rsub__(self, other):
        return RationalFunction.lift(other) - self

    def __mul__(self, other):
        o = RationalFunction.lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunction.lift(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFunction.lift(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        o = RationalFunction.lift(other)
        return self.num * o.den == o.num * self.den

    __hash__ = None

    def evaluate(self, point: Mapping[str, object]) -> GaussianRational:
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.evaluate(point) / d

    def subs(self, assignment: Mapping[str, object]) -> RationalFunction:
        """Exact substitution of polynomials/constants (no series)."""
        for v in assignment.values():
            if isinstance(v, MultiPolynomial) and v.order is not None:
                raise CompositionError("use compose_series for series substitutions")
        return RationalFunction(series_compose(self.num, assignment), series_compose(self.den, assignment))

    def compose_series(self, assignment: Mapping[str, object]) -> TruncatedSeries:
        """Substitute series (any constant terms allowed) and expand as a series."""
        num = series_compose(self.num, assignment)
        den = series_compose(self.den, assignment)
        order = num.order if num.order is not None else den.order
        if order is None:
            raise CompositionError("compose_series needs at least one truncated argument")
        den = den.truncate(order)
        if not den.constant_term():
            raise CompositionError("denominator vanishes at the expansion point")
        return num.truncate(order) * den.inverse()

    def to_series(self, order: int) -> TruncatedSeries:
        """Taylor expansion at the origin of the table's variables."""
        if not self.den.constant_term():
            raise CompositionError("denominator vanishes at the origin")
        if self.is_polynomial():
            return self.num.truncate(order)
        return self.num.truncate(order) * self.den.truncate(order).inverse()

    def conjugate_swap(self) -> RationalFunction:
        return RationalFunction(conjugate_swap(self.num), conjugate_swap(self.den))

    def derivative(self, name: str) -> RationalFunction:
        if self.is_polynomial():
            return RationalFunction(self.num.derivative(name))
        return RationalFunction(self.num.derivative(name) * self.den - self.num * self.den.derivative(name),
                                self.den * self.den)

    def to_expr(self) -> str:
        if self.is_polynomial():
            return self.num.to_expr()
        return f"({self.num.to_expr()})/({self.den.to_expr()})"

    def __str__(self):
        return self.to_expr()

    def __repr__(self):
        return f"RationalFunction({self})"

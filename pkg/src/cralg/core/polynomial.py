"""Sparse multivariate polynomials and total-degree truncated power series.

Both share one representation: a :class:`VariableTable` naming the formal
variables and a dict ``{exponent tuple: GaussianRational}``.  A
:class:`TruncatedSeries` additionally carries ``order`` N, meaning the
stored terms are exact for every monomial of total degree <= N and nothing
is known above.

Operands over different tables are aligned automatically by appending the
missing variables of the right operand to the left operand's table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from operator import add
from typing import Iterable, Mapping

from gmpy2 import mpq

from ..errors import CompositionError, EvaluationError, MalformedTableError
from .numbers import ONE, ZERO, GaussianRational

HOLOMORPHIC = "holomorphic"
CONJUGATE = "conjugate"
MAP = "map-symbol"
DERIVATIVE = "derivative-symbol"
PARAMETER = "parameter"
KINDS = (HOLOMORPHIC, CONJUGATE, MAP, DERIVATIVE, PARAMETER)


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = PARAMETER
    partner: str | None = None


_NAME_RULES = [
    (re.compile(r"^z(\d+)$"), HOLOMORPHIC, "zb{0}"),
    (re.compile(r"^zb(\d+)$"), CONJUGATE, "z{0}"),
    (re.compile(r"^zp(\d+)$"), HOLOMORPHIC, "zpb{0}"),
    (re.compile(r"^zpb(\d+)$"), CONJUGATE, "zp{0}"),
    (re.compile(r"^F(\d+)$"), MAP, "Fb{0}"),
    (re.compile(r"^Fb(\d+)$"), MAP, "F{0}"),
    (re.compile(r"^D(\d+_\d+)$"), DERIVATIVE, "Db{0}"),
    (re.compile(r"^Db(\d+_\d+)$"), DERIVATIVE, "D{0}"),
]


def infer_variable(name: str) -> Variable:
    """Kind and conjugate partner from the naming convention.

    ``z3``/``zb3`` are holomorphic/conjugate partners, ``F2``/``Fb2`` map
    symbols, ``D2_1``/``Db2_1`` stand for dF2/dz1 and its conjugate,
    ``zp1``/``zpb1`` are target-space coordinates.  Anything else is a
    parameter with no partner.
    """
    for pattern, kind, partner in _NAME_RULES:
        m = pattern.match(name)
        if m:
            return Variable(name, kind, partner.format(m.group(1)))
    return Variable(name, PARAMETER, None)


class VariableTable:
    """Ordered, immutable list of formal variables with conjugate pairing."""

    __slots__ = ("variables", "names", "_index", "_hash")

    def __init__(self, variables: Iterable[Variable | str]):
        vs = tuple(v if isinstance(v, Variable) else infer_variable(v) for v in variables)
        names = tuple(v.name for v in vs)
        if len(set(names)) != len(names):
            raise MalformedTableError(f"duplicate variable names in {names}")
        index = {n: i for i, n in enumerate(names)}
        for v in vs:
            if v.kind not in KINDS:
                raise MalformedTableError(f"unknown kind {v.kind!r} for {v.name}")
            if v.partner is not None and v.partner in index:
                back = vs[index[v.partner]].partner
                if back != v.name:
                    raise MalformedTableError(f"{v.name} and {v.partner} are not mutual partners")
            if v.kind == CONJUGATE and v.partner is None:
                raise MalformedTableError(f"conjugate variable {v.name} has no holomorphic partner")
        self.variables = vs
        self.names = names
        self._index = index
        self._hash = hash(vs)

    @classmethod
    def from_names(cls, names: Iterable[str], with_partners: bool = True) -> VariableTable:
        names = list(dict.fromkeys(names))
        vs = [infer_variable(n) for n in names]
        if with_partners:
            present = set(names)
            for v in list(vs):
                if v.partner is not None and v.partner not in present:
                    vs.append(infer_variable(v.partner))
                    present.add(v.partner)
        return cls(vs)

    @classmethod
    def complex(cls, n: int, prefix: str = "z") -> VariableTable:
        """``z1..zn, zb1..zbn``."""
        hol = [f"{prefix}{i}" for i in range(1, n + 1)]
        conj = [f"{prefix}b{i}" for i in range(1, n + 1)]
        return cls.from_names(hol + conj)

    def __len__(self) -> int:
        return len(self.variables)

    def __iter__(self):
        return iter(self.variables)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, VariableTable) and self.variables == other.variables

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"VariableTable({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MalformedTableError(f"variable {name!r} not in table {self.names}") from None

    def variable(self, name: str) -> Variable:
        return self.variables[self.index(name)]

    def merge(self, other: VariableTable) -> VariableTable:
        if other is self or other == self:
            return self
        extra = []
        for v in other.variables:
            if v.name in self._index:
                if self.variables[self._index[v.name]] != v:
                    raise MalformedTableError(f"conflicting declarations of {v.name}")
            else:
                extra.append(v)
        if not extra:
            return self
        return VariableTable(self.variables + tuple(extra))

    def extend(self, names: Iterable[str]) -> VariableTable:
        return self.merge(VariableTable.from_names(names))


_EMBED_CACHE: dict = {}


def _embedding(src: VariableTable, dst: VariableTable) -> tuple[int, ...]:
    key = (src, dst)
    hit = _EMBED_CACHE.get(key)
    if hit is None:
        hit = tuple(dst.index(n) for n in src.names)
        if len(_EMBED_CACHE) > 4096:
            _EMBED_CACHE.clear()
        _EMBED_CACHE[key] = hit
    return hit


def _reembed(terms: dict, src: VariableTable, dst: VariableTable) -> dict:
    if src is dst or src == dst:
        return terms
    positions = _embedding(src, dst)
    width = len(dst)
    out = {}
    for e, c in terms.items():
        new = [0] * width
        for pos, k in zip(positions, e):
            new[pos] = k
        out[tuple(new)] = c
    return out


def _min_order(*orders):
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


def _truncate_terms(terms: dict, order) -> dict:
    if order is None:
        return terms
    return {e: c for e, c in terms.items() if sum(e) <= order}


def _coeff(value) -> GaussianRational:
    return GaussianRational.coerce(value)


class MultiPolynomial:
    """Exact sparse polynomial over Q(i).

    ``order`` is ``None`` for exact polynomials; :class:`TruncatedSeries`
    sets it.  Instances are treated as immutable.
    """

    __slots__ = ("table", "terms", "order")

    def __init__(self, table: VariableTable, terms: Mapping | None = None, order: int | None = None):
        if order is not None and type(self) is MultiPolynomial:
            raise TypeError("use TruncatedSeries for truncated data")
        width = len(table)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != width or any(k < 0 for k in e):
                raise MalformedTableError(f"exponent {e} does not match table of length {width}")
            c = _coeff(c)
            if c:
                clean[e] = clean.get(e, ZERO) + c
        self.table = table
        self.terms = {e: c for e, c in _truncate_terms(clean, order).items() if c}
        self.order = order

    @staticmethod
    def _make(table: VariableTable, terms: dict, order) -> MultiPolynomial:
        obj = object.__new__(MultiPolynomial if order is None else TruncatedSeries)
        obj.table = table
        obj.terms = terms
        obj.order = order
        return obj

    # --- constructors ---------------------------------------------
    @classmethod
    def zero(cls, table: VariableTable) -> MultiPolynomial:
        return cls._make(table, {}, None)

    @classmethod
    def constant(cls, value, table: VariableTable | None = None) -> MultiPolynomial:
        table = table if table is not None else VariableTable(())
        c = _coeff(value)
        return cls._make(table, {(0,) * len(table): c} if c else {}, None)

    @classmethod
    def variable(cls, name: str, table: VariableTable | None = None) -> MultiPolynomial:
        if table is None or name not in table:
            table = (table or VariableTable(())).merge(VariableTable.from_names([name]))
        e = [0] * len(table)
        e[table.index(name)] = 1
        return cls._make(table, {tuple(e): ONE}, None)

    @classmethod
    def from_dict(cls, table: VariableTable, monomials: Mapping[tuple, object]) -> MultiPolynomial:
        """Build from ``{((name, exp), ...): coeff}``."""
        terms = {}
        for mono, c in monomials.items():
            e = [0] * len(table)
            for name, k in mono:
                e[table.index(name)] += k
            terms[tuple(e)] = c
        return cls(table, terms)

    # --- alignment ------------------------------------------------
    def _lift(self, other):
        """Return (table, my_terms, other_terms, other_order) for a binary op."""
        if isinstance(other, MultiPolynomial):
            if other.table is self.table or other.table == self.table:
                return self.table, self.terms, other.terms, other.order
            table = self.table.merge(other.table)
            return (table, _reembed(self.terms, self.table, table),
                    _reembed(other.terms, other.table, table), other.order)
        c = _coeff(other)
        terms = {(0,) * len(self.table): c} if c else {}
        return self.table, self.terms, terms, None

    def retabled(self, table: VariableTable) -> MultiPolynomial:
        """Same polynomial expressed over a superset table."""
        return MultiPolynomial._make(table, _reembed(self.terms, self.table, table), self.order)

    def projected(self, table: VariableTable) -> MultiPolynomial:
        """Re-express over ``table``, dropping variables that do not occur."""
        stray = set(self.used_variables()) - set(table.names)
        if stray:
            raise MalformedTableError(f"variables {sorted(stray)} occur but are not in the target table")
        pos = [self.table.index(n) if n in self.table else None for n in table.names]
        terms = {tuple(e[p] if p is not None else 0 for p in pos): c for e, c in self.terms.items()}
        return MultiPolynomial._make(table, terms, self.order)

    # --- arithmetic -----------------------------------------------
    def __add__(self, other):
        try:
            table, a, b, ob = self._lift(other)
        except TypeError:
            return NotImplemented
        order = _min_order(self.order, ob)
        out = dict(a)
        for e, c in b.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPolynomial._make(table, _truncate_terms(out, order), order)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial._make(self.table, {e: -c for e, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        if isinstance(other, MultiPolynomial):
            return self + (-other)
        try:
            return self + (-_coeff(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MultiPolynomial:
        c = _coeff(c)
        if not c:
            return MultiPolynomial._make(self.table, {}, self.order)
        return MultiPolynomial._make(self.table, {e: v * c for e, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, MultiPolynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        table, a, b, ob = self._lift(other)
        order = _min_order(self.order, ob)
        return MultiPolynomial._make(table, _mul_terms(a, b, order), order)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, MultiPolynomial):
            if other.is_constant():
                return self.scale(other.constant_term().inverse())
            return NotImplemented
        return self.scale(_coeff(other).inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MultiPolynomial._make(self.table, {(0,) * len(self.table): ONE}, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # --- comparison -----------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, MultiPolynomial):
            try:
                other = MultiPolynomial.constant(other, self.table)
            except TypeError:
                return NotImplemented
        table, a, b, ob = self._lift(other)
        order = _min_order(self.order, ob)
        return _truncate_terms(a, order) == _truncate_terms(b, order)

    __hash__ = None

    # --- inspection -----------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * len(self.table), ZERO)

    def coefficient(self, monomial: Mapping[str, int] | None = None) -> GaussianRational:
        e = [0] * len(self.table)
        for name, k in (monomial or {}).items():
            e[self.table.index(name)] = k
        return self.terms.get(tuple(e), ZERO)

    def linear_coefficient(self, name: str) -> GaussianRational:
        return self.coefficient({name: 1})

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def degree(self, name: str) -> int:
        if name not in self.table:
            return 0 if self.terms else -1
        i = self.table.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def used_variables(self) -> list[str]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return [self.table.names[i] for i in sorted(used)]

    def homogeneous_part(self, k: int) -> MultiPolynomial:
        return MultiPolynomial._make(self.table, {e: c for e, c in self.terms.items() if sum(e) == k}, None)

    def truncate(self, order: int) -> TruncatedSeries:
        order = _min_order(order, self.order)
        return MultiPolynomial._make(self.table, _truncate_terms(self.terms, order), order)

    def as_polynomial(self) -> MultiPolynomial:
        """Forget the truncation order (the stored terms become exact data)."""
        return MultiPolynomial._make(self.table, self.terms, None)

    def sorted_terms(self) -> list[tuple[tuple, GaussianRational]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    # --- calculus & evaluation ----------------------------------
    def derivative(self, name: str) -> MultiPolynomial:
        return partial_derivative(self, name)

    def evaluate(self, point: Mapping[str, object]) -> GaussianRational:
        return evaluate(self, point)

    def subs(self, assignment: Mapping[str, object]) -> MultiPolynomial:
        return series_compose(self, assignment)

    def conjugate_swap(self) -> MultiPolynomial:
        return conjugate_swap(self)

    def is_real(self) -> bool:
        return conjugate_swap(self) == self

    # --- text -----------------------------------------------------
    def to_expr(self) -> str:
        """Text that the input parser reads back to an equal polynomial."""
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.table.names, e) if k
            )
            parts.append(_format_term(c, mono))
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text

    def __str__(self) -> str:
        text = self.to_expr()
        if self.order is not None:
            text += f" + O({self.order + 1})"
        return text

    def __repr__(self) -> str:
        kind = type(self).__name__
        return f"{kind}({self})"


def _format_term(c: GaussianRational, mono: str) -> str:
    if not mono:
        s = str(c)
        return f"({s})" if (c.re and c.im) else s
    if c == ONE:
        return mono
    if c == -ONE:
        return "-" + mono
    if c.im and c.re:
        return f"({c})*{mono}"
    if c.im:
        return f"{c}*{mono}"
    return f"{c.re}*{mono}"


def _mul_terms(a: dict, b: dict, order) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    if order is None:
        bl = list(b.items())
        for ea, ca in a.items():
            for eb, cb in bl:
                e = tuple(map(add, ea, eb))
                prev = get(e)
                out[e] = ca * cb if prev is None else prev + ca * cb
    else:
        bl = sorted(((sum(e), e, c) for e, c in b.items()), key=lambda t: t[0])
        for ea, ca in a.items():
            room = order - sum(ea)
            if room < 0:
                continue
            for db, eb, cb in bl:
                if db > room:
                    break
                e = tuple(map(add, ea, eb))
                prev = get(e)
                out[e] = ca * cb if prev is None else prev + ca * cb
    return {e: c for e, c in out.items() if c}


class TruncatedSeries(MultiPolynomial):
    """Power series known modulo total degree ``order + 1``."""

    __slots__ = ()

    def __init__(self, table: VariableTable, terms: Mapping | None = None, order: int = 0):
        if order is None or order < 0:
            raise ValueError("a truncated series needs a nonnegative order")
        super().__init__(table, terms, order)

    @classmethod
    def from_polynomial(cls, p: MultiPolynomial, order: int) -> TruncatedSeries:
        return p.truncate(order)

    @classmethod
    def univariate(cls, coeffs: Iterable, var: str = "t", order: int | None = None) -> TruncatedSeries:
        coeffs = list(coeffs)
        order = len(coeffs) - 1 if order is None else order
        table = VariableTable.from_names([var])
        return cls(table, {(k,): c for k, c in enumerate(coeffs) if k <= order}, order)

    def coefficients(self, var: str | None = None) -> list[GaussianRational]:
        """Dense coefficient list of a univariate series (index = power)."""
        if var is None:
            used = self.used_variables()
            if len(used) > 1:
                raise ValueError("coefficients() needs a univariate series")
            var = used[0] if used else self.table.names[0] if len(self.table) else None
        out = [ZERO] * (self.order + 1)
        if var is None:
            out[0] = self.constant_term()
            return out
        i = self.table.index(var)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise ValueError("coefficients() needs a univariate series")
            out[e[i]] = c
        return out

    def inverse(self) -> TruncatedSeries:
        """Multiplicative inverse; the constant term must be nonzero."""
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        one = MultiPolynomial._make(self.table, {(0,) * len(self.table): ONE}, None)
        y = MultiPolynomial._make(self.table, {(0,) * len(self.table): c0.inverse()}, 0)
        prec = 0
        while prec < self.order:
            prec = min(2 * prec + 1, self.order)
            f = self.truncate(prec)
            y = y.as_polynomial().truncate(prec)
            y = y * (one * 2 - f * y)
        return y.truncate(self.order)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries) or (isinstance(other, MultiPolynomial) and not other.is_constant()):
            if not isinstance(other, TruncatedSeries):
                other = other.truncate(self.order)
            return self * other.inverse()
        return super().__truediv__(other)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def power(self, exponent) -> TruncatedSeries:
        """``self ** exponent`` for rational exponents via the binomial series.

        Non-integer exponents need constant term exactly 1.
        """
        exponent = mpq(exponent) if not isinstance(exponent, int) else exponent
        if isinstance(exponent, int) or exponent.denominator == 1:
            k = int(exponent)
            return self ** k if k >= 0 else self.inverse() ** (-k)
        if self.constant_term() != ONE:
            raise CompositionError("rational powers need a series with constant term 1")
        h = self - 1
        result = MultiPolynomial._make(self.table, {(0,) * len(self.table): ONE}, self.order)
        term = result
        binom = mpq(1)
        low = max(h.low_degree(), 1) if h.terms else self.order + 1
        for k in range(1, self.order // low + 1):
            binom = binom * (exponent - k + 1) / k
            term = term * h
            if term.is_zero():
                break
            result = result + term.scale(GaussianRational(binom))
        return result

    def exp(self) -> TruncatedSeries:
        if self.constant_term():
            raise CompositionError("exp() needs a series with zero constant term")
        result = MultiPolynomial._make(self.table, {(0,) * len(self.table): ONE}, self.order)
        term = result
        low = self.low_degree() if self.terms else self.order + 1
        for k in range(1, self.order // max(low, 1) + 1):
            term = (term * self).scale(GaussianRational(mpq(1, k)))
            if term.is_zero():
                break
            result = result + term
        return result


# --- module-level operations -----------------------------------------


def conjugate_swap(p: MultiPolynomial) -> MultiPolynomial:
    """Formal complex conjugation: swap partnered exponents, conjugate coefficients.

    Parameters without a partner are treated as real and left alone; any
    other unpartnered variable that occurs raises MalformedTableError.
    """
    table = p.table
    perm = list(range(len(table)))
    for i, v in enumerate(table.variables):
        if v.partner is not None and v.partner in table:
            perm[i] = table.index(v.partner)
    used = set()
    for e in p.terms:
        used.update(i for i, k in enumerate(e) if k)
    for i in used:
        v = table.variables[i]
        if perm[i] == i and v.kind != PARAMETER:
            raise MalformedTableError(f"variable {v.name} has no conjugate partner in the table")
    out = {}
    for e, c in p.terms.items():
        new = [0] * len(e)
        for i, k in enumerate(e):
            if k:
                new[perm[i]] = k
        out[tuple(new)] = c.conjugate()
    return MultiPolynomial._make(table, out, p.order)


def partial_derivative(p: MultiPolynomial, name: str) -> MultiPolynomial:
    """Formal partial derivative; series lose one order."""
    order = None if p.order is None else p.order - 1
    if name not in p.table:
        return MultiPolynomial._make(p.table, {}, order)
    i = p.table.index(name)
    out = {}
    for e, c in p.terms.items():
        k = e[i]
        if k:
            new = e[:i] + (k - 1,) + e[i + 1:]
            out[new] = c * k
    if order is not None:
        if order < 0:
            raise CompositionError("derivative of an order-0 series carries no information")
        out = _truncate_terms(out, order)
    return MultiPolynomial._make(p.table, out, order)


def evaluate(p: MultiPolynomial, point: Mapping[str, object]) -> GaussianRational:
    """Exact value at a point; every occurring variable must be assigned."""
    values = []
    for i, name in enumerate(p.table.names):
        if name in point:
            values.append(_coeff(point[name]))
        else:
            values.append(None)
    total = ZERO
    powers: dict = {}
    for e, c in p.terms.items():
        term = c
        for i, k in enumerate(e):
            if k:
                v = values[i]
                if v is None:
                    raise EvaluationError(f"variable {p.table.names[i]} is not assigned")
                key = (i, k)
                pw = powers.get(key)
                if pw is None:
                    pw = powers[key] = v ** k
                term = term * pw
        total = total + term
    return total


def series_compose(f: MultiPolynomial, assignment: Mapping[str, object]) -> MultiPolynomial:
    """Substitute series/polynomials/constants for variables of ``f``.

    A truncated ``f`` only admits substitutions with zero constant term;
    an exact polynomial ``f`` admits anything.  The result is truncated to
    the smallest order among ``f`` and the substituted values that
    actually occur.
    """
    used = set(f.used_variables())
    subs = {}
    for name, value in assignment.items():
        if name not in used:
            continue
        if not isinstance(value, MultiPolynomial):
            value = MultiPolynomial.constant(value)
        subs[name] = value
    if not subs:
        return f
    if f.order is not None:
        for name, g in subs.items():
            if g.constant_term():
                raise CompositionError(
                    f"substituting a series with nonzero constant term for {name} "
                    "into a truncated series is ill-defined")
    table = f.table
    for g in subs.values():
        table = table.merge(g.table)
    order = _min_order(f.order, *(g.order for g in subs.values()))
    fterms = _reembed(f.terms, f.table, table)
    gs = {table.index(n): g.retabled(table) for n, g in subs.items()}
    idx = sorted(gs)
    one = MultiPolynomial._make(table, {(0,) * len(table): ONE}, None)
    pow_cache = {i: [one] for i in idx}

    def power(i, k):
        cache = pow_cache[i]
        while len(cache) <= k:
            nxt = cache[-1] * gs[i]
            if order is not None:
                nxt = nxt.truncate(order)
            cache.append(nxt)
        return cache[k]

    groups: dict = {}
    for e, c in fterms.items():
        key = tuple(e[i] for i in idx)
        rest = list(e)
        for i in idx:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = c

    result: dict = {}
    for key in sorted(groups, key=lambda k: (sum(k), k)):
        prod = one
        for i, k in zip(idx, key):
            if k:
                prod = prod * power(i, k)
                if order is not None:
                    prod = prod.truncate(order)
        part = _mul_terms(groups[key], prod.terms, order)
        for e, c in part.items():
            prev = result.get(e)
            result[e] = c if prev is None else prev + c
    result = {e: c for e, c in result.items() if c}
    return MultiPolynomial._make(table, _truncate_terms(result, order), order)


def var(name: str, table: VariableTable | None = None) -> MultiPolynomial:
    return MultiPolynomial.variable(name, table)


def const(value, table: VariableTable | None = None) -> MultiPolynomial:
    return MultiPolynomial.constant(value, table)


def as_series(p: MultiPolynomial, order: int) -> TruncatedSeries:
    return p.truncate(order)

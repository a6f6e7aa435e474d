"""Annihilating polynomials of truncated power series by exact kernels."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from ..core import linalg
from ..core.implicit import _series_matrix_inverse
from ..core.numbers import ONE, ZERO, GaussianRational
from ..core.polynomial import MultiPolynomial, TruncatedSeries, VariableTable
from ..core.rational import RationalFunction
from ..errors import OrderInsufficientError, SingularMatrixError

DEFAULT_MARGIN = 4


@dataclass
class Annihilator:
    """Nonzero P with P(f, v) = 0 modulo total degree order + 1.

    The first table variable is the function symbol; exponents of
    ``poly`` are (i, alpha) for the monomial f^i v^alpha.
    """

    poly: MultiPolynomial
    symbol: str
    variables: tuple[str, ...]
    order: int
    degrees: tuple[int, ...]
    pivot: tuple[int, ...]
    kernel_dim: int = 1
    searched: list = field(default_factory=list)

    def __bool__(self):
        return True

    @property
    def found(self) -> bool:
        return True

    def f_degree(self) -> int:
        return self.poly.degree(self.symbol)

    def residual(self, f: MultiPolynomial) -> MultiPolynomial:
        return evaluate_annihilator(self.poly, self.symbol, f, self.order)

    def verify(self, f: MultiPolynomial) -> bool:
        return self.residual(f).is_zero()

    def __str__(self):
        return str(self.poly)


@dataclass
class NotFound:
    searched: list
    reason: str = "kernel is trivial for every candidate"

    def __bool__(self):
        return False

    @property
    def found(self) -> bool:
        return False


def evaluate_annihilator(P: MultiPolynomial, symbol: str, f: MultiPolynomial, order: int) -> MultiPolynomial:
    """P(f(v), v) modulo degree order + 1, by an independent Horner pass in f."""
    fs = f.truncate(order) if f.order is None or f.order > order else f
    q = P.degree(symbol)
    si = P.table.index(symbol)
    rest = [n for n in P.table.names if n != symbol]
    vtable = fs.table.extend(rest)
    coeff_polys = []
    for i in range(q + 1):
        terms = {}
        for e, c in P.terms.items():
            if e[si] == i:
                mono = tuple(k for j, k in enumerate(e) if j != si)
                terms[mono] = c
        cp = MultiPolynomial(VariableTable.from_names(rest, with_partners=False), terms)
        coeff_polys.append(cp.retabled(vtable) if rest else MultiPolynomial.constant(terms.get((), ZERO), vtable))
    acc = coeff_polys[q].truncate(order)
    for i in range(q - 1, -1, -1):
        acc = acc * fs + coeff_polys[i]
    return acc.truncate(order)


def _as_series(f, order: int | None) -> TruncatedSeries:
    if isinstance(f, RationalFunction):
        if order is None:
            raise ValueError("an order is needed to expand a rational function")
        return f.to_series(order)
    if f.order is None:
        if order is None:
            raise ValueError("an order is needed for an exact polynomial")
        return f.truncate(order)
    if order is not None and order < f.order:
        return f.truncate(order)
    return f


def _power_list(f: MultiPolynomial, q: int) -> list[MultiPolynomial]:
    one = MultiPolynomial.constant(ONE, f.table).truncate(f.order)
    out = [one]
    for _ in range(q):
        out.append((out[-1] * f).truncate(f.order))
    return out


def _canonical_kernel_vector(kernel: list[list[GaussianRational]], preference: list[int]):
    """The kernel vector whose leading entry in preference order is 1 (rref in that order)."""
    permuted = [[vec[c] for c in preference] for vec in kernel]
    r, pivots = linalg.rref(permuted)
    row = r[0]
    vec = [ZERO] * len(preference)
    for pos, c in enumerate(preference):
        vec[c] = row[pos]
    return vec, preference[pivots[0]]


def _build_poly(symbol: str, variables: Sequence[str], monomials: list[tuple], vec) -> MultiPolynomial:
    table = VariableTable.from_names([symbol] + list(variables), with_partners=False)
    return MultiPolynomial(table, {mono: c for mono, c in zip(monomials, vec) if c})


def univariate_candidates(qmax: int, kmax: int) -> list[tuple[int, int]]:
    """(q, k) ordered by q + k, ties broken by smaller q; q >= 1."""
    cands = [(q, k) for q in range(1, qmax + 1) for k in range(0, kmax + 1)]
    return sorted(cands, key=lambda c: (c[0] + c[1], c[0]))


def required_order(q: int, k: int, margin: int = DEFAULT_MARGIN) -> int:
    return (q + 1) * (k + 1) + margin - 1


def find_annihilator(f, qmax: int = 3, kmax: int = 3, margin: int = DEFAULT_MARGIN, symbol: str = "f",
                     var: str | None = None, order: int | None = None):
    """Minimal (q, k) with a nonzero sum a_ij f^i v^j vanishing to the series order."""
    f = _as_series(f, order)
    if var is None:
        used = f.used_variables()
        if len(used) > 1:
            raise ValueError(f"find_annihilator needs a univariate series, got variables {used}")
        var = used[0] if used else (f.table.names[0] if len(f.table) else "t")
    if var not in f.table:
        f = f.retabled(f.table.extend([var]))
    N = f.order
    powers = _power_list(f, qmax)
    coeffs = [p.coefficients(var) for p in powers]
    searched = []
    for q, k in univariate_candidates(qmax, kmax):
        need = required_order(q, k, margin)
        if N < need:
            raise OrderInsufficientError(
                f"order {N} is too small for candidate (q={q}, k={k}); need order >= {need}", need)
        monomials = [(i, j) for i in range(q + 1) for j in range(k + 1)]
        matrix = [[coeffs[i][e - j] if e >= j else ZERO for (i, j) in monomials] for e in range(N + 1)]
        kernel = linalg.nullspace(matrix)
        searched.append({"q": q, "k": k, "rank": len(monomials) - len(kernel), "columns": len(monomials)})
        if not kernel:
            continue
        preference = sorted(range(len(monomials)), key=lambda c: (-monomials[c][0], monomials[c][1]))
        vec, piv = _canonical_kernel_vector(kernel, preference)
        poly = _build_poly(symbol, [var], monomials, vec)
        ann = Annihilator(poly, symbol, (var,), N, (q, k), monomials[piv], len(kernel), searched)
        if not ann.verify(f):
            raise ArithmeticError("kernel vector failed independent verification")
        return ann
    return NotFound(searched)


def monomials_upto(m: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors in m variables of total degree <= degree, graded order."""
    out = []
    for deg in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(range(m), deg):
            e = [0] * m
            for c in combo:
                e[c] += 1
            block.append(tuple(e))
        out.extend(sorted(block, reverse=True))
    return out


def multivariate_annihilator(f, degree: int = 3, margin: int = DEFAULT_MARGIN, symbol: str = "f",
                             variables: Sequence[str] | None = None, order: int | None = None):
    """Smallest total degree D' <= degree with a nonzero sum a f^i v^alpha (i + |alpha| <= D')."""
    f = _as_series(f, order)
    if variables is None:
        variables = f.used_variables()
    variables = list(variables)
    f = f.retabled(f.table.extend(variables)) if variables else f
    N = f.order
    idx = [f.table.index(v) for v in variables]
    m = len(variables)
    rows = monomials_upto(m, N)
    row_index = {e: r for r, e in enumerate(rows)}
    powers = _power_list(f, degree)

    def proj(e):
        return tuple(e[i] for i in idx)

    # coefficient vectors of f^i projected onto the chosen variables
    pvecs = []
    for p in powers:
        vec = {}
        for e, c in p.terms.items():
            if any(k for j, k in enumerate(e) if j not in idx and k):
                raise ValueError("series involves variables outside the annihilator variables")
            vec[proj(e)] = c
        pvecs.append(vec)
    searched = []
    for D in range(1, degree + 1):
        need = 2 * D + margin
        if N < need:
            raise OrderInsufficientError(f"order {N} is too small for total degree {D}; need order >= {need}", need)
        monomials = [(i,) + a for i in range(D + 1) for a in monomials_upto(m, D - i)]
        cols = []
        for mono in monomials:
            i, a = mono[0], mono[1:]
            col = [ZERO] * len(rows)
            for e, c in pvecs[i].items():
                shifted = tuple(x + y for x, y in zip(e, a))
                if sum(shifted) <= N:
                    col[row_index[shifted]] = c
            cols.append(col)
        matrix = linalg.transpose(cols)
        kernel = linalg.nullspace(matrix)
        searched.append({"degree": D, "rank": len(monomials) - len(kernel), "columns": len(monomials)})
        if not kernel:
            continue
        preference = sorted(range(len(monomials)),
                            key=lambda c: (-monomials[c][0], sum(monomials[c][1:]), tuple(-x for x in monomials[c][1:])))
        vec, piv = _canonical_kernel_vector(kernel, preference)
        poly = _build_poly(symbol, variables, monomials, vec)
        ann = Annihilator(poly, symbol, tuple(variables), N, (D,), monomials[piv], len(kernel), searched)
        if not ann.verify(f):
            raise ArithmeticError("kernel vector failed independent verification")
        return ann
    return NotFound(searched)


def renormalize(P: MultiPolynomial, symbol: str) -> tuple[MultiPolynomial, tuple]:
    """Scale so the preferred coefficient (highest f power, lowest graded rest) is 1."""
    si = P.table.index(symbol)

    def key(e):
        rest = tuple(k for j, k in enumerate(e) if j != si)
        return (-e[si], sum(rest), tuple(-x for x in rest))

    lead = min(P.terms, key=key)
    return P.scale(P.terms[lead].inverse()), lead


# --- parameter-dependent coefficients -----------------------------------


@dataclass
class ParametricAnnihilator:
    """sum a_ij(c) f^i t^j with coefficients series in the parameters c."""

    coefficients: dict[tuple[int, int], MultiPolynomial]
    symbol: str
    var: str
    params: tuple[str, ...]
    degrees: tuple[int, int]
    rows: int
    param_order: int
    pivot: tuple[int, int]

    def residual(self, f: MultiPolynomial) -> MultiPolynomial:
        """The checked box of sum a_ij(c) f^i t^j: t-degree < rows, c-degree <= param_order."""
        total = None
        fp = _power_list(f, self.degrees[0])
        t = MultiPolynomial.variable(self.var, f.table)
        for (i, j), a in self.coefficients.items():
            term = a.as_polynomial() * fp[i] * t ** j
            total = term if total is None else total + term
        ti = total.table.index(self.var)
        box = {e: c for e, c in total.terms.items()
               if e[ti] < self.rows and sum(e) - e[ti] <= self.param_order}
        return MultiPolynomial(total.table, box)

    def verify(self, f: MultiPolynomial) -> bool:
        return self.residual(f).is_zero()

    def at_zero(self) -> dict:
        return {key: a.constant_term() for key, a in self.coefficients.items()}


def parametric_annihilator(f: MultiPolynomial, var: str, params: Sequence[str], q: int, k: int,
                           margin: int = DEFAULT_MARGIN):
    """Kernel over the ring of truncated series in the parameters, pivots restricted to units.

    The square pivot block is chosen from the specialization c = 0; its
    entries have unit determinant there, so the block is inverted in the
    series ring and no other division occurs.  Returns NotFound when the
    specialization is not a regular point (kernel of dimension != 1 at
    c = 0, or the lifted vector fails the remaining rows).
    """
    params = tuple(params)
    N = f.order
    rows = (q + 1) * (k + 1) + margin
    P = N - (rows - 1)
    if P < 0:
        raise OrderInsufficientError(f"order {N} leaves no precision in the parameters; need >= {rows - 1}", rows - 1)
    ptable = VariableTable.from_names(list(params), with_partners=False)
    powers = _power_list(f, q)
    ti = f.table.index(var)
    pidx = [f.table.index(c) for c in params]

    def coefficient_series(p):
        out = [dict() for _ in range(rows)]
        for e, c in p.terms.items():
            if e[ti] < rows:
                pe = tuple(e[i] for i in pidx)
                if sum(pe) <= P:
                    out[e[ti]][pe] = c
        return [MultiPolynomial(ptable, d).truncate(P) for d in out]

    coeffs = [coefficient_series(p) for p in powers]
    zero = MultiPolynomial.zero(ptable).truncate(P)
    monomials = [(i, j) for i in range(q + 1) for j in range(k + 1)]
    A = [[coeffs[i][e - j] if e >= j else zero for (i, j) in monomials] for e in range(rows)]
    A0 = [[x.constant_term() for x in row] for row in A]
    kernel0 = linalg.nullspace(A0)
    if len(kernel0) != 1:
        return NotFound([{"q": q, "k": k, "kernel_dim_at_zero": len(kernel0)}],
                        "parameter value 0 is not a regular point for this family")
    preference = sorted(range(len(monomials)), key=lambda c: (-monomials[c][0], monomials[c][1]))
    vec0, piv = _canonical_kernel_vector(kernel0, preference)
    # pivot block: independent rows of A0 restricted to the columns other than piv
    others = [c for c in range(len(monomials)) if c != piv]
    sub0 = [[row[c] for c in others] for row in A0]
    rsel = linalg.independent_rows(sub0)
    if len(rsel) != len(others):
        return NotFound([{"q": q, "k": k}], "pivot block is singular at 0")
    block = [[A[r][c] for c in others] for r in rsel]
    block0 = [[A0[r][c] for c in others] for r in rsel]
    try:
        inv0 = linalg.inverse(block0)
    except SingularMatrixError:
        return NotFound([{"q": q, "k": k}], "pivot block is singular at 0")
    inv = _series_matrix_inverse(block, inv0, P) if others else []
    rhs = [-A[r][piv] for r in rsel]
    sol = [sum((inv[i][j] * rhs[j] for j in range(len(rsel))), zero).truncate(P) for i in range(len(others))]
    coefficients = {monomials[piv]: MultiPolynomial.constant(ONE, ptable).truncate(P)}
    for c, s in zip(others, sol):
        if not s.is_zero():
            coefficients[monomials[c]] = s
    for r in range(rows):
        acc = zero
        for c, mono in enumerate(monomials):
            if mono in coefficients:
                acc = acc + A[r][c] * coefficients[mono]
        if not acc.truncate(P).is_zero():
            return NotFound([{"q": q, "k": k}], f"row {r} is not annihilated: coefficients do not lift")
    ann = ParametricAnnihilator(coefficients, "f", var, params, (q, k), rows, P, monomials[piv])
    return ann

"""Exact linear algebra over Q(i) and over polynomial rings.

Matrices are plain lists of rows.  Field routines use Gauss-Jordan
elimination with the first nonzero pivot, so results are deterministic.
Polynomial determinants/adjugates never divide except exactly (Bareiss).
"""

from __future__ import annotations

from typing import Sequence

from ..errors import SingularMatrixError
from .numbers import ONE, ZERO, GaussianRational
from .polynomial import MultiPolynomial

_MP = MultiPolynomial

Matrix = list[list[GaussianRational]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[GaussianRational.coerce(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def conjugate_transpose(a: Matrix) -> Matrix:
    return [[x.conjugate() for x in col] for col in zip(*a)] if a else []


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), ZERO) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[GaussianRational]) -> list[GaussianRational]:
    return [sum((x * y for x, y in zip(row, v)), ZERO) for row in a]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(row) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[GaussianRational]]:
    """Basis of {x : a x = 0}; one vector per free column, free entry = 1."""
    if not a:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    r, pivots = rref(a)
    n = len(a[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, pc in zip(r, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def left_nullspace(a: Matrix) -> list[list[GaussianRational]]:
    return nullspace(transpose(a), len(a))


def solve(a: Matrix, b: Sequence[GaussianRational]) -> list[GaussianRational]:
    """Unique solution of a square system."""
    n = len(a)
    aug = [list(row) + [GaussianRational.coerce(x)] for row, x in zip(a, b)]
    r, pivots = rref(aug)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [r[i][n] for i in range(n)]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + idrow for row, idrow in zip(a, identity(n))]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in r]


def det(a: Matrix) -> GaussianRational:
    m = [list(row) for row in a]
    n = len(m)
    result = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        result = result * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def independent_rows(rows: Sequence[Sequence[GaussianRational]]) -> list[int]:
    """Greedy: indices of rows that each raise the rank of the ones before."""
    chosen: list[int] = []
    basis: Matrix = []
    for i, row in enumerate(rows):
        trial = basis + [list(row)]
        if rank(trial) > len(basis):
            basis = trial
            chosen.append(i)
    return chosen


# --- polynomial matrices --------------------------------------------


def exact_divide(p: _MP, q: _MP) -> _MP:
    """p / q when q divides p exactly (multivariate division by leading terms)."""
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    table = p.table.merge(q.table)
    p = p.retabled(table)
    q = q.retabled(table)
    lead_e, lead_c = q.sorted_terms()[0]
    inv = lead_c.inverse()
    quotient = MultiPolynomial.zero(table)
    rem = p
    while not rem.is_zero():
        e, c = rem.sorted_terms()[0]
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(k < 0 for k in shift):
            raise ArithmeticError("division is not exact")
        mono = MultiPolynomial(table, {shift: c * inv})
        quotient = quotient + mono
        rem = rem - mono * q
    return quotient


def poly_det(a: list[list[_MP]]) -> _MP:
    n = len(a)
    if n == 0:
        raise ValueError("empty matrix")
    if n <= 3:
        return _cofactor_det(a)
    return _bareiss_det(a)


def _cofactor_det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * _cofactor_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _bareiss_det(a):
    m = [list(row) for row in a]
    n = len(m)
    sign = 1
    prev = None
    for k in range(n - 1):
        if m[k][k].is_zero():
            p = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if p is None:
                return m[k][k] * 0
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num if prev is None else exact_divide(num, prev)
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return d if sign > 0 else -d


def poly_adjugate(a: list[list[_MP]]) -> list[list[_MP]]:
    """Adjugate: ``a @ adj(a) == det(a) * I`` with no division."""
    n = len(a)
    if n == 1:
        one = MultiPolynomial.constant(1, a[0][0].table)
        return [[one]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(a) if k != i]
            c = poly_det(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return adj

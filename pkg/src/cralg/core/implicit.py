"""Newton iteration for implicitly defined power series."""

from __future__ import annotations

from typing import Sequence

from ..errors import BasepointError, ImplicitSolveError, SingularMatrixError
from . import linalg
from .polynomial import MultiPolynomial, TruncatedSeries, partial_derivative, series_compose


def _schulz_step(jac, x, prec):
    """One update X <- X (2I - J X); doubles the number of correct degrees."""
    n = len(jac)
    table = jac[0][0].table
    zero = MultiPolynomial.zero(table).truncate(prec)
    j_t = [[e.truncate(prec) for e in row] for row in jac]
    xs = [[e.as_polynomial().truncate(prec) for e in row] for row in x]
    jx = [[sum((j_t[i][k] * xs[k][c] for k in range(n)), zero) for c in range(n)] for i in range(n)]
    corr = [[(2 if i == c else 0) - jx[i][c] for c in range(n)] for i in range(n)]
    return [[sum((xs[i][k] * corr[k][c] for k in range(n)), zero) for c in range(n)] for i in range(n)]


def _series_matrix_inverse(jac, inv0, order):
    """Invert a square matrix of series whose constant part has inverse ``inv0``."""
    n = len(jac)
    table = jac[0][0].table
    x = [[MultiPolynomial.constant(inv0[i][j], table).truncate(0) for j in range(n)] for i in range(n)]
    prec = 0
    while prec < order:
        prec = min(2 * prec + 1, order)
        x = _schulz_step(jac, x, prec)
    return x


def newton_implicit_solve(
    equations: Sequence[MultiPolynomial],
    free: Sequence[str],
    unknowns: Sequence[str],
    order: int,
) -> list[TruncatedSeries]:
    """Solve G(v, w(v)) = 0 for w(v) with w(0) = 0, modulo total degree order+1.

    Quadratically convergent Newton steps with the full series Jacobian;
    the precision doubles every step.  Raises BasepointError when
    G(0, 0) != 0 and ImplicitSolveError when dG/dw(0, 0) is singular.
    """
    d = len(unknowns)
    if len(equations) != d:
        raise ImplicitSolveError(f"{len(equations)} equations for {d} unknowns")
    if order < 0:
        raise ValueError("order must be nonnegative")
    table = equations[0].table
    for g in equations[1:]:
        table = table.merge(g.table)
    table = table.extend(list(free) + list(unknowns))
    eqs = [g.retabled(table) for g in equations]
    allowed = set(free) | set(unknowns)
    for g in eqs:
        stray = set(g.used_variables()) - allowed
        if stray:
            raise ImplicitSolveError(f"equations involve undeclared variables {sorted(stray)}")
        if g.constant_term():
            raise BasepointError(f"G(0,0) = {g.constant_term()} is not zero")

    # The Jacobian only steers the iteration; the residual carries the precision.
    jac_poly = [[partial_derivative(g.as_polynomial(), w) for w in unknowns] for g in eqs]
    j0 = [[e.constant_term() for e in row] for row in jac_poly]
    try:
        inv0 = linalg.inverse(j0)
    except SingularMatrixError:
        raise ImplicitSolveError("Jacobian with respect to the unknowns is singular at the origin") from None

    zero = MultiPolynomial.zero(table)
    sol = [zero.truncate(0) for _ in range(d)]
    # inverse Jacobian along the iteration, warm-started so each step needs one update
    x = [[MultiPolynomial.constant(inv0[i][j], table).truncate(0) for j in range(d)] for i in range(d)]
    prec = 0
    steps = 0
    while True:
        if prec >= order:
            residual = [series_compose(g.truncate(order), dict(zip(unknowns, sol))) for g in eqs]
            if all(r.is_zero() for r in residual):
                break
            if steps > 2 * order + 8:
                raise ImplicitSolveError("Newton iteration failed to converge")
        lo, prec = prec, min(2 * prec + 1, order)
        steps += 1
        cur = [s.as_polynomial().truncate(prec) for s in sol]
        assign = dict(zip(unknowns, cur))
        residual = [series_compose(g.truncate(prec), assign) for g in eqs]
        need = lo if prec > lo else prec
        low = {w: c.truncate(need) for w, c in assign.items()}
        jac = [[series_compose(e.truncate(need), low) for e in row] for row in jac_poly]
        x = _schulz_step(jac, x, need)
        # x is exact to degree need and the residual starts at degree lo + 1, so x * residual is exact to prec
        sol = [cur[i] - sum((x[i][k].as_polynomial() * residual[k] for k in range(d)), zero.truncate(prec))
               for i in range(d)]
    return [s.truncate(order) for s in sol]


def implicit_residual(equations, unknowns, solution, order):
    """G(v, w(v)) modulo degree order+1, for independent re-verification."""
    assign = dict(zip(unknowns, solution))
    return [series_compose(g.truncate(order), assign) for g in equations]

"""Tangent Cauchy-Riemann operators with polynomial coefficients."""

from __future__ import annotations

from dataclasses import dataclass

from .core import linalg
from .core.implicit import newton_implicit_solve
from .core.polynomial import MultiPolynomial, conjugate_swap, partial_derivative, series_compose
from .errors import NormalizationError
from .manifold import DefiningSystem, z, zb


@dataclass(frozen=True)
class TangentOperator:
    """T_q = delta * d/dx_q - sum_j coeffs[j] * d/dy_j on the normalized split z = (x, y)."""

    q: int
    n: int
    delta: MultiPolynomial
    coeffs: tuple[MultiPolynomial, ...]

    @property
    def d(self) -> int:
        return len(self.coeffs)

    @property
    def k(self) -> int:
        return self.n - self.d

    def x_name(self, conjugated: bool = False) -> str:
        return zb(self.q) if conjugated else z(self.q)

    def y_names(self, conjugated: bool = False) -> list[str]:
        f = zb if conjugated else z
        return [f(self.k + j) for j in range(1, self.d + 1)]

    def conjugate(self) -> TangentOperator:
        return TangentOperator(self.q, self.n, conjugate_swap(self.delta),
                               tuple(conjugate_swap(a) for a in self.coeffs))

    def __str__(self):
        parts = [f"({self.delta})*d/d{self.x_name()}"]
        for a, y in zip(self.coeffs, self.y_names()):
            if not a.is_zero():
                parts.append(f"({a})*d/d{y}")
        return " - ".join(parts)


def tangent_operators(M: DefiningSystem) -> list[TangentOperator]:
    """The k operators of a normalized system, built from the adjugate of [d rho_s / d y_j]."""
    n, d, k = M.n, M.d, M.k
    ys = [z(k + j) for j in range(1, d + 1)]
    # jac[s][j] = d rho_s / d y_j
    jac = [[partial_derivative(r, y) for y in ys] for r in M.rho]
    delta = linalg.poly_det(jac)
    if not delta.constant_term():
        raise NormalizationError("matrix d rho / d y is singular at the origin; normalize first")
    adj = linalg.poly_adjugate(jac)
    ops = []
    for q in range(1, k + 1):
        grad_x = [partial_derivative(r, z(q)) for r in M.rho]
        coeffs = []
        for j in range(d):
            a = MultiPolynomial.zero(M.table)
            for s in range(d):
                a = a + adj[j][s] * grad_x[s]
            coeffs.append(a)
        ops.append(TangentOperator(q, n, delta, tuple(coeffs)))
    return ops


def apply_operator(T: TangentOperator, h: MultiPolynomial, conjugated: bool = False) -> MultiPolynomial:
    """T_q h, or its conjugate operator (derivatives in zb, conjugated coefficients)."""
    op = T.conjugate() if conjugated else T
    out = op.delta * partial_derivative(h, op.x_name(conjugated))
    for a, y in zip(op.coeffs, op.y_names(conjugated)):
        if not a.is_zero():
            out = out - a * partial_derivative(h, y)
    return out


def complexified_graph(M: DefiningSystem, order: int) -> dict[str, MultiPolynomial]:
    """y = phi(x, zb) solving rho(x, y, zb) = 0 with zb independent; {y_j name: series}."""
    free = [z(a) for a in range(1, M.k + 1)] + [zb(a) for a in range(1, M.n + 1)]
    unknowns = [z(M.k + j) for j in range(1, M.d + 1)]
    sol = newton_implicit_solve(list(M.rho), free, unknowns, order)
    return dict(zip(unknowns, sol))


def restrict_to_complexification(h: MultiPolynomial, graph: dict, order: int) -> MultiPolynomial:
    """h(x, phi(x, zb), zb) modulo degree order + 1."""
    if h.order is None:
        h = h.truncate(order)
    return series_compose(h, graph)


def cr_function_test(M: DefiningSystem, h: MultiPolynomial, order: int = 12) -> bool:
    """True iff every conjugate operator kills h on the complexification of M."""
    ops = tangent_operators(M)
    graph = complexified_graph(M, order)
    for T in ops:
        residual = restrict_to_complexification(apply_operator(T, h, conjugated=True), graph, order)
        if not residual.is_zero():
            return False
    return True

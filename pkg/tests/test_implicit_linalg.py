import random

import pytest
import sympy

from _support import from_sympy, gr_to_sympy, rand_gr, to_sympy
from cralg.core import linalg
from cralg.core.implicit import implicit_residual, newton_implicit_solve
from cralg.core.numbers import gr
from cralg.core.polynomial import MultiPolynomial, VariableTable
from cralg.errors import BasepointError, ImplicitSolveError, SingularMatrixError


def _vars(*names):
    table = VariableTable.from_names(names, with_partners=False)
    return table, [MultiPolynomial.variable(n, table) for n in names]


def test_linear_solve():
    _, (v, w) = _vars("v", "w")
    (sol,) = newton_implicit_solve([w + v], ["v"], ["w"], 5)
    assert sol.retabled(sol.table) == (-v).truncate(5).retabled(sol.table)


def test_catalan_like_solution():
    table, (v, w) = _vars("v", "w")
    (sol,) = newton_implicit_solve([w - v - w ** 2], ["v"], ["w"], 4)
    assert sol == (v + v ** 2 + 2 * v ** 3 + 5 * v ** 4).truncate(4)
    assert all(r.is_zero() for r in implicit_residual([w - v - w ** 2], ["w"], [sol], 4))


def test_two_free_variables():
    table, (v1, v2, w) = _vars("v1", "v2", "w")
    (sol,) = newton_implicit_solve([w - v1 - v2 * w], ["v1", "v2"], ["w"], 3)
    assert sol == (v1 + v1 * v2 + v1 * v2 ** 2).truncate(3)


def test_against_sympy_series():
    # w = v + w^3 / 3 ; compare with sympy's series reversion
    table, (v, w) = _vars("v", "w")
    g = w - v - w ** 3 * gr("1/3")
    (sol,) = newton_implicit_solve([g], ["v"], ["w"], 9)
    vs, ws = sympy.symbols("v w")
    # invert v = w - w^3/3 term by term
    ansatz = sum(sympy.Symbol(f"a{k}") * vs ** k for k in range(1, 10))
    eq = sympy.expand(ansatz - vs - ansatz ** 3 / 3)
    sols = sympy.solve([eq.coeff(vs, k) for k in range(1, 10)], [sympy.Symbol(f"a{k}") for k in range(1, 10)],
                       dict=True)[0]
    expected = ansatz.subs(sols)
    assert sol == from_sympy(expected, sol.table, 9)


def test_errors():
    _, (v, w) = _vars("v", "w")
    with pytest.raises(BasepointError):
        newton_implicit_solve([w - v + 1], ["v"], ["w"], 3)
    with pytest.raises(ImplicitSolveError):
        newton_implicit_solve([w ** 2 - v], ["v"], ["w"], 3)


def test_random_systems_residual_zero():
    rng = random.Random(7)
    for _ in range(5):
        table, (v1, v2, w1, w2) = _vars("v1", "v2", "w1", "w2")
        eqs = []
        for wv in (w1, w2):
            g = wv + rand_gr(rng) * v1 * wv + rand_gr(rng) * w1 * w2 \
                + rand_gr(rng) * v2 ** 3 + rand_gr(rng) * v1
            eqs.append(g)
        sols = newton_implicit_solve(eqs, ["v1", "v2"], ["w1", "w2"], 10)
        assert all(r.is_zero() for r in implicit_residual(eqs, ["w1", "w2"], sols, 10))


def test_linalg_against_sympy():
    rng = random.Random(3)
    for size in (2, 3, 4):
        A = [[rand_gr(rng, 5) for _ in range(size)] for _ in range(size)]
        SA = sympy.Matrix([[gr_to_sympy(x) for x in row] for row in A])
        assert linalg.rank(A) == SA.rank()
        if SA.det() != 0:
            inv = linalg.inverse(A)
            prod = [[sum((A[i][k] * inv[k][j] for k in range(size)), gr(0)) for j in range(size)] for i in range(size)]
            assert all(prod[i][j] == (1 if i == j else 0) for i in range(size) for j in range(size))
    B = [[gr(1), gr(2)], [gr(2), gr(4)]]
    assert linalg.rank(B) == 1
    assert len(linalg.nullspace(B)) == 1
    with pytest.raises(SingularMatrixError):
        linalg.inverse(B)


def test_polynomial_determinant_and_adjugate():
    table = VariableTable.complex(2)
    z1, z2 = MultiPolynomial.variable("z1", table), MultiPolynomial.variable("z2", table)
    M = [[1 + z1, z2], [z1 * z2, 1 + z2 ** 2]]
    det = linalg.poly_det(M)
    S = sympy.Matrix([[to_sympy(x) for x in row] for row in M])
    assert to_sympy(det) == sympy.expand(S.det())
    adj = linalg.poly_adjugate(M)
    SA = S.adjugate()
    assert all(to_sympy(adj[i][j]) == sympy.expand(SA[i, j]) for i in range(2) for j in range(2))

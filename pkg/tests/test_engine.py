import pytest
import sympy as sp

from _support import M0, from_sympy, gr_to_sympy, poly, rat, to_sympy
from cralg.core.polynomial import MultiPolynomial, VariableTable
from cralg.errors import HypothesisFailed, OrderInsufficientError
from cralg.engine.annihilator import (
    NotFound,
    find_annihilator,
    multivariate_annihilator,
    parametric_annihilator,
    required_order,
    univariate_candidates,
)
from cralg.engine.flows import compose_flows, curvilinear_chart, derivative_jets, family_flow
from cralg.engine.separate import separate_algebraicity
from cralg.manifold import DefiningSystem
from cralg.segre import coordinate_line_families, curve_families_from_segre

t = sp.Symbol("t")
T = VariableTable.from_names(["t"], with_partners=False)
QUARTIC = DefiningSystem(2, (poly("z2 + zb2 + z1*zb1 + z1*z1*zb1*zb1"),))


def series(expr, order=32, table=T):
    var = sp.Symbol(table.names[0])
    return from_sympy(sp.series(expr, var, 0, order + 1).removeO(), table, order)


def annihilator_value(ann, expr):
    """Substitute the closed form into the polynomial and simplify with sympy."""
    f = sp.Symbol(ann.symbol)
    return sp.simplify(to_sympy(ann.poly).subs(f, expr))


def test_candidate_ordering_and_required_order():
    assert univariate_candidates(2, 1) == [(1, 0), (1, 1), (2, 0), (2, 1)]
    assert required_order(2, 1) == 9
    assert required_order(1, 0, margin=0) == 1


@pytest.mark.parametrize("expr, text", [
    (sp.sqrt(1 + t), "f^2 - t - 1"),
    ((1 + t) ** sp.Rational(1, 3), "f^3 - t - 1"),
    (1 / (1 - t) ** 2, "f*t^2 - 2*f*t + f - 1"),
    (sp.sqrt(1 - 4 * t), "f^2 + 4*t - 1"),
])
def test_univariate_examples(expr, text):
    ann = find_annihilator(series(expr))
    assert str(ann.poly) == text
    assert ann.kernel_dim == 1
    assert annihilator_value(ann, expr) == 0


def test_minimality_against_sympy_nullspace():
    # every candidate tried before the answer has a trivial kernel in an independent computation
    f = series(sp.sqrt(1 + t))
    ann = find_annihilator(f)
    coeffs = sp.Poly(sp.series(sp.sqrt(1 + t), t, 0, 33).removeO(), t).all_coeffs()[::-1]
    pw = [sp.Poly(sp.expand(sp.series(sp.sqrt(1 + t) ** i, t, 0, 33).removeO()), t).all_coeffs()[::-1]
          for i in range(4)]
    assert coeffs == pw[1]
    for q, k in univariate_candidates(3, 3):
        cols = [(i, j) for i in range(q + 1) for j in range(k + 1)]
        A = sp.Matrix([[pw[i][e - j] if 0 <= e - j < len(pw[i]) else 0 for (i, j) in cols] for e in range(33)])
        dim = len(A.nullspace())
        if (q, k) == ann.degrees:
            assert dim == 1
            break
        assert dim == 0
    for entry in ann.searched[:-1]:
        assert entry["rank"] == entry["columns"]


def test_transcendental_series_not_found():
    res = find_annihilator(series(sp.exp(t)))
    assert isinstance(res, NotFound) and not res
    assert len(res.searched) == len(univariate_candidates(3, 3))


def test_order_insufficient_reports_requirement():
    with pytest.raises(OrderInsufficientError) as info:
        find_annihilator(series(sp.exp(t), order=10))
    assert info.value.required == required_order(1, 3)
    assert all(required_order(q, k) <= 10 for q, k in univariate_candidates(3, 3)[:6])


def test_polynomial_series_found_at_q_one():
    ann = find_annihilator(series(1 + 3 * t, order=12))
    assert ann.degrees == (1, 1)
    assert str(ann.poly) == "f - 3*t - 1"


def test_multivariate_rational_function():
    z1, z2 = sp.symbols("z1 z2")
    expr = z1 * z2 / (1 - z1 * z2)
    f = rat("z1*z2", "1 - z1*z2").to_series(12)
    ann = multivariate_annihilator(f, 3, variables=["z1", "z2"])
    assert ann.degrees == (3,)
    assert sp.simplify(to_sympy(ann.poly).subs(sp.Symbol("f"), expr)) == 0


def test_multivariate_not_found_for_exp():
    z1 = sp.Symbol("z1")
    f = series(sp.exp(z1), 14, VariableTable.from_names(["z1"], with_partners=False))
    assert not multivariate_annihilator(f, 3)


def test_parametric_annihilator_sqrt_family():
    # f = sqrt(1 + t + c) has the family-wide annihilator f^2 - t - (1 + c)
    tc = VariableTable.from_names(["t", "c1"], with_partners=False)
    ts, cs = sp.symbols("t c1")
    f = from_sympy(sp.series(sp.sqrt(1 + ts + cs).subs(ts, ts * sp.Symbol("h")).subs(cs, cs * sp.Symbol("h")),
                             sp.Symbol("h"), 0, 21).removeO().subs(sp.Symbol("h"), 1), tc, 20)
    pa = parametric_annihilator(f, "t", ["c1"], 2, 1)
    assert pa.verify(f)
    a0 = pa.at_zero()
    assert a0[(2, 0)] == 1 and a0[(0, 0)] == -1 and a0[(0, 1)] == -1 and a0.get((1, 0), 0) == 0


def test_flow_group_law_nonlinear_family():
    fams = curve_families_from_segre(QUARTIC, order=8)
    s, u = MultiPolynomial.variable("s"), MultiPolynomial.variable("u")
    for fam in fams:
        fl = family_flow(fam, 8)
        both = compose_flows(fl, fl, s, u)
        direct = fl.at(s + u)
        assert all((a - b).truncate(8).is_zero() for a, b in zip(both, direct))
        ident = fl.at(MultiPolynomial.zero(VariableTable.from_names(["s"], with_partners=False)))
        assert [str(c.truncate(8)) for c in ident] == [str(MultiPolynomial.variable("z1").truncate(8)),
                                                       str(MultiPolynomial.variable("z2").truncate(8))]


def test_chart_round_trip_and_jacobian():
    fams = curve_families_from_segre(QUARTIC, order=8)
    chart = curvilinear_chart(fams, order=8)
    assert all(r.is_zero() for r in chart.round_trip())
    J = sp.Matrix([[gr_to_sympy(x) for x in row] for row in chart.jacobian_at_origin()])
    assert J.det() != 0
    assert J.T.tolist() == [[gr_to_sympy(x) for x in fam.tangent] for fam in fams]


def test_chart_rejects_dependent_families():
    fams = coordinate_line_families(2)
    with pytest.raises(HypothesisFailed):
        curvilinear_chart([fams[0], fams[0]], order=6)


def test_derivative_jets_against_sympy():
    table = VariableTable.from_names(["t1", "t2"], with_partners=False)
    t1, t2 = sp.symbols("t1 t2")
    expr = 1 / (1 - t1 - 2 * t2)
    f = from_sympy(sp.series(expr.subs({t1: t1 * sp.Symbol("h"), t2: t2 * sp.Symbol("h")}), sp.Symbol("h"), 0, 9)
                   .removeO().subs(sp.Symbol("h"), 1), table, 8)
    jets = derivative_jets(f, 1, 3, ["t1", "t2"])
    for s_, jet in enumerate(jets):
        want = sp.diff(expr, t2, s_).subs(t2, 0)
        got = to_sympy(jet.truncate(8 - s_))
        diff = sp.expand(sp.series(want, t1, 0, 9 - s_).removeO() - got)
        assert diff == 0


def test_separate_algebraicity_classical_lines():
    cert = separate_algebraicity(rat("z1*z2", "1 - z1*z2"), coordinate_line_families(2))
    assert cert.passed
    assert str(cert.final.poly) == "-f*z1*z2 - z1*z2 + f"
    assert cert.chart_consistent


def test_separate_algebraicity_exp_fails_on_first_family():
    z1 = sp.Symbol("z1")
    table = VariableTable.from_names(["z1", "z2"], with_partners=False)
    f = from_sympy(sp.series(sp.exp(z1), z1, 0, 33).removeO(), table, 32)
    cert = separate_algebraicity(f, coordinate_line_families(2), order=32)
    assert not cert.passed
    assert [c.family for c in cert.failures()] == [1]
    assert cert.final is None


RATIONALS = [
    ("z1*z2", "1 - z1*z2"),
    ("z1 + z2", "1"),
    ("1", "1 - z1"),
    ("z1 - z2*z2", "1 + z1 + z2"),
    ("z2", "2 - z1*z1"),
]


@pytest.mark.parametrize("num, den", RATIONALS)
def test_rational_functions_pass_on_segre_families(num, den):
    fams = curve_families_from_segre(M0, order=12)
    cert = separate_algebraicity(rat(num, den), fams)
    assert cert.passed and cert.chart_consistent
    expr = sp.sympify(num.replace("^", "**")) / sp.sympify(den)
    assert annihilator_value(cert.final, expr) == 0

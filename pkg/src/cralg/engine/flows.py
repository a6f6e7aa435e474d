"""Flows along curve families and the curvilinear charts they generate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..core import linalg
from ..core.implicit import newton_implicit_solve
from ..core.numbers import ZERO
from ..core.polynomial import MultiPolynomial, VariableTable, partial_derivative, series_compose
from ..errors import HypothesisFailed, ImplicitSolveError, OrderInsufficientError
from ..manifold import z
from ..segre import CurveFamily


def chart_names(n: int) -> list[str]:
    return [f"t{m}" for m in range(1, n + 1)]


@dataclass
class FlowMap:
    """z -> phi(tau)(z) as n series in z1..zn and tau."""

    family: int
    components: list[MultiPolynomial]
    order: int
    tau: str = "tau"

    @property
    def n(self) -> int:
        return len(self.components)

    def at(self, tau_value) -> list[MultiPolynomial]:
        return [series_compose(c, {self.tau: tau_value}) for c in self.components]

    def apply(self, point: Sequence[MultiPolynomial], tau_value) -> list[MultiPolynomial]:
        """phi(tau_value)(point) for series arguments with zero constant term."""
        sub = {z(i): p for i, p in enumerate(point, start=1)}
        sub[self.tau] = tau_value
        return [series_compose(c, sub) for c in self.components]


def _family_order(fam: CurveFamily, order: int) -> int:
    return order if fam.order is None else min(order, fam.order)


def family_inverse(fam: CurveFamily, order: int) -> list[MultiPolynomial]:
    """(t, c)(z): the Newton inverse of the family parametrization at the base."""
    n = fam.n
    if linalg.rank(fam.jacobian_at_base()) < n:
        raise HypothesisFailed("nonsingular_family", f"family {fam.index} is singular at the base point")
    order = _family_order(fam, order)
    table = VariableTable.complex(n)
    eqs = [r - MultiPolynomial.variable(z(i), table) for i, r in enumerate(fam.components, start=1)]
    try:
        return newton_implicit_solve(eqs, [z(i) for i in range(1, n + 1)], list(fam.params), order)
    except ImplicitSolveError as exc:
        raise HypothesisFailed("nonsingular_family", f"family {fam.index}: {exc}") from None


def family_flow(fam: CurveFamily, order: int = 12, tau: str = "tau") -> FlowMap:
    """Translate the curve parameter: invert (t, c) -> z, shift t by tau, map forward."""
    order = _family_order(fam, order)
    inv = family_inverse(fam, order)
    table = inv[0].table.extend([tau])
    sub = {fam.params[0]: inv[0] + MultiPolynomial.variable(tau, table)}
    sub.update({p: s for p, s in zip(fam.params[1:], inv[1:])})
    comps = []
    for r in fam.components:
        r = r.truncate(order) if r.order is None else r
        comps.append(series_compose(r, sub))
    return FlowMap(fam.index, comps, order, tau)


def compose_flows(outer: FlowMap, inner: FlowMap, tau_outer, tau_inner) -> list[MultiPolynomial]:
    """phi_outer(tau_outer)(phi_inner(tau_inner)(z))."""
    inner_vals = inner.at(tau_inner)
    return outer.apply(inner_vals, tau_outer)


@dataclass
class FlowChart:
    """z = phi_n(t_n) o ... o phi_1(t_1)(z0) and its inverse."""

    flows: list[FlowMap]
    forward: list[MultiPolynomial]
    inverse: list[MultiPolynomial]
    order: int
    names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.forward)

    def jacobian_at_origin(self) -> linalg.Matrix:
        zero = {t: ZERO for t in self.names}
        return [[partial_derivative(c, t).evaluate(zero) for t in self.names] for c in self.forward]

    def pull_back(self, f: MultiPolynomial) -> MultiPolynomial:
        """f(z(t)): f as a series in chart coordinates."""
        fs = f.truncate(self.order) if f.order is None or f.order > self.order else f
        return series_compose(fs, {z(i): c for i, c in enumerate(self.forward, start=1)})

    def push_forward(self, g: MultiPolynomial) -> MultiPolynomial:
        """g(t(z)): a chart-coordinate series rewritten in z."""
        gs = g.truncate(self.order) if g.order is None or g.order > self.order else g
        return series_compose(gs, dict(zip(self.names, self.inverse)))

    def round_trip(self) -> list[MultiPolynomial]:
        """inverse(forward(t)) - t, which vanishes to the working order."""
        sub = {z(i): c for i, c in enumerate(self.forward, start=1)}
        out = []
        for name, inv in zip(self.names, self.inverse):
            out.append(series_compose(inv, sub) - MultiPolynomial.variable(name))
        return out


def curvilinear_chart(families: Sequence[CurveFamily], z0=None, order: int = 12) -> FlowChart:
    """Compose the n family flows starting from the base point (the origin)."""
    n = len(families)
    if z0 is not None and any(z0):
        raise ValueError("charts are built at the origin; normalize the base point first")
    tangents = [f.tangent for f in families]
    if linalg.rank(tangents) < n:
        raise HypothesisFailed("general_position", "family tangent vectors at the base are dependent",
                               {"rank": linalg.rank(tangents), "n": n})
    flows = [family_flow(f, order) for f in families]
    order = min(fl.order for fl in flows)
    names = tuple(chart_names(n))
    table = VariableTable.from_names(names, with_partners=False)
    point = [MultiPolynomial.zero(table).truncate(order) for _ in range(n)]
    for fl, t in zip(flows, names):
        point = fl.apply(point, MultiPolynomial.variable(t, table))
    ctable = VariableTable.complex(n)
    eqs = [c - MultiPolynomial.variable(z(i), ctable) for i, c in enumerate(point, start=1)]
    try:
        inverse = newton_implicit_solve(eqs, [z(i) for i in range(1, n + 1)], list(names), order)
    except ImplicitSolveError as exc:
        raise HypothesisFailed("general_position", f"chart is not invertible: {exc}") from None
    return FlowChart(flows, point, inverse, order, names)


def derivative_jets(f: MultiPolynomial, m: int, s_max: int, names: Sequence[str] | None = None):
    """d^s f / dt_{m+1}^s at t_{m+1} = 0 (later t's set to 0), for s = 0..s_max.

    m counts the variables kept, so the jets are series in t_1..t_m.
    """
    if names is None:
        names = chart_names(len([v for v in f.table.names if v.startswith("t")]))
    names = list(names)
    if m >= len(names):
        raise ValueError(f"m = {m} leaves no variable to differentiate")
    if f.order is not None and s_max > f.order:
        raise OrderInsufficientError(f"s_max = {s_max} exceeds the series order {f.order}", s_max)
    later = {t: ZERO for t in names[m + 1:]}
    g = series_compose(f, later) if later else f
    var = names[m]
    jets = []
    cur = g
    for s in range(s_max + 1):
        jets.append(series_compose(cur, {var: ZERO}))
        cur = partial_derivative(cur, var)
    return jets

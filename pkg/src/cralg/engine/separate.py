"""Algebraicity along curve families, then jointly: the staged certificate."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..core.numbers import ZERO, GaussianRational, gr
from ..core.polynomial import MultiPolynomial, VariableTable, series_compose
from ..core.rational import RationalFunction
from ..errors import OrderInsufficientError
from ..manifold import z
from ..segre import CurveFamily
from .annihilator import (
    DEFAULT_MARGIN,
    Annihilator,
    NotFound,
    find_annihilator,
    multivariate_annihilator,
    parametric_annihilator,
    required_order,
)
from .flows import FlowChart, curvilinear_chart

SAMPLE_SCALES = ("1/2", "-1/3", "1/5", "-2/7", "3/11", "-1/13")


@dataclass
class CurveCheck:
    family: int
    c: tuple[GaussianRational, ...]
    result: Annihilator | NotFound
    note: str = ""

    @property
    def found(self) -> bool:
        return bool(self.result)


@dataclass
class SeparateCertificate:
    order: int
    curve_checks: list[CurveCheck]
    family_annihilators: dict = field(default_factory=dict)
    final: Annihilator | NotFound | None = None
    chart_annihilator: Annihilator | NotFound | None = None
    chart_consistent: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.found for c in self.curve_checks) and bool(self.final)

    def failures(self) -> list[CurveCheck]:
        return [c for c in self.curve_checks if not c.found]

    def __bool__(self):
        return self.passed


def _series_of(f, order: int, n: int) -> MultiPolynomial:
    if isinstance(f, RationalFunction):
        s = f.to_series(order)
    elif f.order is None:
        s = f.truncate(order)
    else:
        s = f.truncate(order) if f.order > order else f
    return s.retabled(s.table.merge(VariableTable.from_names([z(i) for i in range(1, n + 1)])))


def _is_exact(f) -> bool:
    return isinstance(f, RationalFunction) or f.order is None


def sample_parameters(n: int, samples: int) -> list[tuple[GaussianRational, ...]]:
    out = [tuple([ZERO] * (n - 1))]
    for s in SAMPLE_SCALES[: max(samples - 1, 0)]:
        out.append(tuple([gr(s)] * (n - 1)))
    return out


def restrict_to_curve(f, fam: CurveFamily, c, order: int) -> MultiPolynomial:
    """f(R(t, c)) as a series in t."""
    curve = fam.curve(c)
    tt = VariableTable.from_names(["t"], with_partners=False)
    sub = {}
    for i, r in enumerate(curve, start=1):
        r = r.projected(tt) if not set(r.used_variables()) - {"t"} else r
        sub[z(i)] = r.truncate(order) if r.order is None else r
    if isinstance(f, RationalFunction):
        return f.compose_series(sub)
    if f.order is None:
        return series_compose(f, sub).truncate(order)
    if any(c):
        raise ValueError("a truncated f can only be restricted to the curve through the origin")
    return series_compose(f, sub)


def separate_algebraicity(f, families: Sequence[CurveFamily], z0=None, qmax: int = 3, kmax: int = 3,
                          degree: int = 3, order: int = 12, samples: int = 3,
                          margin: int = DEFAULT_MARGIN, symbol: str = "f",
                          variables: Sequence[str] | None = None) -> SeparateCertificate:
    """Per-curve univariate annihilators along each family, then a joint annihilator.

    The curve checks use the series order needed by the (qmax, kmax)
    bounds when f is exact; a truncated f is used at its own order.
    """
    n = len(families)
    exact = _is_exact(f)
    curve_order = max(order, required_order(qmax, kmax, margin)) if exact else (f.order if f.order else order)
    cert = SeparateCertificate(order, [])
    fz = _series_of(f, order if exact else min(order, f.order), n)
    for fam in families:
        params = sample_parameters(n, samples) if (exact and fam.exact) else sample_parameters(n, 1)
        if not (exact and fam.exact):
            cert.notes.append(f"family {fam.index}: only the curve through the base point is sampled")
        for c in params:
            try:
                g = restrict_to_curve(f, fam, c, curve_order)
                res = find_annihilator(g, qmax, kmax, margin, symbol=symbol, var="t")
                note = ""
            except OrderInsufficientError as exc:
                res = NotFound([], f"order insufficient: {exc}")
                note = f"required order {exc.required}"
            cert.curve_checks.append(CurveCheck(fam.index, tuple(c), res, note))
        found = [ch.result for ch in cert.curve_checks if ch.family == fam.index and ch.found]
        if found:
            generic = max(found, key=lambda a: _rank_in_search(a.degrees))
            centers = params if (exact and fam.exact) else params[:1]
            cert.family_annihilators[fam.index] = _family_wide(f, fam, generic.degrees, centers, margin, order)
    if cert.failures():
        return cert
    chart = curvilinear_chart(families, order=order)
    cert.final = _final(f, fz, exact, degree, margin, symbol, variables, n, order)
    try:
        f_chart = chart.pull_back(fz)
        cert.chart_annihilator = multivariate_annihilator(f_chart, degree, margin, symbol=symbol,
                                                          variables=list(chart.names))
    except OrderInsufficientError as exc:
        cert.chart_annihilator = NotFound([], f"order insufficient: {exc}")
    if cert.chart_annihilator:
        cert.chart_consistent = _chart_consistent(cert.chart_annihilator, chart, fz)
    return cert


def _rank_in_search(degrees) -> tuple:
    q, k = degrees
    return (q + k, q)


@dataclass
class FamilyAnnihilator:
    """Annihilator along a whole family, centered at the transverse parameter c0."""

    center: tuple[GaussianRational, ...]
    result: object

    def __bool__(self):
        return bool(self.result)


def _family_wide(f, fam: CurveFamily, degrees, centers, margin: int, order: int):
    """Coefficients as series in the transverse parameters around the first regular center."""
    q, k = degrees
    need = required_order(q, k, margin) + 4
    use_order = max(order, need)
    last = NotFound([], "no regular center among the sampled parameters")
    for c0 in centers:
        shift = {p: MultiPolynomial.variable(p) + c for p, c in zip(fam.params[1:], c0)}
        sub = {}
        for i, r in enumerate(fam.components, start=1):
            r = series_compose(r.as_polynomial(), shift) if r.order is None else r
            sub[z(i)] = r.truncate(use_order) if r.order is None else r
        try:
            if isinstance(f, RationalFunction):
                g = f.compose_series(sub)
            elif f.order is None:
                g = series_compose(f, sub).truncate(use_order)
            else:
                if any(c0):
                    continue
                g = series_compose(f, sub)
            g = g.retabled(g.table.extend(list(fam.params)))
            res = parametric_annihilator(g, "t", fam.params[1:], q, k, margin)
        except OrderInsufficientError as exc:
            res = NotFound([], f"order insufficient: {exc}")
        if res:
            return FamilyAnnihilator(tuple(c0), res)
        last = res
    return FamilyAnnihilator(tuple(centers[-1]) if centers else (), last)


def _final(f, fz, exact, degree, margin, symbol, variables, n, order):
    names = list(variables) if variables is not None else [z(i) for i in range(1, n + 1)]
    need = 2 * degree + margin
    src = f if exact and order < need else fz
    use_order = max(order, need) if exact else None
    try:
        return multivariate_annihilator(src, degree, margin, symbol=symbol, variables=names, order=use_order)
    except OrderInsufficientError as exc:
        return NotFound([], f"order insufficient: {exc}")


def _chart_consistent(ann: Annihilator, chart: FlowChart, fz: MultiPolynomial) -> bool:
    """P_chart(f(z), t(z)) vanishes to the working order."""
    P = ann.poly
    sub = dict(zip(chart.names, chart.inverse))
    order = chart.order
    total = None
    fs = fz.truncate(order) if fz.order is None or fz.order > order else fz
    for e, c in P.terms.items():
        i = e[0]
        mono = MultiPolynomial.constant(c)
        for name, k in zip(P.table.names[1:], e[1:]):
            if k:
                mono = mono * sub[name] ** k
        term = mono * fs ** i if i else mono
        total = term if total is None else total + term
    return total.truncate(order).is_zero()

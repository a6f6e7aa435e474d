"""Segre varieties, their foliation, lifted fields and Segre curve families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import linalg
from .core.implicit import implicit_residual, newton_implicit_solve
from .core.numbers import I, ONE, ZERO, GaussianRational
from .core.polynomial import MultiPolynomial, VariableTable, partial_derivative, series_compose
from .errors import HypothesisFailed, ImplicitSolveError
from .manifold import DefiningSystem, _as_point, z, zb


@dataclass(frozen=True)
class SegreVariety:
    """Q(zeta) = {w : rho_j(w, conj zeta) = 0}, written in the holomorphic variables z."""

    manifold: DefiningSystem
    zeta: tuple[GaussianRational, ...]
    system: tuple[MultiPolynomial, ...]

    def contains(self, w) -> bool:
        values = {z(i): c for i, c in enumerate(_as_point(w), start=1)}
        return all(not r.evaluate(values) for r in self.system)


def segre_variety(M: DefiningSystem, zeta) -> SegreVariety:
    zeta = _as_point(zeta)
    sub = {zb(i): c.conjugate() for i, c in enumerate(zeta, start=1)}
    system = tuple(series_compose(r, sub) for r in M.rho)
    return SegreVariety(M, zeta, system)


@dataclass
class SegreFamily:
    """Leaves of the Segre foliation near 0 for a normalized system.

    ``leaf`` holds tau_bar = S(z, theta_bar): the leaf through z for
    parameter theta.  ``graph`` holds y = R(x, theta_bar, tau_bar).  Both
    are series in the z variables and zb1..zbk (theta_bar), graph also in
    zb_{k+1}..zb_n (tau_bar).  ``theta`` is set when a numeric parameter
    was substituted, which is only done when the leaf map is exact.
    """

    manifold: DefiningSystem
    order: int
    leaf: list[MultiPolynomial]
    graph: list[MultiPolynomial]
    exact: bool
    theta: tuple[GaussianRational, ...] | None = None

    def leaf_parameter(self, point) -> list[GaussianRational]:
        """tau_bar of the unique leaf through a point (exact leaf map only)."""
        if not self.exact:
            raise ValueError("numeric leaf evaluation needs an exact leaf map")
        values = {z(i): c for i, c in enumerate(_as_point(point), start=1)}
        if self.theta is None:
            raise ValueError("substitute a numeric theta first")
        return [s.as_polynomial().evaluate(values) for s in self.leaf]


def _exact_or_series(sol, equations, unknowns, order):
    """Use the truncated solution as an exact polynomial when it solves the system exactly."""
    polys = [s.as_polynomial() for s in sol]
    assign = dict(zip(unknowns, polys))
    if all(series_compose(g, assign).is_zero() for g in equations):
        return polys, True
    return list(sol), False


def segre_family_representation(M: DefiningSystem, theta=None, order: int = 12) -> SegreFamily:
    n, d, k = M.n, M.d, M.k
    thetas = [zb(a) for a in range(1, k + 1)]
    taus = [zb(k + j) for j in range(1, d + 1)]
    xs = [z(a) for a in range(1, k + 1)]
    ys = [z(k + j) for j in range(1, d + 1)]
    leaf = newton_implicit_solve(list(M.rho), [z(i) for i in range(1, n + 1)] + thetas, taus, order)
    graph = newton_implicit_solve(list(M.rho), xs + thetas + taus, ys, order)
    leaf, leaf_exact = _exact_or_series(leaf, M.rho, taus, order)
    graph, graph_exact = _exact_or_series(graph, M.rho, ys, order)
    exact = leaf_exact and graph_exact
    fam = SegreFamily(M, order, leaf, graph, exact)
    if theta is not None:
        theta = _as_point(theta)
        if not exact:
            raise ValueError("a numeric theta can only be substituted into an exact leaf map")
        sub = {name: c.conjugate() for name, c in zip(thetas, theta)}
        fam = SegreFamily(M, order, [series_compose(s, sub) for s in leaf],
                          [series_compose(s, sub) for s in graph], True, theta)
    return fam


# --- lifted fields ----------------------------------------------------


def _leaf_parameter_at_origin(M: DefiningSystem, theta) -> list[GaussianRational]:
    """tau_bar with rho(0, conj theta, tau_bar) = 0, when that system is affine in tau_bar."""
    k, d = M.k, M.d
    taus = [zb(k + j) for j in range(1, d + 1)]
    sub = {z(i): ZERO for i in range(1, M.n + 1)}
    sub.update({zb(a): c.conjugate() for a, c in enumerate(theta, start=1)})
    eqs = [series_compose(r, sub) for r in M.rho]
    for e in eqs:
        if any(e.degree(t) > 1 for t in taus) or e.total_degree() > 1:
            raise NotImplementedError("leaf equation through the origin is not affine in tau_bar")
    origin = {t: ZERO for t in taus}
    a = [[e.linear_coefficient(t) for t in taus] for e in eqs]
    b = [-e.evaluate(origin) for e in eqs]
    return linalg.solve(a, b)


def lifted_vectors_at(M: DefiningSystem, theta) -> list[list[GaussianRational]]:
    """Y_j(theta_bar)(0), j = 1..k: lifts of d/dx_j tangent to the leaf through 0."""
    theta = _as_point(theta)
    n, d, k = M.n, M.d, M.k
    tau0 = _leaf_parameter_at_origin(M, theta)
    point = {z(i): ZERO for i in range(1, n + 1)}
    point.update({zb(a): c.conjugate() for a, c in enumerate(theta, start=1)})
    point.update({zb(k + j): c for j, c in enumerate(tau0, start=1)})
    jy = [[partial_derivative(r, z(k + j)).evaluate(point) for j in range(1, d + 1)] for r in M.rho]
    jy_inv = linalg.inverse(jy)
    out = []
    for a in range(1, k + 1):
        gx = [partial_derivative(r, z(a)).evaluate(point) for r in M.rho]
        ypart = [-v for v in linalg.matvec(jy_inv, gx)]
        vec = [ZERO] * n
        vec[a - 1] = ONE
        vec[k:] = ypart
        out.append(vec)
    return out


def lifted_fields_series(M: DefiningSystem, order: int = 6) -> list[list[MultiPolynomial]]:
    """Y_j(theta_bar)(0) as series in zb1..zbk (theta_bar); valid for any normalized system."""
    fam = segre_family_representation(M, order=order + 1)
    k = M.k
    sub = {z(i): ZERO for i in range(1, M.n + 1)}
    out = []
    for a in range(1, k + 1):
        vec = []
        for b in range(1, k + 1):
            vec.append(MultiPolynomial.constant(ONE if a == b else ZERO, M.table).truncate(order))
        for g in fam.graph:
            # tau_bar along the leaf through 0 is S(0, theta_bar)
            dg = partial_derivative(g, z(a))
            leaf0 = {zb(k + j): series_compose(s, sub) for j, s in enumerate(fam.leaf, start=1)}
            val = series_compose(series_compose(dg, {z(b): ZERO for b in range(1, k + 1)}), leaf0)
            vec.append(val.truncate(order) if val.order is None or val.order > order else val)
        out.append(vec)
    return out


def theta_grid(k: int, extended: bool = False) -> list[tuple[GaussianRational, ...]]:
    """{0, e_a, i e_a}; the extended grid adds e_a +/- e_b."""
    grid = [tuple([ZERO] * k)]
    for a in range(k):
        for c in (ONE, I):
            v = [ZERO] * k
            v[a] = c
            grid.append(tuple(v))
    if extended:
        for a in range(k):
            for b in range(a + 1, k):
                for c in (ONE, -ONE):
                    v = [ZERO] * k
                    v[a], v[b] = ONE, c
                    grid.append(tuple(v))
    return grid


@dataclass
class LiftedFields:
    thetas: list[tuple[GaussianRational, ...]]
    vectors: dict[tuple[int, int], list[GaussianRational]]
    rank: int
    n: int
    selection: list[tuple[int, int]]
    method: str = "grid"
    notes: list[str] = field(default_factory=list)

    @property
    def spans(self) -> bool:
        return self.rank == self.n

    def __bool__(self):
        return self.spans


def _select(vectors: dict, order: list) -> list:
    chosen: list = []
    basis: list = []
    for key in order:
        trial = basis + [vectors[key]]
        if linalg.rank(trial) > len(basis):
            basis = trial
            chosen.append(key)
    return chosen


def lifted_fields(M: DefiningSystem, thetas: Sequence | None = None, extended: bool | None = None,
                  order: int = 6) -> LiftedFields:
    """Lifted vectors over a theta grid with the exact spanning rank.

    With ``thetas=None`` the grid {0, e_a, i e_a} is tried first and the
    extended grid only when the first one does not span.  When the leaf
    through the origin is not affine in tau_bar, the span of the Taylor
    coefficients of the series Y_j(theta_bar)(0) is used instead.
    """
    n, k = M.n, M.k
    grids = []
    if thetas is not None:
        grids.append([_as_point(t) for t in thetas])
    else:
        grids.append(theta_grid(k))
        if extended is not False:
            grids.append(theta_grid(k, extended=True))
        if extended:
            grids = grids[1:]
    result = None
    try:
        for grid in grids:
            vectors = {}
            for ti, th in enumerate(grid):
                for j, v in enumerate(lifted_vectors_at(M, th)):
                    vectors[(ti, j)] = v
            keys = sorted(vectors)
            sel = _select(vectors, keys)
            result = LiftedFields(list(grid), vectors, len(sel), n, sel)
            if result.spans:
                return result
        return result
    except NotImplementedError:
        pass
    series = lifted_fields_series(M, order)
    rows = []
    for vec in series:
        for c in sorted({e for comp in vec for e in comp.terms}, key=lambda e: (sum(e), e)):
            rows.append([comp.terms.get(c, ZERO) for comp in vec])
    rk = linalg.rank(rows)
    return LiftedFields([], {}, rk, n, [], method="series",
                        notes=["leaf through the origin is not affine; Taylor coefficient span used"])


# --- curve families ---------------------------------------------------


@dataclass
class CurveFamily:
    """z = R(t, c): curves through the points R(0, c), parameter names t, c1..c_{n-1}."""

    index: int
    components: list[MultiPolynomial]
    params: tuple[str, ...]
    tangent: list[GaussianRational]
    exact: bool
    order: int | None = None
    source: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.components)

    def jacobian_at_base(self) -> linalg.Matrix:
        zero = {p: ZERO for p in self.params}
        return [[partial_derivative(r, p).evaluate(zero) for p in self.params] for r in self.components]

    def curve(self, c) -> list[MultiPolynomial]:
        """R(t, c) for numeric c; exact families only, except c = 0."""
        c = _as_point(c)
        if not self.exact and any(c):
            raise ValueError("numeric transverse parameters need an exact family")
        sub = dict(zip(self.params[1:], c))
        return [series_compose(r, sub) for r in self.components]


def family_params(n: int) -> tuple[str, ...]:
    return ("t",) + tuple(f"c{i}" for i in range(1, n))


def coordinate_line_families(n: int) -> list[CurveFamily]:
    """Lines parallel to the coordinate axes: the classical configuration."""
    params = family_params(n)
    table = VariableTable.from_names(params, with_partners=False)
    fams = []
    for m in range(n):
        comps = []
        ci = 1
        for i in range(n):
            if i == m:
                comps.append(MultiPolynomial.variable("t", table))
            else:
                comps.append(MultiPolynomial.variable(f"c{ci}", table))
                ci += 1
        tangent = [ONE if i == m else ZERO for i in range(n)]
        fams.append(CurveFamily(m + 1, comps, params, tangent, True, None, {"kind": "coordinate"}))
    return fams


def segre_curve_family(M: DefiningSystem, j: int, theta, order: int = 12, index: int = 1) -> CurveFamily:
    """Integral curves of Y_j(theta): sections of the Segre leaves by planes x_l = const (l != j).

    j is 1-based.  The transverse parameters are the coordinates of the
    starting point R(0, c) other than x_j, in coordinate order.
    """
    theta = _as_point(theta)
    n, d, k = M.n, M.d, M.k
    tau0 = _leaf_parameter_at_origin(M, theta)
    params = family_params(n)
    transverse = [i for i in range(1, n + 1) if i != j]
    cname = dict(zip(transverse, params[1:]))
    ynames = [f"u{s}" for s in range(1, d + 1)]
    snames = [f"s{s}" for s in range(1, d + 1)]
    table = VariableTable.from_names(list(params) + ynames + snames, with_partners=False)
    v = lambda name: MultiPolynomial.variable(name, table)

    start, moving = {}, {}
    for i in range(1, n + 1):
        if i == j:
            start[z(i)] = MultiPolynomial.zero(table)
            moving[z(i)] = v("t")
        elif i <= k:
            start[z(i)] = moving[z(i)] = v(cname[i])
        else:
            start[z(i)] = v(cname[i])
            moving[z(i)] = v(ynames[i - k - 1])
    conj = {zb(a): MultiPolynomial.constant(c.conjugate(), table) for a, c in enumerate(theta, start=1)}
    for s in range(1, d + 1):
        conj[zb(k + s)] = MultiPolynomial.constant(tau0[s - 1], table) + v(snames[s - 1])
    e1 = [series_compose(r, {**start, **conj}) for r in M.rho]
    e2 = [series_compose(r, {**moving, **conj}) for r in M.rho]
    try:
        sol = newton_implicit_solve(e1 + e2, list(params), snames + ynames, order)
    except ImplicitSolveError as exc:
        raise HypothesisFailed("nonsingular_family", f"Segre section for j={j}, theta={theta} is singular: {exc}")
    unknowns = snames + ynames
    sol, exact = _exact_or_series(sol, e1 + e2, unknowns, order)
    ysol = dict(zip(ynames, sol[d:]))
    comps = []
    for i in range(1, n + 1):
        if i == j:
            comps.append(v("t"))
        elif i <= k:
            comps.append(v(cname[i]))
        else:
            comps.append(ysol[ynames[i - k - 1]])
    if not exact:
        comps = [c.truncate(order) if c.order is None else c for c in comps]
    fam = CurveFamily(index, comps, params, [], exact, None if exact else order,
                      {"kind": "segre", "j": j, "theta": [str(c) for c in theta]})
    jac = fam.jacobian_at_base()
    fam.tangent = [row[0] for row in jac]
    return fam


def curve_families_from_segre(M: DefiningSystem, thetas: Sequence | None = None, order: int = 12,
                              extended: bool | None = None) -> list[CurveFamily]:
    """n Segre families whose tangent vectors at 0 are independent."""
    lf = lifted_fields(M, thetas, extended)
    if not lf.spans:
        raise HypothesisFailed("spanning", f"lifted fields span only rank {lf.rank} < n = {M.n}",
                               {"rank": lf.rank, "n": M.n})
    if lf.method != "grid":
        raise HypothesisFailed("spanning", "Segre families need an affine leaf equation through the origin")
    fams = []
    for m, (ti, j) in enumerate(lf.selection, start=1):
        fams.append(segre_curve_family(M, j + 1, lf.thetas[ti], order, index=m))
    tangents = [f.tangent for f in fams]
    if linalg.rank(tangents) < M.n:
        raise HypothesisFailed("general_position", "family tangent vectors are dependent")
    return fams


def check_general_position(families: Sequence[CurveFamily]) -> bool:
    return linalg.rank([f.tangent for f in families]) == len(families)


def foliation_leaf_residual(fam: SegreFamily) -> list[MultiPolynomial]:
    """rho(z, theta_bar, S(z, theta_bar)) to the working order (should vanish)."""
    M = fam.manifold
    taus = [zb(M.k + j) for j in range(1, M.d + 1)]
    return implicit_residual(M.rho, taus, fam.leaf, fam.order)

"""Reflection polynomials for a CR map and the systems cutting out its graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import linalg
from .core.implicit import newton_implicit_solve
from .core.numbers import ZERO, GaussianRational
from .core.polynomial import (
    MultiPolynomial,
    VariableTable,
    conjugate_swap,
    partial_derivative,
    series_compose,
)
from .core.rational import RationalFunction
from .errors import (
    BasepointError,
    HypothesisFailed,
    ImplicitSolveError,
    SingularMatrixError,
    SubsetSelectionError,
)
from .manifold import DefiningSystem, LeviData, NormalizationMap, _as_point, z, zb
from .tangent import tangent_operators


def F(r: int) -> str:
    return f"F{r}"


def Fb(r: int) -> str:
    return f"Fb{r}"


def D(r: int, s: int) -> str:
    return f"D{r}_{s}"


def Db(r: int, s: int) -> str:
    return f"Db{r}_{s}"


def zp(r: int) -> str:
    return f"zp{r}"


# --- map data -----------------------------------------------------------


@dataclass
class CRMapData:
    """Holomorphic map z -> z' given by exact rational components (or series at 0)."""

    n: int
    n_prime: int
    components: list
    basepoint: tuple[GaussianRational, ...]

    def __post_init__(self):
        if len(self.components) != self.n_prime:
            raise ValueError(f"expected {self.n_prime} components, got {len(self.components)}")
        self.basepoint = _as_point(self.basepoint)
        comps = []
        for c in self.components:
            if isinstance(c, RationalFunction):
                comps.append(c)
            elif isinstance(c, MultiPolynomial) and c.order is None:
                comps.append(RationalFunction(c))
            elif isinstance(c, MultiPolynomial):
                if any(self.basepoint):
                    raise ValueError("series components must be centered at a zero base point")
                comps.append(c)
            else:
                comps.append(RationalFunction.lift(c))
        allowed = {z(i) for i in range(1, self.n + 1)}
        for c in comps:
            used = set(_used(c))
            if used - allowed:
                raise ValueError(f"map components use {sorted(used - allowed)}; only z1..z{self.n} allowed")
        self.components = comps

    @property
    def exact(self) -> bool:
        return all(isinstance(c, RationalFunction) for c in self.components)

    def value(self, point=None) -> tuple[GaussianRational, ...]:
        point = self.basepoint if point is None else _as_point(point)
        values = {z(i): c for i, c in enumerate(point, start=1)}
        out = []
        for c in self.components:
            if isinstance(c, RationalFunction):
                out.append(c.evaluate(values))
            elif not any(point):
                out.append(c.constant_term())
            else:
                raise ValueError("series components can only be evaluated at 0")
        return tuple(out)

    @property
    def image(self) -> tuple[GaussianRational, ...]:
        return self.value()

    def jacobian(self, point=None) -> linalg.Matrix:
        """Exact n' x n matrix dF at a point (default: the base point)."""
        point = self.basepoint if point is None else _as_point(point)
        values = {z(i): c for i, c in enumerate(point, start=1)}
        rows = []
        for c in self.components:
            if isinstance(c, RationalFunction):
                rows.append([c.derivative(z(s)).evaluate(values) for s in range(1, self.n + 1)])
            elif not any(point):
                rows.append([c.linear_coefficient(z(s)) for s in range(1, self.n + 1)])
            else:
                raise ValueError("series components can only be differentiated at 0")
        return rows

    def series(self, order: int) -> list[MultiPolynomial]:
        """Taylor expansions at the origin (base point must be 0)."""
        if any(self.basepoint):
            raise ValueError("expand after normalizing the base point to 0")
        out = []
        for c in self.components:
            if isinstance(c, RationalFunction):
                s = c.to_series(order)
            else:
                s = c.truncate(min(order, c.order))
            out.append(s.retabled(s.table.merge(VariableTable.complex(self.n))))
        return out

    def normalized(self, source: NormalizationMap, target: NormalizationMap) -> CRMapData:
        """A'^-1 (F(p + A w) - p') in the normalized coordinates w."""
        if not self.exact:
            if not (source.is_identity() and target.is_identity()):
                raise ValueError("series maps can only be used in already normalized coordinates")
            return self
        sub = source.to_original_substitution(conjugates=False)
        pulled = [c.subs(sub) for c in self.components]
        shifted = [c - tp for c, tp in zip(pulled, target.translation)]
        out = []
        for row in target.inverse_matrix:
            acc = RationalFunction.lift(0)
            for a, c in zip(row, shifted):
                if a:
                    acc = acc + c * a
            out.append(acc)
        return CRMapData(self.n, self.n_prime, out, tuple([ZERO] * self.n))


def _used(c) -> list[str]:
    if isinstance(c, RationalFunction):
        return sorted(set(c.num.used_variables()) | set(c.den.used_variables()))
    return c.used_variables()


# --- Phi polynomials ----------------------------------------------------


def extended_table(n: int, n_prime: int) -> VariableTable:
    names = [z(i) for i in range(1, n + 1)] + [zb(i) for i in range(1, n + 1)]
    names += [F(r) for r in range(1, n_prime + 1)] + [Fb(r) for r in range(1, n_prime + 1)]
    names += [D(r, s) for r in range(1, n_prime + 1) for s in range(1, n + 1)]
    names += [Db(r, s) for r in range(1, n_prime + 1) for s in range(1, n + 1)]
    return VariableTable.from_names(names)


def target_in_map_symbols(rho_prime: MultiPolynomial, n_prime: int, table: VariableTable) -> MultiPolynomial:
    """rho'(F, Fb): the target defining function with z' -> F, zb' -> Fb."""
    sub = {}
    for r in range(1, n_prime + 1):
        sub[z(r)] = MultiPolynomial.variable(F(r), table)
        sub[zb(r)] = MultiPolynomial.variable(Fb(r), table)
    # z' names the target may share with the source are all replaced, so projecting is safe
    return series_compose(rho_prime, sub).projected(table)


@dataclass
class PhiSystem:
    n: int
    n_prime: int
    k: int
    k_prime: int
    d_prime: int
    phi: dict[tuple[int, int], MultiPolynomial]
    target: list[MultiPolynomial]
    selected: list[tuple[int, int]] = field(default_factory=list)
    conjugated: list[MultiPolynomial] = field(default_factory=list)

    @property
    def table(self) -> VariableTable:
        return extended_table(self.n, self.n_prime)


def phi_polynomials(M: DefiningSystem, Mp: DefiningSystem) -> PhiSystem:
    """Phi_qj = T_q applied to rho'_j(F, Fb), with F holomorphic and D_rs = dF_r/dz_s as symbols."""
    n, n_prime = M.n, Mp.n
    table = extended_table(n, n_prime)
    ops = tangent_operators(M)
    targets = [target_in_map_symbols(r, n_prime, table) for r in Mp.rho]
    phi = {}
    for T in ops:
        q = T.q
        # T_q F_r = delta * D_{r,q} - sum_l a_lq * D_{r,k+l}
        tf = []
        for r in range(1, n_prime + 1):
            expr = T.delta * MultiPolynomial.variable(D(r, q), table)
            for l, a in enumerate(T.coeffs, start=1):
                if not a.is_zero():
                    expr = expr - a * MultiPolynomial.variable(D(r, T.k + l), table)
            tf.append(expr)
        for j, rp in enumerate(targets, start=1):
            total = MultiPolynomial.zero(table)
            for r in range(1, n_prime + 1):
                g = partial_derivative(rp, F(r))
                if not g.is_zero():
                    total = total + g * tf[r - 1]
            phi[(q, j)] = total.retabled(table)
    return PhiSystem(n, n_prime, M.k, Mp.k, Mp.d, phi, [t.retabled(table) for t in targets])


def zero_tilde(cr_map: CRMapData) -> dict[str, GaussianRational]:
    """The point with z, zb, F, Fb at 0 and D at the exact Jacobian of F at 0."""
    if any(cr_map.basepoint) or any(cr_map.image):
        raise BasepointError("0~ needs normalized coordinates with F(0) = 0")
    n, n_prime = cr_map.n, cr_map.n_prime
    jac = cr_map.jacobian()
    point = {}
    for i in range(1, n + 1):
        point[z(i)] = ZERO
        point[zb(i)] = ZERO
    for r in range(1, n_prime + 1):
        point[F(r)] = ZERO
        point[Fb(r)] = ZERO
        for s in range(1, n + 1):
            point[D(r, s)] = jac[r - 1][s - 1]
            point[Db(r, s)] = jac[r - 1][s - 1].conjugate()
    return point


# --- rank conditions ----------------------------------------------------


@dataclass
class RankCertificate:
    passed: bool
    rank: int
    required: int
    matrix: list[list[GaussianRational]]
    rows: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def condition_2_5_matrix(levi_matrices: Sequence[linalg.Matrix], dF: linalg.Matrix, k: int, k_prime: int,
                         recombination: linalg.Matrix | None = None) -> tuple[list, list]:
    """Rows L^j(dF(e_q)) for q <= k, j <= d' (optionally with L^j replaced by A L^j)."""
    mats = list(levi_matrices)
    if recombination is not None:
        mats = [linalg.matmul(recombination, m) for m in mats]
    rows, labels = [], []
    for q in range(k):
        v = [dF[r][q] for r in range(k_prime)]
        for j, m in enumerate(mats, start=1):
            rows.append(linalg.matvec(m, v))
            labels.append((q + 1, j))
    return rows, labels


def condition_2_5_check(target_levi: LeviData, dF: linalg.Matrix, k: int,
                        recombination: linalg.Matrix | None = None) -> RankCertificate:
    """Exact rank k' of the stacked vectors L^j_{p'}(dF_p(e_q)) (normalized coordinates)."""
    k_prime = target_levi.k
    rows, labels = condition_2_5_matrix(target_levi.levi_matrices, dF, k, k_prime, recombination)
    rk = linalg.rank(rows) if rows else 0
    return RankCertificate(rk == k_prime, rk, k_prime, rows, labels)


def phi_jacobian_rows(system: PhiSystem, point: dict, order: list[tuple[int, int]], columns: list[str]):
    return [[partial_derivative(system.phi[key], c).evaluate(point) for c in columns] for key in order]


def select_phi_subset(system: PhiSystem, point: dict) -> RankCertificate:
    """Greedy choice of k' pairs (q, j), j-major, with invertible Jacobian in Fb_1..Fb_k' at 0~."""
    order = [(q, j) for j in range(1, system.d_prime + 1) for q in range(1, system.k + 1)]
    cols = [Fb(s) for s in range(1, system.k_prime + 1)]
    rows = phi_jacobian_rows(system, point, order, cols)
    picks = linalg.independent_rows(rows)
    chosen = [order[i] for i in picks]
    if len(chosen) < system.k_prime:
        raise SubsetSelectionError(
            f"only {len(chosen)} independent reflection equations, need k' = {system.k_prime}",
            {"rank": len(chosen), "required": system.k_prime})
    system.selected = chosen
    matrix = [rows[i] for i in picks]
    return RankCertificate(True, len(chosen), system.k_prime, matrix, chosen)


def full_system(system: PhiSystem, point: dict) -> RankCertificate:
    """Selected Phi plus rho'(F, Fb); rank n' of the Jacobian in all Fb symbols at 0~."""
    if system.k_prime < 1 or system.d_prime < 1:
        raise HypothesisFailed("target_dimensions", "target must have k' >= 1 and d' >= 1")
    if not system.selected:
        raise HypothesisFailed("rank_condition", "no reflection equations selected")
    cols = [Fb(s) for s in range(1, system.n_prime + 1)]
    rows = phi_jacobian_rows(system, point, system.selected, cols)
    rows += [[partial_derivative(t, c).evaluate(point) for c in cols] for t in system.target]
    rk = linalg.rank(rows)
    system.conjugated = [conjugate_swap(system.phi[key]) for key in system.selected]
    cert = RankCertificate(rk == system.n_prime, rk, system.n_prime, rows,
                           [("phi",) + key for key in system.selected] + [("rho'", s) for s in
                                                                          range(1, system.d_prime + 1)])
    if not cert.passed:
        raise HypothesisFailed("full_system_rank", f"Jacobian of the full system has rank {rk} < n' = {system.n_prime}",
                               {"rank": rk, "required": system.n_prime})
    return cert


# --- the variety systems ----------------------------------------------


@dataclass
class VarietySystem:
    """Polynomials in z1..zn, zp1..zpn' whose zero set contains the graph of F over Q(zeta)."""

    zeta: tuple[GaussianRational, ...]
    chi: tuple[GaussianRational, ...]
    equations: list[MultiPolynomial]
    labels: list[str]


def conjugate_value(c: RationalFunction | MultiPolynomial, chi, n: int) -> GaussianRational:
    """Value of the conjugated function at chi, i.e. conj(c(conj chi))."""
    values = {z(i): x.conjugate() for i, x in enumerate(chi, start=1)}
    return c.evaluate(values).conjugate()


def atilde_system(system: PhiSystem, M: DefiningSystem, Mp: DefiningSystem, cr_map: CRMapData,
                  zeta, chi=None) -> VarietySystem:
    """Equations P_j(z, chi, z', conj F(zeta), conj DF(zeta)), rho'(z', conj F(zeta)), rho(z, chi).

    chi defaults to conj(zeta); a different chi gives a point of the
    complexification instead of a point of M.
    """
    zeta = _as_point(zeta)
    chi = tuple(c.conjugate() for c in zeta) if chi is None else _as_point(chi)
    n, n_prime = M.n, Mp.n
    if not system.conjugated:
        raise HypothesisFailed("rank_condition", "run full_system before assembling the variety system")
    fbar = []
    dbar = []
    conj_point = [c.conjugate() for c in chi]
    for c in cr_map.components:
        if not isinstance(c, RationalFunction) and any(conj_point):
            raise ValueError("series maps only support zeta = 0")
    fvals = cr_map.value(conj_point)
    jac = cr_map.jacobian(conj_point)
    fbar = [v.conjugate() for v in fvals]
    dbar = [[v.conjugate() for v in row] for row in jac]
    zp_table = VariableTable.from_names([z(i) for i in range(1, n + 1)] + [zp(r) for r in range(1, n_prime + 1)])
    sub = {}
    for i in range(1, n + 1):
        sub[zb(i)] = chi[i - 1]
    for r in range(1, n_prime + 1):
        sub[F(r)] = MultiPolynomial.variable(zp(r), zp_table)
        sub[Fb(r)] = fbar[r - 1]
        for s in range(1, n + 1):
            sub[Db(r, s)] = dbar[r - 1][s - 1]
    eqs, labels = [], []
    for key, p in zip(system.selected, system.conjugated):
        eqs.append(_clean(series_compose(p, sub), zp_table))
        labels.append(f"P[q={key[0]},j={key[1]}]")
    for s, r in enumerate(Mp.rho, start=1):
        tsub = {}
        for i in range(1, n_prime + 1):
            tsub[z(i)] = MultiPolynomial.variable(zp(i), zp_table)
            tsub[zb(i)] = fbar[i - 1]
        eqs.append(_clean(series_compose(r, tsub), zp_table))
        labels.append(f"rho'{s}")
    for l, r in enumerate(M.rho, start=1):
        eqs.append(_clean(series_compose(r, {zb(i): chi[i - 1] for i in range(1, n + 1)}), zp_table))
        labels.append(f"rho{l}")
    return VarietySystem(zeta, chi, eqs, labels)


def _clean(p: MultiPolynomial, table: VariableTable) -> MultiPolynomial:
    return p.projected(table)


def segre_graph_at(M: DefiningSystem, zeta, chi, order: int) -> list[MultiPolynomial]:
    """z(x) = (zeta_x + x, zeta_y + v(x)) parametrizing Q near zeta, with rho(z(x), chi) = 0."""
    zeta = _as_point(zeta)
    n, d, k = M.n, M.d, M.k
    vnames = [f"v{j}" for j in range(1, d + 1)]
    table = VariableTable.from_names([z(a) for a in range(1, k + 1)] + vnames, with_partners=False)
    sub = {zb(i): chi[i - 1] for i in range(1, n + 1)}
    for a in range(1, k + 1):
        sub[z(a)] = MultiPolynomial.constant(zeta[a - 1], table) + MultiPolynomial.variable(z(a), table)
    for j in range(1, d + 1):
        sub[z(k + j)] = MultiPolynomial.constant(zeta[k + j - 1], table) + MultiPolynomial.variable(vnames[j - 1], table)
    eqs = [series_compose(r, sub) for r in M.rho]
    for e in eqs:
        if e.constant_term():
            raise BasepointError("zeta is not on its own Segre variety")
    try:
        sol = newton_implicit_solve(eqs, [z(a) for a in range(1, k + 1)], vnames, order)
    except ImplicitSolveError as exc:
        raise BasepointError(f"Segre variety is not a graph over x near zeta: {exc}") from None
    out = []
    for a in range(1, k + 1):
        out.append((MultiPolynomial.constant(zeta[a - 1], table) + MultiPolynomial.variable(z(a), table)).truncate(order))
    for j in range(1, d + 1):
        out.append(MultiPolynomial.constant(zeta[k + j - 1], table).truncate(order) + sol[j - 1])
    return out


def verify_graph_in_variety(vs: VarietySystem, M: DefiningSystem, cr_map: CRMapData, order: int = 12) -> bool:
    """Substitute z = (x, R(x)) on Q(zeta) and z' = F(z); True iff every residual vanishes to order."""
    return all(r.is_zero() for r in graph_residuals(vs, M, cr_map, order))


def graph_residuals(vs: VarietySystem, M: DefiningSystem, cr_map: CRMapData, order: int = 12):
    zs = segre_graph_at(M, vs.zeta, vs.chi, order)
    zsub = {z(i): s for i, s in enumerate(zs, start=1)}
    images = []
    for c in cr_map.components:
        if isinstance(c, RationalFunction):
            images.append(c.compose_series(zsub))
        else:
            if any(vs.zeta):
                raise ValueError("series maps only support zeta = 0")
            images.append(series_compose(c.truncate(min(order, c.order)), zsub))
    sub = dict(zsub)
    sub.update({zp(r): s for r, s in enumerate(images, start=1)})
    return [series_compose(e, sub) for e in vs.equations]


# --- sample points -------------------------------------------------------


def _candidate(s: int, k: int, d: int):
    from .core.numbers import gr
    xs = [
        [ZERO] * k,
        [gr("1/2")] * k,
        [gr("-1/3") + gr("1/4") * gr("i")] * k,
        [gr("1/4") * gr("i")] * k,
        [gr("2/5")] * k,
    ]
    vs = [[ZERO] * d, [ZERO] * d, [gr("1/5")] * d, [gr("-1/7")] * d, [gr("1/3")] * d]
    return xs[s % len(xs)], vs[s % len(vs)]


def rational_points_on(M: DefiningSystem, count: int = 3) -> list[tuple[GaussianRational, ...]]:
    """Exact points of M: rational x and Im y chosen, Re y solved when the equations are affine in it."""
    from .core.numbers import I
    d, k = M.d, M.k
    unames = [f"u{j}" for j in range(1, d + 1)]
    table = VariableTable.from_names(unames, with_partners=False)
    points = []
    for s in range(8 * count):
        if len(points) == count:
            break
        x, v = _candidate(s, k, d)
        sub = {}
        for a in range(1, k + 1):
            sub[z(a)] = x[a - 1]
            sub[zb(a)] = x[a - 1].conjugate()
        for j in range(1, d + 1):
            u = MultiPolynomial.variable(unames[j - 1], table)
            sub[z(k + j)] = u + v[j - 1] * I
            sub[zb(k + j)] = u - v[j - 1] * I
        eqs = [series_compose(r, sub) for r in M.rho]
        if any(e.total_degree() > 1 for e in eqs):
            continue
        a = [[e.linear_coefficient(u) for u in unames] for e in eqs]
        b = [-e.constant_term() for e in eqs]
        try:
            u = linalg.solve(a, b)
        except SingularMatrixError:
            continue
        if not all(c.is_real() for c in u):
            continue
        pt = tuple(x) + tuple(uu + vv * I for uu, vv in zip(u, v))
        if M.contains(pt) and pt not in points:
            points.append(pt)
    return points

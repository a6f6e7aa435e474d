"""Generic real algebraic manifolds: genericity, normalization, Levi data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .core import linalg
from .core.numbers import I, ONE, ZERO, GaussianRational
from .core.polynomial import (
    MultiPolynomial,
    VariableTable,
    conjugate_swap,
    partial_derivative,
    series_compose,
)
from .errors import BasepointError, HypothesisFailed, TangencyError


def z(i: int) -> str:
    return f"z{i}"


def zb(i: int) -> str:
    return f"zb{i}"


@dataclass(frozen=True)
class DefiningSystem:
    """M = {rho_1 = ... = rho_d = 0} in C^n, rho_j polynomials in z, zb."""

    n: int
    rho: tuple[MultiPolynomial, ...]

    def __post_init__(self):
        rho = tuple(self.rho)
        if not 1 <= len(rho) <= self.n:
            raise ValueError(f"need 1 <= d <= n, got d={len(rho)}, n={self.n}")
        table = VariableTable.complex(self.n)
        for r in rho:
            table = table.merge(r.table)
            extra = set(r.used_variables()) - set(VariableTable.complex(self.n).names)
            if extra:
                raise ValueError(f"defining polynomial uses foreign variables {sorted(extra)}")
        object.__setattr__(self, "rho", tuple(r.retabled(table) for r in rho))

    @property
    def d(self) -> int:
        return len(self.rho)

    @property
    def k(self) -> int:
        return self.n - self.d

    @property
    def table(self) -> VariableTable:
        return self.rho[0].table

    def holomorphic(self) -> list[str]:
        return [z(i) for i in range(1, self.n + 1)]

    def conjugates(self) -> list[str]:
        return [zb(i) for i in range(1, self.n + 1)]

    def contains(self, point: Sequence) -> bool:
        values = point_assignment(point)
        return all(not r.evaluate(values) for r in self.rho)

    def substitute(self, assignment) -> DefiningSystem:
        return DefiningSystem(self.n, tuple(series_compose(r, assignment) for r in self.rho))


def point_assignment(point: Sequence, prefix: str = "z") -> dict[str, GaussianRational]:
    """{z_i: p_i, zb_i: conj(p_i)} for a point of C^n."""
    values = {}
    for i, c in enumerate(point, start=1):
        c = GaussianRational.coerce(c)
        values[f"{prefix}{i}"] = c
        values[f"{prefix}b{i}"] = c.conjugate()
    return values


def _as_point(point) -> tuple[GaussianRational, ...]:
    return tuple(GaussianRational.coerce(c) for c in point)


def _check_on_manifold(M: DefiningSystem, p) -> tuple[GaussianRational, ...]:
    p = _as_point(p)
    if len(p) != M.n:
        raise BasepointError(f"point has {len(p)} coordinates, expected {M.n}")
    values = point_assignment(p)
    for j, r in enumerate(M.rho, start=1):
        v = r.evaluate(values)
        if v:
            raise BasepointError(f"rho{j}(p, conj p) = {v} != 0: point is not on M")
    return p


def holomorphic_gradient(M: DefiningSystem, p) -> linalg.Matrix:
    """The d x n matrix [d rho_j / d z_k](p)."""
    values = point_assignment(p)
    return [[partial_derivative(r, z(k)).evaluate(values) for k in range(1, M.n + 1)] for r in M.rho]


def antiholomorphic_gradient(M: DefiningSystem, p) -> linalg.Matrix:
    values = point_assignment(p)
    return [[partial_derivative(r, zb(k)).evaluate(values) for k in range(1, M.n + 1)] for r in M.rho]


@dataclass
class GenericityReport:
    passed: bool
    real: list[bool]
    nonreal_difference: list[MultiPolynomial | None]
    rank: int
    d: int

    def __bool__(self):
        return self.passed

    def reasons(self) -> list[str]:
        out = []
        for j, ok in enumerate(self.real, start=1):
            if not ok:
                out.append(f"rho{j} is not real: rho - conj(rho) = {self.nonreal_difference[j - 1]}")
        if self.rank < self.d:
            out.append(f"antiholomorphic differentials dependent: rank {self.rank} < d = {self.d}")
        return out


def check_defining_system(M: DefiningSystem, p) -> GenericityReport:
    """Reality of every rho_j and rank d of [d rho_j / d zb_k](p)."""
    p = _check_on_manifold(M, p)
    real, diffs = [], []
    for r in M.rho:
        diff = r - conjugate_swap(r)
        real.append(diff.is_zero())
        diffs.append(None if diff.is_zero() else diff)
    rk = linalg.rank(antiholomorphic_gradient(M, p))
    return GenericityReport(all(real) and rk == M.d, real, diffs, rk, M.d)


def _require_generic(M: DefiningSystem, p) -> None:
    report = check_defining_system(M, p)
    if not report:
        raise HypothesisFailed("genericity", "; ".join(report.reasons()),
                               {"rank": report.rank, "real": report.real})


def complex_tangent_basis(M: DefiningSystem, p) -> list[list[GaussianRational]]:
    """Basis of T_p^c M = ker [d rho / d z](p); exactly n - d vectors."""
    _require_generic(M, p)
    basis = linalg.nullspace(holomorphic_gradient(M, p), M.n)
    assert len(basis) == M.k
    return basis


@dataclass(frozen=True)
class NormalizationMap:
    """z = p + A w (holomorphic affine change), with its inverse."""

    translation: tuple[GaussianRational, ...]
    matrix: tuple[tuple[GaussianRational, ...], ...]
    inverse_matrix: tuple[tuple[GaussianRational, ...], ...]

    @property
    def n(self) -> int:
        return len(self.translation)

    def to_original_point(self, w) -> tuple[GaussianRational, ...]:
        aw = linalg.matvec([list(r) for r in self.matrix], _as_point(w))
        return tuple(a + b for a, b in zip(self.translation, aw))

    def to_normal_point(self, zpt) -> tuple[GaussianRational, ...]:
        shifted = [a - b for a, b in zip(_as_point(zpt), self.translation)]
        return tuple(linalg.matvec([list(r) for r in self.inverse_matrix], shifted))

    def to_original_substitution(self, conjugates: bool = True, prefix: str = "z") -> dict:
        """{z_i: p_i + sum_j A_ij z_j, ...}: rewrite original-coordinate data in normal coordinates."""
        return _affine_substitution(self.translation, self.matrix, conjugates, prefix)

    def to_normal_substitution(self, conjugates: bool = True, prefix: str = "z") -> dict:
        """{z_i: sum_j Ainv_ij (z_j - p_j), ...}: rewrite normal-coordinate data in original coordinates."""
        shift = linalg.matvec([list(r) for r in self.inverse_matrix], [-c for c in self.translation])
        return _affine_substitution(tuple(shift), self.inverse_matrix, conjugates, prefix)

    def is_identity(self) -> bool:
        return (all(not c for c in self.translation)
                and all(self.matrix[i][j] == (ONE if i == j else ZERO)
                        for i in range(self.n) for j in range(self.n)))


def _affine_substitution(shift, matrix, conjugates, prefix):
    n = len(shift)
    names = [f"{prefix}{i}" for i in range(1, n + 1)]
    cnames = [f"{prefix}b{i}" for i in range(1, n + 1)]
    table = VariableTable.from_names(names + cnames)
    sub = {}
    for i in range(n):
        expr = MultiPolynomial.constant(shift[i], table)
        cexpr = MultiPolynomial.constant(shift[i].conjugate(), table)
        for j in range(n):
            a = matrix[i][j]
            if a:
                expr = expr + MultiPolynomial.variable(names[j], table).scale(a)
                cexpr = cexpr + MultiPolynomial.variable(cnames[j], table).scale(a.conjugate())
        sub[names[i]] = expr
        if conjugates:
            sub[cnames[i]] = cexpr
    return sub


def _choose_normal_columns(g: linalg.Matrix, n: int, d: int) -> list[int]:
    """d columns of g forming an invertible block, preferring the last ones."""
    last = list(range(n - d, n))
    if linalg.rank([[row[c] for c in last] for row in g]) == d:
        return last
    chosen: list[int] = []
    for c in reversed(range(n)):
        trial = sorted(chosen + [c])
        if linalg.rank([[row[cc] for cc in trial] for row in g]) == len(trial):
            chosen = trial
        if len(chosen) == d:
            break
    return chosen


def normalize_at_point(M: DefiningSystem, p) -> tuple[NormalizationMap, DefiningSystem]:
    """Affine change sending p to 0 with linear part of rho_j equal to y_j + conj(y_j)."""
    _require_generic(M, p)
    p = _as_point(p)
    n, d, k = M.n, M.d, M.k
    g = holomorphic_gradient(M, p)
    ycols = _choose_normal_columns(g, n, d)
    xcols = [c for c in range(n) if c not in ycols]
    by = [[row[c] for c in ycols] for row in g]
    bx = [[row[c] for c in xcols] for row in g]
    by_inv = linalg.inverse(by)
    coupling = [[-x for x in row] for row in linalg.matmul(by_inv, bx)] if k else [[] for _ in range(d)]
    a = [[ZERO] * n for _ in range(n)]
    for col, xc in enumerate(xcols):
        a[xc][col] = ONE
    for r, yc in enumerate(ycols):
        for col in range(k):
            a[yc][col] = coupling[r][col]
        for s in range(d):
            a[yc][k + s] = by_inv[r][s]
    a_inv = linalg.inverse(a)
    nm = NormalizationMap(p, tuple(map(tuple, a)), tuple(map(tuple, a_inv)))
    normal = M.substitute(nm.to_original_substitution())
    return nm, normal


@dataclass
class LeviData:
    """Levi operators at a base point, written in the normalized tangent basis."""

    basepoint: tuple[GaussianRational, ...]
    tangent_basis: list[list[GaussianRational]]
    hessians: list[linalg.Matrix]
    levi_matrices: list[linalg.Matrix]

    @property
    def k(self) -> int:
        return len(self.tangent_basis)

    @property
    def d(self) -> int:
        return len(self.levi_matrices)

    def form(self, j: int, u, v) -> GaussianRational:
        """H(rho_j, u, v) for u, v given in tangent-basis coordinates."""
        h = self.hessians[j]
        return sum((h[a][b] * u[a] * v[b].conjugate()
                    for a in range(self.k) for b in range(self.k)), ZERO)

    def apply(self, j: int, u) -> list[GaussianRational]:
        """L^j(u): the vector with <L^j u, v> = H(rho_j, u, v)."""
        return linalg.matvec(self.levi_matrices[j], list(u))


def mixed_hessian(r: MultiPolynomial, n: int, values: dict) -> linalg.Matrix:
    return [[partial_derivative(partial_derivative(r, z(a)), zb(b)).evaluate(values)
             for b in range(1, n + 1)] for a in range(1, n + 1)]


def levi_form_value(M: DefiningSystem, p, u, v) -> list[GaussianRational]:
    """(H_p(rho_1,u,v), ..., H_p(rho_d,u,v)) for tangent vectors u, v in C^n."""
    p = _check_on_manifold(M, p)
    u, v = _as_point(u), _as_point(v)
    g = holomorphic_gradient(M, p)
    for name, vec in (("u", u), ("v", v)):
        if any(linalg.matvec(g, list(vec))):
            raise TangencyError(f"{name} is not in the complex tangent space")
    values = point_assignment(p)
    out = []
    for r in M.rho:
        h = mixed_hessian(r, M.n, values)
        out.append(sum((h[a][b] * u[a] * v[b].conjugate()
                        for a in range(M.n) for b in range(M.n)), ZERO))
    return out


def levi_operator_matrices(M: DefiningSystem, p) -> LeviData:
    """Hermitian matrices of the Levi operators in normalized coordinates."""
    nm, normal = normalize_at_point(M, p)
    k = M.k
    origin = point_assignment([0] * M.n)
    hessians = []
    matrices = []
    for r in normal.rho:
        full = mixed_hessian(r, M.n, origin)
        h = [row[:k] for row in full[:k]]
        hessians.append(h)
        matrices.append(linalg.transpose(h))
    basis = [[nm.matrix[i][a] for i in range(M.n)] for a in range(k)]
    return LeviData(_as_point(p), basis, hessians, matrices)


def tangent_grid(k: int) -> list[list[GaussianRational]]:
    """e_a, e_a +/- e_b, e_a +/- i e_b (a < b): polarization recovers every entry."""
    grid = []
    for a in range(k):
        e = [ZERO] * k
        e[a] = ONE
        grid.append(e)
    for a in range(k):
        for b in range(a + 1, k):
            for coef in (ONE, -ONE, I, -I):
                u = [ZERO] * k
                u[a] = ONE
                u[b] = coef
                grid.append(u)
    return grid


@dataclass
class LeviConeVerdict:
    nondegenerate: bool
    rank: int
    d: int
    values: list[list[GaussianRational]] = field(default_factory=list)
    witness_vectors: list[list[GaussianRational]] = field(default_factory=list)
    covector: list[GaussianRational] | None = None

    def __bool__(self):
        return self.nondegenerate


def levi_cone_from_data(levi: LeviData) -> LeviConeVerdict:
    values = [[levi.form(j, u, u) for j in range(levi.d)] for u in tangent_grid(levi.k)]
    rk = linalg.rank(values) if values else 0
    if rk == levi.d:
        picks = linalg.independent_rows(values)
        return LeviConeVerdict(True, rk, levi.d, values, [values[i] for i in picks])
    if values:
        cov = linalg.nullspace(values)[0]
    else:
        cov = [ONE] + [ZERO] * (levi.d - 1)
    return LeviConeVerdict(False, rk, levi.d, values, [], cov)


def levi_cone_nondegenerate(M: DefiningSystem, p) -> LeviConeVerdict:
    """True iff the Levi-form values over T_p^c M span R^d (cone has interior)."""
    return levi_cone_from_data(levi_operator_matrices(M, p))


def levi_form_nondegenerate(M: DefiningSystem, p) -> bool:
    levi = levi_operator_matrices(M, p)
    if levi.k == 0:
        return True
    stacked = [row for mat in levi.levi_matrices for row in mat]
    return linalg.rank(stacked) == levi.k

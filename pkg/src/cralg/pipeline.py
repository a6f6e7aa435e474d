"""End-to-end: hypotheses, reflection systems, curve families, annihilators for each component."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core.polynomial import MultiPolynomial, conjugate_swap, series_compose
from .core.rational import RationalFunction
from .engine.annihilator import DEFAULT_MARGIN, Annihilator, NotFound, evaluate_annihilator, renormalize
from .engine.separate import SeparateCertificate, separate_algebraicity
from .errors import BasepointError, CRAlgError, HypothesisFailed
from .manifold import (
    DefiningSystem,
    NormalizationMap,
    check_defining_system,
    levi_cone_from_data,
    levi_operator_matrices,
    normalize_at_point,
    z,
    zb,
)
from .reflection import (
    CRMapData,
    PhiSystem,
    atilde_system,
    condition_2_5_check,
    full_system,
    graph_residuals,
    phi_polynomials,
    rational_points_on,
    select_phi_subset,
    zero_tilde,
)
from .segre import coordinate_line_families, curve_families_from_segre, lifted_fields
from .tangent import complexified_graph, restrict_to_complexification

# Report labels for each hypothesis.  The Levi-cone and rank conditions keep
# their conventional equation tags in failure reports.
CONDITION_LABELS = {
    "genericity_source": "generic source",
    "genericity_target": "generic target",
    "membership": "F(M) in M'",
    "levi_cone": "Eq (2.3)",
    "condition_2_5": "Eq (2.5)",
    "subset_selection": "reflection subsystem rank",
    "full_system": "reflection system rank",
    "spanning": "lifted fields span",
    "families": "curve families",
}


@dataclass
class Check:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return CONDITION_LABELS.get(self.name, self.name)


@dataclass
class HypothesisReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def get(self, name: str) -> Check | None:
        return next((c for c in self.checks if c.name == name), None)

    def add(self, name: str, passed: bool, **details) -> Check:
        c = Check(name, bool(passed), details)
        self.checks.append(c)
        return c


@dataclass
class Problem:
    """Source and target manifolds, base point and candidate map."""

    source: DefiningSystem
    target: DefiningSystem
    basepoint: tuple
    cr_map: CRMapData


@dataclass
class ComponentResult:
    index: int
    separate: SeparateCertificate
    annihilator: Annihilator | NotFound
    verified: bool


@dataclass
class ExtensionCertificate:
    status: str
    hypotheses: HypothesisReport
    order: int
    families: list = field(default_factory=list)
    components: list[ComponentResult] = field(default_factory=list)
    variety_checks: list = field(default_factory=list)
    failure: Check | None = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "certified"

    def annihilators(self) -> list:
        return [c.annihilator for c in self.components]


@dataclass
class _Context:
    source_norm: NormalizationMap
    source: DefiningSystem
    target_norm: NormalizationMap
    target: DefiningSystem
    cr_map: CRMapData
    normal_map: CRMapData
    phi: PhiSystem | None = None


def membership_residual(M: DefiningSystem, Mp: DefiningSystem, F: CRMapData, order: int) -> list[MultiPolynomial]:
    """rho'(F, conj F) restricted to the complexification of M; M must pass through 0."""
    fs = F.series(order)
    sub = {}
    for r, s in enumerate(fs, start=1):
        sub[z(r)] = s
        sub[zb(r)] = conjugate_swap(s)
    graph = complexified_graph(M, order)
    out = []
    for rp in Mp.rho:
        composed = series_compose(rp, sub).truncate(order) if rp.order is None else series_compose(rp, sub)
        out.append(restrict_to_complexification(composed, graph, order))
    return out


def _prepare(M, p, Mp, F: CRMapData, report: HypothesisReport) -> _Context:
    gen = check_defining_system(M, p)
    report.add("genericity_source", gen.passed, rank=gen.rank, d=gen.d, reasons=gen.reasons())
    if not gen:
        raise HypothesisFailed("genericity_source", "; ".join(gen.reasons()))
    try:
        image = F.image
    except ZeroDivisionError:
        raise HypothesisFailed("membership", "the map has a pole at the base point") from None
    try:
        gen_t = check_defining_system(Mp, image)
    except BasepointError as exc:
        report.add("membership", False, reason=str(exc))
        raise HypothesisFailed("membership", f"F(p) is not on the target: {exc}") from None
    report.add("genericity_target", gen_t.passed, rank=gen_t.rank, d=gen_t.d, reasons=gen_t.reasons())
    if not gen_t:
        raise HypothesisFailed("genericity_target", "; ".join(gen_t.reasons()))
    nm, Mn = normalize_at_point(M, p)
    nmp, Mpn = normalize_at_point(Mp, image)
    Fn = F.normalized(nm, nmp)
    return _Context(nm, Mn, nmp, Mpn, F, Fn)


def _hypotheses(ctx: _Context, report: HypothesisReport, order: int, extended, thetas=None, strict=True):
    Mn, Mpn, Fn = ctx.source, ctx.target, ctx.normal_map

    def fail(name, message):
        if strict:
            raise HypothesisFailed(name, message)

    residual = membership_residual(Mn, Mpn, Fn, order)
    ok = all(r.is_zero() for r in residual)
    report.add("membership", ok, order=order,
               residual=[str(r) for r in residual if not r.is_zero()][:3])
    if not ok:
        fail("membership", "rho'(F, conj F) does not vanish on the complexification of M")

    levi = levi_operator_matrices(Mn, [0] * Mn.n)
    cone = levi_cone_from_data(levi)
    report.add("levi_cone", cone.nondegenerate, rank=cone.rank, d=cone.d,
               witness=[[str(x) for x in v] for v in cone.witness_vectors],
               covector=[str(x) for x in cone.covector] if cone.covector else None)
    if not cone:
        fail("levi_cone", f"Levi cone values span rank {cone.rank} < d = {cone.d}")

    target_levi = levi_operator_matrices(Mpn, [0] * Mpn.n)
    dF = Fn.jacobian()
    c25 = condition_2_5_check(target_levi, dF, Mn.k)
    report.add("condition_2_5", c25.passed, rank=c25.rank, required=c25.required,
               matrix=[[str(x) for x in row] for row in c25.matrix])
    if not c25:
        fail("condition_2_5", f"stacked Levi vectors have rank {c25.rank} < k' = {c25.required}")

    phi = phi_polynomials(Mn, Mpn)
    point = zero_tilde(Fn)
    try:
        sel = select_phi_subset(phi, point)
        report.add("subset_selection", True, rank=sel.rank, selected=[list(k) for k in sel.rows],
                   matrix=[[str(x) for x in row] for row in sel.matrix])
        fs = full_system(phi, point)
        report.add("full_system", True, rank=fs.rank, required=fs.required,
                   matrix=[[str(x) for x in row] for row in fs.matrix])
        ctx.phi = phi
    except HypothesisFailed as exc:
        name = "subset_selection" if report.get("subset_selection") is None else "full_system"
        report.add(name, False, reason=str(exc), **exc.details)
        fail(name, str(exc))

    lf = lifted_fields(Mn, thetas, extended)
    report.add("spanning", lf.spans, rank=lf.rank, n=lf.n, method=lf.method,
               thetas=[[str(x) for x in th] for th in lf.thetas],
               selection=[[ti, j + 1] for ti, j in lf.selection])
    if not lf.spans:
        fail("spanning", f"lifted fields span rank {lf.rank} < n = {lf.n}")
    return lf


def hypothesis_report(M: DefiningSystem, p, Mp: DefiningSystem, F: CRMapData, order: int = 12,
                      extended=None, thetas=None) -> HypothesisReport:
    """All hypothesis verdicts with witnesses.

    Failed hypotheses are recorded, not raised.  Malformed input, such as a
    base point off the source, still raises.
    """
    report = HypothesisReport()
    try:
        ctx = _prepare(M, p, Mp, F, report)
        _hypotheses(ctx, report, order, extended, thetas, strict=False)
    except HypothesisFailed as exc:
        if report.get(exc.condition) is None:
            report.add(exc.condition, False, reason=str(exc))
    return report


def component_in_source_chart(F: CRMapData, nm: NormalizationMap, i: int) -> RationalFunction | MultiPolynomial:
    """F_i(p + A w), written in the variables z of the normalized chart."""
    c = F.components[i]
    if isinstance(c, RationalFunction):
        return c.subs(nm.to_original_substitution(conjugates=False))
    return c


def annihilator_to_original(P: MultiPolynomial, symbol: str, nm: NormalizationMap) -> MultiPolynomial:
    """Rewrite P(f, w) in the original coordinates via w = A^-1 (z - p), then renormalize."""
    sub = nm.to_normal_substitution(conjugates=False)
    Pz = series_compose(P, {k: v for k, v in sub.items() if k in P.table})
    Pz = Pz.projected(P.table)
    return renormalize(Pz, symbol)[0]


def extend_map(M: DefiningSystem, p, Mp: DefiningSystem, F: CRMapData, order: int = 12, qmax: int = 3,
               kmax: int = 3, degree: int = 3, samples: int = 3, extended=None, thetas=None,
               families: str = "segre", margin: int = DEFAULT_MARGIN) -> ExtensionCertificate:
    report = HypothesisReport()
    try:
        ctx = _prepare(M, p, Mp, F, report)
        _hypotheses(ctx, report, order, extended, thetas)
        Mn = ctx.source
        if families == "coordinate":
            fams = coordinate_line_families(Mn.n)
        else:
            fams = curve_families_from_segre(Mn, thetas, order, extended)
        report.add("families", True, count=len(fams), kind=families)
    except HypothesisFailed as exc:
        failure = report.get(exc.condition)
        if failure is None or failure.passed:
            failure = report.add(exc.condition, False, reason=str(exc))
        return ExtensionCertificate("hypothesis_failed", report, order, failure=failure,
                                    message=f"{failure.label}: {exc}")

    cert = ExtensionCertificate("certified", report, order, families=fams)
    for zeta in rational_points_on(Mn, samples):
        vs = atilde_system(ctx.phi, Mn, ctx.target, ctx.normal_map, zeta)
        try:
            ok = all(r.is_zero() for r in graph_residuals(vs, Mn, ctx.normal_map, order))
        except CRAlgError:
            ok = False
        cert.variety_checks.append((zeta, vs, ok))
    if not all(ok for _, _, ok in cert.variety_checks):
        cert.status = "variety_check_failed"
        cert.message = "the graph of F does not lie in an emitted variety system"

    for i in range(F.n_prime):
        symbol = f"F{i + 1}"
        f = component_in_source_chart(F, ctx.source_norm, i)
        sep = separate_algebraicity(f, fams, qmax=qmax, kmax=kmax, degree=degree, order=order,
                                    samples=samples, margin=margin, symbol=symbol)
        if not sep.final:
            cert.components.append(ComponentResult(i + 1, sep, sep.final or NotFound([]), False))
            if cert.status == "certified":
                cert.status = "not_found"
                bad = sep.failures()
                where = f"family {bad[0].family}" if bad else "joint annihilator"
                cert.message = f"component {symbol}: no annihilator within bounds ({where})"
            continue
        ann = sep.final
        Pz = annihilator_to_original(ann.poly, symbol, ctx.source_norm)
        # re-verify: pull P back to the chart and substitute the component series
        back = series_compose(Pz, ctx.source_norm.to_original_substitution(conjugates=False))
        fw = f.to_series(ann.order) if isinstance(f, RationalFunction) else f
        verified = evaluate_annihilator(back.projected(ann.poly.table), symbol, fw, ann.order).is_zero()
        final = Annihilator(Pz, symbol, ann.variables, ann.order, ann.degrees, ann.pivot, ann.kernel_dim,
                            ann.searched)
        cert.components.append(ComponentResult(i + 1, sep, final, verified))
        if not verified and cert.status == "certified":
            cert.status = "verification_failed"
    return cert

"""Command-line driver: ``cralg <subcommand> FILE [options]``.

Exit codes: 0 success, 1 hypothesis failed, 2 parse or usage error,
3 no annihilator within the bounds (or the order is too small for them).
"""

from __future__ import annotations

import argparse
import sys

from ..engine.annihilator import DEFAULT_MARGIN, NotFound, find_annihilator
from ..engine.separate import separate_algebraicity
from ..errors import CRAlgError, HypothesisFailed, OrderInsufficientError, ParseError
from ..manifold import (
    DefiningSystem,
    check_defining_system,
    levi_cone_from_data,
    levi_operator_matrices,
    normalize_at_point,
)
from ..pipeline import extend_map, hypothesis_report
from ..reflection import CRMapData
from ..segre import coordinate_line_families, curve_families_from_segre, lifted_fields, segre_family_representation
from ..tangent import apply_operator, tangent_operators
from .parser import ProblemFile, evaluate_rational, evaluate_series, load
from .report import emit_report

OK, HYPOTHESIS_FAILED, PARSE_ERROR, NOT_FOUND = 0, 1, 2, 3

COMMANDS = ("check-manifold", "levi", "tangent-ops", "segre", "check-map", "extend-map", "annihilator",
            "separate-alg")


class _Usage(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgParser(prog="cralg", description="Exact certificates for CR maps between real algebraic manifolds.")
    sub = ap.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_ArgParser)
    sub.required = True
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("file", help="problem file (.crm) or series file")
        sp.add_argument("--order", type=int, default=None, help="truncation order N (default 12)")
        sp.add_argument("--qmax", type=int, default=None)
        sp.add_argument("--kmax", type=int, default=None)
        sp.add_argument("--degree", type=int, default=None, help="total degree bound for joint annihilators")
        sp.add_argument("--samples", type=int, default=None, help="curves sampled per family")
        sp.add_argument("--margin", type=int, default=None)
        sp.add_argument("--theta-grid", choices=("default", "extended"), default=None)
        sp.add_argument("--families", choices=("segre", "coordinate"), default=None)
        sp.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return ap


class _Settings:
    """Command line first, then the file's own options, then defaults."""

    defaults = {"order": 12, "qmax": 3, "kmax": 3, "degree": 3, "samples": 3, "margin": DEFAULT_MARGIN,
                "theta_grid": "default", "families": None}

    def __init__(self, args, pf: ProblemFile):
        self.args, self.pf = args, pf

    def __getattr__(self, name):
        v = getattr(self.args, name, None)
        if v is None:
            v = self.pf.option(name)
        return self.defaults.get(name) if v is None else v

    @property
    def extended(self):
        given = self.args.theta_grid or self.pf.option("theta_grid")
        return None if given is None else given == "extended"


def _source(pf: ProblemFile) -> DefiningSystem:
    if pf.n is None or not pf.rho:
        raise ParseError("this command needs n and rho1..rhod")
    return DefiningSystem(pf.n, tuple(pf.rho))


def _target(pf: ProblemFile) -> DefiningSystem:
    if not pf.rho_prime:
        raise ParseError("this command needs rhop1..rhopd'")
    return DefiningSystem(pf.n_prime, tuple(pf.rho_prime))


def _map(pf: ProblemFile) -> CRMapData:
    if not pf.F:
        raise ParseError("this command needs map components F1..Fn'")
    return CRMapData(pf.n, pf.n_prime, list(pf.F), pf.basepoint())


def _checks_json(report) -> list:
    return [{"name": c.name, "label": c.label, "passed": c.passed, "details": c.details} for c in report.checks]


def cmd_check_manifold(pf, s):
    M = _source(pf)
    gen = check_defining_system(M, pf.basepoint())
    res = {"status": "pass" if gen else "fail", "rank": gen.rank, "d": gen.d, "n": M.n, "k": M.k,
           "real": gen.real, "reasons": gen.reasons(), "basepoint": pf.basepoint()}
    return (OK if gen else HYPOTHESIS_FAILED), res


def cmd_levi(pf, s):
    M = _source(pf)
    levi = levi_operator_matrices(M, pf.basepoint())
    cone = levi_cone_from_data(levi)
    res = {"status": "pass" if cone else "fail", "basepoint": pf.basepoint(),
           "tangent_basis": levi.tangent_basis, "levi_matrices": levi.levi_matrices,
           "cone": {"nondegenerate": cone.nondegenerate, "rank": cone.rank, "d": cone.d,
                    "witness_vectors": cone.witness_vectors, "values": cone.values, "covector": cone.covector}}
    return (OK if cone else HYPOTHESIS_FAILED), res


def _normalized(pf):
    M = _source(pf)
    nm, Mn = normalize_at_point(M, pf.basepoint())
    return nm, Mn


def cmd_tangent_ops(pf, s):
    nm, Mn = _normalized(pf)
    ops = tangent_operators(Mn)
    tangency = all(apply_operator(T, r).is_zero() for T in ops for r in Mn.rho)
    res = {"status": "pass" if tangency else "fail", "normalization": nm, "normalized_rho": list(Mn.rho),
           "delta": ops[0].delta if ops else None,
           "operators": [{"q": T.q, "x": T.x_name(), "y": T.y_names(), "coefficients": list(T.coeffs)} for T in ops],
           "tangency_verified": tangency}
    return (OK if tangency else HYPOTHESIS_FAILED), res


def cmd_segre(pf, s):
    nm, Mn = _normalized(pf)
    fam = segre_family_representation(Mn, None, s.order)
    lf = lifted_fields(Mn, None, s.extended)
    res = {"status": "pass" if lf.spans else "fail", "normalization": nm, "order": s.order,
           "leaf": fam.leaf, "graph": fam.graph, "exact": fam.exact,
           "lifted_fields": {"rank": lf.rank, "n": lf.n, "spans": lf.spans, "method": lf.method,
                             "thetas": lf.thetas, "selection": [[t, j + 1] for t, j in lf.selection],
                             "vectors": lf.vectors, "notes": lf.notes}}
    return (OK if lf.spans else HYPOTHESIS_FAILED), res


def cmd_check_map(pf, s):
    rep = hypothesis_report(_source(pf), pf.basepoint(), _target(pf), _map(pf), s.order, s.extended)
    res = {"status": "pass" if rep.passed else "fail", "checks": _checks_json(rep)}
    failure = rep.first_failure()
    if failure is not None:
        res["first_failure"] = failure.label
    return (OK if rep.passed else HYPOTHESIS_FAILED), res


def _annihilator_json(a):
    return a if a is not None else NotFound([], "not attempted")


def cmd_extend_map(pf, s):
    cert = extend_map(_source(pf), pf.basepoint(), _target(pf), _map(pf), order=s.order, qmax=s.qmax,
                      kmax=s.kmax, degree=s.degree, samples=s.samples, extended=s.extended,
                      families=s.families or "segre", margin=s.margin)
    res = {"status": cert.status, "message": cert.message, "order": cert.order,
           "hypotheses": _checks_json(cert.hypotheses),
           "families": [{"index": f.index, "params": list(f.params), "tangent": f.tangent, "exact": f.exact,
                         "components": f.components} for f in cert.families],
           "variety_checks": [{"zeta": zeta, "chi": vs.chi, "labels": vs.labels, "equations": vs.equations,
                               "graph_in_variety": ok} for zeta, vs, ok in cert.variety_checks],
           "components": [{"index": c.index, "annihilator": c.annihilator, "verified": c.verified,
                           "curve_checks": [{"family": ch.family, "c": ch.c, "result": ch.result, "note": ch.note}
                                            for ch in c.separate.curve_checks],
                           "chart_consistent": c.separate.chart_consistent}
                          for c in cert.components]}
    if cert.failure is not None:
        res["failed_condition"] = cert.failure.label
    code = {"certified": OK, "not_found": NOT_FOUND}.get(cert.status, HYPOTHESIS_FAILED)
    return code, res


def cmd_annihilator(pf, s):
    if pf.f is None:
        raise ParseError("this command needs a series definition f = ...")
    f = evaluate_series(pf, s.order)
    try:
        ann = find_annihilator(f, s.qmax, s.kmax, s.margin, symbol="f", order=s.order)
    except OrderInsufficientError as exc:
        return NOT_FOUND, {"status": "not_found", "searched": [], "reason": str(exc), "required_order": exc.required}
    if not ann:
        return NOT_FOUND, ann
    return OK, ann


def cmd_separate_alg(pf, s):
    if pf.f is None or pf.n is None:
        raise ParseError("this command needs n and a definition f = ... in z1..zn")
    f = evaluate_rational(pf)
    if f is None:
        f = evaluate_series(pf, s.order)
    elif f.is_polynomial():
        f = f.as_polynomial()
    kind = s.families or ("segre" if pf.rho else "coordinate")
    if kind == "segre":
        nm, Mn = _normalized(pf)
        if not nm.is_identity():
            raise HypothesisFailed("families", "separate-alg with Segre families needs the base point at the origin "
                                   "of a normalized system")
        families = curve_families_from_segre(Mn, None, s.order, s.extended)
    else:
        families = coordinate_line_families(pf.n)
    cert = separate_algebraicity(f, families, qmax=s.qmax, kmax=s.kmax, degree=s.degree, order=s.order,
                                 samples=s.samples, margin=s.margin, symbol="f")
    res = {"status": "certified" if cert.passed else "not_found", "families": kind, "order": cert.order,
           "final": _annihilator_json(cert.final), "chart_annihilator": _annihilator_json(cert.chart_annihilator),
           "chart_consistent": cert.chart_consistent, "notes": cert.notes,
           "curve_checks": [{"family": ch.family, "c": ch.c, "result": ch.result, "note": ch.note}
                            for ch in cert.curve_checks]}
    return (OK if cert.passed else NOT_FOUND), res


HANDLERS = {
    "check-manifold": cmd_check_manifold,
    "levi": cmd_levi,
    "tangent-ops": cmd_tangent_ops,
    "segre": cmd_segre,
    "check-map": cmd_check_map,
    "extend-map": cmd_extend_map,
    "annihilator": cmd_annihilator,
    "separate-alg": cmd_separate_alg,
}


def _execute(argv):
    try:
        args = build_parser().parse_args(argv)
    except _Usage as exc:
        return PARSE_ERROR, emit_report({"status": "usage_error", "message": str(exc)}), None
    try:
        pf = load(args.file)
        code, res = HANDLERS[args.command](pf, _Settings(args, pf))
    except (ParseError, OSError) as exc:
        code, res = PARSE_ERROR, {"status": "parse_error", "message": str(exc)}
    except HypothesisFailed as exc:
        code, res = HYPOTHESIS_FAILED, {"status": "hypothesis_failed", "condition": exc.condition,
                                        "message": str(exc), "details": exc.details}
    except OrderInsufficientError as exc:
        code, res = NOT_FOUND, {"status": "not_found", "searched": [], "reason": str(exc),
                                "required_order": exc.required}
    except (CRAlgError, ValueError) as exc:
        code, res = HYPOTHESIS_FAILED, {"status": "error", "message": f"{type(exc).__name__}: {exc}"}
    return code, emit_report(res, command=args.command), args.out


def run_command(argv) -> tuple[int, str]:
    """Execute one subcommand; returns the exit code and the JSON report text.

    With ``--out`` the report is also written to that file.
    """
    code, text, out = _execute(list(argv))
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code, text


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    code, text, out = _execute(argv)
    if code == PARSE_ERROR and '"usage_error"' in text:
        sys.stderr.write(build_parser().format_usage())
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

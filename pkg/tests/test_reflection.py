import random

import pytest

from _support import FLAT, M0, poly, rand_gr, rat
from cralg.core.numbers import I, gr
from cralg.errors import BasepointError, HypothesisFailed
from cralg.manifold import DefiningSystem, levi_operator_matrices, normalize_at_point
from cralg.reflection import (
    CRMapData,
    atilde_system,
    condition_2_5_check,
    full_system,
    phi_polynomials,
    rational_points_on,
    select_phi_subset,
    verify_graph_in_variety,
    zero_tilde,
)

IDENTITY = CRMapData(2, 2, [rat("z1"), rat("z2")], [0, 0])
AUTOMORPHISM = CRMapData(2, 2, [rat("z1 + 1"), rat("z2 - z1 - Q(1,2)")], [0, 0])


def _names(p):
    return sorted(p.used_variables())


def test_phi_on_quadric():
    S = phi_polynomials(M0, M0)
    (phi,) = S.phi.values()
    expected = "-zb1*Fb1*D1_2 - zb1*D2_2 + Fb1*D1_1 + D2_1"
    assert str(phi) == expected
    assert str(phi_polynomials(FLAT, M0).phi[(1, 1)]) == "Fb1*D1_1 + D2_1"
    assert str(phi_polynomials(M0, FLAT).phi[(1, 1)]) == "-zb1*D2_2 + D2_1"


def test_phi_polynomials_have_no_denominators():
    C3 = DefiningSystem(3, (poly("z2 + zb2 + z1*zb1 + z2*zb2", 3), poly("z3 + zb3 + z1*zb1*z3", 3)))
    S = phi_polynomials(C3, C3)
    for p in S.phi.values():
        assert p.order is None  # exact polynomial, never a series


def test_zero_tilde_point():
    pt = zero_tilde(IDENTITY)
    assert pt["D1_1"] == 1 and pt["D2_2"] == 1 and pt["D1_2"] == 0 and pt["F1"] == 0
    pt = zero_tilde(CRMapData(2, 2, [rat("z1 + z2"), rat("3*z2 - z1")], [0, 0]))
    assert pt["D2_1"] == -1 and pt["Db2_1"] == -1 and pt["D1_2"] == 1
    with pytest.raises(BasepointError):
        zero_tilde(AUTOMORPHISM)


def test_rank_condition_examples():
    tl = levi_operator_matrices(M0, [0, 0])
    assert condition_2_5_check(tl, IDENTITY.jacobian(), 1).passed
    constant = CRMapData(2, 2, [rat("0"), rat("0")], [0, 0])
    cert = condition_2_5_check(tl, constant.jacobian(), 1)
    assert not cert.passed and cert.rank == 0
    squashed = CRMapData(2, 2, [rat("z1**2"), rat("z2")], [0, 0])
    assert not condition_2_5_check(tl, squashed.jacobian(), 1).passed


def test_rank_condition_invariant_under_recombination():
    rng = random.Random(17)
    tl = levi_operator_matrices(M0, [0, 0])
    maps = [IDENTITY, CRMapData(2, 2, [rat("0"), rat("0")], [0, 0]), AUTOMORPHISM]
    for F in maps:
        base = condition_2_5_check(tl, F.jacobian(), 1)
        for _ in range(5):
            A = [[rand_gr(rng) or gr(1)]]
            assert condition_2_5_check(tl, F.jacobian(), 1, recombination=A).passed == base.passed


def test_subset_selection_examples():
    S = phi_polynomials(M0, M0)
    sel = select_phi_subset(S, zero_tilde(IDENTITY))
    assert sel.rows == [(1, 1)] and sel.matrix == [[1]]
    scaled = CRMapData(2, 2, [rat("2*z1"), rat("4*z2")], [0, 0])
    assert select_phi_subset(phi_polynomials(M0, M0), zero_tilde(scaled)).matrix == [[2]]


def test_subset_selection_skips_inactive_equation():
    target = DefiningSystem(3, (poly("z2 + zb2", 3), poly("z3 + zb3 + z1*zb1", 3)))
    F = CRMapData(2, 3, [rat("z1"), rat("0"), rat("z2")], [0, 0])
    sel = select_phi_subset(phi_polynomials(M0, target), zero_tilde(F))
    assert sel.rows == [(1, 2)]


def test_full_system_rank():
    S = phi_polynomials(M0, M0)
    select_phi_subset(S, zero_tilde(IDENTITY))
    cert = full_system(S, zero_tilde(IDENTITY))
    assert cert.passed and cert.rank == 2 and cert.matrix == [[1, 0], [0, 1]]
    assert len(S.conjugated) == 1


def test_full_system_fails_for_flat_target():
    S = phi_polynomials(M0, FLAT)
    with pytest.raises(HypothesisFailed):
        select_phi_subset(S, zero_tilde(IDENTITY))
        full_system(S, zero_tilde(IDENTITY))


def test_atilde_system_identity():
    S = phi_polynomials(M0, M0)
    select_phi_subset(S, zero_tilde(IDENTITY))
    full_system(S, zero_tilde(IDENTITY))
    vs = atilde_system(S, M0, M0, IDENTITY, [0, 0])
    assert [str(e) for e in vs.equations] == ["-z1 + zp1", "zp2", "z2"]
    assert verify_graph_in_variety(vs, M0, IDENTITY, 12)
    vs = atilde_system(S, M0, M0, IDENTITY, [0, I])
    assert "z2 - 1*i" in [str(e) for e in vs.equations]
    assert verify_graph_in_variety(vs, M0, IDENTITY, 12)


def test_atilde_system_automorphism_and_perturbation():
    # the automorphism is affine, so after normalizing both sides it becomes the identity
    nm, Mn = normalize_at_point(M0, [0, 0])
    nmp, Mpn = normalize_at_point(M0, AUTOMORPHISM.image)
    Fn = AUTOMORPHISM.normalized(nm, nmp)
    assert [str(c) for c in Fn.components] == ["z1", "z2"]
    S = phi_polynomials(Mn, Mpn)
    select_phi_subset(S, zero_tilde(Fn))
    full_system(S, zero_tilde(Fn))
    for zeta in rational_points_on(Mn, 3):
        vs = atilde_system(S, Mn, Mpn, Fn, zeta)
        assert verify_graph_in_variety(vs, Mn, Fn, 12)
    # a shear does not send M0 into M0, so its graph must leave the variety
    bad = CRMapData(2, 2, [rat("z1"), rat("z2 - z1*z1")], [0, 0])
    S = phi_polynomials(M0, M0)
    select_phi_subset(S, zero_tilde(bad))
    full_system(S, zero_tilde(bad))
    vs = atilde_system(S, M0, M0, bad, [0, 0])
    assert not verify_graph_in_variety(vs, M0, bad, 12)


def test_rational_points_lie_on_manifold():
    pts = rational_points_on(M0, 3)
    assert pts[0] == (0, 0)
    assert all(M0.contains(p) for p in pts)
    assert len(set(pts)) == 3

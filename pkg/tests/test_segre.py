import random

import pytest

from _support import FLAT, M0, poly, random_normalized_system, random_point_on, random_point_on_segre
from cralg.core.numbers import I, gr
from cralg.errors import HypothesisFailed
from cralg.manifold import DefiningSystem
from cralg.segre import (
    check_general_position,
    coordinate_line_families,
    curve_families_from_segre,
    foliation_leaf_residual,
    lifted_fields,
    lifted_vectors_at,
    segre_family_representation,
    segre_variety,
)

C4 = DefiningSystem(4, (poly("z3 + zb3 + z1*zb1 - z2*zb2", 4), poly("z4 + zb4 + z1*zb2 + z2*zb1", 4)))


def test_segre_variety_examples():
    assert segre_variety(M0, [0, 0]).system == (poly("z2"),)
    assert segre_variety(M0, [1, gr("-1/2")]).system == (poly("z2 - Q(1,2) + z1"),)
    assert segre_variety(M0, [0, I]).system == (poly("z2 - i"),)


def test_family_representation_is_exact_for_quadric():
    fam = segre_family_representation(M0, None, 6)
    assert fam.exact
    assert fam.leaf == [poly("-z2 - z1*zb1")]
    fam1 = segre_family_representation(M0, [1], 6)
    assert fam1.leaf == [poly("-z2 - z1")]
    assert all(r.is_zero() for r in foliation_leaf_residual(fam))


def test_foliation_uniqueness_and_disjointness():
    fam = segre_family_representation(M0, [1], 6)
    rng = random.Random(8)
    for _ in range(10):
        tau1, tau2 = gr(rng.randint(-5, 5)), gr(rng.randint(-5, 5)) + gr("1/3")
        for _ in range(3):
            z1 = gr(rng.randint(-5, 5)) + gr(rng.randint(-3, 3)) * I
            point = [z1, -tau1 - z1]
            # exactly one leaf passes through the point, and it is not the tau2 leaf
            assert fam.leaf_parameter(point) == [tau1]
            assert fam.leaf_parameter(point) != [tau2]


def test_lifted_fields_examples():
    lf = lifted_fields(M0, [[0], [1]])
    assert lf.rank == 2 and lf.spans
    assert lf.vectors[(0, 0)] == [1, 0] and lf.vectors[(1, 0)] == [1, -1]
    assert lifted_vectors_at(M0, [2]) == [[1, -2]]
    flat = lifted_fields(FLAT)
    assert flat.rank == 1 and not flat.spans
    assert lifted_fields(C4).rank == 4


def test_curve_families_on_quadric():
    fams = curve_families_from_segre(M0, [[0], [1]], 12)
    assert [str(c) for c in fams[0].components] == ["t", "c1"]
    assert [str(c) for c in fams[1].components] == ["t", "-t + c1"]
    assert fams[0].tangent == [1, 0] and fams[1].tangent == [1, -1]
    assert check_general_position(fams)
    assert [str(c) for c in fams[1].curve([gr(2)])] == ["t", "-t + 2"]


def test_degenerate_theta_set_fails():
    with pytest.raises(HypothesisFailed) as info:
        curve_families_from_segre(M0, [[0]], 12)
    assert info.value.condition == "spanning"
    with pytest.raises(HypothesisFailed):
        curve_families_from_segre(FLAT, None, 12)


def test_coordinate_lines_are_classical():
    fams = coordinate_line_families(2)
    assert [str(c) for c in fams[0].components] == ["t", "c1"]
    assert [str(c) for c in fams[1].components] == ["c1", "t"]
    assert check_general_position(fams)


def test_reflexivity_and_involution_small_sample():
    rng = random.Random(12)
    checked = 0
    while checked < 10:
        M = random_normalized_system(rng, 3, 1, y_affine=True)
        zeta = random_point_on(M, rng)
        w = random_point_on_segre(M, zeta, rng) if zeta else None
        if w is None:
            continue
        assert M.contains(zeta) and segre_variety(M, zeta).contains(zeta)
        assert segre_variety(M, zeta).contains(w) and segre_variety(M, w).contains(zeta)
        # a point moved off M leaves its own Segre variety too
        off = (zeta[0] + 1,) + tuple(zeta[1:])
        assert M.contains(off) == segre_variety(M, off).contains(off)
        checked += 1

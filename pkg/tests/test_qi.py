from fractions import Fraction

import pytest

from relhyp import groups as grp
from relhyp.complexes import LabeledGraph, bass_serre_hull, coset_ball, relative_ball
from relhyp.qi import check_qi_map, coset_tree_association, eqdef_check, label_classes, lipschitz_orbit_bound


def path(n):
    return LabeledGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return LabeledGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_identity_is_an_isometry():
    g = cycle(7)
    v = check_qi_map(range(7), g, g, 1, 0, 0)
    assert v.passed and v.lower_ok and v.upper_ok and v.density_ok


def test_constant_map_fails_the_lower_bound():
    g = path(6)
    v = check_qi_map([0] * 6, g, g, 1, 0, 0)
    assert v.upper_ok and not v.lower_ok and not v.density_ok
    x, y, d1, d2 = v.lower_witness
    assert d1 == 5 and d2 == 0
    # enough additive slack absorbs a bounded graph
    assert check_qi_map([0] * 6, g, g, 1, 5, 5).passed


def test_folding_a_path_in_half():
    # 0..8 onto 0..4 by i -> min(i, 8 - i): 1-Lipschitz, not a quasi-isometry without slack
    src, dst = path(9), path(5)
    m = [min(i, 8 - i) for i in range(9)]
    assert not check_qi_map(m, src, dst, 1, 0, 0).passed
    assert check_qi_map(m, src, dst, 1, 8, 0).passed


def test_map_validation():
    g = path(3)
    with pytest.raises(ValueError):
        check_qi_map([0, 1], g, g)
    with pytest.raises(ValueError):
        check_qi_map([0, 1, 3], g, g)
    with pytest.raises(ValueError):
        check_qi_map({0: 0, 1: 1}, g, g)
    with pytest.raises(ValueError):
        check_qi_map(range(3), g, g, lam=0)


def test_fractional_constants_are_exact():
    # d2 = 2 d1 on a doubled path: lambda = 2 passes, anything smaller fails
    src = path(4)
    dst = path(7)
    m = [0, 2, 4, 6]
    assert check_qi_map(m, src, dst, 2, 0, 1).passed
    assert not check_qi_map(m, src, dst, Fraction(19, 10), 0, 1).upper_ok


def test_eqdef_z2():
    alpha, iota = eqdef_check(grp.free_abelian(2), ["b"], [{"type": "lattice", "coordinates": [0]}], 2, 4)
    assert alpha.passed and iota.passed
    assert alpha.lam == 2 and alpha.c == Fraction(1, 2) and alpha.epsilon == 1
    assert alpha.extra["checks"] == {"coset_upper": True, "coset_lower": True}
    assert alpha.to_json()["pass"]


def test_eqdef_whole_group_is_degenerate():
    alpha, iota = eqdef_check(grp.free(2), ["a", "b"], [{"type": "whole"}], 1, 1)
    assert alpha.extra["sizes"]["coset"] == 1
    assert alpha.passed and iota.passed


def test_eqdef_needs_a_parabolic():
    with pytest.raises(Exception):
        eqdef_check(grp.free(2), ["a", "b"], [], 2, 2)


def test_lipschitz_identity():
    g = cycle(6)
    rep = lipschitz_orbit_bound(g, g, range(6), inverse=range(6))
    assert rep.M == 1 and rep.M_inverse == 1 and rep.passed
    assert rep.verdict == "quasi-isometry (both directions)"
    assert rep.class_constant


def test_lipschitz_constant_map_fails_backwards():
    g = path(4)
    rep = lipschitz_orbit_bound(g, g, [0] * 4, inverse=[0] * 4)
    assert rep.M == 0 and rep.forward_ok
    assert rep.backward_ok is False
    assert rep.verdict == "not a quasi-isometry"
    assert lipschitz_orbit_bound(g, g, [0] * 4).verdict == "Lipschitz (one direction only)"


def test_label_classes_on_a_coset_graph():
    c = coset_ball(grp.free(2), ["a", "b"], [["a"]], 2, 2)
    classes = label_classes(c)
    assert sum(len(v) for v in classes.values()) == len(c.edges)


def test_coset_ball_vs_tree():
    H = grp.commuting_hnn()
    rel = relative_ball(H, ["t"], [{"type": "base"}], 3, 1, close=False)
    cos = coset_ball(H, ["t"], [{"type": "base"}], 3, 1, relative=rel)
    tree = bass_serre_hull(H, [p.word for p in rel.payloads])
    fwd, back = coset_tree_association(cos, tree)
    assert sorted(back[f] for f in fwd) == list(range(cos.n))
    rep = lipschitz_orbit_bound(cos, tree, fwd, inverse=back)
    assert rep.passed

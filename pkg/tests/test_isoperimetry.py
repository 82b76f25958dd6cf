import random
from fractions import Fraction

import pytest

from relhyp import groups as grp
from relhyp.complexes import GraphError, LabeledGraph, relative_ball
from relhyp.isoperimetry import (
    Chain,
    TruncationError,
    chain_of_cycle,
    cycle_ball,
    cycle_from_word,
    cyclic_reduce_darts,
    dart_word,
    fill_cycle,
    hnn_decompose,
    path_vertices,
    random_hnn_identity,
    reverse_path,
    verify_ip,
)
from relhyp.words import format_word

Z2 = grp.free_abelian(2)
LAT = [{"type": "lattice", "coordinates": [0]}]


def square(n):
    return f"a^{n} b^{n} a^-{n} b^-{n}"


def test_chain_arithmetic():
    c = Chain({0: 1, 1: -1})
    assert c.add(Chain({0: -1, 1: 1})).is_zero()
    assert Chain({0: 0, 2: 3}) == Chain({2: 3})
    assert hash(Chain({1: 2, 5: 0})) == hash(Chain({1: 2}))


def test_darts_and_paths():
    g = LabeledGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    loop = [(0, 1), (1, 1), (2, 1), (3, 1)]
    assert path_vertices(g, loop) == [0, 1, 2, 3, 0]
    assert chain_of_cycle(g, loop) == Chain({0: 1, 1: 1, 2: 1, 3: 1})
    assert chain_of_cycle(g, reverse_path(loop)) == Chain({0: -1, 1: -1, 2: -1, 3: -1})
    assert cyclic_reduce_darts([(0, 1), (1, 1), (1, -1), (0, -1)]) == []
    with pytest.raises(GraphError):
        chain_of_cycle(g, loop[:3])
    with pytest.raises(GraphError):
        path_vertices(g, [(0, 1), (2, 1)])


def test_cycle_from_word_reads_labels():
    g = relative_ball(Z2, ["a", "b"], [], 3, 2)
    darts = cycle_from_word(g, "a b a^-1 b^-1")
    assert len(darts) == 4
    assert " ".join(format_word(dart_word(g, d)) for d in darts) == "a b a^-1 b^-1"
    with pytest.raises(GraphError):
        cycle_from_word(g, "a b")
    with pytest.raises(TruncationError):
        cycle_from_word(g, square(3))


def test_tree_cycles_need_no_pieces():
    g = relative_ball(grp.free(2), ["a", "b"], [], 3, 2)
    rep = fill_cycle(g, cycle_from_word(g, "a b b^-1 a^-1"), 4)
    assert rep.k == 0 and rep.chain_ok


def test_plane_fillings_grow_faster_than_length():
    ratios = []
    for n in (2, 4, 8):
        g = relative_ball(Z2, ["a", "b"], [], 2 * n, 2)
        rep = fill_cycle(g, cycle_from_word(g, square(n)), 4)
        assert rep.chain_ok and rep.unsplittable == 0 and rep.max_diameter <= 4
        ratios.append(Fraction(rep.k, rep.length))
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] > Fraction(1, 4)


def test_relative_fillings_stay_linear():
    for n in (2, 4, 6, 8):
        g = cycle_ball(Z2, ["a", "b"], LAT, square(n), 1, 2)
        rep = fill_cycle(g, cycle_from_word(g, square(n)), 4)
        assert rep.chain_ok and rep.unsplittable == 0 and rep.max_diameter <= 4
        assert rep.k <= Fraction(rep.length, 4)


def test_fill_cycle_rejects_small_M():
    g = relative_ball(Z2, ["a", "b"], [], 2, 2)
    with pytest.raises(ValueError):
        fill_cycle(g, cycle_from_word(g, "a b a^-1 b^-1"), 3)


def test_verify_ip():
    g = cycle_ball(Z2, ["a", "b"], LAT, square(4), 1, 2)
    cycles = [cycle_from_word(g, "a^2 b a^-2 b^-1"), cycle_from_word(g, square(4))]
    rep = verify_ip(g, 4, 1, cycles)
    assert rep.ok and rep.worst_ratio <= 1
    assert not verify_ip(g, 4, 0, cycles[1:]).ok


@pytest.mark.parametrize("make", [grp.commuting_hnn, grp.commutator_hnn, grp.swap_hnn])
def test_hnn_decompose(make):
    G = make()
    X = [G.stable, *G.base.alphabet.names]
    pars = [G.A.spec.to_json(), G.B.spec.to_json()]
    rng = random.Random(5)
    for _ in range(5):
        w = random_hnn_identity(G, rng, max_len=12)
        assert G.is_identity(w)
        g = cycle_ball(G, X, pars, w, 1, 4)
        rep = hnn_decompose(g, cycle_from_word(g, w), 4)
        assert rep.chain_ok and rep.ok
        assert rep.n == w.letters.count((G.t, 1)) + w.letters.count((G.t, -1))
        # conjugating stable letters cancel when the path is cyclically reduced
        assert 2 * len(rep.steps) <= rep.n
        for s in rep.steps:
            assert s["n1"] + s["n2"] + 2 == s["n"]
        assert rep.k <= rep.L * rep.length + rep.n


def test_hnn_decompose_one_step_per_pinch():
    G = grp.commuting_hnn()
    w = "t^-1 a t a^-1 t^-1 a^2 t a^-2"
    g = cycle_ball(G, ["t", "a"], [G.A.spec.to_json(), G.B.spec.to_json()], w, 1, 4)
    rep = hnn_decompose(g, cycle_from_word(g, w), 4)
    assert rep.n == 4 and len(rep.steps) == 2 and rep.ok
    assert [s["n"] for s in rep.steps] == [4, 2]


def test_hnn_decompose_needs_an_extension():
    g = relative_ball(Z2, ["a", "b"], [], 2, 2)
    with pytest.raises(GraphError):
        hnn_decompose(g, cycle_from_word(g, "a b a^-1 b^-1"), 4)

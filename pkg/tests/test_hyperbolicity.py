import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp import groups as grp
from relhyp.complexes import LabeledGraph, relative_ball
from relhyp.hyperbolicity import (
    EXACT_LIMIT,
    DeltaRefused,
    brute_force_delta,
    delta_four_point,
    delta_series,
    delta_slim,
    series_csv,
    trend_verdict,
)


def cycle(n):
    return LabeledGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid(k):
    idx = lambda i, j: i * k + j
    edges = [(idx(i, j), idx(i, j + 1)) for i in range(k) for j in range(k - 1)]
    edges += [(idx(i, j), idx(i + 1, j)) for i in range(k - 1) for j in range(k)]
    return LabeledGraph.from_edges(k * k, edges)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_cycles_match_brute_force(n):
    g = cycle(n)
    rep = delta_four_point(g)
    assert rep.numerator == brute_force_delta(g.distances())


def test_small_cycles():
    assert [delta_four_point(cycle(n)).delta for n in (3, 4, 6, 8, 12)] == [0, 1, 1, 2, 3]


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 11), st.integers(0, 10**6))
def test_random_graphs_match_brute_force(n, seed):
    rng = random.Random(seed)
    edges = [(i, rng.randrange(i)) for i in range(1, n)]
    edges += [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, n))]
    g = LabeledGraph.from_edges(n, [e for e in edges if e[0] != e[1]])
    D = g.distances()
    exact = delta_four_point(g)
    assert exact.numerator == brute_force_delta(D)
    based = delta_four_point(g, "basepoint")
    assert based.numerator <= exact.numerator <= 2 * based.numerator


def test_trees_have_delta_zero():
    g = relative_ball(grp.free(2), ["a", "b"], [], 3, 2)
    assert delta_four_point(g).numerator == 0
    assert delta_slim(g).numerator == 0


def test_grids_grow():
    vals = [delta_four_point(grid(k)).delta for k in (3, 5, 7)]
    assert vals[0] < vals[1] < vals[2]


def test_refusal_above_the_exact_limit():
    g = cycle(EXACT_LIMIT + 1)
    with pytest.raises(DeltaRefused):
        delta_four_point(g)
    assert delta_four_point(g, "basepoint").n_vertices == EXACT_LIMIT + 1
    with pytest.raises(ValueError):
        delta_four_point(cycle(5), "sampled")


def test_slim_triangles_on_cycles():
    rep = delta_slim(cycle(9))
    assert rep.exhaustive
    assert rep.numerator > 0
    assert delta_slim(LabeledGraph.from_edges(2, [(0, 1)])).numerator == 0


def test_trend_verdict():
    assert trend_verdict([1, 1, 1]) == "bounded"
    assert trend_verdict([0, 1, 2, 2, 2]) == "bounded"
    assert trend_verdict([1, 2, 3]) == "growing"
    assert trend_verdict([1, 2, 2]) == "inconclusive"
    assert trend_verdict([1, 2]) == "inconclusive"


def test_series_and_csv():
    s = delta_series(cycle, [4, 8, 12], label="cycles")
    assert s.verdict == "growing"
    text = series_csv([s], seed=3)
    assert text.splitlines()[0].startswith("series") or "radius" in text.splitlines()[0]
    assert len(text.strip().splitlines()) == 4
    with pytest.raises(ValueError):
        delta_series(cycle, [6, 4])


def test_report_json():
    d = delta_four_point(cycle(6)).to_json()
    assert d["delta"] == "1" and d["method"] == "four-point-exact"

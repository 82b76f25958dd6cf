"""Linear isoperimetric checks for closed paths in finite graphs.

A path is a list of darts ``(edge index, sign)``; sign +1 walks the edge
from ``e.u`` to ``e.v``.  A 1-chain is a ``Chain`` mapping edge indices to
integer coefficients, so reversing a dart negates its contribution.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complexes import GraphError, LabeledGraph
from .groups import HNNExtension
from .words import Word, format_word, inverse, parse_word, product

Dart = tuple[int, int]


class TruncationError(RuntimeError):
    """A witness edge needed by the decomposition is missing from the finite ball."""


class Chain(Counter):
    """Integer 1-chain on the edges of a graph; zero coefficients are dropped."""

    def add(self, other: "Chain") -> "Chain":
        out = Chain(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return out.normalized()

    def normalized(self) -> "Chain":
        return Chain({k: v for k, v in self.items() if v})

    def __eq__(self, other):
        return dict(self.normalized()) == dict(Chain(other).normalized())

    def __hash__(self):
        return hash(frozenset(self.normalized().items()))

    def is_zero(self) -> bool:
        return not self.normalized()


# --------------------------------------------------------------------------
# darts and paths


def dart_ends(g: LabeledGraph, d: Dart) -> tuple[int, int]:
    e = g.edges[d[0]]
    return (e.u, e.v) if d[1] > 0 else (e.v, e.u)


def path_vertices(g: LabeledGraph, darts: Sequence[Dart]) -> list[int]:
    """Vertices visited, starting vertex first (a closed path repeats it at the end)."""
    if not darts:
        return []
    out = [dart_ends(g, darts[0])[0]]
    for d in darts:
        a, b = dart_ends(g, d)
        if a != out[-1]:
            raise GraphError("darts do not form a path")
        out.append(b)
    return out


def is_closed(g: LabeledGraph, darts: Sequence[Dart]) -> bool:
    if not darts:
        return True
    vs = path_vertices(g, darts)
    return vs[0] == vs[-1]


def chain_of_cycle(g: LabeledGraph, darts: Sequence[Dart]) -> Chain:
    if not is_closed(g, darts):
        raise GraphError("path is not closed")
    c = Chain()
    for k, s in darts:
        c[k] = c.get(k, 0) + s
    return c.normalized()


def reverse_path(darts: Sequence[Dart]) -> list[Dart]:
    return [(k, -s) for k, s in reversed(darts)]


def cyclic_reduce_darts(darts: Sequence[Dart]) -> list[Dart]:
    """Cancel backtracking ``e e^-1``, including across the wrap-around."""
    out: list[Dart] = []
    for d in darts:
        if out and out[-1] == (d[0], -d[1]):
            out.pop()
        else:
            out.append(d)
    i, j = 0, len(out) - 1
    while i < j and out[i] == (out[j][0], -out[j][1]):
        i += 1
        j -= 1
    return out[i : j + 1]


def _edge_lookup(g: LabeledGraph) -> dict[tuple[int, int], list[int]]:
    table: dict[tuple[int, int], list[int]] = {}
    for k, e in enumerate(g.edges):
        table.setdefault((e.u, e.v), []).append(k)
        table.setdefault((e.v, e.u), []).append(k)
    return table


def _dart_between(g: LabeledGraph, u: int, v: int, table=None) -> Dart:
    table = table if table is not None else _edge_lookup(g)
    ks = table.get((u, v))
    if not ks:
        raise GraphError(f"no edge between {u} and {v}")
    k = min(ks, key=lambda k: (g.edges[k].length, k))
    return (k, 1 if g.edges[k].u == u else -1)


def geodesic_darts(g: LabeledGraph, u: int, v: int, table=None) -> list[Dart]:
    vs = g.geodesic(u, v)
    table = table if table is not None else _edge_lookup(g)
    return [_dart_between(g, a, b, table) for a, b in zip(vs, vs[1:])]


def dart_word(g: LabeledGraph, d: Dart) -> Word:
    """Group element labelling a dart of a relative ball."""
    G = g.context["group"]
    lab = g.edges[d[0]].label
    if lab.kind == "gen":
        w = parse_word(lab.data[0], G.alphabet)
    elif lab.kind == "par":
        w = parse_word(lab.data[1], G.alphabet)
    else:
        raise GraphError(f"edge kind {lab.kind!r} carries no group label")
    return w if d[1] > 0 else inverse(w)


def cycle_from_word(g: LabeledGraph, w: Word | str, start: int = 0) -> list[Dart]:
    """Closed path in a Cayley-type ball reading ``w`` one generator edge per letter."""
    G = g.context["group"]
    if isinstance(w, str):
        w = parse_word(w, G.alphabet)
    table = _edge_lookup(g)
    gen_edges: dict[tuple[int, str], Dart] = {}
    for k, e in enumerate(g.edges):
        if e.label.kind == "gen":
            x = parse_word(e.label.data[0], G.alphabet)
            gen_edges[(e.u, format_word(x))] = (k, 1)
            gen_edges[(e.v, format_word(inverse(x)))] = (k, -1)
    out: list[Dart] = []
    u = start
    cur = g.payloads[start].word
    for l in w.letters:
        x = Word(G.alphabet, (l,), reduced=True)
        cur = product(cur, x)
        v = g.index.get(G.key(cur))
        if v is None:
            raise TruncationError(f"reading {format_word(w)} leaves the ball")
        d = gen_edges.get((u, format_word(x)))
        if d is None or dart_ends(g, d)[1] != v:
            d = _dart_between(g, u, v, table)
        out.append(d)
        u = v
    if u != start:
        raise GraphError(f"{format_word(w)} does not label a closed path")
    return out


def cycle_ball(G, X, parabolics, w: Word | str, r: int = 1, R_H: int = 2, **kw) -> LabeledGraph:
    """Relative ball of radius ``r`` about every vertex of the closed path read from ``w`` at 1."""
    from .complexes import relative_ball

    if isinstance(w, str):
        w = parse_word(w, G.alphabet)
    seeds = [Word(G.alphabet, w.letters[:i]) for i in range(1, len(w))]
    g = relative_ball(G, X, parabolics, r, R_H, seeds=seeds, **kw)
    g.meta["kind"] = "cycle-neighbourhood"
    return g


# --------------------------------------------------------------------------
# bounded-diameter fillings


@dataclass
class DecompositionReport:
    pieces: list[list[Dart]]
    k: int
    n: int
    length: int
    M: int
    scale: int
    max_diameter: int
    chain_ok: bool
    bound_ok: bool
    unsplittable: int = 0
    L: Fraction | None = None
    steps: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.chain_ok and self.bound_ok and self.unsplittable == 0 and self.max_diameter <= self.M

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "l": self.length,
            "M": self.M,
            "scale": self.scale,
            "max_piece_diameter": self.max_diameter,
            "chain_ok": self.chain_ok,
            "bound_ok": self.bound_ok,
            "unsplittable": self.unsplittable,
            "L": None if self.L is None else str(self.L),
            "pieces": [{"darts": [list(d) for d in p], "length": len(p)} for p in self.pieces],
            "steps": self.steps,
        }


def _split_cycles(g: LabeledGraph, darts: list[Dart], M: int, table) -> tuple[list[list[Dart]], int]:
    """Chord splitting; returns (pieces, number of pieces left too wide)."""
    D = g.distances()
    pieces: list[list[Dart]] = []
    stuck = 0
    stack = [darts]
    while stack:
        c = cyclic_reduce_darts(stack.pop())
        if not c:
            continue
        vs = path_vertices(g, c)[:-1]
        idx = np.asarray(vs)
        if D[np.ix_(idx, idx)].max() <= M:
            pieces.append(c)
            continue
        pre = [0]
        for k, _ in c:
            pre.append(pre[-1] + g.edges[k].length)
        total = pre[-1]
        best = None
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                a1 = pre[j] - pre[i]
                a2 = total - a1
                d = int(D[vs[i], vs[j]])
                if d >= a1 or d >= a2:
                    continue
                far = 0 if min(a1, a2) * 2 >= M else 1
                key = (far, max(a1, a2) + d, d, min(vs[i], vs[j]), max(vs[i], vs[j]), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            pieces.append(c)
            stuck += 1
            continue
        i, j = best[-2], best[-1]
        chord = geodesic_darts(g, vs[i], vs[j], table)
        stack.append(chord + c[j:] + c[:i])
        stack.append(c[i:j] + reverse_path(chord))
    return pieces, stuck


def _report(g, darts, pieces, stuck, M, n=0, L=None, bound=None, steps=None) -> DecompositionReport:
    D = g.distances()
    total = Chain()
    widest = 0
    for p in pieces:
        total = total.add(chain_of_cycle(g, p))
        idx = np.asarray(path_vertices(g, p)[:-1])
        widest = max(widest, int(D[np.ix_(idx, idx)].max()))
    chain_ok = total == chain_of_cycle(g, darts)
    k = len(pieces)
    if bound is None:
        bound = True if L is None else k <= L * len(darts) + n
    return DecompositionReport(
        pieces, k, n, len(darts), M, g.scale, widest, chain_ok, bound, stuck, L, steps or []
    )


def fill_cycle(g: LabeledGraph, darts: Sequence[Dart], M: int) -> DecompositionReport:
    """Write a cycle as a sum of cycles of diameter at most ``M`` (scaled units).

    Pieces wider than ``M`` with no shortcutting chord are kept and counted
    in ``unsplittable``.
    """
    if M < 4 * g.scale:
        raise ValueError("M must be at least 4 (in true length units)")
    darts = list(darts)
    chain_of_cycle(g, darts)
    pieces, stuck = _split_cycles(g, darts, M, _edge_lookup(g))
    rep = _report(g, darts, pieces, stuck, M)
    rep.L = Fraction(rep.k, rep.length) if rep.length else Fraction(0)
    return rep


@dataclass
class IPReport:
    M: int
    L: Fraction
    rows: list[dict]

    @property
    def worst_ratio(self) -> Fraction:
        return max((Fraction(r["k"], r["l"]) for r in self.rows if r["l"]), default=Fraction(0))

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.rows)

    def to_json(self) -> dict:
        return {"M": self.M, "L": str(self.L), "worst_ratio": str(self.worst_ratio), "ok": self.ok, "cycles": self.rows}


def verify_ip(g: LabeledGraph, M: int, L, cycles: Sequence[Sequence[Dart]]) -> IPReport:
    """Check ``k <= L * l`` for bounded-diameter fillings of each cycle."""
    L = Fraction(L)
    rows = []
    for i, c in enumerate(cycles):
        rep = fill_cycle(g, c, M)
        ok = rep.chain_ok and rep.unsplittable == 0 and rep.k <= L * rep.length
        rows.append({"cycle": i, "k": rep.k, "l": rep.length, "max_diameter": rep.max_diameter, "ok": ok})
    return IPReport(M, L, rows)


# --------------------------------------------------------------------------
# HNN pinch decomposition


def _pinch_in_cycle(G: HNNExtension, g: LabeledGraph, darts: list[Dart]):
    """Leftmost innermost pinch along the label of a closed path, as dart positions."""
    words = [dart_word(g, d) for d in darts]
    tpos = []
    for i, w in enumerate(words):
        ts = [s for x, s in w.letters if x == G.t]
        if len(ts) > 1 or (ts and len(w) != 1):
            raise GraphError("parabolic edges must be labelled by base elements")
        if ts:
            tpos.append((i, ts[0]))
    for (i, e1), (j, e2) in zip(tpos, tpos[1:]):
        if e1 == e2:
            continue
        letters: list = []
        for w in words[i + 1 : j]:
            letters.extend(w.letters)
        middle = Word(G.base.alphabet, letters)
        if e1 < 0 and G.A.contains(middle):
            return i, j, "A", middle
        if e1 > 0 and G.B.contains(middle):
            return i, j, "B", middle
    return None, tpos


def hnn_decompose(
    g: LabeledGraph, darts: Sequence[Dart], M: int, *, a_index: int = 0, b_index: int = 1
) -> DecompositionReport:
    """Pinch-by-pinch decomposition of a cycle in a relative ball of an HNN extension.

    ``g`` must be a relative ball over ``{t} u Y`` with parabolics listing the
    associated subgroups ``A`` and ``B`` (at ``a_index`` and ``b_index``).  A
    pinch ``t^-1 v t`` (or ``t u t^-1``) splits the cycle into the cycle with
    the pinch replaced by one parabolic edge ``e``, the square ``e^-1 y1 f y2``
    and the cycle ``f^-1 v``.  Cycles without stable letters are handed to
    :func:`fill_cycle`.  The bound checked is ``k <= L l + n`` where ``L`` is
    the worst ratio observed in those base fillings.
    """
    G = g.context.get("group")
    if not isinstance(G, HNNExtension):
        raise GraphError("hnn_decompose needs a relative ball of an HNN extension")
    if M < 4 * g.scale:
        raise ValueError("M must be at least 4 (in true length units)")
    darts = list(darts)
    chain_of_cycle(g, darts)
    table = _edge_lookup(g)
    par_edges: dict[tuple[int, int, int], Dart] = {}
    for k, e in enumerate(g.edges):
        if e.label.kind == "par":
            par_edges.setdefault((e.label.data[0], e.u, e.v), (k, 1))
            par_edges.setdefault((e.label.data[0], e.v, e.u), (k, -1))

    def par_dart(i, u, v):
        if u == v:
            return []
        d = par_edges.get((i, u, v))
        if d is None:
            raise TruncationError(f"parabolic edge {u} -- {v} is not in the ball; enlarge r or R_H")
        return [d]

    pieces: list[list[Dart]] = []
    stuck = 0
    steps: list[dict] = []
    L = Fraction(0)
    n_total = sum(1 for d in darts for x, _ in dart_word(g, d).letters if x == G.t)

    def rec(c: list[Dart]):
        nonlocal stuck, L
        c = cyclic_reduce_darts(c)
        if not c:
            return
        found = _pinch_in_cycle(G, g, c)
        if found[0] is None:
            if found[1]:
                raise GraphError("closed path with stable letters but no pinch; labels are inconsistent")
            ps, s = _split_cycles(g, c, M, table)
            pieces.extend(ps)
            stuck += s
            L = max(L, Fraction(len(ps), len(c)))
            return
        i, j, side, _ = found
        q1, y1, v, y2, q2 = c[:i], c[i], c[i + 1 : j], c[j], c[j + 1 :]
        P, Q = dart_ends(g, y1)
        R, S = dart_ends(g, y2)
        # e joins the ends of y1 v y2; f joins the ends of v
        e = par_dart(b_index if side == "A" else a_index, P, S)
        f = par_dart(a_index if side == "A" else b_index, Q, R)
        outer = q1 + e + q2
        square = reverse_path(e) + [y1] + f + [y2]
        inner = reverse_path(f) + v
        n = sum(1 for d in c if g.edges[d[0]].label.kind == "gen" and dart_word(g, d).letters[0][0] == G.t)
        n1 = sum(1 for d in outer if g.edges[d[0]].label.kind == "gen" and dart_word(g, d).letters[0][0] == G.t)
        n2 = sum(1 for d in inner if g.edges[d[0]].label.kind == "gen" and dart_word(g, d).letters[0][0] == G.t)
        if n1 + n2 + 2 != n:
            raise AssertionError("stable letter count not preserved by the pinch split")
        steps.append({"side": side, "n": n, "n1": n1, "n2": n2, "l": len(c)})
        rec(outer)
        sq = cyclic_reduce_darts(square)
        if sq:
            pieces.append(sq)
        rec(inner)

    rec(darts)
    rep = _report(g, darts, pieces, stuck, M, n=n_total, L=L)
    rep.steps = steps
    return rep


def random_hnn_identity(G: HNNExtension, rng, *, max_t: int = 4, max_len: int = 16, tries: int = 10_000) -> Word:
    """Random nontrivial word equal to 1: a product of conjugated relators ``t^-1 a t phi(a)^-1``."""
    from .groups import CommutatorKernel
    from .words import random_word

    base = G.base
    BA = base.alphabet
    gens = [Word(BA, ((i, 1),), reduced=True) for i in range(len(BA))]

    def element_of_A() -> Word:
        if isinstance(G.A, CommutatorKernel):
            i, j = rng.sample(range(len(gens)), 2)
            x, y = gens[i] ** rng.choice((1, -1)), gens[j] ** rng.choice((1, -1))
            return base.normal_word(x * y * ~x * ~y)
        A = G.A.generator_list()
        w = A[rng.randrange(len(A))] ** rng.choice((1, -1, 2))
        return base.normal_word(w)

    t = Word(G.alphabet, ((G.t, 1),), reduced=True)
    for _ in range(tries):
        out = Word(G.alphabet, ())
        for _ in range(rng.choice((1, 1, 2))):
            a = element_of_A()
            rel = ~t * G.from_base(a) * t * ~G.from_base(G.phi_apply(a, 1))
            u = random_word(G.alphabet, rng.randrange(0, 3), rng)
            out = out * u * rel * ~u
        n = G.t_count(out)
        if 0 < n <= max_t and 0 < len(out) <= max_len:
            assert G.is_identity(out)
            return out
    raise RuntimeError("no identity word found within the limits")

"""Finite balls in relative Cayley graphs, left coset graphs, coned-off
Cayley graphs and Bass-Serre trees.

Every graph is a :class:`LabeledGraph` with positive integer edge lengths.
True lengths are ``length / scale``; the coned-off graph uses ``scale = 2``
so that its half-length cone edges stay integral.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .groups import Amalgam, Group, HNNExtension, Subgroup, SubgroupSpec
from .words import Word, format_word, identity, inverse, parse_word, product

DEFAULT_BUDGET = 200_000


class BudgetExceeded(RuntimeError):
    pass


class GraphError(ValueError):
    pass


def vertex_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get("RELHYP_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class CosetVertex:
    index: int
    rep: Word

    def __str__(self):
        return f"{format_word(self.rep)}.H{self.index + 1}"


@dataclass(frozen=True)
class ConeVertex:
    index: int
    rep: Word

    def __str__(self):
        return f"v({format_word(self.rep)}.H{self.index + 1})"


@dataclass(frozen=True)
class TreeVertex:
    side: str
    rep: Word

    def __str__(self):
        return f"{format_word(self.rep)}.{self.side}"


@dataclass(frozen=True)
class EdgeLabel:
    """``kind`` is one of gen, par, coset, cone, tree, plain."""

    kind: str
    data: tuple = ()

    def __str__(self):
        if self.kind == "gen":
            return self.data[0]
        if self.kind == "par":
            return f"H{self.data[0] + 1}:{self.data[1]}"
        if self.kind == "coset":
            i, j, x = self.data
            return f"({i + 1},{j + 1},{x})"
        if self.kind == "cone":
            return f"cone{self.data[0] + 1}"
        if self.kind == "tree":
            return str(self.data[0]) if self.data else "tree"
        return str(self.data[0]) if self.data else ""


class Edge(NamedTuple):
    u: int
    v: int
    label: EdgeLabel
    length: int = 1
    witness: tuple | None = None


class LabeledGraph:
    def __init__(self, scale: int = 1, meta: dict | None = None, budget: int | None = None):
        self.payloads: list[Any] = []
        self.keys: list[Hashable] = []
        self.index: dict[Hashable, int] = {}
        self.edges: list[Edge] = []
        self._edge_seen: set = set()
        self.scale = scale
        self.meta = dict(meta or {})
        self.budget = vertex_budget(budget)
        self.context: dict = {}
        self._dist: np.ndarray | None = None
        self._adj: list[list[tuple[int, int, int]]] | None = None

    # construction ---------------------------------------------------------

    def __len__(self):
        return len(self.payloads)

    @property
    def n(self) -> int:
        return len(self.payloads)

    def add_vertex(self, key: Hashable, payload: Any) -> tuple[int, bool]:
        idx = self.index.get(key)
        if idx is not None:
            return idx, False
        if len(self.payloads) >= self.budget:
            raise BudgetExceeded(f"vertex budget {self.budget} exceeded (set RELHYP_BUDGET to raise it)")
        idx = len(self.payloads)
        self.index[key] = idx
        self.keys.append(key)
        self.payloads.append(payload)
        self._invalidate()
        return idx, True

    def add_edge(self, u: int, v: int, label: EdgeLabel, length: int = 1, witness=None, dedup_key=None) -> bool:
        if length < 1:
            raise GraphError("edge lengths must be positive integers")
        if u == v:
            return False
        k = dedup_key if dedup_key is not None else (u, v, label)
        if k in self._edge_seen:
            return False
        self._edge_seen.add(k)
        self.edges.append(Edge(u, v, label, length, witness))
        self._invalidate()
        return True

    def _invalidate(self):
        self._dist = None
        self._adj = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], scale: int = 1, lengths=None) -> "LabeledGraph":
        g = cls(scale=scale, meta={"kind": "plain"})
        for i in range(n):
            g.add_vertex(i, i)
        for k, (u, v) in enumerate(edges):
            g.add_edge(u, v, EdgeLabel("plain"), 1 if lengths is None else lengths[k])
        return g

    # metric ---------------------------------------------------------------

    def adjacency(self) -> list[list[tuple[int, int, int]]]:
        """``adj[u]`` lists ``(v, length, edge index)`` in both directions."""
        if self._adj is None:
            adj: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n)]
            for k, e in enumerate(self.edges):
                adj[e.u].append((e.v, e.length, k))
                adj[e.v].append((e.u, e.length, k))
            for lst in adj:
                lst.sort()
            self._adj = adj
        return self._adj

    def distances(self) -> np.ndarray:
        """All-pairs shortest path lengths in scaled integer units."""
        if self._dist is None:
            n = self.n
            if n == 0:
                raise GraphError("empty graph")
            best: dict[tuple[int, int], int] = {}
            for e in self.edges:
                a, b = (e.u, e.v) if e.u < e.v else (e.v, e.u)
                if best.get((a, b), e.length + 1) > e.length:
                    best[(a, b)] = e.length
            if best:
                rows, cols = zip(*best)
                data = list(best.values())
            else:
                rows, cols, data = (), (), ()
            m = csr_matrix((np.asarray(data, float), (np.asarray(rows, int), np.asarray(cols, int))), shape=(n, n))
            unweighted = all(x == 1 for x in data)
            D = shortest_path(m, method="D", directed=False, unweighted=unweighted)
            if np.isinf(D).any():
                raise GraphError("graph is disconnected")
            self._dist = np.rint(D).astype(np.int64)
        return self._dist

    def distance(self, u: int, v: int) -> int:
        return int(self.distances()[u, v])

    def true_distance(self, u: int, v: int):
        from fractions import Fraction

        return Fraction(self.distance(u, v), self.scale)

    def geodesic(self, u: int, v: int) -> list[int]:
        D = self.distances()
        adj = self.adjacency()
        path = [u]
        while path[-1] != v:
            x = path[-1]
            for y, length, _ in adj[x]:
                if length + D[y, v] == D[x, v]:
                    path.append(y)
                    break
            else:
                raise GraphError("no geodesic step found")
        return path

    def all_geodesics(self, u: int, v: int, cap: int = 64) -> tuple[list[list[int]], bool]:
        """Every geodesic vertex path from u to v, up to ``cap``; second item is True when truncated."""
        D = self.distances()
        adj = self.adjacency()
        out: list[list[int]] = []
        truncated = False
        stack = [[u]]
        while stack:
            path = stack.pop()
            x = path[-1]
            if x == v:
                if len(out) >= cap:
                    truncated = True
                    break
                out.append(path)
                continue
            nxt = []
            for y, length, _ in adj[x]:
                if length + D[y, v] == D[x, v] and (not nxt or nxt[-1] != y):
                    nxt.append(y)
            for y in reversed(nxt):
                stack.append(path + [y])
        return out, truncated

    def diameter(self, vertices: Sequence[int] | None = None) -> int:
        D = self.distances()
        if vertices is None:
            return int(D.max())
        idx = np.asarray(sorted(set(vertices)), int)
        return int(D[np.ix_(idx, idx)].max())

    # structure checks -----------------------------------------------------

    def simple_edges(self) -> set[tuple[int, int]]:
        return {(min(e.u, e.v), max(e.u, e.v)) for e in self.edges}

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        q = deque([0])
        adj = self.adjacency()
        while q:
            x = q.popleft()
            for y, _, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        return len(seen) == self.n

    def is_acyclic(self) -> bool:
        """True when the underlying simple graph is a tree (orientations and parallel labels ignored)."""
        return self.is_connected() and len(self.simple_edges()) == self.n - 1

    def is_bipartite(self) -> bool:
        colour = [-1] * self.n
        adj = self.adjacency()
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            colour[s] = 0
            q = deque([s])
            while q:
                x = q.popleft()
                for y, _, _ in adj[x]:
                    if colour[y] < 0:
                        colour[y] = 1 - colour[x]
                        q.append(y)
                    elif colour[y] == colour[x]:
                        return False
        return True

    # export -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": i, "payload": str(p)} for i, p in enumerate(self.payloads)],
            "edges": [{"from": e.u, "to": e.v, "label": str(e.label), "length": e.length} for e in self.edges],
            "meta": {
                "r": self.meta.get("r"),
                "R_H": self.meta.get("R_H"),
                "scale": self.scale,
                "exact": self.meta.get("exact"),
                **{k: v for k, v in self.meta.items() if k not in ("r", "R_H", "exact")},
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "LabeledGraph":
        meta = dict(data.get("meta", {}))
        g = cls(scale=int(meta.pop("scale", 1) or 1), meta=meta)
        for v in data["vertices"]:
            g.add_vertex(v["id"], v.get("payload", v["id"]))
        for e in data["edges"]:
            g.add_edge(g.index[e["from"]], g.index[e["to"]], EdgeLabel("plain", (e.get("label", ""),)), int(e.get("length", 1)))
        return g

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for i, p in enumerate(self.payloads):
            lines.append(f'  {i} [label={json.dumps(str(p))}];')
        for e in self.edges:
            extra = f", len={e.length / self.scale:g}" if e.length != self.scale else ""
            lines.append(f'  {e.u} -- {e.v} [label={json.dumps(str(e.label))}{extra}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# helpers


def _generator_words(G: Group, X) -> list[Word]:
    out = []
    for x in X:
        w = x if isinstance(x, Word) else parse_word(x, G.alphabet)
        for y in (w, inverse(w)):
            if y not in out and not y.is_empty():
                out.append(y)
    return out


def _bind(G: Group, parabolics) -> list[Subgroup]:
    out = []
    for p in parabolics or ():
        if isinstance(p, Subgroup):
            out.append(p)
        else:
            spec = p if isinstance(p, SubgroupSpec) else SubgroupSpec.from_json(p)
            out.append(G.subgroup(spec))
    return out


# --------------------------------------------------------------------------
# relative Cayley graph


def relative_ball(
    G: Group,
    X,
    parabolics=(),
    r: int = 2,
    R_H: int = 2,
    *,
    close: bool = True,
    check_exact: bool = False,
    budget: int | None = None,
    seeds: Sequence[Word] = (),
) -> LabeledGraph:
    """Ball of radius ``r`` about 1 (and about every element of ``seeds``) in the Cayley graph over ``X u H_1 u ... u H_m``.

    Discovery uses parabolic elements of length at most ``R_H``.  With
    ``close=True`` every pair of discovered vertices in a common coset
    ``gH_i`` is then joined by its parabolic edge, so the result is the
    induced subgraph of the relative Cayley graph on the discovered set.
    """
    if r < 0 or R_H < 0:
        raise GraphError("r and R_H must be non-negative")
    pars = _bind(G, parabolics)
    gens = _generator_words(G, X)
    g = LabeledGraph(scale=1, meta={"kind": "relative", "r": r, "R_H": R_H, "closed": close}, budget=budget)
    g.context = {"group": G, "X": gens, "parabolics": pars}
    start = G.normal_form(G.identity_word())
    g.add_vertex(start.key, start)
    depth = [0]
    for w in seeds:
        el = G.normal_form(w)
        if g.add_vertex(el.key, el)[1]:
            depth.append(0)
    steps: list[tuple[Word, EdgeLabel]] = [(x, EdgeLabel("gen", (format_word(x),))) for x in gens]
    for i, P in enumerate(pars):
        for h in P.elements(R_H):
            steps.append((h, EdgeLabel("par", (i, format_word(h)))))
    q = deque(range(g.n))
    while q:
        u = q.popleft()
        if depth[u] >= r:
            continue
        w = g.payloads[u].word
        for h, _ in steps:
            el = G.normal_form(product(w, h))
            v, new = g.add_vertex(el.key, el)
            if new:
                depth.append(depth[u] + 1)
                q.append(v)
    g.meta["depth"] = depth
    _add_relative_edges(g, G, gens, pars, steps, close)
    if check_exact:
        g.meta["exact"] = _stable_under(
            g, lambda: relative_ball(G, X, pars, r, R_H + 2, close=close, budget=budget, seeds=seeds)
        )
    return g


def _add_relative_edges(g: LabeledGraph, G, gens, pars, steps, close):
    for u in range(g.n):
        w = g.payloads[u].word
        for x in gens:
            v = g.index.get(G.key(product(w, x)))
            if v is not None:
                a, b = (u, v) if u < v else (v, u)
                lab = format_word(x) if u < v else format_word(inverse(x))
                g.add_edge(a, b, EdgeLabel("gen", (lab,)), 1, dedup_key=("gen", a, b, lab))
    if close:
        for i, P in enumerate(pars):
            buckets: dict = {}
            for u in range(g.n):
                buckets.setdefault(P.coset_key(g.payloads[u].word), []).append(u)
            for members in buckets.values():
                for x in range(len(members)):
                    for y in range(x + 1, len(members)):
                        a, b = members[x], members[y]
                        h = G.normal_word(product(inverse(g.payloads[a].word), g.payloads[b].word))
                        g.add_edge(a, b, EdgeLabel("par", (i, format_word(h))), 1, dedup_key=("par", i, a, b))
    else:
        for u in range(g.n):
            w = g.payloads[u].word
            for h, lab in steps:
                if lab.kind != "par":
                    continue
                v = g.index.get(G.key(product(w, h)))
                if v is not None and v != u:
                    if u > v:
                        u2, v2 = v, u
                        lab = EdgeLabel("par", (lab.data[0], format_word(inverse(h))))
                    else:
                        u2, v2 = u, v
                    g.add_edge(u2, v2, lab, 1, dedup_key=("par", lab.data[0], u2, v2))


def _stable_under(g: LabeledGraph, rebuild) -> bool:
    bigger = rebuild()
    ids = [bigger.index[k] for k in g.keys]
    D1 = g.distances()
    D2 = bigger.distances()[np.ix_(ids, ids)]
    return bool((D1 == D2).all())


# --------------------------------------------------------------------------
# left coset graph


def coset_ball(
    G: Group, X, parabolics, r: int = 2, R_H: int = 2, *, check_exact: bool = False, budget: int | None = None,
    relative: LabeledGraph | None = None,
) -> LabeledGraph:
    """Left coset graph spanned by the elements of the relative ball.

    Vertices are the cosets ``gH_i`` with ``g`` in the relative ball; an edge
    ``fH_i -> gH_j`` labelled ``(i, j, x)`` is added for every witness pair
    ``a``, ``b = a x`` of ball elements with ``x`` in ``X u X^-1 u {1}``.
    Self-loops are dropped.
    """
    pars = _bind(G, parabolics)
    if not pars:
        raise GraphError("the coset graph needs at least one parabolic subgroup")
    # only the element set is used, so skip the parabolic closure
    rel = relative or relative_ball(G, X, pars, r, R_H, close=False, budget=budget)
    gens = _generator_words(G, X)
    g = LabeledGraph(scale=1, meta={"kind": "coset", "r": r, "R_H": R_H}, budget=budget)
    g.context = {"group": G, "X": gens, "parabolics": pars, "relative": rel}
    cosets: list[list[int]] = []
    for u in range(rel.n):
        w = rel.payloads[u].word
        row = []
        for i, P in enumerate(pars):
            key, rep = P.coset(w)
            v, _ = g.add_vertex((i, key), CosetVertex(i, rep))
            row.append(v)
        cosets.append(row)
    ident = G.identity_word()
    moves = [(ident, "1")] + [(x, format_word(x)) for x in gens]
    for u in range(rel.n):
        a = rel.payloads[u].word
        for x, xs in moves:
            b_id = u if x.is_empty() else rel.index.get(G.key(product(a, x)))
            if b_id is None:
                continue
            b = rel.payloads[b_id].word
            for i in range(len(pars)):
                for j in range(len(pars)):
                    cu, cv = cosets[u][i], cosets[b_id][j]
                    if cu != cv:
                        g.add_edge(cu, cv, EdgeLabel("coset", (i, j, xs)), 1, witness=(a, b))
    if check_exact:
        g.meta["exact"] = _stable_under(g, lambda: coset_ball(G, X, pars, r, R_H + 2, budget=budget))
    return g


def edge_orbit_witness(g: LabeledGraph, e: int, f: int) -> Word:
    """Return ``w = a2 a1^-1`` carrying coset edge ``e`` onto ``f``, after verifying it."""
    E, F = g.edges[e], g.edges[f]
    if E.label != F.label:
        raise GraphError(f"labels differ: {E.label} vs {F.label}")
    G: Group = g.context["group"]
    pars: list[Subgroup] = g.context["parabolics"]
    a1, _ = E.witness
    a2, _ = F.witness
    w = G.normal_word(product(a2, inverse(a1)))
    i, j, _ = E.label.data
    for src, dst, k in ((E.u, F.u, i), (E.v, F.v, j)):
        moved = pars[k].coset_key(product(w, g.payloads[src].rep))
        if (k, moved) != g.keys[dst]:
            raise GraphError(f"witness {format_word(w)} does not carry edge {e} onto edge {f}")
    return w


# --------------------------------------------------------------------------
# coned-off Cayley graph


def coned_off_ball(
    G: Group, X, parabolics, r: int = 2, R_H: int = 2, *, budget: int | None = None,
    relative: LabeledGraph | None = None,
) -> LabeledGraph:
    """Cayley graph on the relative-ball elements plus one cone point per coset met.

    Scale 2: generator edges have length 2 and cone edges length 1.
    """
    pars = _bind(G, parabolics)
    rel = relative or relative_ball(G, X, pars, r, R_H, close=False, budget=budget)
    gens = _generator_words(G, X)
    g = LabeledGraph(scale=2, meta={"kind": "coned", "r": r, "R_H": R_H}, budget=budget)
    g.context = {"group": G, "X": gens, "parabolics": pars, "relative": rel}
    for u in range(rel.n):
        g.add_vertex(("el", rel.keys[u]), rel.payloads[u])
    for e in rel.edges:
        if e.label.kind == "gen":
            g.add_edge(e.u, e.v, e.label, 2)
    for u in range(rel.n):
        w = rel.payloads[u].word
        for i, P in enumerate(pars):
            key, rep = P.coset(w)
            c, _ = g.add_vertex(("cone", i, key), ConeVertex(i, rep))
            g.add_edge(u, c, EdgeLabel("cone", (i,)), 1)
    return g


# --------------------------------------------------------------------------
# Bass-Serre tree


def bass_serre_ball(G: Group, r: int = 2, R_H: int = 2, *, budget: int | None = None) -> LabeledGraph:
    """Ball about the base vertex of the Bass-Serre tree.

    Vertex cosets are reached through base elements of length at most
    ``R_H``; neighbours of ``gH`` are ``g h t^{+-1} H`` (HNN) or ``g h K``
    / ``g k H`` (amalgam).
    """
    if r < 0:
        raise GraphError("r must be non-negative")
    g = LabeledGraph(scale=1, meta={"kind": "bass-serre", "r": r, "R_H": R_H}, budget=budget)
    g.context = {"group": G}
    if isinstance(G, HNNExtension):
        P = G.subgroup(SubgroupSpec("base"))
        spread = [G.identity_word()] + [G.from_base(w) for w in G.base.ball(R_H) if not w.is_empty()]
        t_pos = [Word(G.alphabet, ((G.t, 1),)), Word(G.alphabet, ((G.t, -1),))]

        def neighbours(side, w):
            for h in spread:
                for s in t_pos:
                    yield "H", product(product(w, h), s), format_word(s)

        cosets = {"H": P}
    elif isinstance(G, Amalgam):
        PH = G.subgroup(SubgroupSpec("factor", which="H"))
        PK = G.subgroup(SubgroupSpec("factor", which="K"))
        cosets = {"H": PH, "K": PK}
        spreads = {"H": [G.identity_word()] + PH.elements(R_H), "K": [G.identity_word()] + PK.elements(R_H)}

        def neighbours(side, w):
            other = "K" if side == "H" else "H"
            for h in spreads[side]:
                yield other, product(w, h), "A"
    else:
        raise GraphError("Bass-Serre trees need an HNN extension or an amalgam")

    key, rep = cosets["H"].coset(G.identity_word())
    g.add_vertex(("H", key), TreeVertex("H", rep))
    depth = [0]
    q = deque([0])
    while q:
        u = q.popleft()
        if depth[u] >= r:
            continue
        side, w = g.keys[u][0], g.payloads[u].rep
        for nside, x, lab in neighbours(side, w):
            key, rep = cosets[nside].coset(x)
            v, new = g.add_vertex((nside, key), TreeVertex(nside, rep))
            if new:
                depth.append(depth[u] + 1)
                q.append(v)
            a, b = (u, v) if u < v else (v, u)
            g.add_edge(a, b, EdgeLabel("tree", (lab,)), 1, dedup_key=("tree", a, b))
    g.meta["depth"] = depth
    g.meta["acyclic"] = g.is_acyclic()
    return g


def bass_serre_hull(G: HNNExtension, elements, *, budget: int | None = None) -> LabeledGraph:
    """Subtree of the Bass-Serre tree spanned by the base vertex and the cosets ``gH``.

    The geodesic from ``H`` to ``gH`` runs through the cosets of the prefixes
    ``h0 t^e1 ... h_{k-1} t^ek`` of the normal form of ``g``.
    """
    if not isinstance(G, HNNExtension):
        raise GraphError("bass_serre_hull is implemented for HNN extensions")
    P = G.subgroup(SubgroupSpec("base"))
    g = LabeledGraph(scale=1, meta={"kind": "bass-serre-hull"}, budget=budget)
    g.context = {"group": G}
    key, rep = P.coset(G.identity_word())
    g.add_vertex(("H", key), TreeVertex("H", rep))
    BA = G.base.alphabet
    for w in elements:
        stack, _ = G.syllables(w)
        prev = 0
        for k in range(1, len(stack) + 1):
            word = G.assemble(stack[:k], identity(BA))
            key, rep = P.coset(word)
            v, _ = g.add_vertex(("H", key), TreeVertex("H", rep))
            sign = stack[k - 1][1] if prev < v else -stack[k - 1][1]
            a, b = (prev, v) if prev < v else (v, prev)
            g.add_edge(a, b, EdgeLabel("tree", ("t" if sign > 0 else "t^-1",)), 1, dedup_key=("tree", a, b))
            prev = v
    g.meta["acyclic"] = g.is_acyclic()
    return g


# module-level metric helpers


def graph_distance(g: LabeledGraph, u: int, v: int) -> int:
    return g.distance(u, v)


def geodesic(g: LabeledGraph, u: int, v: int) -> list[int]:
    return g.geodesic(u, v)


def all_geodesics(g: LabeledGraph, u: int, v: int, cap: int = 64):
    return g.all_geodesics(u, v, cap)

"""Stallings folded graphs for finitely generated subgroups of free groups."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .words import Alphabet, Letter, Word, identity, inverse, letter_key, product, substitute


class MembershipError(ValueError):
    pass


@dataclass
class SubgroupGraph:
    """A folded, based, labelled graph.

    ``adj[v]`` maps a letter ``(g, s)`` to the vertex reached by reading it
    from ``v``.  A positive edge ``u -g-> v`` is stored twice, as
    ``adj[u][(g, 1)] = v`` and ``adj[v][(g, -1)] = u``.
    """

    alphabet: Alphabet
    generators: tuple[Word, ...]
    adj: list[dict[Letter, int]]
    basepoint: int = 0
    tree_word: list[Word] = field(default_factory=list)
    tree_parent: list[tuple[int, Letter] | None] = field(default_factory=list)
    basis_edges: list[tuple[int, int, int]] = field(default_factory=list)
    basis: tuple[Word, ...] = ()

    @property
    def n_vertices(self) -> int:
        return len(self.adj)

    @property
    def n_edges(self) -> int:
        return sum(1 for v in self.adj for (g, s) in v if s > 0)

    @property
    def rank(self) -> int:
        return self.n_edges - self.n_vertices + 1

    def edges(self) -> list[tuple[int, int, int]]:
        return sorted((u, w, g) for u, nbrs in enumerate(self.adj) for (g, s), w in nbrs.items() if s > 0)

    def read(self, w: Word) -> tuple[int, int]:
        """Follow ``w`` from the basepoint; return (vertex, letters consumed)."""
        v = self.basepoint
        for i, l in enumerate(w.letters):
            nxt = self.adj[v].get(l)
            if nxt is None:
                return v, i
            v = nxt
        return v, len(w.letters)

    def canonical_hash(self) -> tuple:
        """Relabel vertices in BFS order from the basepoint; equal iff isomorphic as based graphs."""
        order = {self.basepoint: 0}
        q = deque([self.basepoint])
        while q:
            v = q.popleft()
            for l in sorted(self.adj[v], key=letter_key):
                w = self.adj[v][l]
                if w not in order:
                    order[w] = len(order)
                    q.append(w)
        return tuple(sorted((order[u], order[w], g) for u, w, g in self.edges()))


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root


def fold(generators, alphabet: Alphabet | None = None) -> SubgroupGraph:
    gens = tuple(generators)
    if alphabet is None:
        if not gens:
            raise ValueError("alphabet required for an empty generator list")
        alphabet = gens[0].alphabet
    uf = _UnionFind()
    adj: list[dict[Letter, int]] = []
    base = uf.add()
    adj.append({})
    pending: list[tuple[int, Letter, int]] = []

    def new_vertex() -> int:
        v = uf.add()
        adj.append({})
        return v

    for w in gens:
        if w.alphabet != alphabet:
            raise ValueError("generator over a different alphabet")
        if w.is_empty():
            continue
        v = base
        for i, l in enumerate(w.letters):
            u = base if i == len(w) - 1 else new_vertex()
            pending.append((v, l, u))
            v = u

    # Insert edges one at a time; a clash with an existing same-label edge merges endpoints.
    work = deque(pending)
    while work:
        u, (g, s), v = work.popleft()
        u, v = uf.find(u), uf.find(v)
        inv = (g, -s)
        existing = adj[u].get((g, s))
        if existing is not None:
            existing = uf.find(existing)
            if existing != v:
                _merge(uf, adj, existing, v, work)
            continue
        existing_back = adj[v].get(inv)
        if existing_back is not None and uf.find(existing_back) != u:
            _merge(uf, adj, uf.find(existing_back), u, work)
            continue
        adj[u][(g, s)] = v
        adj[v][inv] = u

    # Compact to live vertices.
    roots = sorted({uf.find(v) for v in range(len(adj))})
    live = {}
    for v in roots:
        if v == uf.find(base) or adj[v]:
            live[v] = len(live)
    compact = [{l: live[uf.find(w)] for l, w in adj[v].items()} for v in live]
    graph = SubgroupGraph(alphabet, gens, compact, basepoint=live[uf.find(base)])
    _trim(graph)
    _spanning_tree(graph)
    return graph


def _merge(uf: _UnionFind, adj, a: int, b: int, work: deque):
    """Identify vertices a and b; re-queue b's edges for insertion at the merged vertex."""
    a, b = uf.find(a), uf.find(b)
    if a == b:
        return
    moved = adj[b]
    adj[b] = {}
    for (g, s), w in moved.items():
        w = uf.find(w)
        # loops at b carry both half-edges inside ``moved``
        if w != b:
            rev = adj[w].get((g, -s))
            if rev is not None and uf.find(rev) == b:
                del adj[w][(g, -s)]
    uf.parent[b] = a
    for l, w in moved.items():
        work.appendleft((a, l, w))


def _trim(graph: SubgroupGraph):
    """Remove degree-1 vertices other than the basepoint."""
    adj = graph.adj
    alive = [True] * len(adj)
    changed = True
    while changed:
        changed = False
        for v in range(len(adj)):
            if alive[v] and v != graph.basepoint and len(adj[v]) == 1:
                ((g, s), w), = adj[v].items()
                del adj[w][(g, -s)]
                adj[v] = {}
                alive[v] = False
                changed = True
    if all(alive):
        return
    remap = {}
    for v in range(len(adj)):
        if alive[v]:
            remap[v] = len(remap)
    graph.adj = [{l: remap[w] for l, w in adj[v].items()} for v in range(len(adj)) if alive[v]]
    graph.basepoint = remap[graph.basepoint]


def _spanning_tree(graph: SubgroupGraph):
    """Shortlex BFS tree; tree paths are the shortlex-least labels reaching each vertex."""
    A = graph.alphabet
    n = graph.n_vertices
    words: list[Word | None] = [None] * n
    parent: list[tuple[int, Letter] | None] = [None] * n
    words[graph.basepoint] = identity(A)
    q = deque([graph.basepoint])
    order = sorted(A.letters(), key=letter_key)
    while q:
        v = q.popleft()
        for l in order:
            w = graph.adj[v].get(l)
            if w is not None and words[w] is None:
                words[w] = Word(A, words[v].letters + (l,), reduced=True)
                parent[w] = (v, l)
                q.append(w)
    graph.tree_word = words
    graph.tree_parent = parent
    tree_edges = set()
    for w, p in enumerate(parent):
        if p is not None:
            v, (g, s) = p
            tree_edges.add((v, w, g) if s > 0 else (w, v, g))
    basis_edges = [e for e in graph.edges() if e not in tree_edges]
    basis_edges.sort(key=lambda e: (words[e[0]].shortlex_key(), e[2], words[e[1]].shortlex_key()))
    graph.basis_edges = basis_edges
    graph.basis = tuple(
        product(product(words[u], Word(A, ((g, 1),), reduced=True)), inverse(words[v])) for u, v, g in basis_edges
    )


def member(graph: SubgroupGraph, w: Word) -> bool:
    v, k = graph.read(w)
    return k == len(w) and v == graph.basepoint


def basis_alphabet(graph: SubgroupGraph) -> Alphabet:
    return Alphabet(tuple(f"x{i + 1}" for i in range(len(graph.basis))))


def express_in_basis(graph: SubgroupGraph, w: Word) -> Word:
    """Rewrite a member of the subgroup as a word in the free basis ``graph.basis``."""
    index = {}
    for i, (u, v, g) in enumerate(graph.basis_edges):
        index[(u, (g, 1))] = (i, 1)
        index[(v, (g, -1))] = (i, -1)
    B = basis_alphabet(graph)
    out = []
    x = graph.basepoint
    for l in w.letters:
        nxt = graph.adj[x].get(l)
        if nxt is None:
            raise MembershipError(f"{w} is not in the subgroup")
        hit = index.get((x, l))
        if hit is not None:
            out.append(hit)
        x = nxt
    if x != graph.basepoint:
        raise MembershipError(f"{w} is not in the subgroup")
    return Word(B, out)


def from_basis(graph: SubgroupGraph, x: Word) -> Word:
    return substitute(x, graph.basis, graph.alphabet)


def schreier_rep(graph: SubgroupGraph, w: Word) -> Word:
    """Canonical representative of the right coset ``H w``."""
    v, k = graph.read(w)
    return product(graph.tree_word[v], w[k:])


def left_rep(graph: SubgroupGraph, w: Word) -> Word:
    """Canonical representative of the left coset ``w H``."""
    return inverse(schreier_rep(graph, inverse(w)))


def is_free_basis(graph: SubgroupGraph) -> bool:
    """True when the listed generators are themselves a free basis of the subgroup."""
    gens = [g for g in graph.generators]
    if len(gens) != graph.rank:
        return False
    B = basis_alphabet(graph)
    images = [express_in_basis(graph, g) for g in gens]
    # Generators form a basis iff their basis expressions Nielsen-reduce to the basis;
    # folding those expressions over the basis alphabet must give the rose.
    rose = fold(images, B) if images else None
    return rose is None or (rose.n_vertices == 1 and rose.rank == len(B))

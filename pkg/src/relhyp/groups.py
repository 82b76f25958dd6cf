"""Groups with solvable word problems and canonical normal forms.

Supported constructions: free groups, free abelian groups, direct products
of those, HNN extensions over such a base (solved by Britton reduction), and
amalgamated products of two free groups, solved through the embedding
``H *_A K -> HNN(H * K)`` that sends each letter ``k`` of ``K`` to ``t k t^-1``.
"""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Hashable, Sequence

from .stallings import MembershipError, SubgroupGraph, express_in_basis, fold, left_rep, member
from .words import (
    Alphabet,
    Word,
    all_reduced_words,
    exponent_vector,
    format_word,
    identity,
    inverse,
    parse_word,
    product,
    substitute,
    translate,
)


class GroupSpecError(ValueError):
    """Malformed or unsupported group / subgroup description."""


@dataclass(frozen=True)
class Element:
    """A group element: ``key`` is canonical, ``word`` is a representative."""

    key: Hashable
    word: Word = field(compare=False)

    def __str__(self):
        return format_word(self.word)


def _name_pool(exclude=()):
    for c in string.ascii_lowercase:
        if c not in ("e", "t") and c not in exclude:
            yield c
    i = 1
    while True:
        yield f"x{i}"
        i += 1


def default_names(rank: int, exclude=()) -> tuple[str, ...]:
    pool = _name_pool(exclude)
    return tuple(next(pool) for _ in range(rank))


# --------------------------------------------------------------------------
# groups


class Group:
    alphabet: Alphabet

    def normal_form(self, w: Word) -> Element:
        raise NotImplementedError

    def key(self, w: Word) -> Hashable:
        return self.normal_form(w).key

    def normal_word(self, w: Word) -> Word:
        return self.normal_form(w).word

    def is_identity(self, w: Word) -> bool:
        raise NotImplementedError

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_identity(product(u, inverse(v)))

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def identity_word(self) -> Word:
        return identity(self.alphabet)

    def generators(self) -> list[Word]:
        return [Word(self.alphabet, ((i, 1),), reduced=True) for i in range(len(self.alphabet))]

    def subgroup(self, spec: "SubgroupSpec") -> "Subgroup":
        raise GroupSpecError(f"{spec.kind} subgroups are not supported in {type(self).__name__}")

    def ball(self, radius: int) -> list[Word]:
        """Normal words of all elements within word length ``radius`` (full alphabet)."""
        return _ball_words(self, radius)

    def to_json(self) -> dict:
        raise NotImplementedError


@lru_cache(maxsize=64)
def _ball_words_cached(group: "Group", radius: int) -> tuple[Word, ...]:
    letters = group.alphabet.letters()
    start = group.normal_form(group.identity_word())
    seen = {start.key}
    out = [start.word]
    frontier = [start.word]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for l in letters:
                el = group.normal_form(product(w, Word(group.alphabet, (l,), reduced=True)))
                if el.key not in seen:
                    seen.add(el.key)
                    out.append(el.word)
                    nxt.append(el.word)
        frontier = nxt
    return tuple(out)


def _ball_words(group, radius):
    return list(_ball_words_cached(group, radius))


class FreeGroup(Group):
    def __init__(self, names: Sequence[str]):
        self.alphabet = Alphabet(tuple(names))
        self.rank = len(self.alphabet)

    def __repr__(self):
        return f"FreeGroup({self.alphabet.names})"

    def __eq__(self, other):
        return type(other) is FreeGroup and other.alphabet == self.alphabet

    def __hash__(self):
        return hash(("free", self.alphabet))

    def normal_form(self, w):
        return Element(w.letters, w)

    def normal_word(self, w):
        return w

    def key(self, w):
        return w.letters

    def is_identity(self, w):
        return w.is_empty()

    def subgroup(self, spec):
        if spec.kind == "folded":
            return FoldedFreeSubgroup(self, [spec.parse_generator(self.alphabet, g) for g in spec.generators], spec)
        if spec.kind == "commutator":
            return CommutatorKernel(self, spec)
        return _generic_subgroup(self, spec)

    def to_json(self):
        return {"type": "free", "rank": self.rank, "names": list(self.alphabet.names)}


class FreeAbelianGroup(Group):
    def __init__(self, names: Sequence[str]):
        self.alphabet = Alphabet(tuple(names))
        self.rank = len(self.alphabet)

    def __repr__(self):
        return f"FreeAbelianGroup({self.alphabet.names})"

    def __eq__(self, other):
        return type(other) is FreeAbelianGroup and other.alphabet == self.alphabet

    def __hash__(self):
        return hash(("abelian", self.alphabet))

    def vector_word(self, vec: Sequence[int]) -> Word:
        letters = []
        for i, k in enumerate(vec):
            letters.extend([(i, 1 if k > 0 else -1)] * abs(k))
        return Word(self.alphabet, letters, reduced=True)

    def normal_form(self, w):
        vec = exponent_vector(w)
        return Element(vec, self.vector_word(vec))

    def key(self, w):
        return exponent_vector(w)

    def is_identity(self, w):
        return not any(exponent_vector(w))

    def ball(self, radius):
        out = []
        for vec in _l1_ball(self.rank, radius):
            out.append(self.vector_word(vec))
        out.sort(key=lambda w: w.shortlex_key())
        return out

    def subgroup(self, spec):
        if spec.kind == "lattice":
            coords = []
            for c in spec.coordinates:
                coords.append(self.alphabet.index(c) if isinstance(c, str) else int(c))
            return CoordinateLattice(self, tuple(coords), spec)
        return _generic_subgroup(self, spec)

    def to_json(self):
        return {"type": "abelian", "rank": self.rank, "names": list(self.alphabet.names)}


def _l1_ball(dim: int, radius: int):
    def rec(d, budget):
        if d == 0:
            yield ()
            return
        for x in range(-budget, budget + 1):
            for rest in rec(d - 1, budget - abs(x)):
                yield (x,) + rest

    return list(rec(dim, radius))


class DirectProduct(Group):
    def __init__(self, factors: Sequence[Group]):
        self.factors = tuple(factors)
        names: list[str] = []
        self.offsets = []
        for f in self.factors:
            if not isinstance(f, (FreeGroup, FreeAbelianGroup, DirectProduct)):
                raise GroupSpecError("direct product factors must be free, free abelian or products")
            self.offsets.append(len(names))
            names.extend(f.alphabet.names)
        self.alphabet = Alphabet(tuple(names))

    def __eq__(self, other):
        return type(other) is DirectProduct and other.factors == self.factors

    def __hash__(self):
        return hash(("product", self.factors))

    def _split(self, w: Word) -> list[Word]:
        parts: list[list] = [[] for _ in self.factors]
        bounds = self.offsets + [len(self.alphabet)]
        for g, s in w.letters:
            for i in range(len(self.factors)):
                if bounds[i] <= g < bounds[i + 1]:
                    parts[i].append((g - bounds[i], s))
                    break
        return [Word(f.alphabet, p) for f, p in zip(self.factors, parts)]

    def _join(self, words: Sequence[Word]) -> Word:
        letters = []
        for off, w in zip(self.offsets, words):
            letters.extend((g + off, s) for g, s in w.letters)
        return Word(self.alphabet, letters, reduced=True)

    def normal_form(self, w):
        els = [f.normal_form(p) for f, p in zip(self.factors, self._split(w))]
        return Element(tuple(e.key for e in els), self._join([e.word for e in els]))

    def is_identity(self, w):
        return all(f.is_identity(p) for f, p in zip(self.factors, self._split(w)))

    def subgroup(self, spec):
        return _generic_subgroup(self, spec)

    def to_json(self):
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


# --------------------------------------------------------------------------
# subgroups of base groups


@dataclass(frozen=True)
class SubgroupSpec:
    """Description of a subgroup, independent of the ambient group object."""

    kind: str
    generators: tuple[str, ...] = ()
    coordinates: tuple[Any, ...] = ()
    which: str = ""

    KINDS = ("folded", "commutator", "lattice", "trivial", "whole", "base", "factor")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise GroupSpecError(f"unknown subgroup type {self.kind!r}")

    @staticmethod
    def parse_generator(alphabet: Alphabet, g) -> Word:
        return g if isinstance(g, Word) else parse_word(g, alphabet)

    @classmethod
    def from_json(cls, data) -> "SubgroupSpec":
        if isinstance(data, list):
            return cls("folded", tuple(data))
        if not isinstance(data, dict) or "type" not in data:
            raise GroupSpecError(f"bad subgroup spec {data!r}")
        kind = data["type"]
        if kind == "folded":
            return cls("folded", tuple(data.get("generators", ())))
        if kind == "lattice":
            return cls("lattice", coordinates=tuple(data.get("coordinates", ())))
        if kind == "factor":
            return cls("factor", which=data.get("which", "H"))
        return cls(kind)

    def to_json(self) -> dict:
        if self.kind == "folded":
            return {"type": "folded", "generators": list(self.generators)}
        if self.kind == "lattice":
            return {"type": "lattice", "coordinates": list(self.coordinates)}
        if self.kind == "factor":
            return {"type": "factor", "which": self.which}
        return {"type": self.kind}

    def __str__(self):
        if self.kind == "folded":
            return "<" + ", ".join(self.generators) + ">"
        if self.kind == "lattice":
            return "lattice" + str(list(self.coordinates))
        if self.kind == "factor":
            return f"factor {self.which}"
        return self.kind


class Subgroup:
    """A subgroup with decidable membership and canonical left cosets.

    ``split(w)`` returns ``(rep, s)`` with ``w = rep * s``, ``s`` in the
    subgroup and ``rep`` depending only on the left coset ``w S``.
    """

    group: Group
    spec: SubgroupSpec

    def contains(self, w: Word) -> bool:
        raise NotImplementedError

    def split(self, w: Word) -> tuple[Word, Word]:
        raise NotImplementedError

    def coset(self, w: Word) -> tuple[Hashable, Word]:
        rep, _ = self.split(w)
        return self.group.key(rep), rep

    def coset_key(self, w: Word) -> Hashable:
        return self.coset(w)[0]

    def elements(self, radius: int) -> list[Word]:
        """Non-identity elements of length <= radius, as normal words."""
        raise NotImplementedError

    def generator_list(self) -> list[Word]:
        raise NotImplementedError

    def in_generators(self, s: Word) -> Word:
        """Express a member as a word over ``g1..gk`` (the generator list)."""
        raise NotImplementedError

    def generator_alphabet(self) -> Alphabet:
        return Alphabet(tuple(f"g{i + 1}" for i in range(len(self.generator_list()))))

    def __repr__(self):
        return f"{type(self).__name__}({self.spec})"


class FoldedFreeSubgroup(Subgroup):
    def __init__(self, group: FreeGroup, generators: Sequence[Word], spec: SubgroupSpec | None = None):
        self.group = group
        self.gens = [group.normal_word(g) for g in generators]
        self.spec = spec or SubgroupSpec("folded", tuple(format_word(g) for g in self.gens))
        self.graph: SubgroupGraph = fold(self.gens, group.alphabet)
        self._elements: dict[int, list[Word]] = {}
        self._coords = None

    def contains(self, w):
        return member(self.graph, w)

    def split(self, w):
        rep = left_rep(self.graph, w)
        return rep, product(inverse(rep), w)

    def elements(self, radius):
        if radius not in self._elements:
            out = []
            A = self.group.alphabet
            # closed non-backtracking walks at the basepoint
            stack = [(self.graph.basepoint, ())]
            while stack:
                v, letters = stack.pop()
                if letters and v == self.graph.basepoint:
                    out.append(Word(A, letters, reduced=True))
                if len(letters) == radius:
                    continue
                for (g, s), u in self.graph.adj[v].items():
                    if letters and letters[-1] == (g, -s):
                        continue
                    stack.append((u, letters + ((g, s),)))
            out.sort(key=lambda w: w.shortlex_key())
            self._elements[radius] = out
        return list(self._elements[radius])

    def generator_list(self):
        return list(self.gens)

    def basis_coordinates(self) -> list[tuple[int, int]]:
        """For each tree-basis letter, the (generator index, sign) it equals.

        Raises GroupSpecError when the listed generators are not, up to
        inversion and order, the basis read off the folded graph.
        """
        if self._coords is None:
            if len(self.gens) != self.graph.rank:
                raise GroupSpecError(
                    f"generators {self.spec} are not a free basis (rank {self.graph.rank}, {len(self.gens)} given)"
                )
            coords: list[tuple[int, int] | None] = [None] * len(self.graph.basis)
            for i, g in enumerate(self.gens):
                x = express_in_basis(self.graph, g)
                if len(x) != 1 or coords[x[0][0]] is not None:
                    raise GroupSpecError(
                        f"generator {format_word(g)} of {self.spec} is not a single letter of the folded basis"
                    )
                coords[x[0][0]] = (i, x[0][1])
            self._coords = coords
        return self._coords

    def in_generators(self, s):
        coords = self.basis_coordinates()
        x = express_in_basis(self.graph, s)
        GA = self.generator_alphabet()
        return Word(GA, [(coords[j][0], e * coords[j][1]) for j, e in x.letters])


class CommutatorKernel(Subgroup):
    """The commutator subgroup [F, F] of a free group."""

    def __init__(self, group: FreeGroup, spec: SubgroupSpec | None = None):
        self.group = group
        self.spec = spec or SubgroupSpec("commutator")
        self._elements: dict[int, list[Word]] = {}

    def contains(self, w):
        return not any(exponent_vector(w))

    def split(self, w):
        vec = exponent_vector(w)
        letters = []
        for i, k in enumerate(vec):
            letters.extend([(i, 1 if k > 0 else -1)] * abs(k))
        rep = Word(self.group.alphabet, letters, reduced=True)
        return rep, product(inverse(rep), w)

    def coset(self, w):
        rep, _ = self.split(w)
        return ("ab", exponent_vector(w)), rep

    def elements(self, radius):
        if radius not in self._elements:
            self._elements[radius] = [
                w for w in all_reduced_words(self.group.alphabet, radius) if w.letters and self.contains(w)
            ]
        return list(self._elements[radius])

    def generator_list(self):
        raise GroupSpecError("the commutator subgroup is not finitely generated")

    def in_generators(self, s):
        raise GroupSpecError("the commutator subgroup is not finitely generated")


class CoordinateLattice(Subgroup):
    """The sublattice of Z^n spanned by a subset of the coordinate vectors."""

    def __init__(self, group: FreeAbelianGroup, coords: Sequence[int], spec: SubgroupSpec | None = None):
        self.group = group
        self.coords = tuple(coords)
        if len(set(self.coords)) != len(self.coords) or not all(0 <= c < group.rank for c in self.coords):
            raise GroupSpecError(f"bad lattice coordinates {coords}")
        self.spec = spec or SubgroupSpec("lattice", coordinates=self.coords)

    def contains(self, w):
        vec = exponent_vector(w)
        return all(v == 0 for i, v in enumerate(vec) if i not in self.coords)

    def split(self, w):
        vec = list(exponent_vector(w))
        part = [0] * len(vec)
        for c in self.coords:
            part[c], vec[c] = vec[c], 0
        return self.group.vector_word(vec), self.group.vector_word(part)

    def elements(self, radius):
        out = []
        for sub in _l1_ball(len(self.coords), radius):
            if any(sub):
                vec = [0] * self.group.rank
                for c, x in zip(self.coords, sub):
                    vec[c] = x
                out.append(self.group.vector_word(vec))
        out.sort(key=lambda w: w.shortlex_key())
        return out

    def generator_list(self):
        return [self.group.vector_word([1 if i == c else 0 for i in range(self.group.rank)]) for c in self.coords]

    def in_generators(self, s):
        vec = exponent_vector(s)
        letters = []
        for j, c in enumerate(self.coords):
            letters.extend([(j, 1 if vec[c] > 0 else -1)] * abs(vec[c]))
        return Word(self.generator_alphabet(), letters)


class TrivialSubgroup(Subgroup):
    def __init__(self, group: Group, spec: SubgroupSpec | None = None):
        self.group = group
        self.spec = spec or SubgroupSpec("trivial")

    def contains(self, w):
        return self.group.is_identity(w)

    def split(self, w):
        return self.group.normal_word(w), identity(self.group.alphabet)

    def elements(self, radius):
        return []

    def generator_list(self):
        return []

    def in_generators(self, s):
        if not self.contains(s):
            raise MembershipError(f"{s} is not trivial")
        return identity(self.generator_alphabet())


class WholeSubgroup(Subgroup):
    def __init__(self, group: Group, spec: SubgroupSpec | None = None):
        self.group = group
        self.spec = spec or SubgroupSpec("whole")

    def contains(self, w):
        return True

    def split(self, w):
        return identity(self.group.alphabet), self.group.normal_word(w)

    def coset(self, w):
        return ("whole",), identity(self.group.alphabet)

    def elements(self, radius):
        return [w for w in self.group.ball(radius) if not self.group.is_identity(w)]

    def generator_list(self):
        return self.group.generators()

    def in_generators(self, s):
        return translate(s, self.generator_alphabet(), list(range(len(self.group.alphabet))))


def _generic_subgroup(group: Group, spec: SubgroupSpec) -> Subgroup:
    if spec.kind == "trivial":
        return TrivialSubgroup(group, spec)
    if spec.kind in ("whole", "base"):
        return WholeSubgroup(group, spec)
    raise GroupSpecError(f"{spec} is not supported over {type(group).__name__}")


# --------------------------------------------------------------------------
# HNN extensions


@dataclass(frozen=True)
class Pinch:
    start: int  # index of the first stable letter
    stop: int  # index of the second stable letter
    side: str  # "A": t^-1 V t with V in A; "B": t U t^-1 with U in B


class HNNExtension(Group):
    """``<H, t | t^-1 a t = phi(a), a in A>`` over a base with solvable word problem."""

    def __init__(self, base: Group, A: Subgroup, B: Subgroup, phi: Sequence[Word] | None = None, stable: str = "t"):
        if not isinstance(base, (FreeGroup, FreeAbelianGroup, DirectProduct)):
            raise GroupSpecError("HNN bases must be free, free abelian, or a direct product of those")
        if A.group != base or B.group != base:
            raise GroupSpecError("associated subgroups must live in the base group")
        self.base = base
        self.A = A
        self.B = B
        self.stable = stable
        self.alphabet = base.alphabet.extend(stable)
        self.t = len(base.alphabet)
        if isinstance(A, CommutatorKernel) or isinstance(B, CommutatorKernel):
            if not (isinstance(A, CommutatorKernel) and isinstance(B, CommutatorKernel)) or phi:
                raise GroupSpecError("a commutator-kernel HNN extension needs A = B = [F,F] and phi = identity")
            self.phi = None
        else:
            phi = [base.normal_word(p) for p in (phi if phi is not None else B.generator_list())]
            ga, gb = A.generator_list(), B.generator_list()
            if not (len(ga) == len(gb) == len(phi)):
                raise GroupSpecError("A, B and phi must list the same number of generators")
            for img, b in zip(phi, gb):
                if base.key(img) != base.key(b):
                    raise GroupSpecError(
                        f"phi must send the i-th generator of A to the i-th generator of B ({img} != {b})"
                    )
            for S in (A, B):
                if isinstance(S, FoldedFreeSubgroup):
                    S.basis_coordinates()
            self.phi = phi

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    # word helpers --------------------------------------------------------

    def to_base(self, w: Word) -> Word:
        if any(g == self.t for g, _ in w.letters):
            raise GroupSpecError(f"{w} contains the stable letter")
        return Word(self.base.alphabet, w.letters, reduced=True)

    def from_base(self, w: Word) -> Word:
        return Word(self.alphabet, w.letters, reduced=True)

    def t_count(self, w: Word) -> int:
        return sum(1 for g, _ in w.letters if g == self.t)

    def phi_apply(self, w: Word, direction: int = 1) -> Word:
        """``phi`` (direction +1, A -> B) or its inverse (direction -1), on base words."""
        src = self.A if direction > 0 else self.B
        if not src.contains(w):
            raise MembershipError(f"{format_word(w)} is not in {'A' if direction > 0 else 'B'}")
        if self.phi is None:
            return self.base.normal_word(w)
        images = self.phi if direction > 0 else self.A.generator_list()
        coords = src.in_generators(w)
        return self.base.normal_word(substitute(coords, images, self.base.alphabet))

    # Britton reduction -----------------------------------------------------

    def pinch_find(self, w: Word) -> Pinch | None:
        pos = [i for i, (g, _) in enumerate(w.letters) if g == self.t]
        for i, j in zip(pos, pos[1:]):
            e1, e2 = w.letters[i][1], w.letters[j][1]
            if e1 == e2:
                continue
            middle = Word(self.base.alphabet, w.letters[i + 1 : j], reduced=True)
            if e1 < 0 and self.A.contains(middle):
                return Pinch(i, j, "A")
            if e1 > 0 and self.B.contains(middle):
                return Pinch(i, j, "B")
        return None

    def apply_pinch(self, w: Word, p: Pinch) -> Word:
        middle = Word(self.base.alphabet, w.letters[p.start + 1 : p.stop], reduced=True)
        img = self.phi_apply(middle, 1 if p.side == "A" else -1)
        return Word(self.alphabet, w.letters[: p.start] + img.letters + w.letters[p.stop + 1 :])

    def britton_reduce(self, w: Word) -> Word:
        while True:
            p = self.pinch_find(w)
            if p is None:
                return w
            w = self.apply_pinch(w, p)

    def is_identity(self, w):
        r = self.britton_reduce(w)
        if self.t_count(r):
            return False
        return self.base.is_identity(self.to_base(r))

    # normal forms ----------------------------------------------------------

    def syllables(self, w: Word) -> tuple[list[tuple[Word, int]], Word]:
        """Left-to-right normal form ``h0 t^e1 h1 ... t^en hn``.

        Returns ``([(h0, e1), ..., (h_{n-1}, en)], hn)``.  Each ``h_i`` with
        ``i < n`` is the canonical representative of ``h_i A`` (before ``t``)
        or ``h_i B`` (before ``t^-1``); ``hn`` is a base normal word.
        """
        base = self.base
        BA = base.alphabet
        stack: list[tuple[Word, int]] = []
        cur = identity(BA)
        run: list = []

        def flush(cur):
            if run:
                cur = base.normal_word(Word(BA, cur.letters + tuple(run)))
                run.clear()
            return cur

        for g, s in w.letters:
            if g != self.t:
                run.append((g, s))
                continue
            cur = flush(cur)
            S = self.A if s > 0 else self.B
            if stack and stack[-1][1] == -s and S.contains(cur):
                prev, _ = stack.pop()
                cur = base.normal_word(product(prev, self.phi_apply(cur, s)))
                continue
            rep, part = S.split(cur)
            stack.append((base.normal_word(rep), s))
            cur = self.phi_apply(part, s)
        cur = flush(cur)
        return stack, cur

    def assemble(self, stack: Sequence[tuple[Word, int]], last: Word) -> Word:
        letters: list = []
        for h, e in stack:
            letters.extend(h.letters)
            letters.append((self.t, e))
        letters.extend(last.letters)
        return Word(self.alphabet, letters)

    def normal_form(self, w):
        stack, cur = self.syllables(w)
        key = (tuple((self.base.key(h), e) for h, e in stack), self.base.key(cur))
        return Element(key, self.assemble(stack, cur))

    def subgroup(self, spec):
        if spec.kind == "whole":
            return WholeSubgroup(self, spec)
        if spec.kind == "trivial":
            return TrivialSubgroup(self, spec)
        if spec.kind == "base":
            return BaseParabolic(self, WholeSubgroup(self.base, spec), spec)
        inner = spec
        if spec.kind == "folded":
            for g in spec.generators:
                if self.stable in g.split() or any(tok.startswith(self.stable + "^") for tok in g.split()):
                    raise GroupSpecError("parabolic subgroups must lie in the HNN base")
        return BaseParabolic(self, self.base.subgroup(inner), spec)

    def to_json(self):
        d = {
            "type": "hnn",
            "base": self.base.to_json(),
            "A": self.A.spec.to_json(),
            "B": self.B.spec.to_json(),
            "stable": self.stable,
        }
        d["phi"] = None if self.phi is None else [format_word(p) for p in self.phi]
        return d


class BaseParabolic(Subgroup):
    """A subgroup of the HNN base viewed inside the HNN extension."""

    def __init__(self, hnn: HNNExtension, inner: Subgroup, spec: SubgroupSpec):
        self.group = hnn
        self.inner = inner
        self.spec = spec

    def contains(self, w):
        stack, cur = self.group.syllables(w)
        return not stack and self.inner.contains(cur)

    def split(self, w):
        stack, cur = self.group.syllables(w)
        rep, part = self.inner.split(cur)
        return self.group.assemble(stack, rep), self.group.from_base(part)

    def coset(self, w):
        hnn = self.group
        stack, cur = hnn.syllables(w)
        k, rep = self.inner.coset(cur)
        key = (tuple((hnn.base.key(h), e) for h, e in stack), k)
        return key, hnn.assemble(stack, rep)

    def elements(self, radius):
        return [self.group.from_base(w) for w in self.inner.elements(radius)]

    def generator_list(self):
        return [self.group.from_base(w) for w in self.inner.generator_list()]

    def in_generators(self, s):
        return self.inner.in_generators(self.group.to_base(s))


# --------------------------------------------------------------------------
# amalgamated products


class Amalgam(Group):
    """``H *_{A = B} K`` for free ``H`` and ``K``, decided inside ``HNN(H * K; A, B)``."""

    def __init__(self, H: FreeGroup, K: FreeGroup, A: SubgroupSpec, B: SubgroupSpec, phi: Sequence[str] | None = None):
        if not (isinstance(H, FreeGroup) and isinstance(K, FreeGroup)):
            raise GroupSpecError("amalgam factors must be free groups")
        if set(H.alphabet.names) & set(K.alphabet.names):
            raise GroupSpecError("amalgam factors need disjoint generator names")
        self.H, self.K = H, K
        self.alphabet = Alphabet(H.alphabet.names + K.alphabet.names)
        self.nh = len(H.alphabet)
        stable = next(n for n in ["t", "s", "u", "t0", "t1"] if n not in self.alphabet.names)
        self.free = FreeGroup(self.alphabet.names)
        self.A_spec, self.B_spec = A, B
        A_sub = self._factor_subgroup(A, "H")
        B_sub = self._factor_subgroup(B, "K")
        phi_words = None if phi is None else [parse_word(p, self.alphabet) for p in phi]
        self.hnn = HNNExtension(self.free, A_sub, B_sub, phi_words, stable)
        self.t = self.hnn.t

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def _side(self, w: Word) -> set[str]:
        return {"H" if g < self.nh else "K" for g, _ in w.letters}

    def _factor_subgroup(self, spec: SubgroupSpec, side: str) -> Subgroup:
        if spec.kind == "trivial":
            return TrivialSubgroup(self.free, spec)
        if spec.kind == "factor":
            names = self.H.alphabet.names if spec.which == "H" else self.K.alphabet.names
            return FoldedFreeSubgroup(self.free, [parse_word(n, self.alphabet) for n in names], spec)
        if spec.kind != "folded":
            raise GroupSpecError(f"{spec} is not supported in an amalgam")
        gens = [parse_word(g, self.alphabet) for g in spec.generators]
        for g in gens:
            if self._side(g) - {side}:
                raise GroupSpecError(f"generator {format_word(g)} must lie in factor {side}")
        return FoldedFreeSubgroup(self.free, gens, spec)

    def embed_word(self, w: Word) -> Word:
        """Send every K-letter k to ``t k t^-1``."""
        letters = []
        t = self.t
        for g, s in w.letters:
            if g < self.nh:
                letters.append((g, s))
            else:
                letters.extend([(t, 1), (g, s), (t, -1)])
        return Word(self.hnn.alphabet, letters)

    def normal_form(self, w):
        return Element(self.hnn.key(self.embed_word(w)), w)

    def normal_word(self, w):
        return w

    def is_identity(self, w):
        return self.hnn.is_identity(self.embed_word(w))

    def subgroup(self, spec):
        if spec.kind == "whole":
            return WholeSubgroup(self, spec)
        if spec.kind == "trivial":
            return TrivialSubgroup(self, spec)
        if spec.kind == "factor":
            side = spec.which
        elif spec.kind == "folded":
            sides = set()
            for g in spec.generators:
                sides |= self._side(parse_word(g, self.alphabet))
            if len(sides) > 1:
                raise GroupSpecError("amalgam parabolics must lie in one factor")
            side = sides.pop() if sides else "H"
        else:
            raise GroupSpecError(f"{spec} is not supported in an amalgam")
        return FactorParabolic(self, self._factor_subgroup(spec, side), side, spec)

    def to_json(self):
        return {
            "type": "amalgam",
            "H": self.H.to_json(),
            "K": self.K.to_json(),
            "A": self.A_spec.to_json(),
            "B": self.B_spec.to_json(),
            "phi": None if self.hnn.phi is None else [format_word(p) for p in self.hnn.phi],
        }


class FactorParabolic(Subgroup):
    """A subgroup of one amalgam factor.  K-side cosets ``gL`` are keyed as ``(psi(g) t) L``."""

    def __init__(self, amalgam: Amalgam, inner: Subgroup, side: str, spec: SubgroupSpec):
        self.group = amalgam
        self.inner = inner
        self.side = side
        self.spec = spec
        self._par = BaseParabolic(amalgam.hnn, inner, spec)

    def _shifted(self, w: Word) -> Word:
        img = self.group.embed_word(w)
        if self.side == "K":
            img = Word(img.alphabet, img.letters + ((self.group.t, 1),))
        return img

    def contains(self, w):
        return self.group.is_identity(w) or self.coset_key(w) == self.coset_key(identity(self.group.alphabet))

    def split(self, w):
        raise NotImplementedError("amalgam cosets are keyed, not split")

    def coset(self, w):
        key, _ = self._par.coset(self._shifted(w))
        return key, w

    def elements(self, radius):
        return [Word(self.group.alphabet, x.letters, reduced=True) for x in self.inner.elements(radius)]

    def generator_list(self):
        return [Word(self.group.alphabet, x.letters, reduced=True) for x in self.inner.generator_list()]


# --------------------------------------------------------------------------
# JSON specs


def group_from_json(data: dict) -> Group:
    if not isinstance(data, dict) or "type" not in data:
        raise GroupSpecError(f"bad group spec {data!r}")
    kind = data["type"]
    if kind == "free":
        return FreeGroup(data.get("names") or default_names(int(data["rank"])))
    if kind in ("abelian", "free_abelian"):
        return FreeAbelianGroup(data.get("names") or default_names(int(data["rank"])))
    if kind == "product":
        factors = []
        used: set[str] = set()
        for f in data["factors"]:
            if "names" not in f and f.get("type") in ("free", "abelian", "free_abelian"):
                f = dict(f, names=list(default_names(int(f["rank"]), used)))
            g = group_from_json(f)
            used |= set(g.alphabet.names)
            factors.append(g)
        return DirectProduct(factors)
    if kind == "hnn":
        base = group_from_json(data["base"])
        stable = data.get("stable", "t")
        A = base.subgroup(SubgroupSpec.from_json(data["A"]))
        B = base.subgroup(SubgroupSpec.from_json(data["B"]))
        phi = data.get("phi")
        if phi is not None and not isinstance(A, CommutatorKernel):
            phi = [parse_word(p, base.alphabet) for p in phi]
        elif isinstance(A, CommutatorKernel):
            phi = None
        return HNNExtension(base, A, B, phi, stable)
    if kind == "amalgam":
        H = group_from_json(data["H"])
        Kd = data["K"]
        if "names" not in Kd:
            Kd = dict(Kd, names=list(default_names(int(Kd["rank"]), set(H.alphabet.names))))
        K = group_from_json(Kd)
        return Amalgam(H, K, SubgroupSpec.from_json(data["A"]), SubgroupSpec.from_json(data["B"]), data.get("phi"))
    raise GroupSpecError(f"unknown group type {kind!r}")


def group_to_json(g: Group) -> dict:
    return g.to_json()


# --------------------------------------------------------------------------
# module-level operations


def is_identity(g: Group, w: Word) -> bool:
    return g.is_identity(w)


def canonical_form(g: Group, w: Word) -> Element:
    return g.normal_form(w)


def britton_reduce(g: HNNExtension, w: Word) -> Word:
    return g.britton_reduce(w)


def pinch_find(g: HNNExtension, w: Word) -> Pinch | None:
    return g.pinch_find(w)


def phi_apply(g: HNNExtension, w: Word, direction: int = 1) -> Word:
    return g.from_base(g.phi_apply(g.to_base(w), direction))


def amalgam_embed_word(g: Amalgam, w: Word) -> Word:
    return g.embed_word(w)


# built-in examples used by tests, presets and the CLI


def free(rank: int = 2) -> FreeGroup:
    return FreeGroup(default_names(rank))


def free_abelian(rank: int = 2) -> FreeAbelianGroup:
    return FreeAbelianGroup(default_names(rank))


def commuting_hnn() -> HNNExtension:
    """``<a, t | t^-1 a t = a>``, i.e. Z^2 as an HNN extension of Z."""
    F = free(1)
    A = F.subgroup(SubgroupSpec("folded", ("a",)))
    return HNNExtension(F, A, F.subgroup(SubgroupSpec("folded", ("a",))), [F.word("a")])


def commutator_hnn(rank: int = 2) -> HNNExtension:
    """``<F, t | t^-1 f t = f, f in [F, F]>``: finitely generated, not finitely presented."""
    F = free(rank)
    return HNNExtension(F, CommutatorKernel(F), CommutatorKernel(F))


def swap_hnn() -> HNNExtension:
    """``<a, b, t | t^-1 a t = b>``."""
    F = free(2)
    return HNNExtension(
        F, F.subgroup(SubgroupSpec("folded", ("a",))), F.subgroup(SubgroupSpec("folded", ("b",))), [F.word("b")]
    )


def trivial_hnn() -> HNNExtension:
    """HNN extension of ``<a>`` over trivial subgroups; this is F(a, t)."""
    F = free(1)
    return HNNExtension(F, TrivialSubgroup(F), TrivialSubgroup(F), [])

"""Free group words over named alphabets.

A letter is a pair ``(index, sign)`` where ``index`` points into an
:class:`Alphabet` and ``sign`` is ``+1`` or ``-1``.  Words are reduced as
soon as they are built, so equality of :class:`Word` objects is equality in
the free group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

Letter = tuple[int, int]


class AlphabetError(ValueError):
    """Unknown symbol, or words over different alphabets combined."""


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise AlphabetError(f"duplicate symbols in alphabet {names}")
        for s in names:
            if not s or s == "e" or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", s):
                raise AlphabetError(f"invalid generator symbol {s!r}")

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise AlphabetError(f"unknown symbol {name!r} (alphabet {self.names})") from None

    def extend(self, *names: str) -> "Alphabet":
        return Alphabet(self.names + tuple(names))

    def letters(self) -> list[Letter]:
        """All letters in shortlex order: x0 < x0^-1 < x1 < x1^-1 < ..."""
        return [(i, s) for i in range(len(self.names)) for s in (1, -1)]

    def word(self, text: str) -> "Word":
        return parse_word(text, self)

    def gen(self, name: str) -> "Word":
        return Word(self, ((self.index(name), 1),))


def letter_key(letter: Letter) -> tuple[int, int]:
    return (letter[0], 0 if letter[1] > 0 else 1)


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, s in letters:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


class Word:
    """A freely reduced word.  Immutable and hashable."""

    __slots__ = ("alphabet", "letters", "_hash")

    def __init__(self, alphabet: Alphabet, letters: Iterable[Letter] = (), *, reduced: bool = False):
        letters = tuple(letters)
        if not reduced:
            n = len(alphabet)
            for g, s in letters:
                if not (0 <= g < n) or s not in (1, -1):
                    raise AlphabetError(f"bad letter {(g, s)} for alphabet {alphabet.names}")
            letters = _reduce(letters)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_hash", hash(letters))

    def __setattr__(self, key, value):
        raise AttributeError("Word is immutable")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.alphabet, self.letters[item], reduced=True)
        return self.letters[item]

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters and self.alphabet == other.alphabet

    def __hash__(self):
        return self._hash

    def __mul__(self, other: "Word") -> "Word":
        return product(self, other)

    def __invert__(self) -> "Word":
        return inverse(self)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return inverse(self) ** -k
        return Word(self.alphabet, self.letters * k)

    def __repr__(self):
        return f"Word({format_word(self)!r})"

    def __str__(self):
        return format_word(self)

    def is_empty(self) -> bool:
        return not self.letters

    def shortlex_key(self) -> tuple:
        return (len(self.letters), tuple(letter_key(l) for l in self.letters))

    def symbols(self) -> set[int]:
        return {g for g, _ in self.letters}


def free_reduce(alphabet: Alphabet, raw: Sequence[Letter | tuple[str, int]]) -> Word:
    """Reduce a raw letter sequence.  Symbols may be given by name or index."""
    letters = []
    for g, s in raw:
        if isinstance(g, str):
            g = alphabet.index(g)
        letters.append((g, s))
    return Word(alphabet, letters)


def identity(alphabet: Alphabet) -> Word:
    return Word(alphabet, (), reduced=True)


def _check_same(u: Word, v: Word):
    if u.alphabet != v.alphabet:
        raise AlphabetError(f"alphabet mismatch: {u.alphabet.names} vs {v.alphabet.names}")


def product(u: Word, v: Word) -> Word:
    _check_same(u, v)
    a, b = u.letters, v.letters
    k = 0
    m = min(len(a), len(b))
    while k < m and a[-1 - k][0] == b[k][0] and a[-1 - k][1] == -b[k][1]:
        k += 1
    return Word(u.alphabet, a[: len(a) - k] + b[k:], reduced=True)


def concat(alphabet: Alphabet, words: Iterable[Word]) -> Word:
    out = identity(alphabet)
    for w in words:
        out = product(out, w)
    return out


def inverse(w: Word) -> Word:
    return Word(w.alphabet, tuple((g, -s) for g, s in reversed(w.letters)), reduced=True)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w == conjugator * core * conjugator^-1``."""
    a = w.letters
    i, j = 0, len(a) - 1
    while i < j and a[i][0] == a[j][0] and a[i][1] == -a[j][1]:
        i += 1
        j -= 1
    return Word(w.alphabet, a[i : j + 1], reduced=True), Word(w.alphabet, a[:i], reduced=True)


def exponent_vector(w: Word, alphabet: Alphabet | None = None) -> tuple[int, ...]:
    alphabet = alphabet or w.alphabet
    vec = [0] * len(alphabet)
    for g, s in w.letters:
        vec[g] += s
    return tuple(vec)


def translate(w: Word, target: Alphabet, mapping: Sequence[int] | None = None) -> Word:
    """Re-index ``w`` into ``target``; by default symbols are matched by name."""
    if mapping is None:
        mapping = [target.index(n) for n in w.alphabet.names]
    return Word(target, tuple((mapping[g], s) for g, s in w.letters), reduced=True)


def substitute(w: Word, images: Sequence[Word], target: Alphabet) -> Word:
    """Apply the homomorphism sending generator ``i`` to ``images[i]``."""
    out: list[Letter] = []
    inv = [inverse(x).letters for x in images]
    for g, s in w.letters:
        out.extend(images[g].letters if s > 0 else inv[g])
    return Word(target, out)


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse ``"a b^-1 a^2"``; ``"e"`` or an empty string is the identity."""
    letters: list[Letter] = []
    for tok in text.split():
        if tok in ("e", "1"):
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise AlphabetError(f"cannot parse token {tok!r} in {text!r}")
        g = alphabet.index(m.group(1))
        k = int(m.group(2)) if m.group(2) is not None else 1
        letters.extend([(g, 1 if k > 0 else -1)] * abs(k))
    return Word(alphabet, letters)


def format_word(w: Word) -> str:
    if not w.letters:
        return "e"
    parts = []
    i = 0
    a = w.letters
    while i < len(a):
        j = i
        while j < len(a) and a[j] == a[i]:
            j += 1
        k = (j - i) * a[i][1]
        name = w.alphabet.names[a[i][0]]
        parts.append(name if k == 1 else f"{name}^{k}")
        i = j
    return " ".join(parts)


def all_reduced_words(alphabet: Alphabet, max_len: int):
    """Yield every reduced word of length <= max_len, in shortlex order."""
    layer = [identity(alphabet)]
    yield layer[0]
    letters = alphabet.letters()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            last = w.letters[-1] if w.letters else None
            for l in letters:
                if last is not None and l[0] == last[0] and l[1] == -last[1]:
                    continue
                nxt.append(Word(alphabet, w.letters + (l,), reduced=True))
        for w in nxt:
            yield w
        layer = nxt


def random_word(alphabet: Alphabet, length: int, rng) -> Word:
    """Random reduced word of exactly ``length`` letters."""
    letters: list[Letter] = []
    choices = alphabet.letters()
    while len(letters) < length:
        l = choices[rng.randrange(len(choices))]
        if letters and letters[-1][0] == l[0] and letters[-1][1] == -l[1]:
            continue
        letters.append(l)
    return Word(alphabet, letters, reduced=True)

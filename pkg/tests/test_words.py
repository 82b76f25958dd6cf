import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relhyp.words import (
    Alphabet,
    AlphabetError,
    Word,
    all_reduced_words,
    cyclic_reduce,
    exponent_vector,
    format_word,
    identity,
    inverse,
    parse_word,
    random_word,
    substitute,
)

F2 = Alphabet(("a", "b"))
letters = st.lists(st.tuples(st.integers(0, 1), st.sampled_from((1, -1))), max_size=12)


def W(text):
    return parse_word(text, F2)


def test_parse_and_format():
    assert format_word(W("a b^-1 a^2")) == "a b^-1 a^2"
    assert W("a a^-1").is_empty()
    assert format_word(W("e")) == "e"
    assert W("1") == identity(F2)
    assert W("b^0") == identity(F2)


def test_bad_symbols():
    with pytest.raises(AlphabetError):
        W("c")
    with pytest.raises(AlphabetError):
        Alphabet(("a", "a"))
    with pytest.raises(AlphabetError):
        Alphabet(("e",))


@given(letters, letters)
def test_group_laws(x, y):
    u, v = Word(F2, x), Word(F2, y)
    assert (u * ~u).is_empty()
    assert ~(u * v) == ~v * ~u
    assert inverse(inverse(u)) == u
    assert len(u * v) <= len(u) + len(v)


@given(letters)
def test_reduced_words_have_no_cancelling_pairs(x):
    w = Word(F2, x)
    assert all(not (p[0] == q[0] and p[1] == -q[1]) for p, q in zip(w.letters, w.letters[1:]))


@given(letters)
def test_cyclic_reduce_is_conjugate(x):
    w = Word(F2, x)
    core, conj = cyclic_reduce(w)
    assert conj * core * ~conj == w
    if len(core) > 1:
        assert not (core.letters[0][0] == core.letters[-1][0] and core.letters[0][1] == -core.letters[-1][1])


def test_all_reduced_words_counts():
    words = list(all_reduced_words(F2, 4))
    assert len(words) == 1 + 4 + 12 + 36 + 108
    assert len(set(words)) == len(words)
    keys = [w.shortlex_key() for w in words]
    assert keys == sorted(keys)


def test_exponent_vector_and_substitute():
    assert exponent_vector(W("a b a^-1 b^2")) == (0, 3)
    X = Alphabet(("x", "y"))
    w = parse_word("x y^-1", X)
    assert substitute(w, [W("a^2"), W("a b")], F2) == W("a^2 b^-1 a^-1")


def test_random_word_is_reduced_and_seeded():
    a = random_word(F2, 9, random.Random(3))
    b = random_word(F2, 9, random.Random(3))
    assert a == b and len(a) == 9


@settings(max_examples=50)
@given(letters)
def test_format_parse_roundtrip(x):
    w = Word(F2, x)
    assert parse_word(format_word(w), F2) == w

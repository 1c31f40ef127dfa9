import math

import pytest
from hypothesis import given, strategies as st

from densitylab.words import (ScaleError, alphabet, count_cyclically_reduced, cyclic_reduce,
                              enumerate_cyclically_reduced, format_word, free_reduce, invert,
                              is_cyclically_reduced, is_freely_reduced, parse_word, rotate,
                              universe_size)
from oracles import cyclically_reduced_words

a, b = 1, 2
A, B = -1, -2

words = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=30).map(tuple)


def test_free_reduce_examples():
    assert free_reduce((a, A)) == ()
    assert free_reduce((a, b, B, a)) == (a, a)
    assert free_reduce((a, b, B, A, b)) == (b,)


def test_cyclic_reduce_examples():
    assert cyclic_reduce((A, b, a)) == (b,)
    assert cyclic_reduce((a, b)) == (a, b)
    assert cyclic_reduce((a, a)) == (a, a)
    assert cyclic_reduce((a, b, A)) == (b,)


def test_invert_rotate_examples():
    assert invert((a, b)) == (B, A)
    assert rotate((a, b, a, b), 2) == (a, b, a, b)
    assert rotate((a, b, b, a), 1) == (b, b, a, a)
    assert rotate((a, b, a), -1) == (a, a, b)


@given(words)
def test_free_reduce_idempotent_and_reduced(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    assert len(r) <= len(w)
    assert is_freely_reduced(r)
    assert all(r[t] != -r[t + 1] for t in range(len(r) - 1))


@given(words)
def test_cyclic_reduce_properties(w):
    r = cyclic_reduce(w)
    assert is_cyclically_reduced(r)
    # conjugate to w: the cyclic reduction of w followed by a rotation is unchanged
    if r:
        assert cyclic_reduce(rotate(r, 1)) == rotate(r, 1)


@given(words, st.integers(-50, 50))
def test_invert_rotate_preserve_cyclic_reduction(w, k):
    r = cyclic_reduce(w)
    assert invert(invert(r)) == r
    assert is_cyclically_reduced(invert(r))
    if r:
        assert is_cyclically_reduced(rotate(r, k))
        assert rotate(rotate(r, k), -k) == r


def test_enumeration_examples():
    assert len(enumerate_cyclically_reduced(2, 1)) == 4
    assert len(enumerate_cyclically_reduced(2, 2)) == 12
    assert len(enumerate_cyclically_reduced(2, 3)) == 28


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_matches_brute_force(m, n):
    got = enumerate_cyclically_reduced(m, n)
    assert len(set(got)) == len(got)
    assert sorted(got) == sorted(cyclically_reduced_words(m, n))
    assert count_cyclically_reduced(m, n) == len(got)


def test_count_examples():
    assert count_cyclically_reduced(2, 3) == 28
    assert universe_size(2, 2) == 16
    assert count_cyclically_reduced(1, 5) == 2
    with pytest.raises(ValueError):
        count_cyclically_reduced(2, 0)


def test_count_is_big_integer():
    # overflows 64 bits near ell = 41 at m = 2
    assert universe_size(2, 41) > 2**64
    assert isinstance(universe_size(2, 100), int)


@pytest.mark.parametrize("ell", [50, 100])
def test_universe_growth_rate(ell):
    ratio = math.log(universe_size(2, ell)) / (ell * math.log(3))
    assert abs(ratio - 1) < 0.05


def test_enumeration_scale_guard():
    with pytest.raises(ScaleError):
        enumerate_cyclically_reduced(3, 12, limit=1000)


def test_alphabet_order():
    assert alphabet(2) == (1, -1, 2, -2)


def test_text_round_trip():
    w = (a, b, A, B)
    assert format_word(w) == "abAB"
    assert parse_word("abAB") == w
    with pytest.raises(ValueError):
        parse_word("aA")
    with pytest.raises(ValueError):
        parse_word("abA")
    assert parse_word("abA", reduce=True) == (b,)
    with pytest.raises(ValueError):
        parse_word("abc", m=2)


@given(words)
def test_text_round_trip_property(w):
    r = cyclic_reduce(w)
    if r:
        assert parse_word(format_word(r)) == r

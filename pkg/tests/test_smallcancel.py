import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from densitylab.smallcancel import (check_b2p, check_cp, check_cprime, min_piece_factorization,
                                    piece_factorization, piece_table)
from densitylab.words import invert, parse_word, rotate
from oracles import (b2p_holds, cp_holds, cprime_holds, cyc_reduced, maxpiece_table,
                     min_factorization, piece_words)

F = Fraction


def W(*texts):
    return [parse_word(t) for t in texts]


def random_relators(rng, m=2, max_len=8, max_count=6, min_len=1):
    count = rng.randint(1, max_count)
    letters = [x for g in range(1, m + 1) for x in (g, -g)]
    out = []
    while len(out) < count:
        n = rng.randint(min_len, max_len)
        w = tuple(rng.choice(letters) for _ in range(n))
        if cyc_reduced(w) and w not in out:
            out.append(w)
    return out


presentations = st.integers(0, 10**9).map(lambda s: random_relators(random.Random(s)))


def test_piece_table_examples():
    assert set(piece_table(W("ab")).maxpiece.values()) == {0}
    t = piece_table(W("aa"))
    assert t.maxpiece[(0, 1, 0)] == 1 and t.maxpiece[(0, 1, 1)] == 1
    R = W("aabb", "abab")
    assert piece_table(R).maxpiece == maxpiece_table(R)


def test_piece_table_frozen_values():
    # expected values computed once with the brute-force oracle
    R = W("aabb", "abab")
    mp = piece_table(R).maxpiece
    assert [mp[(0, 1, p)] for p in range(4)] == [1, 2, 1, 2]
    # full readings of abab from positions 0 and 2 are one relator, but aba is a piece
    assert [mp[(1, 1, p)] for p in range(4)] == [3, 3, 3, 3]
    R = W("abaBB", "aabAb", "bbA")
    mp = piece_table(R).maxpiece
    assert [mp[(0, 1, p)] for p in range(5)] == [2, 2, 3, 3, 2]
    assert [mp[(1, -1, p)] for p in range(5)] == [3, 2, 2, 1, 2]
    # bbA occurs inside the inverse of abaBB
    assert [mp[(2, 1, p)] for p in range(3)] == [3, 3, 3]
    assert [min_piece_factorization(i, R) for i in range(3)] == [2, 3, 1]


def test_cprime_examples():
    assert check_cprime(W("ab"), F(1, 6)) == (True, None)
    ok, wit = check_cprime(W("aa"), F(1, 2))
    assert not ok and wit.piece == (1,)
    assert check_cprime(W("aa"), F(2, 3)) == (True, None)
    with pytest.raises(ValueError):
        check_cprime(W("ab"), 1)


def test_factorization_examples():
    assert min_piece_factorization(0, W("ab")) == math.inf
    assert min_piece_factorization(0, W("aa")) == 2
    assert piece_factorization(0, W("aa")) == [(1,), (1,)]


def test_cp_b2p_examples():
    assert check_cp(W("ab"), 7) == (True, None)
    ok, wit = check_cp(W("aa"), 3)
    assert not ok and wit.factors == ((1,), (1,))
    assert check_b2p(W("ab"), 5) == (True, None)
    ok, wit = check_b2p(W("aa"), 2)
    assert not ok and wit.factors == ((1,),)
    with pytest.raises(ValueError):
        check_cp(W("ab"), 1)
    with pytest.raises(ValueError):
        check_b2p(W("ab"), 0)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        piece_table([])
    with pytest.raises(ValueError):
        piece_table([(1, 2, -1)])


@settings(max_examples=300, deadline=None)
@given(presentations)
def test_piece_table_matches_oracle(R):
    assert piece_table(R).maxpiece == maxpiece_table(R)


@settings(max_examples=200, deadline=None)
@given(presentations)
def test_piece_table_prefix_closed(R):
    t = piece_table(R)
    pw = piece_words(R)
    for s, L in t.maxpiece.items():
        for k in range(1, L + 1):
            assert t.reading(s)[:k] in pw


@settings(max_examples=150, deadline=None)
@given(presentations, st.integers(0, 7), st.booleans())
def test_piece_table_symmetry(R, k, flip):
    i = k % len(R)
    new = list(R)
    new[i] = invert(R[i]) if flip else rotate(R[i], k)
    if len(set(new)) < len(new):
        return
    a, b = piece_table(R).maxpiece, piece_table(new).maxpiece
    for j in range(len(R)):
        assert sorted(v for s, v in a.items() if s[0] == j) == sorted(
            v for s, v in b.items() if s[0] == j)


@settings(max_examples=200, deadline=None)
@given(presentations, st.sampled_from([F(1, 6), F(1, 4), F(1, 3), F(1, 2), F(2, 3)]))
def test_cprime_matches_oracle(R, lam):
    ok, wit = check_cprime(R, lam)
    assert ok == cprime_holds(R, lam)
    if not ok:
        t = piece_table(R)
        assert len(wit.piece) >= lam * len(R[wit.relator])
        s1, s2 = wit.sites
        assert s1 != s2
        assert t.reading(s1)[:len(wit.piece)] == wit.piece == t.reading(s2)[:len(wit.piece)]


@settings(max_examples=200, deadline=None)
@given(presentations)
def test_factorization_matches_oracle(R):
    t = piece_table(R)
    pw = piece_words(R)
    for i, r in enumerate(R):
        got = min_piece_factorization(i, R, t)
        assert got == min_factorization(i, R)
        parts = piece_factorization(i, R, t)
        if parts is not None:
            assert all(u in pw for u in parts)
            joined = tuple(x for u in parts for x in u)
            rots = {rotate(w, k) for w in (r, invert(r)) for k in range(len(r))}
            assert joined in rots


@settings(max_examples=150, deadline=None)
@given(presentations, st.integers(2, 5))
def test_cp_matches_oracle(R, p):
    assert check_cp(R, p)[0] == cp_holds(R, p)


@settings(max_examples=150, deadline=None)
@given(presentations, st.integers(1, 4))
def test_b2p_matches_oracle(R, p):
    assert check_b2p(R, p)[0] == b2p_holds(R, p)


@settings(max_examples=100, deadline=None)
@given(presentations)
def test_monotonicity(R):
    lams = [F(1, 6), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(5, 6)]
    res = [check_cprime(R, x)[0] for x in lams]
    assert all(not a or b for a, b in zip(res, res[1:]))
    cps = [check_cp(R, p)[0] for p in range(2, 8)]
    assert all(a or not b for a, b in zip(cps, cps[1:]))


def test_sampled_length_ten_matches_oracle():
    rng = random.Random(10)
    for _ in range(20):
        R = random_relators(rng, max_len=10, max_count=5, min_len=8)
        assert check_cprime(R, F(1, 2))[0] == cprime_holds(R, F(1, 2))

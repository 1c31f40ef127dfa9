import math
from collections import Counter
from fractions import Fraction

import pytest
from scipy.stats import chisquare

from densitylab.sampler import (ModelConfig, Presentation, SamplingError, fixed_count,
                                format_presentation, parse_presentation, q_event,
                                sample_presentation, trial_rng, uniform_cyclically_reduced)
from densitylab.words import count_cyclically_reduced, is_cyclically_reduced, universe_size
from oracles import cyclically_reduced_words

F = Fraction


def test_single_letters_uniform():
    rng = trial_rng(1)
    n = 10_000
    cnt = Counter(uniform_cyclically_reduced(2, 1, rng) for _ in range(n))
    sigma = math.sqrt(n * 0.25 * 0.75)
    assert set(cnt) == {(1,), (-1,), (2,), (-2,)}
    assert all(abs(v - n / 4) <= 3 * sigma for v in cnt.values())


def test_length_three_chi_square():
    rng = trial_rng(2)
    n = 100_000
    support = cyclically_reduced_words(2, 3)
    cnt = Counter(uniform_cyclically_reduced(2, 3, rng) for _ in range(n))
    assert set(cnt) == set(support)
    assert chisquare([cnt[w] for w in support]).pvalue > 0.01


def test_same_seed_same_word():
    a = uniform_cyclically_reduced(3, 9, trial_rng(7, 1, 2))
    b = uniform_cyclically_reduced(3, 9, trial_rng(7, 1, 2))
    assert a == b
    assert is_cyclically_reduced(a)


def test_fixed_count_zero_density():
    pres = sample_presentation(ModelConfig(2, 10, F(0), "fixed", seed=3))
    assert len(pres) == 1


def test_fixed_count_values():
    assert fixed_count(100, F(1, 2)) == 10
    assert fixed_count(10**6, F(1, 3)) == 100
    assert fixed_count(12, F(1)) == 12
    big = universe_size(2, 200)
    assert fixed_count(big, F(1, 10)) == round(math.exp(math.log(big) / 10))


def test_bernoulli_mean_count():
    m, ell, d = 2, 12, F(3, 10)
    total = universe_size(m, ell)
    p = total ** (float(d) - 1)
    counts = [len(sample_presentation(ModelConfig(m, ell, d, seed=0), trial_rng(0, s)))
              for s in range(200)]
    var = sum(count_cyclically_reduced(m, n) * p * (1 - p) for n in range(1, ell + 1))
    mean = sum(counts) / len(counts)
    assert abs(mean - total ** float(d)) <= 3 * math.sqrt(var / len(counts))


@pytest.mark.parametrize("model", ["bernoulli", "fixed"])
def test_presentations_are_valid_and_deterministic(model):
    for s in range(30):
        cfg = ModelConfig(2, 9, F(2, 5), model, seed=s)
        pres = sample_presentation(cfg)
        assert len(set(pres.relators)) == len(pres.relators)
        assert all(is_cyclically_reduced(r) and 1 <= len(r) <= 9 for r in pres.relators)
        assert sample_presentation(cfg) == pres
    fixed = ModelConfig(2, 9, F(2, 5), "fixed", seed=1)
    assert len(sample_presentation(fixed)) == fixed_count(universe_size(2, 9), F(2, 5))


def test_exact_length_switch():
    cfg = ModelConfig(2, 8, F(1, 2), "fixed", seed=4, exact_length=True)
    pres = sample_presentation(cfg)
    assert all(len(r) == 8 for r in pres.relators)
    assert cfg.universe() == count_cyclically_reduced(2, 8)


def test_stratum_is_uniform():
    # words of one small stratum appear equally often across seeds
    cnt = Counter()
    for s in range(400):
        pres = sample_presentation(ModelConfig(2, 2, F(1, 2), seed=0), trial_rng(0, s))
        cnt.update(r for r in pres.relators if len(r) == 2)
    support = cyclically_reduced_words(2, 2)
    assert set(cnt) <= set(support)
    assert chisquare([cnt[w] for w in support]).pvalue > 0.01


def test_q_event_examples():
    empty = Presentation(2, (), 10)
    assert not q_event(empty, F(1, 5), F(1, 10))
    cfg = ModelConfig(2, 60, F(1, 10), "fixed", seed=0)
    assert q_event(sample_presentation(cfg), F(1, 10), F(1, 100))
    hits = sum(q_event(sample_presentation(ModelConfig(2, 16, F(3, 10), seed=0), trial_rng(0, s)),
                       F(3, 10), F(1, 5)) for s in range(200))
    assert hits >= 190
    with pytest.raises(ValueError):
        q_event(empty, F(1, 5), 0)


def test_q_event_band_is_exact():
    # m=2, ell=4, d=1/2, eps=1: the band is [3^1, 3^3]
    words = [(1,)] * 3
    assert q_event(words, F(1, 2), F(1), m=2, ell=4)
    assert not q_event([(1,)] * 2, F(1, 2), F(1), m=2, ell=4)
    assert q_event([(1,)] * 27, F(1, 2), F(1), m=2, ell=4)
    assert not q_event([(1,)] * 28, F(1, 2), F(1), m=2, ell=4)


def test_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(1, 5, F(1, 2))
    with pytest.raises(ValueError):
        ModelConfig(2, 5, F(3, 2))
    with pytest.raises(ValueError):
        ModelConfig(2, 5, F(1, 2), "other")
    with pytest.raises(SamplingError):
        sample_presentation(ModelConfig(2, 30, F(9, 10)))


def test_presentation_file_round_trip():
    cfg = ModelConfig(2, 8, F(1, 4), "fixed", seed=11)
    pres = sample_presentation(cfg)
    text = format_presentation(pres)
    assert text.splitlines()[0] == "presentation m=2 ell=8 model=fixed d=1/4 seed=11"
    back = parse_presentation(text)
    assert back.relators == pres.relators and back.config == cfg
    with pytest.raises(ValueError):
        parse_presentation("presentation m=2\naA\n")
    assert parse_presentation("presentation m=2\nabA\n", reduce=True).relators == ((2,),)

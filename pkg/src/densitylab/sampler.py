"""Random presentations in the density model.

Two concrete models draw relators from ``B_ell`` (cyclically reduced words of
length at most ``ell``):

* ``fixed``: exactly ``round(|B_ell|^d)`` distinct uniform words;
* ``bernoulli``: each word kept independently with probability ``|B_ell|^(d-1)``,
  realised per length stratum as a binomial count of distinct uniform words.

Randomness comes from numpy's Philox counter-based generator.  Trial streams
are keyed by ``SeedSequence(seed, spawn_key=(trial,))`` so any trial can be
reproduced on its own, in any process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .words import Word, alphabet, count_cyclically_reduced, format_word, parse_word, universe_size

MODELS = ("bernoulli", "fixed")
#: refuse to build presentations expected to hold more relators than this
MAX_RELATORS = 200_000
#: duplicate-rejection budget per presentation
MAX_RETRIES = 1_000_000


class SamplingError(RuntimeError):
    pass


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, key...)``; same inputs, same stream."""
    ss = np.random.SeedSequence(entropy=seed % 2**64, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def _randbelow(rng: np.random.Generator, n: int) -> int:
    if n <= 0:
        raise ValueError("empty range")
    if n < 2**62:
        return int(rng.integers(n))
    nbits = n.bit_length()
    while True:
        x = int.from_bytes(rng.bytes((nbits + 7) // 8), "little") >> (8 * ((nbits + 7) // 8) - nbits)
        if x < n:
            return x


def uniform_cyclically_reduced(m: int, n: int, rng: np.random.Generator) -> Word:
    """Uniform cyclically reduced word of length ``n``.

    Draws a uniform freely reduced word (2m choices, then 2m-1) and rejects
    it when first and last letters cancel.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    letters = alphabet(m)
    nxt = {x: [y for y in letters if y != -x] for x in letters}
    while True:
        picks = rng.integers(0, 2 * m - 1, size=n)
        first = letters[int(rng.integers(2 * m))]
        w = [first]
        for t in range(1, n):
            w.append(nxt[w[-1]][picks[t]])
        if n == 1 or w[0] != -w[-1]:
            return tuple(w)


@dataclass(frozen=True)
class ModelConfig:
    m: int
    ell: int
    d: Fraction
    model: str = "bernoulli"
    seed: int = 0
    exact_length: bool = False

    def __post_init__(self):
        object.__setattr__(self, "d", Fraction(self.d) if not isinstance(self.d, Fraction)
                           else self.d)
        if self.m < 2:
            raise ValueError("the density model needs m >= 2")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if not 0 <= self.d <= 1:
            raise ValueError("density must lie in [0, 1]")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")

    def strata(self) -> list[tuple[int, int]]:
        """``(length, count)`` of every length stratum of the universe."""
        lengths = [self.ell] if self.exact_length else range(1, self.ell + 1)
        return [(n, count_cyclically_reduced(self.m, n)) for n in lengths]

    def universe(self) -> int:
        if self.exact_length:
            return count_cyclically_reduced(self.m, self.ell)
        return universe_size(self.m, self.ell)


@dataclass(frozen=True)
class Presentation:
    m: int
    relators: tuple[Word, ...]
    ell: int = 0
    config: ModelConfig | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.relators)


def fixed_count(universe: int, d: Fraction) -> int:
    """``round(universe ** d)`` evaluated with ~265-bit decimal precision."""
    if d == 0:
        return 1
    if d == 1:
        return universe
    with localcontext() as ctx:
        ctx.prec = 80
        x = (Decimal(universe).ln() * Decimal(d.numerator) / Decimal(d.denominator)).exp()
        return int(x.quantize(Decimal(1), rounding=ROUND_HALF_EVEN))


def _distinct_words(m: int, n: int, count: int, rng, seen: set) -> list[Word]:
    out: list[Word] = []
    tries = 0
    while len(out) < count:
        w = uniform_cyclically_reduced(m, n, rng)
        if w in seen:
            tries += 1
            if tries > MAX_RETRIES:
                raise SamplingError(f"too many duplicate draws at length {n}")
            continue
        seen.add(w)
        out.append(w)
    return out


def sample_presentation(cfg: ModelConfig, rng: np.random.Generator | None = None) -> Presentation:
    """Draw one presentation; ``rng`` defaults to the stream of ``cfg.seed``."""
    if rng is None:
        rng = trial_rng(cfg.seed)
    m = cfg.m
    strata = cfg.strata()
    total = cfg.universe()
    seen: set[Word] = set()
    relators: list[Word] = []
    if cfg.model == "fixed":
        N = fixed_count(total, cfg.d)
        if N > MAX_RELATORS:
            raise SamplingError(f"{N} relators exceeds the limit {MAX_RELATORS}")
        if N > total // 2 + 1 and N > 0:
            raise SamplingError(f"{N} of {total} words: too dense for rejection sampling")
        tries = 0
        while len(relators) < N:
            x = _randbelow(rng, total)
            for n, c in strata:
                if x < c:
                    break
                x -= c
            w = uniform_cyclically_reduced(m, n, rng)
            if w in seen:
                tries += 1
                if tries > MAX_RETRIES:
                    raise SamplingError("too many duplicate draws")
                continue
            seen.add(w)
            relators.append(w)
    else:
        p = math.exp(float(cfg.d - 1) * math.log(total)) if cfg.d < 1 else 1.0
        if total * p > MAX_RELATORS:
            raise SamplingError(f"expected {total * p:.0f} relators exceeds {MAX_RELATORS}")
        for n, c in strata:
            k = int(rng.binomial(c, p))
            if k > c // 2 + 1:
                raise SamplingError(f"stratum {n}: {k} of {c} words, too dense")
            relators.extend(_distinct_words(m, n, k, rng, seen))
    return Presentation(m, tuple(relators), cfg.ell, cfg)


def q_event(pres: Presentation | Sequence[Word], d, eps, m: int | None = None,
            ell: int | None = None) -> bool:
    """``(2m-1)^((d-eps/4) ell) <= |R| <= (2m-1)^((d+eps/4) ell)``, compared exactly."""
    if isinstance(pres, Presentation):
        m = pres.m if m is None else m
        ell = pres.ell if ell is None else ell
        size = len(pres.relators)
    else:
        size = len(pres)
    if m is None or ell is None:
        raise ValueError("m and ell are required")
    d, eps = Fraction(d), Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    base = 2 * m - 1

    def at_least(e: Fraction) -> bool:
        # size >= base ** e  <=>  size^q >= base^p
        if size == 0:
            return False
        p, q = e.numerator, e.denominator
        if p >= 0:
            return size ** q >= base ** p
        return size ** q * base ** (-p) >= 1

    def at_most(e: Fraction) -> bool:
        p, q = e.numerator, e.denominator
        if p >= 0:
            return size ** q <= base ** p
        return size ** q * base ** (-p) <= 1

    return at_least((d - eps / 4) * ell) and at_most((d + eps / 4) * ell)


# ---------------------------------------------------------------- file format

def format_presentation(pres: Presentation) -> str:
    cfg = pres.config
    if cfg is not None:
        head = (f"presentation m={pres.m} ell={cfg.ell} model={cfg.model} "
                f"d={cfg.d.numerator}/{cfg.d.denominator} seed={cfg.seed}")
        if cfg.exact_length:
            head += " exact_length=1"
    else:
        head = f"presentation m={pres.m} ell={pres.ell}"
    return "\n".join([head] + [format_word(r) for r in pres.relators]) + "\n"


def parse_presentation(text: str, reduce: bool = False) -> Presentation:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("presentation"):
        raise ValueError("missing 'presentation' header")
    head = dict(t.split("=", 1) for t in lines[0].split()[1:])
    m = int(head["m"])
    rels = tuple(parse_word(ln, m, reduce=reduce) for ln in lines[1:])
    if len(set(rels)) != len(rels):
        raise ValueError("duplicate relators")
    ell = int(head.get("ell", max((len(r) for r in rels), default=0)))
    cfg = None
    if {"model", "d", "seed"} <= head.keys():
        cfg = ModelConfig(m, ell, Fraction(head["d"]), head["model"], int(head["seed"]),
                          bool(int(head.get("exact_length", "0"))))
    return Presentation(m, rels, ell, cfg)

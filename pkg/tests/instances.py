"""Random fill-search instances with optional planted fillings."""
from __future__ import annotations

import random
from fractions import Fraction

from densitylab.forms import cprime_form, subdivide, wheel_form
from oracles import cyc_reduced, inv

FORMS = {"cprime": lambda: cprime_form(Fraction(1, 2)), "wheel2": lambda: wheel_form(2)}
LETTERS = (1, -1, 2, -2)


def random_word(rng, n):
    while True:
        w = tuple(rng.choice(LETTERS) for _ in range(n))
        if cyc_reduced(w):
            return w


def planted_filling(rng, sub):
    """Random edge letters until every face reads a cyclically reduced word."""
    c, lab = sub.complex, sub.labeling
    while True:
        letters = {e: rng.choice(LETTERS) for e in c.edges}
        words = {}
        for f, bd in c.faces.items():
            w = tuple(letters[r] if r > 0 else -letters[-r] for r in bd)
            x = lab.labels[f]
            words[abs(x)] = w if x > 0 else inv(w)
        tup = tuple(words[i] for i in range(1, len(words) + 1))
        if all(cyc_reduced(w) for w in tup) and len(set(tup)) == len(tup):
            return tup


def fill_instance(rng: random.Random, form_name=None, ell=None, max_tuples=10**5):
    """``(sub, R)`` with ``|R|^k <= max_tuples``; about half carry a planted filling."""
    form_name = form_name or rng.choice(sorted(FORMS))
    ell = ell or rng.choice((6, 7, 8))
    sub = subdivide(FORMS[form_name](), ell)
    k = sub.labeling.k
    cap = int(round(max_tuples ** (1 / k)))
    while cap ** k > max_tuples:
        cap -= 1
    size = rng.randint(2, cap if rng.random() < 0.1 else min(cap, 40))
    lengths = sorted({len(bd) for bd in sub.complex.faces.values()})
    R = []
    if rng.random() < 0.5:
        R.extend(planted_filling(rng, sub))
    size = max(size, len(R))
    while len(R) < size:
        n = rng.choice(lengths) if rng.random() < 0.9 else rng.randint(1, ell)
        w = random_word(rng, n)
        if w not in R:
            R.append(w)
    rng.shuffle(R)
    return sub, R

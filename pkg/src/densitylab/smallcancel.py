"""Pieces and the C'(lambda), C(p), B(2p) small-cancellation conditions.

A *site* ``(i, orientation, pos)`` names a cyclic reading of relator ``i``
(``orientation=-1`` reads its inverse) starting at ``pos``.  A word ``u`` is a
piece when it occurs as a cyclic subword (length at most the relator length)
at two distinct sites.  A full-length reading of one relator from two
different start points is still the relator itself and does not count.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .words import Word, invert, is_cyclically_reduced

Site = tuple[int, int, int]


@dataclass(frozen=True)
class PieceTable:
    relators: tuple[Word, ...]
    maxpiece: dict[Site, int]

    def reading(self, site: Site) -> Word:
        i, o, p = site
        w = self.relators[i] if o > 0 else invert(self.relators[i])
        return w[p:] + w[:p]

    def sites(self):
        return self.maxpiece.keys()


def site_order(s: Site) -> tuple[int, int, int]:
    """Relator, then forward readings before inverse ones, then position."""
    return (s[0], -s[1], s[2])


def sites_of(relators: Sequence[Word]) -> list[Site]:
    return [(i, o, p) for i, r in enumerate(relators) for o in (1, -1) for p in range(len(r))]


def _readings(relators: Sequence[Word]) -> dict[Site, bytes]:
    out = {}
    for i, r in enumerate(relators):
        for o, w in ((1, r), (-1, invert(r))):
            b = bytes(x + 128 for x in w)
            dbl = b + b
            for p in range(len(w)):
                out[(i, o, p)] = dbl[p:p + len(w)]
    return out


def piece_table(relators: Sequence[Word]) -> PieceTable:
    """Longest piece starting at every site.

    Grows all readings one letter at a time and keeps a site alive while its
    prefix still occurs at another site; pieces are prefix-closed, so the last
    surviving length is the maximum.
    """
    relators = tuple(tuple(r) for r in relators)
    if not relators:
        raise ValueError("empty relator set")
    for r in relators:
        if not r or not is_cyclically_reduced(r):
            raise ValueError(f"relator {r} is not a nonempty cyclically reduced word")
    read = _readings(relators)
    maxpiece = {s: 0 for s in read}
    alive = list(read)
    L = 0
    while alive:
        L += 1
        groups: dict[bytes, set] = defaultdict(set)
        live = []
        for s in alive:
            n = len(read[s])
            if L > n:
                continue
            ident = s if L < n else s[:2]
            groups[read[s][:L]].add(ident)
            live.append(s)
        alive = []
        for s in live:
            if len(groups[read[s][:L]]) >= 2:
                maxpiece[s] = L
                alive.append(s)
    return PieceTable(relators, maxpiece)


def _partner(table: PieceTable, site: Site, L: int) -> Site:
    """Another site where the length-``L`` reading at ``site`` occurs."""
    u = table.reading(site)[:L]
    n = len(table.relators[site[0]])
    for s in sorted(table.sites(), key=site_order):
        if s == site:
            continue
        m = len(table.relators[s[0]])
        if L > m:
            continue
        if L == n == m and s[:2] == site[:2]:
            continue
        if table.reading(s)[:L] == u:
            return s
    raise AssertionError("piece without a second occurrence")


@dataclass(frozen=True)
class PieceWitness:
    piece: Word
    relator: int
    sites: tuple[Site, Site]


def check_cprime(relators: Sequence[Word], lam, table: PieceTable | None = None
                 ) -> tuple[bool, PieceWitness | None]:
    """C'(lam): every piece in a relator ``r`` is strictly shorter than ``lam * |r|``.

    On failure the witness is the longest offending piece (first site in
    sorted order among ties).
    """
    lam = Fraction(lam) if not isinstance(lam, Fraction) else lam
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    table = table or piece_table(relators)
    worst = None
    for s in sorted(table.sites(), key=site_order):
        L = table.maxpiece[s]
        n = len(table.relators[s[0]])
        if L and L * lam.denominator >= lam.numerator * n:
            if worst is None or L > worst[0]:
                worst = (L, s)
    if worst is None:
        return True, None
    L, s = worst
    return False, PieceWitness(table.reading(s)[:L], s[0], (s, _partner(table, s, L)))


def _greedy(maxpiece: dict[Site, int], i: int, o: int, start: int, n: int, length: int
            ) -> list[int] | None:
    """Fewest pieces covering ``length`` letters from ``start``; lengths of the pieces."""
    pos = 0
    parts = []
    while pos < length:
        jump = min(maxpiece[(i, o, (start + pos) % n)], length - pos)
        if jump == 0:
            return None
        parts.append(jump)
        pos += jump
    return parts


def _cut(word: Word, start: int, parts: list[int]) -> list[Word]:
    w = word[start:] + word[:start]
    out, pos = [], 0
    for L in parts:
        out.append(w[pos:pos + L])
        pos += L
    return out


def piece_factorization(index: int, relators: Sequence[Word], table: PieceTable | None = None
                        ) -> list[Word] | None:
    """A shortest factorisation of some rotation of relator ``index`` (or of its
    inverse) into pieces, or ``None`` when none exists."""
    table = table or piece_table(relators)
    r = table.relators[index]
    n = len(r)
    best = None
    for o, w in ((1, r), (-1, invert(r))):
        for p in range(n):
            parts = _greedy(table.maxpiece, index, o, p, n, n)
            if parts is not None and (best is None or len(parts) < len(best[2])):
                best = (w, p, parts)
    if best is None:
        return None
    return _cut(*best)


def min_piece_factorization(index: int, relators: Sequence[Word],
                            table: PieceTable | None = None) -> int | float:
    """Minimum number of pieces whose product is a cyclic conjugate of the relator
    or of its inverse; ``math.inf`` when no such product exists."""
    parts = piece_factorization(index, relators, table)
    return math.inf if parts is None else len(parts)


@dataclass(frozen=True)
class FactorWitness:
    relator: int
    factors: tuple[Word, ...]


def check_cp(relators: Sequence[Word], p: int, table: PieceTable | None = None
             ) -> tuple[bool, FactorWitness | None]:
    """C(p): no relator is a product of fewer than ``p`` pieces."""
    if p < 2:
        raise ValueError("C(p) needs p >= 2")
    table = table or piece_table(relators)
    for i in range(len(table.relators)):
        parts = piece_factorization(i, relators, table)
        if parts is not None and len(parts) < p:
            return False, FactorWitness(i, tuple(parts))
    return True, None


def half_length(n: int) -> int:
    return -(-n // 2)


def check_b2p(relators: Sequence[Word], p: int, table: PieceTable | None = None
              ) -> tuple[bool, FactorWitness | None]:
    """B(2p): no cyclic subword of length ``ceil(|r|/2)`` is a product of fewer
    than ``p`` pieces."""
    if p < 1:
        raise ValueError("B(2p) needs p >= 1")
    table = table or piece_table(relators)
    for i, r in enumerate(table.relators):
        n = len(r)
        h = half_length(n)
        for start in range(n):
            parts = _greedy(table.maxpiece, i, 1, start, n, h)
            if parts is not None and len(parts) < p:
                w = (r[start:] + r[:start])[:h]
                return False, FactorWitness(i, tuple(_cut(w, 0, parts)))
    return True, None

"""Free-group words over ``m`` generators.

A letter is a nonzero int: ``+g`` is generator ``x_g`` and ``-g`` its inverse
(``1 <= g <= m``).  A word is a plain tuple of letters, so words are hashable,
immutable and compared by exact sequence equality.
"""
from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

Word = tuple[int, ...]

#: enumeration refuses to materialise more words than this
ENUMERATION_LIMIT = 2_000_000


class ScaleError(ValueError):
    """Raised when a request would enumerate more objects than allowed."""


def free_reduce(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(w: Iterable[int]) -> Word:
    r = free_reduce(w)
    i, j = 0, len(r) - 1
    while i < j and r[i] == -r[j]:
        i += 1
        j -= 1
    return r[i:j + 1]


def is_freely_reduced(w: Sequence[int]) -> bool:
    return all(w[t + 1] != -w[t] for t in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    if not is_freely_reduced(w):
        return False
    return len(w) <= 1 or w[0] != -w[-1]


def invert(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def rotate(w: Sequence[int], k: int) -> Word:
    """Cyclic shift of ``w`` starting at index ``k mod |w|``."""
    if not w:
        return tuple(w)
    k %= len(w)
    return tuple(w[k:]) + tuple(w[:k])


def alphabet(m: int) -> tuple[int, ...]:
    """The 2m letters in a fixed order: x_1, x_1^-1, x_2, x_2^-1, ..."""
    if m < 1:
        raise ValueError(f"need at least one generator, got m={m}")
    return tuple(s * g for g in range(1, m + 1) for s in (1, -1))


def count_freely_reduced(m: int, n: int) -> int:
    if n == 0:
        return 1
    return 2 * m * (2 * m - 1) ** (n - 1)


def count_cyclically_reduced(m: int, n: int) -> int:
    """Exact number of cyclically reduced words of length exactly ``n``.

    Uses ``(2m-1)^n + 1 + (m-1)(1 + (-1)^n)``; the tests check it against
    :func:`enumerate_cyclically_reduced`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    return (2 * m - 1) ** n + 1 + (m - 1) * (1 + (-1) ** n)


def universe_size(m: int, ell: int) -> int:
    """|B_ell|: nonempty cyclically reduced words of length at most ``ell``."""
    return sum(count_cyclically_reduced(m, n) for n in range(1, ell + 1))


def enumerate_cyclically_reduced(m: int, n: int, limit: int = ENUMERATION_LIMIT) -> list[Word]:
    """All cyclically reduced words of length exactly ``n``, in lexicographic
    order of the :func:`alphabet` ordering.

    Enumerates freely reduced words letter by letter and filters the wrap.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if count_freely_reduced(m, n) > limit:
        raise ScaleError(
            f"{count_freely_reduced(m, n)} candidate words for m={m}, n={n} exceeds limit {limit}")
    letters = alphabet(m)
    words: list[Word] = [(x,) for x in letters]
    for _ in range(n - 1):
        words = [w + (x,) for w in words for x in letters if x != -w[-1]]
    return [w for w in words if n == 1 or w[0] != -w[-1]]


def brute_force_cyclically_reduced(m: int, n: int) -> list[Word]:
    """Filter of the full product alphabet^n; independent of the sequential builder."""
    letters = alphabet(m)
    return [w for w in product(letters, repeat=n) if is_cyclically_reduced(w)]


# ---------------------------------------------------------------- text format

def letter_to_char(x: int) -> str:
    g = abs(x)
    if not 1 <= g <= 26:
        raise ValueError(f"generator index {g} has no letter")
    c = chr(ord("a") + g - 1)
    return c if x > 0 else c.upper()


def format_word(w: Sequence[int]) -> str:
    return "".join(letter_to_char(x) for x in w)


def parse_word(s: str, m: int | None = None, reduce: bool = False) -> Word:
    """Parse ``"abAB"`` style text.

    Non-reduced input is rejected unless ``reduce`` is set, in which case
    the word is cyclically reduced.
    """
    s = s.strip()
    w: list[int] = []
    for c in s:
        if not c.isascii() or not c.isalpha():
            raise ValueError(f"bad letter {c!r} in {s!r}")
        g = ord(c.lower()) - ord("a") + 1
        if m is not None and g > m:
            raise ValueError(f"letter {c!r} exceeds m={m}")
        w.append(g if c.islower() else -g)
    word = tuple(w)
    if reduce:
        return cyclic_reduce(word)
    if not is_cyclically_reduced(word):
        raise ValueError(f"word {s!r} is not cyclically reduced")
    return word

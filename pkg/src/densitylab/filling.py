"""Fillings of labeled 2-complexes by relators.

A filling of an abstractly labeled complex picks one word per abstract
relator; every face labeled ``+i`` then reads ``r_i`` along its stored
boundary from its first edge, and every face labeled ``-i`` reads ``r_i^-1``.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .complexes import (AbstractLabeling, Complex2, face_readings, reduction_degree,
                        satisfies_complexity, validate)
from .words import Word, alphabet, is_cyclically_reduced

#: fillable_by_universe refuses complexes with more edges than this
UNIVERSE_EDGE_LIMIT = 400
#: filling_census refuses instances whose labelings may exceed this many
CENSUS_LIMIT = 5_000_000


class FillingScaleError(ValueError):
    pass


@dataclass(frozen=True)
class Conflict:
    """First inconsistency met while propagating relator letters onto edges."""
    edge: int
    letters: tuple[int, int]
    faces: tuple[int, int]


@dataclass(frozen=True)
class VanKampenComplex:
    complex: Complex2
    labeling: AbstractLabeling
    relators: tuple[Word, ...]
    edge_labels: Mapping[int, int]


def _check_relators(c: Complex2, lab: AbstractLabeling, relators: Sequence[Word],
                    require_distinct: bool) -> None:
    lengths = lab.lengths(c)
    if len(relators) != lab.k:
        raise ValueError(f"need {lab.k} relators, got {len(relators)}")
    for i, r in enumerate(relators, start=1):
        if len(r) != lengths[i]:
            raise ValueError(f"relator {i} has length {len(r)}, faces need {lengths[i]}")
        if not is_cyclically_reduced(r):
            raise ValueError(f"relator {i} is not cyclically reduced")
    if require_distinct and len(set(map(tuple, relators))) != len(relators):
        raise ValueError("relators must be pairwise distinct")


def induce_labels(c: Complex2, lab: AbstractLabeling, relators: Sequence[Word],
                  require_distinct: bool = True) -> dict[int, int] | Conflict:
    """Edge labels forced by the relators, or the first :class:`Conflict`.

    Labels are keyed by positive edge id; the inverse edge carries the
    inverse letter.
    """
    _check_relators(c, lab, relators, require_distinct)
    labels: dict[int, int] = {}
    setter: dict[int, int] = {}
    for f in sorted(c.faces):
        x = lab.labels[f]
        r = relators[abs(x) - 1]
        for j, ref in face_readings(c, f, x):
            letter = r[j] if ref > 0 else -r[j]
            e = abs(ref)
            old = labels.get(e)
            if old is None:
                labels[e] = letter
                setter[e] = f
            elif old != letter:
                return Conflict(e, (old, letter), (setter[e], f))
    return labels


def make_vk(c: Complex2, lab: AbstractLabeling, relators: Sequence[Word]) -> VanKampenComplex:
    got = induce_labels(c, lab, relators)
    if isinstance(got, Conflict):
        raise ValueError(f"relators do not fill the complex: {got}")
    return VanKampenComplex(c, lab, tuple(map(tuple, relators)), got)


def boundary_word(v: VanKampenComplex, face: int) -> Word:
    return tuple(v.edge_labels[abs(r)] if r > 0 else -v.edge_labels[abs(r)]
                 for r in v.complex.faces[face])


def is_reduced_vk(v: VanKampenComplex) -> bool:
    """No two faces carrying the same relator share an edge at the same position.

    Scans face pairs directly: each face is turned into the oriented face that
    reads a relator of the presentation, and positions are compared.
    """
    c = v.complex
    reading = {}
    for f in c.faces:
        x = v.labeling.labels[f]
        word = v.relators[abs(x) - 1]
        reading[f] = (word, {(j, abs(ref)) for j, ref in face_readings(c, f, x)})
    for f, g in itertools.combinations(sorted(c.faces), 2):
        wf, sf = reading[f]
        wg, sg = reading[g]
        if wf == wg and sf & sg:
            return False
    return True


# -------------------------------------------------------------- search over R

@dataclass
class FillingReport:
    found: bool
    assignment: tuple[Word, ...] | None = None
    nodes_explored: int = 0
    reduced: bool | None = None
    timed_out: bool = False


class _Budget(Exception):
    pass


def _constraints(c: Complex2, lab: AbstractLabeling) -> dict[int, list[tuple[int, int, int]]]:
    """Per abstract relator: ``(edge, sign, j)`` meaning edge label = sign * r[j]."""
    out: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for f in sorted(c.faces):
        x = lab.labels[f]
        for j, ref in face_readings(c, f, x):
            out[abs(x)].append((abs(ref), 1 if ref > 0 else -1, j))
    return out


def fill_order(c: Complex2, lab: AbstractLabeling) -> list[int]:
    """Abstract relators, most shared edge incidences first (ties by index)."""
    inc = c.incidence()
    shared = Counter()
    for f in c.faces:
        i = abs(lab.labels[f])
        shared[i] += sum(1 for r in c.faces[f] if inc[abs(r)] >= 2)
    return sorted(range(1, lab.k + 1), key=lambda i: (-shared[i], i))


def find_filling(c: Complex2, lab: AbstractLabeling, relators: Sequence[Word],
                 require_reduced: bool = True, max_nodes: int | None = None,
                 timeout: float | None = None) -> FillingReport:
    """Backtracking search for pairwise distinct relators from ``relators`` filling ``c``.

    Candidates are tried in the given order; a node is one candidate tried for
    one abstract relator.  ``max_nodes`` and ``timeout`` abort the search with
    ``timed_out=True``.
    """
    lab.check(c)
    if lab.k == 0:
        raise ValueError("complex has no faces")
    red = reduction_degree(c, lab)
    if require_reduced and red > 0:
        # distinct relators make the filling exactly as reduced as the labeling
        return FillingReport(False, None, 0, False)
    lengths = lab.lengths(c)
    cons = _constraints(c, lab)
    order = fill_order(c, lab)
    pool: dict[int, list[Word]] = defaultdict(list)
    seen = set()
    for r in relators:
        r = tuple(r)
        if r in seen:
            continue
        seen.add(r)
        pool[len(r)].append(r)
    labels: dict[int, int] = {}
    chosen: dict[int, Word] = {}
    used: set[Word] = set()
    nodes = 0
    deadline = None if timeout is None else time.monotonic() + timeout

    def place(i: int, w: Word) -> list[int] | None:
        added = []
        for e, s, j in cons[i]:
            want = s * w[j]
            have = labels.get(e)
            if have is None:
                labels[e] = want
                added.append(e)
            elif have != want:
                for a in added:
                    del labels[a]
                return None
        return added

    def search(depth: int) -> bool:
        nonlocal nodes
        if depth == len(order):
            return True
        i = order[depth]
        for w in pool.get(lengths[i], ()):
            if w in used:
                continue
            nodes += 1
            if max_nodes is not None and nodes > max_nodes:
                raise _Budget
            if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
                raise _Budget
            added = place(i, w)
            if added is None:
                continue
            used.add(w)
            chosen[i] = w
            if search(depth + 1):
                return True
            used.discard(w)
            del chosen[i]
            for a in added:
                del labels[a]
        return False

    try:
        ok = search(0)
    except _Budget:
        return FillingReport(False, None, nodes, None, timed_out=True)
    if not ok:
        return FillingReport(False, None, nodes, None)
    assignment = tuple(chosen[i] for i in range(1, lab.k + 1))
    vk = make_vk(c, lab, assignment)          # re-validates consistency
    return FillingReport(True, assignment, nodes, is_reduced_vk(vk))


def exhaustive_fillings(c: Complex2, lab: AbstractLabeling, relators: Sequence[Word],
                        require_reduced: bool = True):
    """Every k-tuple of distinct relators filling ``c``, by brute force over R^k."""
    lengths = lab.lengths(c)
    k = lab.k
    for tup in itertools.permutations(relators, k):
        if any(len(tup[i - 1]) != lengths[i] for i in range(1, k + 1)):
            continue
        got = induce_labels(c, lab, tup)
        if isinstance(got, Conflict):
            continue
        if require_reduced and not is_reduced_vk(VanKampenComplex(c, lab, tup, got)):
            continue
        yield tup


# ------------------------------------------------------- fillings by B_ell

class _SignedUnion:
    """Union-find over relator letters with a sign: value(x) = sign * value(root)."""

    def __init__(self):
        self.parent: dict = {}
        self.sign: dict = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.sign[x] = 1
            return x, 1
        path = []
        s = 1
        while self.parent[x] != x:
            path.append(x)
            s *= self.sign[x]
            x = self.parent[x]
        root = x
        # compress
        acc = s
        for y in path:
            old = self.sign[y]
            self.parent[y] = root
            self.sign[y] = acc
            acc *= old
        return root, s

    def union(self, a, b, rel: int) -> bool:
        """Impose value(a) = rel * value(b); False on contradiction."""
        ra, sa = self.find(a)
        rb, sb = self.find(b)
        if ra == rb:
            return sa == rel * sb
        self.parent[ra] = rb
        self.sign[ra] = sa * rel * sb
        return True


@dataclass
class _LetterCSP:
    lengths: dict[int, int]
    slots: list[tuple[int, int]]                  # every (i, j)
    root_of: dict[tuple[int, int], tuple[object, int]]
    classes: list
    neighbours: dict                              # class -> [(other, sa, sb)]
    feasible: bool = True


def _build_csp(c: Complex2, lab: AbstractLabeling) -> _LetterCSP:
    lengths = lab.lengths(c)
    uf = _SignedUnion()
    feasible = True
    # each edge label is tied to every relator letter that reads it
    for e, lst in _edge_readings(c, lab).items():
        (i0, j0, s0) = lst[0]
        for i, j, s in lst[1:]:
            # s0 * r[i0][j0] = s * r[i][j]
            if not uf.union((i0, j0), (i, j), s0 * s):
                feasible = False
    slots = [(i, j) for i in sorted(lengths) for j in range(lengths[i])]
    root_of = {sl: uf.find(sl) for sl in slots}
    classes: list = []
    for sl in slots:
        r = root_of[sl][0]
        if r not in classes:
            classes.append(r)
    neighbours: dict = defaultdict(list)
    for i, n in lengths.items():
        if n < 2:
            continue
        for j in range(n):
            a, sa = root_of[(i, j)]
            b, sb = root_of[(i, (j + 1) % n)]
            # forbid sa*va == -(sb*vb)
            if a == b:
                if sa == -sb:
                    feasible = False
                continue
            neighbours[a].append((b, sa, sb))
            neighbours[b].append((a, sb, sa))
    return _LetterCSP(lengths, slots, root_of, classes, neighbours, feasible)


def _edge_readings(c: Complex2, lab: AbstractLabeling) -> dict[int, list[tuple[int, int, int]]]:
    out: dict[int, list] = defaultdict(list)
    for f in sorted(c.faces):
        x = lab.labels[f]
        for j, ref in face_readings(c, f, x):
            out[abs(ref)].append((abs(x), j, 1 if ref > 0 else -1))
    return out


def _solutions(csp: _LetterCSP, m: int, distinct: bool = True):
    """Yield relator tuples for every letter assignment satisfying the CSP."""
    if not csp.feasible:
        return
    letters = alphabet(m)
    value: dict = {}
    k = max(csp.lengths)
    order = csp.classes
    # distinctness is checked once every class is set
    same_len = [(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)
                if csp.lengths[a] == csp.lengths[b]]

    def words():
        return tuple(tuple(s * value[r] for r, s in
                           (csp.root_of[(i, j)] for j in range(csp.lengths[i])))
                     for i in range(1, k + 1))

    def rec(t: int):
        if t == len(order):
            ws = words()
            if distinct and any(ws[a - 1] == ws[b - 1] for a, b in same_len):
                return
            yield ws
            return
        cls = order[t]
        for v in letters:
            ok = True
            for other, s_me, s_other in csp.neighbours.get(cls, ()):
                w = value.get(other)
                if w is not None and s_me * v == -(s_other * w):
                    ok = False
                    break
            if not ok:
                continue
            value[cls] = v
            yield from rec(t + 1)
            del value[cls]

    yield from rec(0)


def universe_filling(c: Complex2, lab: AbstractLabeling, m: int) -> tuple[Word, ...] | None:
    """Some reduced filling of ``c`` by pairwise distinct words of ``B_ell``, or ``None``.

    The relator letters are tied together through the edges they label; the
    search then labels the resulting letter classes so that no relator has a
    cancelling pair (including across the wrap).
    """
    if validate(c):
        return None
    lab.check(c)
    if c.n_edges > UNIVERSE_EDGE_LIMIT:
        raise FillingScaleError(f"{c.n_edges} edges exceeds {UNIVERSE_EDGE_LIMIT}")
    if reduction_degree(c, lab) > 0:
        return None
    for sol in _solutions(_build_csp(c, lab), m):
        return sol
    return None


def fillable_by_universe(c: Complex2, lab: AbstractLabeling, m: int) -> bool:
    return universe_filling(c, lab, m) is not None


# ------------------------------------------------------------------ census

@dataclass
class Census:
    k: int
    ell: int
    m: int
    size: int
    exponent: float
    intersections: list[int]          # |S_i| for i = 0..k
    size_with_repeats: int = 0


def self_intersection_sizes(tuples: Sequence[tuple[Word, ...]], k: int) -> list[int]:
    """``|S_i|`` for ``i = 0..k``: ordered pairs of tuples sharing exactly ``i`` relators.

    Uses ``sum_{|T|=t} N_T^2 = sum_i C(i, t) |S_i|`` where ``N_T`` counts the
    tuples whose relator set contains ``T``, then solves the triangular
    system; this avoids the quadratic pair loop.
    """
    moments = [0] * (k + 1)
    for t in range(k + 1):
        cnt: Counter = Counter()
        for tup in tuples:
            for sub in itertools.combinations(sorted(tup), t):
                cnt[sub] += 1
        moments[t] = sum(v * v for v in cnt.values())
    sizes = [0] * (k + 1)
    for i in range(k, -1, -1):
        sizes[i] = moments[i] - sum(math.comb(j, i) * sizes[j] for j in range(i + 1, k + 1))
    return sizes


def self_intersection_pairwise(tuples: Sequence[tuple[Word, ...]], k: int) -> list[int]:
    sizes = [0] * (k + 1)
    sets = [set(t) for t in tuples]
    for x in sets:
        for y in sets:
            sizes[len(x & y)] += 1
    return sizes


def census_tuples(c: Complex2, lab: AbstractLabeling, m: int) -> list[tuple[Word, ...]]:
    if reduction_degree(c, lab) > 0:
        return []
    bound = 2 * m * (2 * m - 1) ** (c.n_edges - 1)
    if bound > CENSUS_LIMIT * 50:
        raise FillingScaleError(f"census of {c.n_edges} edges over m={m} is too large")
    return list(_solutions(_build_csp(c, lab), m))


def filling_census(form, ell: int, m: int = 2, relaxed: bool = False) -> Census:
    """Enumerate all distinct-relator fillings of the subdivided form by ``B_ell``."""
    from .forms import subdivide

    sub = subdivide(form, ell, relaxed=relaxed)
    c, lab = sub.complex, sub.labeling
    tuples = census_tuples(c, lab, m)
    k = lab.k
    size = len(tuples)
    expo = math.log(size) / (k * ell * math.log(2 * m - 1)) if size else float("-inf")
    return Census(k, ell, m, size, expo, self_intersection_sizes(tuples, k))


# ------------------------------------------------------------ isoperimetry

@dataclass
class AuditReport:
    n_edges: int
    red: int
    n_faces: int
    ell: int
    d: Fraction
    eps: Fraction
    lhs: int
    rhs: Fraction
    passes: bool
    boundary_length: int | None = None
    diagram_rhs: Fraction | None = None
    diagram_passes: bool | None = None
    complexity_ok: bool | None = None
    contractible: bool = field(default=False)


def boundary_length(c: Complex2) -> int:
    """Edges met by one face count once, edges met by none twice."""
    inc = c.incidence()
    return sum(1 for n in inc.values() if n == 1) + 2 * sum(1 for n in inc.values() if n == 0)


def isoperimetric_audit(c: Complex2, lab: AbstractLabeling, d, eps, ell: int | None = None,
                        planar: bool = False, K: float | None = None) -> AuditReport:
    """Compare ``|Y^(1)| + Red(Y)`` against ``(1 - d - eps) |Y| ell``.

    ``ell`` defaults to the longest face boundary.  With ``planar`` the
    diagram form ``|dD| >= (1 - 2d - eps) |D| ell`` is evaluated as well.
    """
    from .complexes import is_contractible

    d, eps = Fraction(d), Fraction(eps)
    if ell is None:
        ell = max(c.boundary_length(f) for f in c.faces)
    red = reduction_degree(c, lab)
    lhs = c.n_edges + red
    rhs = (1 - d - eps) * c.n_faces * ell
    rep = AuditReport(c.n_edges, red, c.n_faces, ell, d, eps, lhs, rhs, lhs >= rhs,
                      contractible=is_contractible(c))
    if planar:
        bl = boundary_length(c)
        rep.boundary_length = bl
        rep.diagram_rhs = (1 - 2 * d - eps) * c.n_faces * ell
        rep.diagram_passes = bl >= rep.diagram_rhs
    if K is not None:
        rep.complexity_ok = satisfies_complexity(c, K)
    return rep

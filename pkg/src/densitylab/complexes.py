"""Oriented combinatorial 2-complexes and abstract face labelings.

Edges are stored once per geometric edge with a positive integer id and a
``(start, end)`` vertex pair.  A *signed edge reference* ``+e`` means the
edge traversed from start to end, ``-e`` the inverse edge.  Faces are stored
once per geometric face as a cyclic tuple of signed references; the inverse
face is implicit.

An abstract labeling maps every geometric face to ``+i`` or ``-i``.  A face
labeled ``-i`` is the inverse of a face labeled ``i``: reading its stored
boundary gives the inverse of abstract relator ``i``.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Complex2:
    vertices: frozenset[int]
    edges: Mapping[int, tuple[int, int]]
    faces: Mapping[int, tuple[int, ...]]

    @classmethod
    def build(cls, edges: Mapping[int, tuple[int, int]] | Iterable[tuple[int, int, int]],
              faces: Mapping[int, Iterable[int]] | Iterable[Iterable[int]],
              vertices: Iterable[int] = ()) -> "Complex2":
        """Convenience constructor.

        ``edges`` is either ``{id: (start, end)}`` or an iterable of
        ``(id, start, end)``; ``faces`` either ``{id: boundary}`` or a list of
        boundaries numbered from 1.
        """
        if isinstance(edges, Mapping):
            emap = {int(e): (int(a), int(b)) for e, (a, b) in edges.items()}
        else:
            emap = {int(e): (int(a), int(b)) for e, a, b in edges}
        if isinstance(faces, Mapping):
            fmap = {int(f): tuple(int(x) for x in bd) for f, bd in faces.items()}
        else:
            fmap = {i: tuple(int(x) for x in bd) for i, bd in enumerate(faces, start=1)}
        verts = set(vertices)
        for a, b in emap.values():
            verts.update((a, b))
        return cls(frozenset(verts), dict(sorted(emap.items())), dict(sorted(fmap.items())))

    # ------------------------------------------------------------ basic queries
    def start(self, ref: int) -> int:
        a, b = self.edges[abs(ref)]
        return a if ref > 0 else b

    def end(self, ref: int) -> int:
        a, b = self.edges[abs(ref)]
        return b if ref > 0 else a

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def boundary_length(self, face: int) -> int:
        return len(self.faces[face])

    def degrees(self) -> dict[int, int]:
        """Half-edge degree of each vertex; a loop contributes 2."""
        deg = {v: 0 for v in self.vertices}
        for a, b in self.edges.values():
            deg[a] += 1
            deg[b] += 1
        return deg

    def out_refs(self) -> dict[int, list[int]]:
        """Signed edge references leaving each vertex, sorted."""
        out: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e, (a, b) in self.edges.items():
            out[a].append(e)
            out[b].append(-e)
        for refs in out.values():
            refs.sort(key=lambda r: (abs(r), r < 0))
        return out

    def incidence(self) -> Counter:
        """Number of boundary traversals of each geometric edge (with multiplicity)."""
        cnt: Counter = Counter({e: 0 for e in self.edges})
        for bd in self.faces.values():
            for ref in bd:
                cnt[abs(ref)] += 1
        return cnt


@dataclass(frozen=True)
class AbstractLabeling:
    """Face id -> signed abstract relator index in ``±{1..k}``."""
    labels: Mapping[int, int]

    @property
    def k(self) -> int:
        return max((abs(x) for x in self.labels.values()), default=0)

    def faces_of(self, i: int) -> list[int]:
        return sorted(f for f, x in self.labels.items() if abs(x) == i)

    def lengths(self, c: Complex2) -> dict[int, int]:
        """ell_i for every abstract relator; raises if faces sharing a label differ in length."""
        out: dict[int, int] = {}
        for f, x in sorted(self.labels.items()):
            n = c.boundary_length(f)
            i = abs(x)
            if out.setdefault(i, n) != n:
                raise ValueError(f"faces labeled ±{i} have boundary lengths {out[i]} and {n}")
        return out

    def check(self, c: Complex2) -> None:
        if set(self.labels) != set(c.faces):
            raise ValueError("labeling must cover exactly the faces of the complex")
        if any(x == 0 for x in self.labels.values()):
            raise ValueError("label 0 is not an abstract relator")
        used = {abs(x) for x in self.labels.values()}
        if used != set(range(1, self.k + 1)):
            raise ValueError(f"abstract relators {sorted(set(range(1, self.k + 1)) - used)} unused")
        self.lengths(c)

    @classmethod
    def distinct(cls, c: Complex2) -> "AbstractLabeling":
        """Every face gets its own abstract relator, in face-id order."""
        return cls({f: i for i, f in enumerate(sorted(c.faces), start=1)})


@dataclass(frozen=True, order=True)
class Decoration:
    """``edge`` is position ``j`` (0-based) of abstract relator ``i`` as read by ``face``.

    ``direction`` is +1 when the relator reads the stored edge forwards.
    Ordering is lexicographic on ``(i, j)`` first.
    """
    i: int
    j: int
    direction: int = field(compare=False)
    face: int = field(compare=False)


def face_readings(c: Complex2, face: int, label: int) -> list[tuple[int, int]]:
    """``(j, signed ref)`` pairs: the edge read at relator position ``j``.

    For a face labeled ``-i`` the oriented face carrying ``i`` is the inverse
    face, whose boundary is the stored one reversed with edges inverted.
    """
    bd = c.faces[face]
    n = len(bd)
    if label > 0:
        return list(enumerate(bd))
    return [(n - 1 - t, -ref) for t, ref in enumerate(bd)]


def decorations(c: Complex2, lab: AbstractLabeling) -> dict[int, list[Decoration]]:
    dec: dict[int, list[Decoration]] = {e: [] for e in c.edges}
    for f in sorted(c.faces):
        x = lab.labels[f]
        for j, ref in face_readings(c, f, x):
            dec[abs(ref)].append(Decoration(abs(x), j, 1 if ref > 0 else -1, f))
    return dec


# ------------------------------------------------------------------ validation

def validate(c: Complex2) -> list[str]:
    """Every violated structural invariant, as human-readable strings."""
    problems: list[str] = []
    for e, (a, b) in c.edges.items():
        if e <= 0:
            problems.append(f"edge {e}: ids must be positive")
        for v in (a, b):
            if v not in c.vertices:
                problems.append(f"edge {e}: unknown vertex {v}")
    used: set[int] = set()
    for f, bd in c.faces.items():
        if not bd:
            problems.append(f"face {f}: empty boundary")
            continue
        bad = [r for r in bd if abs(r) not in c.edges or r == 0]
        if bad:
            problems.append(f"face {f}: dangling edge reference(s) {bad}")
            continue
        used.update(abs(r) for r in bd)
        n = len(bd)
        for t in range(n):
            r, s = bd[t], bd[(t + 1) % n]
            if c.end(r) != c.start(s):
                problems.append(f"face {f}: boundary not a loop between positions {t} and {(t + 1) % n}")
            if s == -r and n > 1:
                problems.append(f"face {f}: boundary not cyclically reduced at position {t}")
        if n == 1 and c.start(bd[0]) != c.end(bd[0]):
            problems.append(f"face {f}: boundary not a loop")
    for e in c.edges:
        if e not in used:
            problems.append(f"edge {e}: isolated edge")
    return problems


def is_valid(c: Complex2) -> bool:
    return not validate(c)


# -------------------------------------------------------------- maximal arcs

@dataclass(frozen=True)
class Arc:
    """A maximal arc as a path of signed edge references."""
    path: tuple[int, ...]
    closed: bool = False

    def __len__(self) -> int:
        return len(self.path)


def maximal_arcs(c: Complex2) -> list[Arc]:
    deg = c.degrees()
    out = c.out_refs()
    seen: set[int] = set()
    arcs: list[Arc] = []

    def step(ref: int) -> int | None:
        # continuation through a degree-2 vertex
        v = c.end(ref)
        if deg[v] != 2:
            return None
        nxt = [r for r in out[v] if r != -ref]
        return nxt[0] if nxt else None

    for v in sorted(c.vertices):
        if deg[v] == 2:
            continue
        for ref in out[v]:
            if abs(ref) in seen:
                continue
            path = [ref]
            seen.add(abs(ref))
            nxt = step(ref)
            while nxt is not None and abs(nxt) not in seen:
                path.append(nxt)
                seen.add(abs(nxt))
                nxt = step(nxt)
            arcs.append(Arc(tuple(path)))
    # components made only of degree-2 vertices are closed arcs
    for e in c.edges:
        if e in seen:
            continue
        path = [e]
        seen.add(e)
        nxt = step(e)
        while nxt is not None and abs(nxt) not in seen:
            path.append(nxt)
            seen.add(abs(nxt))
            nxt = step(nxt)
        arcs.append(Arc(tuple(path), closed=True))
    return arcs


def face_arc_count(c: Complex2, face: int, arcs: list[Arc] | None = None) -> int:
    """Number of maximal-arc traversals along a face boundary, with multiplicity."""
    deg = c.degrees()
    bd = c.faces[face]
    starts = sum(1 for r in bd if deg[c.start(r)] != 2)
    if starts:
        return starts
    # boundary runs around a closed arc, possibly several times
    if arcs is None:
        arcs = maximal_arcs(c)
    for arc in arcs:
        if abs(bd[0]) in {abs(r) for r in arc.path}:
            return len(bd) // len(arc)
    raise AssertionError("boundary edge missing from every arc")


def satisfies_complexity(c: Complex2, K: float) -> bool:
    """Whether ``c`` has complexity ``K`` in the sense of face count, arc count
    and arcs per face boundary all bounded by ``K``."""
    if c.n_faces > K:
        return False
    arcs = maximal_arcs(c)
    if len(arcs) > K:
        return False
    return all(face_arc_count(c, f, arcs) <= K for f in c.faces)


def complexity(c: Complex2) -> int:
    """Smallest integer K for which :func:`satisfies_complexity` holds."""
    arcs = maximal_arcs(c)
    per_face = max((face_arc_count(c, f, arcs) for f in c.faces), default=0)
    return max(c.n_faces, len(arcs), per_face)


def is_contractible(c: Complex2) -> bool:
    """Some geometric edge is traversed exactly once by all boundaries together."""
    return any(n == 1 for n in c.incidence().values())


def is_connected(c: Complex2) -> bool:
    if not c.vertices:
        return True
    adj: dict[int, set[int]] = defaultdict(set)
    for a, b in c.edges.values():
        adj[a].add(b)
        adj[b].add(a)
    start = min(c.vertices)
    todo, seen = [start], {start}
    while todo:
        v = todo.pop()
        for w in adj[v] - seen:
            seen.add(w)
            todo.append(w)
    return seen == set(c.vertices)


def face_subcomplex(c: Complex2, faces: Iterable[int]) -> Complex2:
    """The faces together with exactly the edges and vertices they touch."""
    keep = sorted(set(faces))
    if not keep:
        raise ValueError("face subset must be nonempty")
    missing = [f for f in keep if f not in c.faces]
    if missing:
        raise KeyError(f"unknown faces {missing}")
    fmap = {f: c.faces[f] for f in keep}
    eids = sorted({abs(r) for bd in fmap.values() for r in bd})
    emap = {e: c.edges[e] for e in eids}
    verts = frozenset(v for e in eids for v in c.edges[e])
    return Complex2(verts, emap, fmap)


def restrict_labeling(lab: AbstractLabeling, faces: Iterable[int]) -> AbstractLabeling:
    """Restrict to ``faces`` and renumber the surviving abstract relators 1..k'."""
    faces = sorted(set(faces))
    used = sorted({abs(lab.labels[f]) for f in faces})
    renum = {i: n for n, i in enumerate(used, start=1)}
    return AbstractLabeling({f: (1 if lab.labels[f] > 0 else -1) * renum[abs(lab.labels[f])]
                             for f in faces})


# --------------------------------------------------- reduction degree & co.

def reduction_degree(c: Complex2, lab: AbstractLabeling, convention: str = "geometric") -> int:
    """Reduction degree of a labeled complex.

    ``convention="geometric"`` counts, per geometric edge, abstract relator
    ``i`` and position ``j``, the faces reading that edge (either direction)
    at ``j``; each count contributes ``(count - 1)^+``.  ``"oriented"`` keeps
    the two directions of the edge apart.  The two agree on any labeling that
    admits a filling.
    """
    if convention not in ("geometric", "oriented"):
        raise ValueError(f"unknown convention {convention!r}")
    counts: Counter = Counter()
    for f in c.faces:
        x = lab.labels[f]
        for j, ref in face_readings(c, f, x):
            if convention == "geometric":
                counts[(abs(ref), abs(x), j)] += 1
            else:
                counts[(ref, abs(x), j)] += 1
    return sum(n - 1 for n in counts.values() if n > 1)


def edge_reduction_degree(c: Complex2, lab: AbstractLabeling) -> dict[int, int]:
    """Per geometric edge share of the geometric-convention reduction degree."""
    dec = decorations(c, lab)
    out = {}
    for e, ds in dec.items():
        cnt = Counter((d.i, d.j) for d in ds)
        out[e] = sum(n - 1 for n in cnt.values() if n > 1)
    return out


def free_to_fill_stats(c: Complex2, lab: AbstractLabeling) -> dict[int, tuple[int, int]]:
    """``{i: (alpha_i, eta_i)}``.

    ``alpha_i`` counts geometric faces labeled ``±i``; ``eta_i`` counts the
    abstract letters ``(i, j)`` that are the lexicographically minimal
    decoration on every edge they decorate.
    """
    lengths = lab.lengths(c)
    dec = decorations(c, lab)
    minimal = {e: min(ds) for e, ds in dec.items() if ds}
    blocked: set[tuple[int, int]] = set()
    for e, ds in dec.items():
        low = minimal.get(e)
        for d in ds:
            if (d.i, d.j) != (low.i, low.j):
                blocked.add((d.i, d.j))
    out = {}
    for i in range(1, lab.k + 1):
        alpha = len(lab.faces_of(i))
        eta = sum(1 for j in range(lengths[i]) if (i, j) not in blocked)
        out[i] = (alpha, eta)
    return out


def free_to_fill_inequality(c: Complex2, lab: AbstractLabeling) -> tuple[int, int]:
    """``(sum_i alpha_i * eta_i, |Y^(1)| + Red(Y))``; the first never exceeds the second."""
    stats = free_to_fill_stats(c, lab)
    lhs = sum(a * e for a, e in stats.values())
    return lhs, c.n_edges + reduction_degree(c, lab)


def preferred_face_counts(c: Complex2, lab: AbstractLabeling) -> dict[int, int]:
    """For each face, the number of boundary edges on which it gives the minimal decoration."""
    dec = decorations(c, lab)
    out = {f: 0 for f in c.faces}
    for ds in dec.values():
        low = min(ds)
        for f in {d.face for d in ds if (d.i, d.j) == (low.i, low.j)}:
            out[f] += 1
    return out


# ----------------------------------------------------------------- text format

def format_complex(c: Complex2, lab: AbstractLabeling | None = None) -> str:
    lines = [f"complex v={len(c.vertices)} e={c.n_edges} f={c.n_faces}"]
    on_edges = {v for ab in c.edges.values() for v in ab}
    for v in sorted(c.vertices - on_edges):
        lines.append(f"vertex {v}")
    for e in sorted(c.edges):
        a, b = c.edges[e]
        lines.append(f"edge {e} {a} {b}")
    for f in sorted(c.faces):
        lines.append(f"face {f} : " + " ".join(str(r) for r in c.faces[f]))
    if lab is not None:
        for f in sorted(lab.labels):
            lines.append(f"label {f} {lab.labels[f]:+d}")
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> tuple[Complex2, AbstractLabeling | None, dict[str, list[list[str]]]]:
    """Parse the complex text format.

    Returns the complex, its labeling (``None`` when no ``label`` lines are
    present) and any unrecognised keyword lines grouped by keyword, which
    callers such as the form parser consume.
    """
    header = None
    verts: list[int] = []
    edges: dict[int, tuple[int, int]] = {}
    faces: dict[int, tuple[int, ...]] = {}
    labels: dict[int, int] = {}
    extra: dict[str, list[list[str]]] = defaultdict(list)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kw = tok[0]
        try:
            if kw == "complex":
                header = dict(t.split("=", 1) for t in tok[1:])
            elif kw == "vertex":
                verts.append(int(tok[1]))
            elif kw == "edge":
                e = int(tok[1])
                if e in edges:
                    raise ValueError(f"duplicate edge {e}")
                edges[e] = (int(tok[2]), int(tok[3]))
            elif kw == "face":
                if tok[2] != ":":
                    raise ValueError("expected ':' after face id")
                f = int(tok[1])
                if f in faces:
                    raise ValueError(f"duplicate face {f}")
                faces[f] = tuple(int(t) for t in tok[3:])
            elif kw == "label":
                labels[int(tok[1])] = int(tok[2])
            else:
                extra[kw].append(tok[1:])
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {raw!r}: {exc}") from None
    if header is None:
        raise ValueError("missing 'complex' header")
    c = Complex2.build(edges, faces, verts)
    expect = (len(c.vertices), c.n_edges, c.n_faces)
    got = tuple(int(header.get(k, -1)) for k in ("v", "e", "f"))
    if got != expect:
        raise ValueError(f"header counts {got} disagree with body {expect}")
    lab = AbstractLabeling(dict(sorted(labels.items()))) if labels else None
    return c, lab, dict(extra)

"""Geometric forms: 2-complexes with exact rational edge lengths.

A form ``(Y, lam)`` assigns each geometric edge a length in ``(0, 1]`` with
every face boundary of total length at most 1.  Scaling by ``ell`` and
cutting each edge into ``floor(lam_e * ell)`` unit edges gives ``Y_ell``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .complexes import (AbstractLabeling, Complex2, face_subcomplex, format_complex,
                        is_connected, parse_complex, validate)

#: critical_density refuses forms with more faces than this
CRITICAL_DENSITY_FACE_LIMIT = 20


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class GeometricForm:
    base: Complex2
    lam: Mapping[int, Fraction]
    labeling: AbstractLabeling = field(default=None)  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        if self.labeling is None:
            object.__setattr__(self, "labeling", AbstractLabeling.distinct(self.base))
        object.__setattr__(self, "lam", {e: Fraction(x) for e, x in sorted(self.lam.items())})

    def check(self) -> None:
        problems = validate(self.base)
        if problems:
            raise FormError("; ".join(problems))
        if set(self.lam) != set(self.base.edges):
            raise FormError("every edge needs exactly one length")
        for e, x in self.lam.items():
            if not 0 < x <= 1:
                raise FormError(f"edge {e}: length {x} outside (0, 1]")
        for f, bd in self.base.faces.items():
            total = sum(self.lam[abs(r)] for r in bd)
            if total > 1:
                raise FormError(f"face {f}: boundary length {total} exceeds 1")
        if not is_connected(self.base):
            raise FormError("form is not connected")
        self.labeling.check(self.base)

    def total_length(self, edges: Iterable[int] | None = None) -> Fraction:
        edges = self.lam if edges is None else edges
        return sum((self.lam[e] for e in edges), Fraction(0))


def density(form: GeometricForm) -> Fraction:
    return form.total_length() / form.base.n_faces


def subset_density(form: GeometricForm, faces: Iterable[int]) -> Fraction:
    """Density of the face-generated sub-form; goes through :func:`face_subcomplex`."""
    sub = face_subcomplex(form.base, faces)
    return form.total_length(sub.edges) / sub.n_faces


def critical_density(form: GeometricForm, limit: int = CRITICAL_DENSITY_FACE_LIMIT,
                     connected_only: bool = False) -> tuple[Fraction, tuple[int, ...]]:
    """Minimum density over face-generated sub-forms, with a minimising face set.

    Ties go to the subset with fewer faces, then the lexicographically
    smallest tuple of face ids.
    """
    faces = sorted(form.base.faces)
    nf = len(faces)
    if nf > limit:
        raise FormError(f"{nf} faces exceeds the enumeration limit {limit}")
    edges = sorted(form.base.edges)
    bit = {e: 1 << t for t, e in enumerate(edges)}
    den = math.lcm(*(x.denominator for x in form.lam.values()))
    weight = [int(form.lam[e] * den) for e in edges]
    fmask = [0] * nf
    for t, f in enumerate(faces):
        for r in form.base.faces[f]:
            fmask[t] |= bit[abs(r)]

    emask = [0] * (1 << nf)
    best: tuple | None = None
    for s in range(1, 1 << nf):
        low = s & -s
        emask[s] = emask[s ^ low] | fmask[low.bit_length() - 1]
        m = emask[s]
        num = 0
        t = 0
        while m:
            if m & 1:
                num += weight[t]
            m >>= 1
            t += 1
        size = bin(s).count("1")
        members = tuple(faces[t] for t in range(nf) if s >> t & 1)
        key = (Fraction(num, den * size), size, members)
        if best is not None and key >= best:
            continue
        if connected_only and not is_connected(face_subcomplex(form.base, members)):
            continue
        best = key
    assert best is not None
    return best[0], best[2]


def transition_density(form: GeometricForm, **kw) -> Fraction:
    return 1 - critical_density(form, **kw)[0]


# ---------------------------------------------------------------- subdivision

@dataclass(frozen=True)
class SubdividedComplex:
    complex: Complex2
    ell: int
    arc_map: Mapping[int, tuple[int, ...]]
    original_vertices: frozenset[int]
    labeling: AbstractLabeling

    def edge_count(self) -> int:
        return self.complex.n_edges


def pieces(lam: Fraction, ell: int) -> int:
    return (lam.numerator * ell) // lam.denominator


def min_admissible_ell(form: GeometricForm, min_pieces: int = 3) -> int:
    return max(-(-min_pieces * x.denominator // x.numerator) for x in form.lam.values())


def subdivide(form: GeometricForm, ell: int, relaxed: bool = False) -> SubdividedComplex:
    """Replace each edge by a path of ``floor(lam_e * ell)`` unit edges.

    Every edge needs at least 3 pieces (1 with ``relaxed``).  New edges are
    numbered consecutively, in order of the original edge ids.
    """
    need = 1 if relaxed else 3
    c = form.base
    counts = {e: pieces(x, ell) for e, x in form.lam.items()}
    short = [e for e, n in counts.items() if n < need]
    if short:
        e = short[0]
        raise FormError(
            f"edge {e} (length {form.lam[e]}) gets {counts[e]} < {need} pieces at ell={ell}; "
            f"smallest admissible ell is {min_admissible_ell(form, need)}")
    next_vertex = max(c.vertices) + 1 if c.vertices else 0
    next_edge = 1
    new_edges: dict[int, tuple[int, int]] = {}
    arc_map: dict[int, tuple[int, ...]] = {}
    for e in sorted(c.edges):
        a, b = c.edges[e]
        n = counts[e]
        chain = [a] + list(range(next_vertex, next_vertex + n - 1)) + [b]
        next_vertex += n - 1
        ids = tuple(range(next_edge, next_edge + n))
        next_edge += n
        for t, eid in enumerate(ids):
            new_edges[eid] = (chain[t], chain[t + 1])
        arc_map[e] = ids
    new_faces = {}
    for f, bd in c.faces.items():
        path: list[int] = []
        for r in bd:
            ids = arc_map[abs(r)]
            path.extend(ids if r > 0 else [-x for x in reversed(ids)])
        new_faces[f] = tuple(path)
    sub = Complex2.build(new_edges, new_faces, c.vertices)
    return SubdividedComplex(sub, ell, arc_map, frozenset(c.vertices), form.labeling)


# --------------------------------------------------------------- built-ins

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def cprime_form(lam) -> GeometricForm:
    """Two faces sharing one edge of length ``lam``, each with a private edge of ``1 - lam``."""
    lam = _frac(lam)
    if not 0 < lam < 1:
        raise FormError("cprime needs 0 < lambda < 1")
    edges = {1: (0, 1), 2: (0, 1), 3: (0, 1)}
    faces = {1: (2, -1), 2: (1, -3)}
    return GeometricForm(Complex2.build(edges, faces), {1: lam, 2: 1 - lam, 3: 1 - lam},
                         name=f"cprime({lam})")


def wheel_form(p: int) -> GeometricForm:
    """Center face of ``p`` edges of length ``1/p``, each shared with a petal
    whose private edge has length ``1 - 1/p``.  Face 1 is the center."""
    if p < 2:
        raise FormError("wheel needs p >= 2")
    edges, lam, faces = {}, {}, {}
    for t in range(p):
        edges[t + 1] = (t, (t + 1) % p)             # shared
        edges[p + t + 1] = (t, (t + 1) % p)         # petal private
        lam[t + 1] = Fraction(1, p)
        lam[p + t + 1] = 1 - Fraction(1, p)
        faces[t + 2] = (p + t + 1, -(t + 1))
    faces[1] = tuple(range(1, p + 1))
    return GeometricForm(Complex2.build(edges, faces), lam, name=f"wheel({p})")


def halfwheel_form(p: int) -> GeometricForm:
    """Center face with half its boundary covered by ``p`` petals.

    The center boundary is ``p`` shared edges of length ``1/(2p)`` followed by
    one private edge of length ``1/2``; each petal closes its shared edge with
    a private edge of length ``1 - 1/(2p)``.
    """
    if p < 1:
        raise FormError("halfwheel needs p >= 1")
    edges, lam, faces = {}, {}, {}
    for t in range(p):
        edges[t + 1] = (t, t + 1)
        edges[p + t + 1] = (t, t + 1)
        lam[t + 1] = Fraction(1, 2 * p)
        lam[p + t + 1] = 1 - Fraction(1, 2 * p)
        faces[t + 2] = (p + t + 1, -(t + 1))
    edges[2 * p + 1] = (p, 0)
    lam[2 * p + 1] = Fraction(1, 2)
    faces[1] = tuple(range(1, p + 1)) + (2 * p + 1,)
    return GeometricForm(Complex2.build(edges, faces), lam, name=f"halfwheel({p})")


def counterexample_form() -> GeometricForm:
    """The three-face disk whose two inner faces alone have density 11/20.

    Vertex 0 is where the inner circle touches the outer one, vertex 1 the
    other end of the chord.  Edge 1 is the outer circle (a loop), 2 and 3
    the two inner arcs, 4 the chord.  Face 1 is the outer face, 2 and 3 the
    inner half-disks.
    """
    edges = {1: (0, 0), 2: (0, 1), 3: (0, 1), 4: (0, 1)}
    faces = {1: (1, 2, -3), 2: (2, -4), 3: (4, -3)}
    lam = {1: Fraction(8, 10), 2: Fraction(1, 10), 3: Fraction(1, 10), 4: Fraction(9, 10)}
    return GeometricForm(Complex2.build(edges, faces), lam, name="counterexample")


COUNTEREXAMPLE_INNER = (2, 3)


def disk_form(lengths: Iterable = (1,)) -> GeometricForm:
    """One face whose boundary is a cycle of edges with the given lengths."""
    lengths = [_frac(x) for x in lengths]
    n = len(lengths)
    edges = {t + 1: (t, (t + 1) % n) for t in range(n)}
    faces = {1: tuple(range(1, n + 1))}
    return GeometricForm(Complex2.build(edges, faces), dict(zip(edges, lengths)),
                         name=f"disk({n})")


BUILTINS = {
    "cprime": cprime_form,
    "wheel": wheel_form,
    "halfwheel": halfwheel_form,
    "counterexample": counterexample_form,
    "disk": lambda *xs: disk_form(xs or (1,)),
}

_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def builtin_form(name: str, *params) -> GeometricForm:
    if name not in BUILTINS:
        raise FormError(f"unknown form {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[name](*params)


def parse_builtin(spec: str) -> GeometricForm:
    """``"wheel(3)"``, ``"cprime(1/3)"``, ``"counterexample"`` (``builtin:`` prefix optional)."""
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    mt = _CALL.match(spec)
    if not mt:
        raise FormError(f"cannot parse form spec {spec!r}")
    name, args = mt.groups()
    params: list = []
    if args and args.strip():
        for a in args.split(","):
            a = a.strip()
            x = Fraction(a)
            params.append(int(x) if x.denominator == 1 and "/" not in a and name != "cprime" else x)
    return builtin_form(name, *params)


# ----------------------------------------------------------------- text format

def format_form(form: GeometricForm) -> str:
    text = format_complex(form.base, form.labeling)
    lines = [f"lambda {e} {x.numerator}/{x.denominator}" for e, x in sorted(form.lam.items())]
    return text + "\n".join(lines) + "\n"


def parse_form(text: str) -> GeometricForm:
    c, lab, extra = parse_complex(text)
    lam = {}
    for tok in extra.pop("lambda", []):
        lam[int(tok[0])] = Fraction(tok[1])
    if extra:
        raise FormError(f"unknown line types {sorted(extra)}")
    return GeometricForm(c, lam, lab)


def load_form(spec: str) -> GeometricForm:
    """A ``builtin:`` spec or a path to a form file."""
    if spec.startswith("builtin:"):
        return parse_builtin(spec)
    with open(spec) as fh:
        return parse_form(fh.read())

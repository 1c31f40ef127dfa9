"""Phase-transition sweeps and batch audits.

Every trial draws its presentation from ``trial_rng(seed, ell_idx, d_idx, trial)``,
so a row depends only on the sweep parameters and the master seed, never on
how trials are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .filling import AuditReport, find_filling, isoperimetric_audit
from .forms import GeometricForm, SubdividedComplex, load_form, subdivide
from .sampler import ModelConfig, sample_presentation, trial_rng
from .smallcancel import check_b2p, check_cp, check_cprime, piece_table
from .words import Word

CSV_COLUMNS = ["ell", "d_num", "d_den", "trials", "successes", "fraction",
               "mean_relators", "timeouts", "seconds"]
#: node budget of one fill search inside a sweep
DEFAULT_MAX_NODES = 200_000

_PRED = re.compile(r"^\s*(cprime|cp|b2p|fillable)\s*\((.+)\)\s*$")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    kind: str
    arg: object
    text: str

    @classmethod
    def parse(cls, text: str) -> "Predicate":
        mt = _PRED.match(text)
        if not mt:
            raise SpecError(f"bad predicate {text!r}; use cprime(l), cp(p), b2p(p) or fillable(form)")
        kind, arg = mt.group(1), mt.group(2).strip()
        try:
            if kind == "cprime":
                val: object = Fraction(arg)
                if not 0 < val < 1:
                    raise SpecError("lambda must lie in (0, 1)")
            elif kind in ("cp", "b2p"):
                val = int(arg)
                if val < (2 if kind == "cp" else 1):
                    raise SpecError(f"{kind} parameter too small")
            else:
                if not arg.startswith("builtin:") and not os.path.exists(arg):
                    arg = "builtin:" + arg
                load_form(arg).check()
                val = arg
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(str(exc)) from exc
        return cls(kind, val, text)


@dataclass(frozen=True)
class SweepSpec:
    m: int
    ells: tuple[int, ...]
    densities: tuple[Fraction, ...]
    trials: int
    seed: int
    predicate: str
    model: str = "bernoulli"
    exact_length: bool = False
    max_nodes: int | None = DEFAULT_MAX_NODES
    timeout: float | None = None
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "densities", tuple(Fraction(d) for d in self.densities))
        object.__setattr__(self, "ells", tuple(int(x) for x in self.ells))
        if not self.ells or not self.densities:
            raise SpecError("the (ell, d) grid is empty")
        if self.trials < 1:
            raise SpecError("trials must be >= 1")
        if any(not 0 <= d <= 1 for d in self.densities):
            raise SpecError("densities must lie in [0, 1]")
        Predicate.parse(self.predicate)


@dataclass(frozen=True)
class TrialResult:
    ell_idx: int
    d_idx: int
    trial: int
    success: bool
    n_relators: int
    timed_out: bool
    seconds: float
    filling: tuple[Word, ...] | None = None


@dataclass
class SweepRow:
    ell: int
    d: Fraction
    trials: int
    successes: int
    mean_relators: float
    timeouts: int
    seconds: float = 0.0

    @property
    def fraction(self) -> float:
        return self.successes / self.trials

    def as_csv(self, timing: bool = False) -> list[str]:
        return [str(self.ell), str(self.d.numerator), str(self.d.denominator), str(self.trials),
                str(self.successes), f"{self.fraction:.6f}", f"{self.mean_relators:.6f}",
                str(self.timeouts), f"{self.seconds if timing else 0.0:.3f}"]


_SUBDIVISIONS: dict[tuple[str, int], SubdividedComplex] = {}


def _subdivided(form_spec: str, ell: int) -> SubdividedComplex:
    key = (form_spec, ell)
    if key not in _SUBDIVISIONS:
        _SUBDIVISIONS[key] = subdivide(load_form(form_spec), ell)
    return _SUBDIVISIONS[key]


def evaluate(pred: Predicate, relators: Sequence[Word], ell: int, max_nodes: int | None = None,
             timeout: float | None = None) -> tuple[bool, bool, tuple[Word, ...] | None]:
    """``(success, timed_out, filling)``; success means the condition fails or a filling exists."""
    if pred.kind == "fillable":
        sub = _subdivided(pred.arg, ell)
        rep = find_filling(sub.complex, sub.labeling, relators, require_reduced=True,
                           max_nodes=max_nodes, timeout=timeout)
        return rep.found, rep.timed_out, rep.assignment
    if not relators:
        return False, False, None
    table = piece_table(relators)
    if pred.kind == "cprime":
        ok = check_cprime(relators, pred.arg, table)[0]
    elif pred.kind == "cp":
        ok = check_cp(relators, pred.arg, table)[0]
    else:
        ok = check_b2p(relators, pred.arg, table)[0]
    return not ok, False, None


def run_trial(spec: SweepSpec, ell_idx: int, d_idx: int, trial: int) -> TrialResult:
    t0 = time.perf_counter()
    ell, d = spec.ells[ell_idx], spec.densities[d_idx]
    cfg = ModelConfig(spec.m, ell, d, spec.model, spec.seed, spec.exact_length)
    pres = sample_presentation(cfg, trial_rng(spec.seed, ell_idx, d_idx, trial))
    pred = Predicate.parse(spec.predicate)
    ok, to, fill = evaluate(pred, pres.relators, ell, spec.max_nodes, spec.timeout)
    return TrialResult(ell_idx, d_idx, trial, ok, len(pres.relators), to,
                       time.perf_counter() - t0, fill)


def _run_chunk(args) -> list[TrialResult]:
    spec, keys = args
    return [run_trial(spec, *k) for k in keys]


def trial_keys(spec: SweepSpec) -> list[tuple[int, int, int]]:
    return [(a, b, t) for a in range(len(spec.ells)) for b in range(len(spec.densities))
            for t in range(spec.trials)]


def run_trials(spec: SweepSpec, jobs: int = 1) -> list[TrialResult]:
    """All trials of the sweep, sorted by key whatever the worker count."""
    keys = trial_keys(spec)
    if jobs <= 1:
        results = [run_trial(spec, *k) for k in keys]
    else:
        size = max(1, len(keys) // (jobs * 8))
        chunks = [(spec, keys[i:i + size]) for i in range(0, len(keys), size)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = [r for part in ex.map(_run_chunk, chunks) for r in part]
    results.sort(key=lambda r: (r.ell_idx, r.d_idx, r.trial))
    return results


def aggregate(spec: SweepSpec, results: Iterable[TrialResult]) -> list[SweepRow]:
    rows = {}
    for a, ell in enumerate(spec.ells):
        for b, d in enumerate(spec.densities):
            rows[(a, b)] = SweepRow(ell, d, 0, 0, 0.0, 0, 0.0)
    total_rel: dict = {k: 0 for k in rows}
    for r in results:
        row = rows[(r.ell_idx, r.d_idx)]
        row.trials += 1
        row.successes += r.success
        row.timeouts += r.timed_out
        row.seconds += r.seconds
        total_rel[(r.ell_idx, r.d_idx)] += r.n_relators
    for k, row in rows.items():
        row.mean_relators = total_rel[k] / row.trials if row.trials else 0.0
    return [rows[k] for k in sorted(rows)]


def phase_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    return aggregate(spec, run_trials(spec, jobs))


def rows_to_csv(rows: Iterable[SweepRow], timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.as_csv(timing))
    return buf.getvalue()


# ------------------------------------------------------------------- audits

@dataclass
class AuditRow:
    name: str
    report: AuditReport

    def as_csv(self) -> list[str]:
        r = self.report
        return [self.name, str(r.ell), str(r.n_faces), str(r.n_edges), str(r.red), str(r.lhs),
                _q(r.rhs), str(r.passes).lower(),
                "" if r.boundary_length is None else str(r.boundary_length),
                "" if r.diagram_passes is None else str(r.diagram_passes).lower(),
                "" if r.complexity_ok is None else str(r.complexity_ok).lower()]


AUDIT_COLUMNS = ["name", "ell", "faces", "edges", "red", "lhs", "rhs", "passes",
                 "boundary", "diagram_passes", "complexity_ok"]


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def audit_form(form: GeometricForm, ell: int, d, eps, K: float | None = None,
               faces: Sequence[int] | None = None, planar: bool = False) -> AuditReport:
    """Audit ``Y_ell`` (or the subcomplex generated by ``faces``) at scale ``ell``."""
    from .complexes import face_subcomplex, restrict_labeling

    sub = subdivide(form, ell)
    c, lab = sub.complex, sub.labeling
    if faces is not None:
        c = face_subcomplex(c, faces)
        lab = restrict_labeling(lab, faces)
    return isoperimetric_audit(c, lab, d, eps, ell=ell, planar=planar, K=K)


def audit_csv(rows: Iterable[AuditRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AUDIT_COLUMNS)
    for row in rows:
        w.writerow(row.as_csv())
    return buf.getvalue()


@dataclass
class CoherenceReport:
    """Fillings found in a fill sweep, checked against the audit of the filled complex."""
    fillings: int = 0
    violations: list[tuple[int, Fraction, int]] = field(default_factory=list)


def audit_sweep(spec: SweepSpec, eps, jobs: int = 1,
                results: Sequence[TrialResult] | None = None) -> CoherenceReport:
    """Audit every filling found by a ``fillable(form)`` sweep at its own ``(d, eps)``.

    A violation is a reduced filling of ``Y_ell`` at a grid point where the
    audit shows ``Y_ell`` breaks the isoperimetric inequality.
    """
    pred = Predicate.parse(spec.predicate)
    if pred.kind != "fillable":
        raise SpecError("audit_sweep needs a fillable(form) predicate")
    if results is None:
        results = run_trials(spec, jobs)
    out = CoherenceReport()
    for r in results:
        if not r.success:
            continue
        ell, d = spec.ells[r.ell_idx], spec.densities[r.d_idx]
        sub = _subdivided(pred.arg, ell)
        out.fillings += 1
        rep = isoperimetric_audit(sub.complex, sub.labeling, d, eps, ell=ell)
        if not rep.passes:
            out.violations.append((ell, d, r.trial))
    return out

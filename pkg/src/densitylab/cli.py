"""Command line entry point: ``densitylab <command> ...``."""
from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from . import experiments as ex
from .complexes import parse_complex
from .filling import FillingScaleError, filling_census, find_filling, isoperimetric_audit
from .forms import (COUNTEREXAMPLE_INNER, FormError, critical_density, density, load_form,
                    min_admissible_ell, subdivide)
from .sampler import (MODELS, ModelConfig, SamplingError, format_presentation,
                      parse_presentation, sample_presentation, trial_rng)
from .smallcancel import check_b2p, check_cp, check_cprime, piece_table
from .words import ScaleError, format_word

EXIT_USAGE = 2
EXIT_IO = 3


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}")


def _q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _form_spec(s: str) -> str:
    if s.startswith("builtin:"):
        return s
    return s if os.path.exists(s) else "builtin:" + s


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


# ----------------------------------------------------------------- commands

def cmd_sample(args) -> int:
    cfg = ModelConfig(args.m, args.ell, args.d, args.model, args.seed, args.exact_length)
    pres = sample_presentation(cfg, trial_rng(args.seed))
    _emit(args, format_presentation(pres))
    return 0


def cmd_check_sc(args) -> int:
    pres = parse_presentation(_read(args.presentation), reduce=args.reduce)
    table = piece_table(pres.relators)
    conds = list(args.condition)
    conds += [f"cprime({_q(x)})" for x in args.cprime]
    conds += [f"cp({p})" for p in args.cp] + [f"b2p({p})" for p in args.b2p]
    if not conds:
        raise ex.SpecError("no condition given")
    lines = []
    for cond in conds:
        pred = ex.Predicate.parse(cond)
        if pred.kind == "cprime":
            ok, wit = check_cprime(pres.relators, pred.arg, table)
            detail = "-" if wit is None else f"{format_word(wit.piece)}@r{wit.relator + 1}"
        elif pred.kind == "cp":
            ok, wit = check_cp(pres.relators, pred.arg, table)
            detail = "-" if wit is None else ".".join(map(format_word, wit.factors)) + f"@r{wit.relator + 1}"
        elif pred.kind == "b2p":
            ok, wit = check_b2p(pres.relators, pred.arg, table)
            detail = "-" if wit is None else ".".join(map(format_word, wit.factors)) + f"@r{wit.relator + 1}"
        else:
            raise ex.SpecError("check-sc takes cprime(l), cp(p) or b2p(p)")
        lines.append(f"{cond} {str(ok).lower()} witness={detail}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_fill(args) -> int:
    form = load_form(_form_spec(args.form))
    form.check()
    sub = subdivide(form, args.ell, relaxed=args.relaxed)
    out = []
    if args.presentation:
        pres = parse_presentation(_read(args.presentation), reduce=args.reduce)
        t0 = time.perf_counter()
        rep = find_filling(sub.complex, sub.labeling, pres.relators,
                           require_reduced=args.require_reduced, max_nodes=args.max_nodes,
                           timeout=args.timeout)
        secs = time.perf_counter() - t0
        rels = "" if rep.assignment is None else ",".join(map(format_word, rep.assignment))
        out.append(f"found={str(rep.found).lower()} relators={rels} nodes={rep.nodes_explored}"
                   + (" timed_out=true" if rep.timed_out else "")
                   + (f" seconds={secs:.3f}" if args.timing else ""))
    if args.census or not args.presentation:
        cen = filling_census(form, args.ell, args.m, relaxed=args.relaxed)
        out.append(_census_line(cen))
    _emit(args, "\n".join(out) + "\n")
    return 0


def _census_line(cen) -> str:
    parts = " ".join(str(x) for x in cen.intersections)
    return (f"census k={cen.k} ell={cen.ell} m={cen.m} size={cen.size} "
            f"exponent={cen.exponent:.6f} intersections={parts}")


def cmd_census(args) -> int:
    form = load_form(_form_spec(args.form))
    form.check()
    lines = []
    for ell in args.ell:
        t0 = time.perf_counter()
        cen = filling_census(form, ell, args.m, relaxed=args.relaxed)
        line = _census_line(cen)
        if args.timing:
            line += f" seconds={time.perf_counter() - t0:.3f}"
        lines.append(line)
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_critical_density(args) -> int:
    lines = []
    for spec in args.form:
        t0 = time.perf_counter()
        form = load_form(_form_spec(spec))
        form.check()
        dc, wit = critical_density(form, connected_only=args.connected)
        line = (f"dens={_q(density(form))} dens_c={_q(dc)} witness={','.join(map(str, wit))} "
                f"transition_d={_q(1 - dc)}")
        if args.timing:
            line += f" seconds={time.perf_counter() - t0:.3f}"
        lines.append(line)
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_audit(args) -> int:
    rows = []
    for spec in args.form or []:
        form = load_form(_form_spec(spec))
        form.check()
        for ell in args.ell or [min_admissible_ell(form)]:
            rows.append(ex.AuditRow(f"{spec}@{ell}", ex.audit_form(
                form, ell, args.d, args.eps, K=args.K, planar=args.planar)))
            if args.inner and spec.endswith("counterexample"):
                rows.append(ex.AuditRow(f"{spec}[inner]@{ell}", ex.audit_form(
                    form, ell, args.d, args.eps, K=args.K, faces=COUNTEREXAMPLE_INNER,
                    planar=args.planar)))
    for path in args.complex or []:
        c, lab, _ = parse_complex(_read(path))
        if lab is None:
            raise ex.SpecError(f"{path}: complex has no face labels")
        rows.append(ex.AuditRow(path, isoperimetric_audit(c, lab, args.d, args.eps,
                                                          planar=args.planar, K=args.K)))
    if not rows:
        raise ex.SpecError("nothing to audit: give --form or --complex")
    _emit(args, ex.audit_csv(rows))
    passed = sum(r.report.passes for r in rows)
    print(f"audited={len(rows)} passed={passed} failed={len(rows) - passed}", file=sys.stderr)
    return 0


def cmd_phase_sweep(args) -> int:
    spec = ex.SweepSpec(m=args.m, ells=tuple(args.ell), densities=tuple(args.d),
                        trials=args.trials, seed=args.seed, predicate=args.predicate,
                        model=args.model, exact_length=args.exact_length,
                        max_nodes=args.max_nodes or None, timeout=args.timeout, out=args.out)
    results = ex.run_trials(spec, args.jobs)
    rows = ex.aggregate(spec, results)
    _emit(args, ex.rows_to_csv(rows, timing=args.timing))
    if args.audit_eps is not None:
        rep = ex.audit_sweep(spec, args.audit_eps, results=results)
        print(f"fillings={rep.fillings} audit_violations={len(rep.violations)}", file=sys.stderr)
    return 0


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=["csv"], default=argparse.SUPPRESS)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="report wall-clock seconds (breaks byte-identical output)")

    p = argparse.ArgumentParser(prog="densitylab", description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.add_argument("--timing", action="store_true", default=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", parents=[common], help="draw a random presentation")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--d", type=_frac, required=True)
    s.add_argument("--model", choices=MODELS, default="bernoulli")
    s.add_argument("--exact-length", action="store_true")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("check-sc", parents=[common], help="small-cancellation conditions")
    s.add_argument("--presentation", required=True)
    s.add_argument("condition", nargs="*", help="cprime(1/2), cp(3), b2p(2) ...")
    s.add_argument("--cprime", type=_frac, action="append", default=[], metavar="P/Q")
    s.add_argument("--cp", type=int, action="append", default=[], metavar="P")
    s.add_argument("--b2p", type=int, action="append", default=[], metavar="P")
    s.add_argument("--reduce", action="store_true", help="cyclically reduce input words")
    s.set_defaults(func=cmd_check_sc)

    s = sub.add_parser("fill", parents=[common], help="search a filling of a subdivided form")
    s.add_argument("--form", required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--presentation")
    s.add_argument("--require-reduced", action="store_true")
    s.add_argument("--census", action="store_true")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--timeout", type=float, default=None)
    s.add_argument("--relaxed", action="store_true", help="allow edges of fewer than 3 pieces")
    s.add_argument("--reduce", action="store_true")
    s.set_defaults(func=cmd_fill)

    s = sub.add_parser("critical-density", parents=[common], help="density and critical density")
    s.add_argument("form", nargs="+")
    s.add_argument("--connected", action="store_true", help="connected subforms only")
    s.set_defaults(func=cmd_critical_density)

    s = sub.add_parser("audit", parents=[common], help="isoperimetric audit of complexes")
    s.add_argument("--form", action="append")
    s.add_argument("--complex", action="append")
    s.add_argument("--ell", type=int, nargs="+", default=None,
                   help="scales (default: smallest admissible per form)")
    s.add_argument("--d", type=_frac, required=True)
    s.add_argument("--eps", type=_frac, default=Fraction(0))
    s.add_argument("--K", type=float, default=None)
    s.add_argument("--planar", action="store_true")
    s.add_argument("--inner", action="store_true", help="also audit the inner pair of the counterexample")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("phase-sweep", parents=[common], help="Monte Carlo sweep over (ell, d)")
    s.add_argument("--predicate", required=True)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--ell", type=int, nargs="+", required=True)
    s.add_argument("--d", type=_frac, nargs="+", required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--model", choices=MODELS, default="bernoulli")
    s.add_argument("--exact-length", action="store_true")
    s.add_argument("--max-nodes", type=int, default=ex.DEFAULT_MAX_NODES,
                   help="fill search budget per trial; 0 disables")
    s.add_argument("--timeout", type=float, default=None, help="wall-clock limit per fill search")
    s.add_argument("--audit-eps", type=_frac, default=None,
                   help="audit every filling found at (d, eps)")
    s.set_defaults(func=cmd_phase_sweep)

    s = sub.add_parser("census", parents=[common], help="enumerate all fillings by B_ell")
    s.add_argument("--form", required=True)
    s.add_argument("--ell", type=int, nargs="+", required=True)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--relaxed", action="store_true")
    s.set_defaults(func=cmd_census)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, FormError, ScaleError, FillingScaleError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

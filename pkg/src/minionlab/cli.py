"""Command-line harness: ``minionlab <group> <verb> [options]``.

Exit codes:
  0  success
  1  verdict failure (an audit found a violation, no representation, ...)
  2  usage error
  3  malformed input file
  4  size cap exceeded
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

import numpy as np

from . import boolfn, fourier, labelcover, pcsp, ptf, pullback, shapley
from .boolfn import ArityError, BooleanFunction
from .rng import make_rng

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_MALFORMED, EXIT_CAP = 0, 1, 2, 3, 4


class VerdictFailure(Exception):
    pass


class MalformedInput(Exception):
    pass


# ------------------------------------------------------------------ output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(float(v)):
            return json.dumps(str(float(v)))
        return format(float(v), ".17g")
    if v is None:
        return "null"
    return json.dumps(str(v))


def render(rows, columns, fmt) -> str:
    if fmt == "json":
        objs = ["{" + ", ".join(f"{json.dumps(c)}: {_json_value(r[c])}" for c in columns) + "}" for r in rows]
        return "[\n" + ",\n".join("  " + o for o in objs) + "\n]\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(args, text: str, summary: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def emit_rows(args, rows, columns, summary):
    emit(args, render(rows, columns, args.format), summary)


# ------------------------------------------------------------------ inputs

_BUILTIN = re.compile(r"^(maj|parity|and|or)(\d+)$")


def parse_fn(spec: str) -> BooleanFunction:
    """A function from a file (first record) or a builtin name.

    Builtins: maj<n>, parity<n>, and<n>, or<n>, thr:<n>:<t>, dict:<n>:<i>,
    const:<n>:<b>, tribes:<w>:<s>, majxor:<m>, collapse, hex:<n>:<table>.
    """
    m = _BUILTIN.match(spec)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return {"maj": boolfn.majority, "parity": boolfn.parity,
                "and": boolfn.conjunction, "or": boolfn.disjunction}[kind](n)
    parts = spec.split(":")
    try:
        if parts[0] == "thr":
            return boolfn.make_threshold(int(parts[1]), int(parts[2]))
        if parts[0] == "dict":
            return boolfn.dictator(int(parts[1]), int(parts[2]))
        if parts[0] == "const":
            return boolfn.constant(int(parts[1]), int(parts[2]))
        if parts[0] == "tribes":
            return boolfn.tribes(int(parts[1]), int(parts[2]))
        if parts[0] == "majxor":
            return pullback.majority_of_xor_pairs(int(parts[1]))
        if parts[0] == "collapse":
            return boolfn.influence_collapse_example()
        if parts[0] == "hex":
            return boolfn.parse_hex(int(parts[1]), parts[2])
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ArityError):
            raise
        raise MalformedInput(f"bad function spec {spec!r}: {exc}") from exc
    try:
        fs = boolfn.read_functions(spec)
    except FileNotFoundError:
        raise MalformedInput(f"no such function file or builtin: {spec!r}") from None
    except ValueError as exc:
        raise MalformedInput(f"{spec}: {exc}") from exc
    if not fs:
        raise MalformedInput(f"{spec}: no function records")
    return fs[0]


def read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc


def parse_template_arg(spec):
    try:
        return pcsp.builtin_template(spec)
    except KeyError:
        pass
    try:
        return pcsp.parse_template(read_text(spec))
    except (ValueError, KeyError) as exc:
        raise MalformedInput(f"{spec}: {exc}") from exc


def parse_poly_arg(spec):
    """avg:<n> (the average of n coordinates, t = 1/2) or a polynomial file."""
    if spec.startswith("avg:"):
        n = int(spec.split(":")[1])
        q = ptf.MultilinearPoly(n, 1, {1 << i: 1.0 / n for i in range(n)})
        return ptf.Representation(q, 0.5, "positive")
    try:
        return ptf.parse_representation(read_text(spec))
    except (ValueError, KeyError) as exc:
        raise MalformedInput(f"{spec}: {exc}") from exc


def parse_instance_arg(path):
    try:
        return labelcover.parse_instance(read_text(path))
    except ValueError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def float_list(text):
    return [float(x) for x in text.split(",") if x]


# ------------------------------------------------------------------ fourier

def cmd_fourier_expand(args):
    f = parse_fn(args.fn)
    e = fourier.expand(f, args.p)
    sizes = e.sizes()
    rows = [{"mask": m, "size": int(sizes[m]), "coefficient": float(e.coeffs[m])} for m in range(len(e.coeffs))]
    emit_rows(args, rows, ["mask", "size", "coefficient"],
              f"expanded arity {f.arity} at p={args.p!r}; norm^2={e.norm_sq():.17g}")


def cmd_fourier_influence(args):
    f = parse_fn(args.fn)
    rows, worst = [], 0.0
    for i in range(f.arity):
        vals = {m: fourier.influence(f, args.p, i, m) for m in ("definition", "spectral", "flip")}
        worst = max(worst, max(vals.values()) - min(vals.values()))
        rows.append({"coordinate": i, "influence_definition": vals["definition"],
                     "influence_spectral": vals["spectral"], "influence_flip": vals["flip"],
                     "flip_probability": fourier.flip_probability(f, args.p, i)})
    total = fourier.total_influence(f, args.p)
    emit_rows(args, rows, ["coordinate", "influence_definition", "influence_spectral", "influence_flip",
                           "flip_probability"],
              f"total influence {total:.17g}; max method disagreement {worst:.3g}")
    if worst > 1e-9:
        raise VerdictFailure("influence methods disagree")


def cmd_fourier_noise(args):
    f = parse_fn(args.fn)
    rows, failed = [], False
    for delta in float_list(args.delta):
        spec = fourier.noise_sensitivity(f, args.p, delta, "spectral")
        mc, se = fourier.noise_sensitivity_mc(f, args.p, delta, args.trials, make_rng(args.seed, int(delta * 1e9)))
        ok = abs(spec - mc) <= 3 * se + 1e-12
        failed |= not ok
        rows.append({"delta": delta, "ns_spectral": spec, "ns_mc": mc, "stderr": se, "agree": ok})
    emit_rows(args, rows, ["delta", "ns_spectral", "ns_mc", "stderr", "agree"],
              f"noise sensitivity at {len(rows)} delta values; {'all agree' if not failed else 'DISAGREEMENT'}")
    if failed:
        raise VerdictFailure("spectral and Monte-Carlo noise sensitivity disagree")


# ------------------------------------------------------------------ shapley

def cmd_shapley(args):
    f = parse_fn(args.fn)
    if not shapley.is_monotone(f):
        raise VerdictFailure("Shapley values need a monotone function")
    rows = [{"coordinate": i, "phi_exact": a, "phi_mc": b, "phi_integral": c}
            for i, a, b, c in shapley.shapley_table(f, args.trials, args.seed, args.threads)]
    total = sum(r["phi_exact"] for r in rows)
    emit_rows(args, rows, ["coordinate", "phi_exact", "phi_mc", "phi_integral"],
              f"shapley values of arity {f.arity}; sum {total:.17g}")


# ----------------------------------------------------------------- pullback

def cmd_pullback_mass(args):
    table = pullback.pullback_mass_table(args.m, args.p)
    pc = np.array([bin(i).count("1") for i in range(table.size)])
    rows = [{"point": i, "popcount": int(pc[i]), "mass": float(table[i])} for i in range(table.size)]
    emit_rows(args, rows, ["point", "popcount", "mass"], f"pull-back mass m={args.m} p={args.p!r}; total {table.sum():.17g}")


def cmd_pullback_audit(args):
    if args.kind == "density":
        rows = []
        for p in float_list(args.pgrid) if args.pgrid else [args.p]:
            a = pullback.density_ratio_audit(args.m, p)
            rows.append({"m": args.m, "p": p, "min_ratio": a.min_ratio, "argmin": "".join(map(str, a.argmin)),
                         "max_ratio": a.max_ratio, "argmax": "".join(map(str, a.argmax))})
        worst = min(r["min_ratio"] for r in rows)
        emit_rows(args, rows, ["m", "p", "min_ratio", "argmin", "max_ratio", "argmax"],
                  f"density audit m={args.m}: min ratio {worst:.17g}")
        if worst < 1 - 1e-12:
            raise VerdictFailure("density ratio below 1")
        return
    n = args.arity
    rows, bad = [], 0
    for p in float_list(args.pgrid) if args.pgrid else [args.p]:
        if n <= 4:
            tables = pullback.all_functions(n)
        else:
            rng = make_rng(args.seed, n)
            tables = (rng.random((args.trials, 1 << n)) < 0.5).astype(np.uint8)
        lhs, rhs = pullback.gluing_bound_batch(tables, n, p)
        slack = lhs - rhs
        v = int(np.sum(slack < -1e-9))
        bad += v
        rows.append({"arity": n, "p": p, "functions": tables.shape[0], "violations": v,
                     "min_slack": float(slack.min())})
    emit_rows(args, rows, ["arity", "p", "functions", "violations", "min_slack"],
              f"gluing audit arity {n}: {bad} violations")
    if bad:
        raise VerdictFailure("gluing inequality violated")


def cmd_pullback_preserve(args):
    f = pullback.pad_to_even(parse_fn(args.fn))
    taus = float_list(args.tau)
    r = pullback.influence_preservation_experiment(f, args.coord, args.p, args.trials, taus, args.seed, args.threads)
    if args.table == "trials":
        rows = [{"trial": t, "target_coordinate": int(r.targets[t]), "influence": float(r.influences[t])}
                for t in range(r.trials)]
        rows.append({"trial": "summary", "target_coordinate": "", "influence": r.mean_influence})
        cols = ["trial", "target_coordinate", "influence"]
    else:
        rows = [{"tau": tau, "probability": pr} for tau, pr in r.exceedance_table()]
        cols = ["tau", "probability"]
    emit_rows(args, rows, cols, f"preservation: Inf[f,{args.coord}]={r.source_influence:.17g}, "
                                f"I[f]/m={r.total_influence:.17g}, mean minor influence {r.mean_influence:.17g}")


# ---------------------------------------------------------------------- ptf

def cmd_ptf_represent(args):
    f = parse_fn(args.fn)
    rep = ptf.find_representation(f, args.degree, args.mode, args.margin, exact=args.exact)
    if rep is None:
        emit(args, "", f"no degree-{args.degree} {args.mode} representation")
        raise VerdictFailure("no representation")
    if args.format == "poly":
        emit(args, ptf.format_representation(rep), f"{args.mode} representation of degree {args.degree}")
        return
    rows = [{"kind": "threshold", "mask": "", "value": float(rep.t)}]
    rows += [{"kind": "coefficient", "mask": f"{m:x}", "value": float(c)} for m, c in sorted(rep.poly.coeffs.items())]
    emit_rows(args, rows, ["kind", "mask", "value"], f"{args.mode} representation of degree {args.degree}")


def cmd_ptf_minmaxweight(args):
    f = parse_fn(args.fn)
    opt = ptf.min_max_weight(f, args.degree, args.margin, exact=args.exact)
    if opt is None:
        emit(args, "", "no positive representation")
        raise VerdictFailure("no representation")
    emit_rows(args, [{"degree": args.degree, "margin": args.margin, "min_max_weight": opt}],
              ["degree", "margin", "min_max_weight"], f"min max weight {opt:.17g}")


def cmd_ptf_heavyset(args):
    f = parse_fn(args.fn)
    try:
        res = ptf.find_heavy_set(f, args.degree, args.epsilon, args.margin)
    except ValueError as exc:
        raise VerdictFailure(str(exc)) from exc
    certified = res.outcome == "heavy" and (not res.coords or ptf.is_heavy_set(
        f, args.degree, args.epsilon / 2, res.coords, args.margin))
    row = {"coords": " ".join(map(str, sorted(res.coords))), "size": len(res.coords), "outcome": res.outcome,
           "iterations": res.iterations, "bound": res.bound, "certified": certified}
    emit_rows(args, [row], list(row), f"heavy-set procedure: {res.outcome}, size {len(res.coords)}")
    if not res.within_bound:
        raise VerdictFailure("heavy set exceeds the size bound")


def cmd_ptf_mcdiarmid(args):
    rep = parse_poly_arg(args.poly)
    report = ptf.mcdiarmid_concentration_experiment(rep, args.m, args.trials, args.seed, float_list(args.tau),
                                                    threads=args.threads)
    rows = [{"t": t, "size": s, "frequency": fr, "stderr": se, "bound": b} for t, s, fr, se, b in report.rows]
    bad = report.violations(3.0)
    emit_rows(args, rows, ["t", "size", "frequency", "stderr", "bound"],
              f"sum c_i^2 = {report.sum_c_sq:.17g}; {len(bad)} rows above bound + 3 SE")
    if bad:
        raise VerdictFailure("observed deviations exceed the concentration bound")


# --------------------------------------------------------------------- pcsp

def _fmt_table(t, size):
    if size == 2:
        return BooleanFunction(int(len(t)).bit_length() - 1, t).to_hex()
    return " ".join(str(int(x)) for x in t)


def cmd_pcsp_enum(args):
    T = parse_template_arg(args.template)
    pols = pcsp.enumerate_polymorphisms(T, args.arity, args.threads)
    rows = [{"index": j, "table": _fmt_table(t, T.B.size)} for j, t in enumerate(pols)]
    emit_rows(args, rows, ["index", "table"], f"{len(pols)} polymorphisms of arity {args.arity}")


def _slice(name, args):
    if name == "projections":
        members = pcsp.projection_slice()
        return members, pcsp.projection_choice(members), True
    if name == "collapse":
        f = boolfn.influence_collapse_example()
        g = boolfn.apply_minor(f, boolfn.MinorMap(4, 2, (1, 0, 0, 0)))
        return [f, g], pcsp.argmax_influence_choice([f, g]), False
    if name == "ptf1":
        members = pcsp.positive_ptf_slice(4, 1, args.margin)
        return members, pcsp.heavy_set_choice(members, 1, args.epsilon, args.margin), True
    raise MalformedInput(f"unknown slice {name!r} (projections, collapse, ptf1)")


def cmd_pcsp_check_choice(args):
    members, table, strict = _slice(args.slice, args)
    M = args.M if args.M else (pcsp.layered_length(1, args.epsilon) if args.variant == "layered" else table.M)
    v = pcsp.verify_choice_condition(members, table, args.variant, M=M, tau=float(args.tau.split(",")[0]),
                                     trials=args.trials, seed=args.seed, strict=strict)
    ce = v.counterexample
    if isinstance(ce, tuple):
        ce = " ; ".join(x.to_hex() if isinstance(x, BooleanFunction) else str(getattr(x, "image", x)) for x in ce)
    row = {"slice": args.slice, "members": len(members), "variant": args.variant, "M": M,
           "holds": v.holds, "checked": v.checked, "counterexample": "" if ce is None else str(ce)}
    emit_rows(args, [row], list(row), f"{args.variant} condition on {args.slice}: {'holds' if v.holds else 'fails'}")
    if not v.holds:
        raise VerdictFailure("choice condition fails")


def _parse_cnf(text):
    clauses, n = [], 0
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("c"):
            continue
        if ln.startswith("p"):
            n = int(ln.split()[2])
            continue
        lits = [int(x) for x in ln.split() if x != "0"]
        clauses.append(tuple(lits))
    return clauses, n


def cmd_pcsp_solve(args):
    T = parse_template_arg(args.template)
    if args.cnf:
        try:
            clauses, n = _parse_cnf(read_text(args.cnf))
            X = pcsp.encode_3sat(clauses, n)
        except ValueError as exc:
            raise MalformedInput(f"{args.cnf}: {exc}") from exc
    else:
        try:
            X = pcsp.parse_structure(read_text(args.instance))
        except (ValueError, KeyError) as exc:
            raise MalformedInput(f"{args.instance}: {exc}") from exc
    hA = pcsp.find_homomorphism(X, T.A)
    hB = hA if hA is not None else pcsp.find_homomorphism(X, T.B)
    verdict = "yes" if hA is not None else ("no" if hB is None else "promise-gap")
    row = {"to_A": hA is not None, "to_B": hB is not None, "answer": verdict,
           "homomorphism": "" if hB is None else " ".join(map(str, hB))}
    emit_rows(args, [row], list(row), f"instance of size {X.size}: {verdict}")


# --------------------------------------------------------------- labelcover

def cmd_lc_gen(args):
    psi = labelcover.generate(args.variant, args.left, args.right, args.degree_lc, args.sigma_r,
                              make_rng(args.seed), planted=not args.unplanted)
    emit(args, labelcover.format_instance(psi), f"{args.variant} instance with {psi.n_edges} edges")


def cmd_lc_eval(args):
    psi = parse_instance_arg(args.instance)
    opt, wit = labelcover.brute_force_optimum(psi)
    cls = labelcover.gap_classify(psi, args.t, args.s)
    row = {"optimum": opt, "t": args.t, "s": args.s, "class": cls,
           "left_labels": " ".join(map(str, wit.left)), "right_labels": " ".join(map(str, wit.right))}
    emit_rows(args, [row], list(row), f"optimum {opt:.17g}: {cls}")


def cmd_lc_rich(args):
    psi = parse_instance_arg(args.instance)
    r = labelcover.richness_statistic(psi, args.vertex)
    rows = [{"function": " ".join(map(str, f)), "count": c} for f, c in r.counts.items()]
    emit_rows(args, rows, ["function", "count"],
              f"chi2={r.chi_square:.6g} dof={r.dof} p={r.p_value:.6g}{' (degenerate)' if r.degenerate else ''}")
    if not r.degenerate and r.p_value < 1e-3:
        raise VerdictFailure("richness test rejects uniformity")


# ------------------------------------------------------------------ parser

def _common():
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--p", type=float, default=0.5, help="bias p in (0, 1)")
    c.add_argument("--arity", type=int, default=2)
    c.add_argument("--degree", type=int, default=1)
    c.add_argument("--trials", type=int, default=2000)
    c.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out", help="output file (default: stdout, summary on stderr)")
    c.add_argument("--format", choices=["csv", "json", "poly"], default="csv")
    c.add_argument("--margin", type=float, default=ptf.DEFAULT_MARGIN)
    c.add_argument("--epsilon", type=float, default=0.5)
    c.add_argument("--tau", default="0.01,0.05,0.1", help="comma-separated thresholds")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    top = argparse.ArgumentParser(prog="minionlab", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = top.add_subparsers(dest="group", required=True)

    def verb(sub, name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    g = groups.add_parser("fourier", help="p-biased Fourier analysis").add_subparsers(dest="verb", required=True)
    for name, fn, h in (("expand", cmd_fourier_expand, "coefficients as mask,size,coefficient"),
                        ("influence", cmd_fourier_influence, "influences by all three routes"),
                        ("noise", cmd_fourier_noise, "noise sensitivity, spectral vs Monte-Carlo")):
        p = verb(g, name, fn, h)
        p.add_argument("--fn", required=True, help="function file or builtin (maj3, thr:5:3, ...)")
        if name == "noise":
            p.add_argument("--delta", default="0.5")

    p = groups.add_parser("shapley", parents=[common], help="Shapley values of a monotone function")
    p.add_argument("--fn", required=True)
    p.set_defaults(func=cmd_shapley)

    g = groups.add_parser("pullback", help="2-to-1 minors and the pull-back distribution").add_subparsers(
        dest="verb", required=True)
    p = verb(g, "mass", cmd_pullback_mass, "closed-form mass of every point")
    p.add_argument("--m", type=int, required=True)
    p = verb(g, "audit", cmd_pullback_audit, "density-ratio or gluing audit")
    p.add_argument("--kind", choices=["density", "gluing"], default="density")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--pgrid", default="", help="comma-separated p values (overrides --p)")
    p = verb(g, "preserve", cmd_pullback_preserve,
             "influence preservation under random 2-to-1 minors; odd arities get a dummy coordinate")
    p.add_argument("--fn", required=True)
    p.add_argument("--coord", type=int, default=0)
    p.add_argument("--table", choices=["exceedance", "trials"], default="exceedance")

    g = groups.add_parser("ptf", help="threshold representations").add_subparsers(dest="verb", required=True)
    for name, fn, h in (("represent", cmd_ptf_represent, "find a representation"),
                        ("minmaxweight", cmd_ptf_minmaxweight, "minimum of the maximum coordinate weight"),
                        ("heavyset", cmd_ptf_heavyset, "iterative heavy-set procedure")):
        p = verb(g, name, fn, h)
        p.add_argument("--fn", required=True)
        p.add_argument("--exact", action="store_true", help="rational simplex (arity <= 8)")
        if name == "represent":
            p.add_argument("--mode", choices=["general", "positive"], default="general")
    p = verb(g, "mcdiarmid", cmd_ptf_mcdiarmid, "concentration of induced coefficients")
    p.add_argument("--poly", default="avg:100", help="polynomial file or avg:<n>")
    p.add_argument("--m", type=int, default=5)

    g = groups.add_parser("pcsp", help="templates, polymorphisms, choice conditions").add_subparsers(
        dest="verb", required=True)
    p = verb(g, "enum", cmd_pcsp_enum, "enumerate polymorphisms")
    p.add_argument("--template", required=True, help="template file or k2, k3, 3sat, 1in3-nae")
    p = verb(g, "check-choice", cmd_pcsp_check_choice, "verify a choice condition on a slice")
    p.add_argument("--slice", default="projections", help="projections, collapse or ptf1")
    p.add_argument("--variant", choices=["single", "multiple", "layered", "random2to1"], default="single")
    p.add_argument("--M", type=int, default=0)
    p = verb(g, "solve", cmd_pcsp_solve, "decide X -> A / X -> B")
    p.add_argument("--template", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="structure file")
    src.add_argument("--cnf", help="DIMACS 3-CNF file")

    g = groups.add_parser("labelcover", help="Label Cover instances").add_subparsers(dest="verb", required=True)
    p = verb(g, "gen", cmd_lc_gen, "generate an instance")
    p.add_argument("--variant", choices=["plain", "unique", "two_to_one", "rich"], default="two_to_one")
    p.add_argument("--left", type=int, default=3)
    p.add_argument("--right", type=int, default=3)
    p.add_argument("--edges-per-left", dest="degree_lc", type=int, default=2)
    p.add_argument("--sigma-r", type=int, default=2)
    p.add_argument("--unplanted", action="store_true")
    p = verb(g, "eval", cmd_lc_eval, "exact optimum and gap classification")
    p.add_argument("--instance", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--s", type=float, default=0.5)
    p = verb(g, "rich", cmd_lc_rich, "richness chi-square at a left vertex")
    p.add_argument("--instance", required=True)
    p.add_argument("--vertex", type=int, default=0)
    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except VerdictFailure as exc:
        print(f"verdict: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except MalformedInput as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ArityError as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

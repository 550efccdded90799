"""``orrw`` command line.

Exit status: 0 on success, 1 when a numerical certificate fails (tail bound
not met, step cap hit, selftest failure), 2 on usage errors.
"""

import argparse
import csv
from fractions import Fraction
import io
import json
import math
import os
import sys

from . import __version__, _backend, asymptotics, exact, genfun, montecarlo, selftest, walk
from ._rng import ALGORITHM, MASK, SeedSpec

CONVERGE_FIELDS = ["n", "ell", "c", "estimate", "stderr", "limit", "ratio", "source"]
EXACT_FIELDS = ["n", "ell", "value", "error_bound"]
PMF_FIELDS = ["k", "n", "probability"]
LIMITS_FIELDS = ["ell", "c", "J", "K", "M", "quad_error"]
SIMULATE_FIELDS = ["n", "ell", "c", "mean", "stderr", "reps"]
GF_FIELDS = ["quantity", "x", "k", "ell", "s", "c", "value", "tail_bound"]
BLOWUP_FIELDS = ["s", "ell", "c", "H", "tail_bound", "K", "ratio"]


def _num(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    return format(float(v), ".17g")


def _json_num(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if hasattr(v, "item"):
        return v.item()
    return v


def parse_c(text):
    """``1`` and ``1/2`` stay exact (int / Fraction); ``0.5`` is a float."""
    try:
        if "/" in text:
            c = Fraction(text)
        elif text.lstrip("+").isdigit():
            c = int(text)
        else:
            c = float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid value {text!r}")
    if not c > 0 or (isinstance(c, float) and not math.isfinite(c)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return c


def _list(conv):
    def parse(text):
        try:
            return [conv(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}")
    return parse


def _grid(text):
    return [int(float(t)) for t in text.split(",") if t.strip()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (ORRW_THREADS overrides)")

    parser = argparse.ArgumentParser(prog="orrw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"orrw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo E[(R_n/sqrt n)^l]")
    p.add_argument("--c", type=parse_c, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=_list(int), default=[1])
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--stream", type=int, default=0)

    p = sub.add_parser("exact", parents=[common], help="exact range moments or first-passage pmf")
    p.add_argument("--c", type=parse_c, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=_list(int), default=[1])
    p.add_argument("--k", type=int, default=None, help="emit the pmf of S_k instead")
    p.add_argument("--eps-prune", type=float, default=exact.DEFAULT_EPS_PRUNE)
    p.add_argument("--mode", choices=["auto", "rational", "float"], default="auto")
    p.add_argument("--final-only", action="store_true", help="only the row for time n")

    p = sub.add_parser("gf", parents=[common], help="generating functions at s")
    p.add_argument("--c", type=parse_c, default=1)
    p.add_argument("--s", type=_list(float), required=True)
    p.add_argument("--x", type=int, default=None, help="site for g_x and G_x")
    p.add_argument("--k", type=int, default=None, help="E[s^S_k]")
    p.add_argument("--ell", type=int, default=None, help="H_ell(s)")
    p.add_argument("--rel-tol", type=float, default=1e-12)

    p = sub.add_parser("limits", parents=[common], help="J_l, K_(l-1), moment limits")
    p.add_argument("--c", type=parse_c, required=True)
    p.add_argument("--ell-max", type=int, default=2)
    p.add_argument("--abs-tol", type=float, default=1e-13)

    p = sub.add_parser("converge", parents=[common], help="scaled moments vs their limit")
    p.add_argument("--c", type=parse_c, required=True)
    p.add_argument("--n-grid", type=_grid, required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--mode", choices=["exact", "mc"], default="exact")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--eps-prune", type=float, default=exact.DEFAULT_EPS_PRUNE)

    p = sub.add_parser("blowup", parents=[common], help="H_l(s)(1-s)^((l+3)/2)/K_l as s -> 1")
    p.add_argument("--c", type=parse_c, required=True)
    p.add_argument("--ell", type=int, default=0)
    p.add_argument("--s-grid", type=_list(float), default=[0.9, 0.99, 0.999])

    sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    return parser


def _validate(args, parser):
    def bad(flag, why):
        parser.error(f"{flag}: {why}")

    if args.seed < 0 or args.seed > MASK:
        bad("--seed", "must be an unsigned 64-bit integer")
    if args.threads is not None and args.threads < 1:
        bad("--threads", "must be >= 1")
    cmd = args.command
    if cmd in ("simulate", "exact") and args.n < 1:
        bad("--n", "must be >= 1")
    if cmd in ("simulate", "exact") and any(l < 1 for l in args.ell):
        bad("--ell", "moment orders must be >= 1")
    if cmd in ("simulate", "converge") and args.reps < 2:
        bad("--reps", "must be >= 2")
    if cmd == "simulate" and not 0 <= args.stream <= MASK:
        bad("--stream", "must be an unsigned 64-bit integer")
    if cmd == "exact":
        if args.k is not None and args.k < 1:
            bad("--k", "must be >= 1")
        if args.mode == "rational" and isinstance(args.c, float):
            bad("--mode", "rational mode needs --c as an integer or p/q")
        if args.eps_prune < 0:
            bad("--eps-prune", "must be >= 0")
    if cmd == "gf":
        if any(not 0 < s < 1 for s in args.s):
            bad("--s", "every s must lie in (0, 1)")
        if args.x is None and args.k is None and args.ell is None:
            bad("--x/--k/--ell", "give at least one quantity to evaluate")
        if args.x is not None and args.x < 1:
            bad("--x", "must be >= 1")
        if args.k is not None and args.k < 1:
            bad("--k", "must be >= 1")
        if args.ell is not None and not 0 <= args.ell <= genfun.DEFAULT_ELL_CAP:
            bad("--ell", f"must be in [0, {genfun.DEFAULT_ELL_CAP}]")
        if args.rel_tol <= 0:
            bad("--rel-tol", "must be positive")
    if cmd == "limits":
        if args.ell_max < 1:
            bad("--ell-max", "must be >= 1")
        if args.abs_tol <= 0:
            bad("--abs-tol", "must be positive")
    if cmd == "converge":
        g = args.n_grid
        if not g or g[0] < 1 or any(b <= a for a, b in zip(g, g[1:])):
            bad("--n-grid", "must be a positive increasing list")
        if args.ell < 1:
            bad("--ell", "must be >= 1")
    if cmd == "blowup":
        g = args.s_grid
        if not g or any(not 0 < s < 1 for s in g) or any(b <= a for a, b in zip(g, g[1:])):
            bad("--s-grid", "must be an increasing list inside (0, 1)")
        if not 0 <= args.ell <= genfun.DEFAULT_ELL_CAP:
            bad("--ell", f"must be in [0, {genfun.DEFAULT_ELL_CAP}]")


def _config(args):
    out = {}
    for key, v in sorted(vars(args).items()):
        if key in ("output", "format", "threads"):
            continue
        out[key] = str(v) if isinstance(v, Fraction) else v
    return out


def _emit(args, fields, rows, meta):
    if args.format == "json":
        body = {"metadata": meta,
                "rows": [{k: _json_num(v) for k, v in zip(fields, row)} for row in rows]}
        text = json.dumps(body, indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for row in rows:
            w.writerow([_num(v) for v in row])
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args, threads):
    params = walk.ReinforcementParams(args.c)
    res = montecarlo.estimate_moments(params, args.n, args.ell, args.reps,
                                      SeedSpec(args.seed, args.stream), threads)
    rows = [(r.n, r.ell, r.c, r.mean, r.stderr, r.reps) for r in res.values()]
    return SIMULATE_FIELDS, rows, {"threads": threads}


def _cmd_exact(args, threads):
    params = walk.ReinforcementParams(args.c)
    if args.k is not None:
        pmf = exact.first_passage_pmf(params, args.k, args.n)
        rows = [(args.k, n, p) for n, p in enumerate(pmf.pmf) if p]
        return PMF_FIELDS, rows, {"residual_mass": _num(pmf.residual)}
    table = exact.range_moments(params, args.n, max(args.ell), args.eps_prune, args.mode)
    ns = [args.n] if args.final_only else range(1, args.n + 1)
    rows = [(n, l, table.value(n, l), table.error_bound(n, l)) for n in ns for l in args.ell]
    return EXACT_FIELDS, rows, {"exact": table.exact,
                                "pruned_mass": _num(table.pruned[args.n])}


def _cmd_gf(args, threads):
    params = walk.ReinforcementParams(args.c)
    c = float(args.c)
    rows = []
    for s in args.s:
        rows.append(("r_s", None, None, None, s, c, genfun.root_r(s), 0.0))
        if args.x is not None:
            rows.append(("g", args.x, None, None, s, c, genfun.g(args.x, s), 0.0))
            rows.append(("G", args.x, None, None, s, c, genfun.G(args.x, s, params), 0.0))
        if args.k is not None:
            rows.append(("s_k_gf", None, args.k, None, s, c, genfun.s_k_gf(args.k, s, params), 0.0))
        if args.ell is not None:
            hv = genfun.h_ell(args.ell, s, params, args.rel_tol)
            rows.append(("H", None, None, args.ell, s, c, hv.value, hv.tail_bound))
    return GF_FIELDS, rows, {}


def _cmd_limits(args, threads):
    rows = []
    for ell in range(1, args.ell_max + 1):
        lc = asymptotics.limit_constants(float(args.c), ell, args.abs_tol)
        rows.append((ell, lc.c, lc.J, lc.K, lc.M, lc.quad_error))
    return LIMITS_FIELDS, rows, {"K_index": "K column is K_(ell-1)"}


def _cmd_converge(args, threads):
    params = walk.ReinforcementParams(args.c)
    study = montecarlo.convergence_study(params, args.n_grid, args.ell, args.mode, args.reps,
                                         SeedSpec(args.seed), args.eps_prune, threads)
    rows = [(r.n, r.ell, r.c, r.estimate, r.stderr, r.limit, r.ratio, r.source) for r in study]
    return CONVERGE_FIELDS, rows, {"threads": threads}


def _cmd_blowup(args, threads):
    study = asymptotics.blowup_check(args.ell, float(args.c), args.s_grid)
    rows = [(r.s, args.ell, float(args.c), r.H, r.tail_bound, r.K, r.ratio) for r in study]
    return BLOWUP_FIELDS, rows, {}


COMMANDS = {
    "simulate": _cmd_simulate,
    "exact": _cmd_exact,
    "gf": _cmd_gf,
    "limits": _cmd_limits,
    "converge": _cmd_converge,
    "blowup": _cmd_blowup,
}


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    env = os.environ.get("ORRW_THREADS")
    if env:
        try:
            args.threads = int(env)
        except ValueError:
            parser.error(f"ORRW_THREADS: not an integer: {env!r}")
    _validate(args, parser)
    threads = args.threads or montecarlo.default_threads()

    if args.command == "selftest":
        ok, report = selftest.run(args.seed, threads)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(report)
        else:
            sys.stdout.write(report)
        return 0 if ok else 1

    meta = {"version": __version__, "seed": args.seed, "rng": ALGORITHM,
            "backend": _backend.BACKEND, "command": args.command, "config": _config(args)}
    try:
        fields, rows, extra = COMMANDS[args.command](args, threads)
    except (genfun.CertificateError, walk.StepCapExceeded) as exc:
        print(f"orrw {args.command}: {exc}", file=sys.stderr)
        return 1
    meta.update(extra)
    _emit(args, fields, rows, meta)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

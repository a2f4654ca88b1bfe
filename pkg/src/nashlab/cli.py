"""``nashlab`` command line.

Exit codes: 0 success with every invariant satisfied, 1 a numerical invariant
failed, 2 usage or domain error.  ``NASHLAB_SEED`` overrides ``--seed``.
"""

import argparse
import contextlib
import json
import math
import os
import sys

import numpy as np

from . import constants, heat, shooting, verify
from .radial import profile_to_csv
from .specfun import optimal_profile

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _round6(x):
    return None if x is None else float(f"{float(x):.6g}")


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _positive(text):
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return v


def _check_p(p):
    if not 1.0 < p < 2.0:
        raise UsageError(f"p = {p} outside (1, 2)")


def _check_d(d, lo=1, hi=10):
    if not lo <= d <= hi:
        raise UsageError(f"d = {d} outside [{lo}, {hi}]")


# -- commands ------------------------------------------------------------------

def cmd_constants(args):
    if args.d_min < 1.0 or args.d_max < args.d_min:
        raise UsageError(f"invalid range d_min = {args.d_min}, d_max = {args.d_max}")
    if args.n < 1 or (args.n == 1 and args.d_min != args.d_max):
        raise UsageError("n must be >= 1, and n = 1 needs d_min == d_max")
    rows = constants.figure_data(args.d_min, args.d_max, args.n)
    with _sink(args.out) as fh:
        if args.format == "json":
            payload = {"legend": constants.FIGURE_LEGEND,
                       "rows": [dict(zip(constants.FIGURE_HEADER,
                                         [float(x) if x else None for x in r.as_csv_fields()]))
                                for r in rows]}
            fh.write(json.dumps(payload, indent=2) + "\n")
        else:
            constants.figure_csv(rows, fh)
    return EXIT_OK if all(r.ordering_ok() for r in rows) else EXIT_INVARIANT


def cmd_shoot(args):
    _check_p(args.p)
    _check_d(args.d)
    res = shooting.shoot(args.p, args.d, args.tol, args.n_knots)
    if args.out:
        with _sink(args.out) as fh:
            profile_to_csv(res.profile, fh)
    r_ev, U_ev, V_ev, tag = res.terminal
    event_ok = abs(U_ev) <= args.tol and abs(V_ev) <= math.sqrt(args.tol)
    ok = max(abs(res.res1), abs(res.res2)) <= 1e-6 and event_ok
    summary = {
        "d": args.d, "p": args.p, "h": _round6(res.h), "R_p": _round6(res.R_p),
        "mu_p": _round6(res.mu_p), "G": _round6(res.norms.G), "P": _round6(res.norms.P),
        "M": _round6(res.norms.M), "res1": _round6(res.res1), "res2": _round6(res.res2),
        "terminal_event": tag, "invariants_ok": ok,
    }
    with _sink(args.summary) as fh:
        fh.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_sweep(args):
    _check_d(args.d)
    for p in args.p:
        _check_p(p)
    rows = shooting.sweep_p(args.d, args.p, args.tol)
    ok = all(max(abs(shooting.shoot(p, args.d, args.tol).res1),
                 abs(shooting.shoot(p, args.d, args.tol).res2)) <= 1e-6 for p in args.p)
    if all(a > b for a, b in zip(args.p, args.p[1:])):
        gaps = [r.r_gap for r in rows]
        ok = ok and all(a > b for a, b in zip(gaps, gaps[1:]))
    with _sink(args.out) as fh:
        if args.format == "json":
            fh.write(json.dumps([{"p": r.p, "h": r.h, "R": r.R, "mu": r.mu, "cgn": r.cgn,
                                  "r_gap": r.r_gap} for r in rows], indent=2) + "\n")
        else:
            fh.write("p,h,R,mu,cgn\n")
            for r in rows:
                fh.write(f"{r.p:.17g},{r.h:.17g},{r.R:.17g},{r.mu:.17g},{r.cgn:.17g}\n")
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_heat(args):
    _check_d(args.d, 1, 10)
    if args.scenario == "cosine" and args.d != 1:
        raise UsageError("the cosine scenario is one-dimensional (--d 1)")
    times = np.concatenate([[0.0], np.geomspace(args.t_min, args.t_max, args.n_times - 1)])
    samples = heat.decay_series(times, args.scenario, args.d, args.eps)
    with _sink(args.out) as fh:
        heat.decay_csv(samples, fh)
    l2 = [s.l2 for s in samples]
    ok = all(s.within(1e-6) for s in samples) and all(b <= a * (1 + 1e-12) for a, b in zip(l2, l2[1:]))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_verify(args):
    _check_d(args.d, 1, 10)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    reports = verify.run_all(args.d, args.seed, args.n)
    with _sink(args.out) as fh:
        fh.write(verify.reports_json(reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_INVARIANT


def cmd_profile(args):
    _check_d(args.d, 1, 10)
    if args.n_knots < 16:
        raise UsageError("--n-knots must be >= 16")
    with _sink(args.out) as fh:
        profile_to_csv(optimal_profile(args.d, args.n_knots), fh)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="nashlab", description="Sharp Nash and GN constants lab.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="constant-comparison table over real d")
    c.add_argument("--d-min", type=float, default=1.0)
    c.add_argument("--d-max", type=float, default=10.0)
    c.add_argument("--n", type=int, default=200)
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_constants)

    s = sub.add_parser("shoot", help="ground state u_p by shooting")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--tol", type=_positive, default=1e-10)
    s.add_argument("--n-knots", type=int, default=4097)
    s.add_argument("--out", default=None, help="profile CSV path")
    s.add_argument("--summary", default=None, help="summary JSON path (default stdout)")
    s.set_defaults(func=cmd_shoot)

    w = sub.add_parser("sweep", help="ground states along a list of p")
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--p", type=_float_list, required=True, help="comma separated, e.g. 1.5,1.25")
    w.add_argument("--tol", type=_positive, default=1e-10)
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--out", default=None)
    w.set_defaults(func=cmd_sweep)

    h = sub.add_parser("heat", help="L2 decay against the Nash and Young envelopes")
    h.add_argument("--d", type=int, default=1)
    h.add_argument("--scenario", choices=("cosine", "gaussian"), default="cosine")
    h.add_argument("--eps", type=_positive, default=0.05, help="initial Gaussian time")
    h.add_argument("--t-min", type=_positive, default=1e-3)
    h.add_argument("--t-max", type=_positive, default=100.0)
    h.add_argument("--n-times", type=int, default=41)
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_heat)

    v = sub.add_parser("verify", help="inequality checks over a seeded corpus")
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--n", type=int, default=120)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("profile", help="Nash optimizer 1 - phi1 on [0, 1]")
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--n-knots", type=int, default=2049)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_profile)
    return ap


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    env_seed = os.environ.get("NASHLAB_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"nashlab: NASHLAB_SEED={env_seed!r} is not an integer", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "command", None) == "heat" and (args.n_times < 2 or args.t_max < args.t_min):
        print("nashlab: need --n-times >= 2 and --t-min <= --t-max", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"nashlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (shooting.ShootingError, FloatingPointError) as exc:
        print(f"nashlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line interface: ``regimesplit {split,sweep,elliptical,polygon,lemma,verify}``.

Results go to stdout (JSON unless noted), diagnostics to stderr.  Exit codes:
0 success, 1 failed verification, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import geometry, inequality, multidim
from .density import EmpiricalDist, QuadratureConfig, family_from_config, make_family
from .exceptions import DegenerateCut, DegeneratePolygon, DomainError, NonIntegrable, RegimeSplitError
from .splitcore import solve_empirical, solve_global, solve_logconcave, sweep
from .verify import CHECKS, run_checks

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

# options whose values may legitimately start with "-"
_VALUE_OPTS = {
    "--breaks", "--values", "--range", "--cut", "--mu", "--sigma", "--a", "--b", "--k", "--scale", "--rate",
    "--knots", "--slopes", "--v0", "--u", "--t",
}

FAMILY_PARAMS = ("mu", "sigma", "a", "b", "k", "scale", "rate")


class InputError(Exception):
    """Bad user input detected by the CLI itself."""


def _glue_values(argv):
    # "--breaks -2,-0.1" -> "--breaks=-2,-0.1" so argparse does not read the value as a flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in _VALUE_OPTS:
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


# -- shared family options ------------------------------------------------


def _add_family_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("distribution (one source)")
    g.add_argument("--family", help="gaussian, laplace, uniform, weibull, exponential or piecewise")
    g.add_argument("--config", metavar="FILE", help="key = value family descriptor")
    for name in FAMILY_PARAMS:
        g.add_argument(f"--{name}", type=float)
    g.add_argument("--breaks", help="piecewise breakpoints, comma separated")
    g.add_argument("--values", help="piecewise density values, comma separated")
    q = p.add_argument_group("quadrature")
    q.add_argument("--rel-tol", type=float)
    q.add_argument("--abs-tol", type=float)


def _quad_cfg(args):
    over = {k: v for k, v in (("rel_tol", args.rel_tol), ("abs_tol", args.abs_tol)) if v is not None}
    return QuadratureConfig(**over) if over else None


def _density(args):
    cfg = _quad_cfg(args)
    if args.config and args.family:
        raise InputError("give either --family or --config, not both")
    if args.config:
        return family_from_config(_read(args.config), quad_cfg=cfg)
    if not args.family:
        raise InputError("a distribution is required: --family or --config")
    params = {k: getattr(args, k) for k in FAMILY_PARAMS if getattr(args, k) is not None}
    if args.breaks is not None:
        params["breaks"] = _floats(args.breaks)
    if args.values is not None:
        params["values"] = _floats(args.values)
    return make_family(args.family, quad_cfg=cfg, **params)


# -- commands -------------------------------------------------------------


def cmd_split(args) -> int:
    if args.sample:
        if args.family or args.config:
            raise InputError("give exactly one input: --sample, --family or --config")
        vals = _floats(_read(args.sample))
        if not vals:
            raise InputError(f"{args.sample} contains no numbers")
        res = solve_empirical(EmpiricalDist.from_samples(vals))
    else:
        d = _density(args)
        if args.force_global and args.force_logconcave:
            raise InputError("--force-global and --force-logconcave are exclusive")
        if args.force_global:
            res = solve_global(d, grid_n=args.grid)
        else:
            res = solve_logconcave(d, check=not args.force_logconcave)
    sys.stdout.write(res.to_csv() if args.format == "csv" else res.to_json() + "\n")
    return EXIT_OK


def _parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--range expects LO:HI:N, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"--range expects LO:HI:N, got {text!r}") from None


def cmd_sweep(args) -> int:
    lo, hi, n = _parse_range(args.range)
    workers = max(1, int(os.environ.get("REGIMESPLIT_THREADS", "1") or 1))
    table = sweep(_density(args), lo, hi, n, workers=workers)
    sys.stdout.write(table.to_csv() if args.format == "csv" else json.dumps(table.to_dict()) + "\n")
    return EXIT_OK


def cmd_elliptical(args) -> int:
    model = multidim.model_from_config(_read(args.model))
    res = multidim.best_direction(model)
    out = res.to_dict()
    out["t_star"] = multidim.optimal_t_check(model, res.u_star).t_star
    if args.u is not None:
        u = _floats(args.u)
        t = args.t if args.t is not None else 0.0
        out["F"] = multidim.F_halfspace(model, u, t)
        if args.mc:
            est = multidim.F_mc(model, u, t, n=args.mc, seed=args.seed)
            out["F_mc"], out["F_mc_se"] = est.value, est.std_error
    _emit(out)
    return EXIT_OK


def cmd_polygon(args) -> int:
    if bool(args.file) == bool(args.hexagon):
        raise InputError("give exactly one of --file or --hexagon")
    P = geometry.hexagon() if args.hexagon else geometry.ConvexPolygon.from_text(_read(args.file))
    cuts = args.cut or []
    out = {
        "area": geometry.fraction_str(geometry.area(P)),
        "moments": [geometry.fraction_str(m) for m in geometry.first_moments(P)],
        "rows": geometry.R_sweep(P, cuts),
    }
    _emit(out)
    return EXIT_OK


def cmd_lemma(args) -> int:
    if args.random is not None:
        rng = np.random.default_rng(args.seed)
        reps = [inequality.check_lemma(inequality.random_convex_potential(rng)) for _ in range(args.random)]
        held = sum(r.holds for r in reps)
        _emit({"n": args.random, "held": held, "min_slack": min(r.slack for r in reps)})
        return EXIT_OK
    if args.slopes is None:
        raise InputError("give --slopes (and optionally --knots, --v0) or --random N")
    slopes = _floats(args.slopes)
    knots = _floats(args.knots) if args.knots is not None else [0.0]
    V = inequality.ConvexPotential.piecewise(knots, slopes, args.v0)
    _emit(inequality.check_lemma(V).to_dict())
    return EXIT_OK


def _split_names(values):
    names = [n for v in values or [] for n in v.split(",") if n]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise InputError(f"unknown check(s) {unknown}; choose from {list(CHECKS)}")
    return names or None


def cmd_verify(args) -> int:
    results = run_checks(_split_names(args.only), n=args.n, seed=args.seed)
    if args.json:
        _emit([r.to_dict() for r in results])
    else:
        for r in results:
            print(r.line())
            if args.claims:
                print(f"      claim: {r.claim}")
            if r.detail:
                print(f"      {r.detail}")
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regimesplit", description="Optimal two-regime (threshold / halfspace) approximation.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("split", help="optimal threshold and levels")
    _add_family_args(s)
    s.add_argument("--sample", metavar="FILE", help="whitespace separated sample values")
    s.add_argument("--force-global", action="store_true", help="grid search for all maximizers")
    s.add_argument("--force-logconcave", action="store_true", help="skip the log-concavity probe")
    s.add_argument("--grid", type=int, default=512)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("sweep", help="f_X table; CSV columns t,fx,mk_gap,cdf")
    _add_family_args(s)
    s.add_argument("--range", required=True, metavar="LO:HI:N")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("elliptical", help="best halfspace direction of an elliptical model")
    s.add_argument("--model", required=True, metavar="FILE")
    s.add_argument("--u", help="direction to evaluate F(u, t) at")
    s.add_argument("--t", type=float)
    s.add_argument("--mc", type=int, metavar="N", help="also estimate F by Monte Carlo")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_elliptical)

    s = sub.add_parser("polygon", help="exact cut functional R(t) of a convex polygon")
    s.add_argument("--file", metavar="FILE", help="one 'x y' vertex per line, counterclockwise")
    s.add_argument("--hexagon", action="store_true", help="use the built-in centered hexagon")
    s.add_argument("--cut", action="append", help="cut position (repeatable; rationals like 1/3 allowed)")
    s.set_defaults(func=cmd_polygon)

    s = sub.add_parser("lemma", help="check the convex-potential inequality")
    s.add_argument("--knots")
    s.add_argument("--slopes")
    s.add_argument("--v0", type=float, default=0.0)
    s.add_argument("--random", type=int, metavar="N", help="check N random potentials")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_lemma)

    s = sub.add_parser("verify", help="run the verification suite")
    s.add_argument("--only", action="append", metavar="NAME", help=f"subset of: {', '.join(CHECKS)}")
    s.add_argument("--n", type=int, help="override the sample count of the selected checks")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--claims", "--paper", dest="claims", action="store_true", help="print the claim behind each check")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except (InputError, DomainError, DegeneratePolygon, DegenerateCut, NonIntegrable, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RegimeSplitError, ArithmeticError) as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 when every check in scope passes, 1 when a check fails, 2 for
usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .admissibility import (ExponentPair, IndexFamily, analyze, exponents,
                            full_family_exponents)
from .errors import PolyxformError
from .necessity import ExtremalFamily, extremal_sweep
from .riesz import riesz_polygon
from .sampled import PRESETS, box_preset
from .suites import SUITES, SuiteOptions, run_suite
from .transform import apply_T

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _count(text) -> int:
    """Accept counts written as 1e6."""
    val = float(text)
    if val != int(val) or val < 1:
        raise argparse.ArgumentTypeError(f"not a positive integer: {text}")
    return int(val)


def _add_family(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--full", nargs=3, type=int, metavar=("N", "NPRIME", "D"),
                   help="the unrestricted family M_{n,d} x {1..n'}")
    g.add_argument("--kplane", nargs=2, type=int, metavar=("AMBIENT", "K"))
    g.add_argument("--family", help="index family as inline JSON or a path to a JSON file")


def _family(args) -> IndexFamily:
    if getattr(args, "full", None):
        return IndexFamily.full(*args.full)
    if getattr(args, "kplane", None):
        return IndexFamily.kplane(*args.kplane)
    if getattr(args, "family", None):
        return IndexFamily.from_json(args.family)
    raise UsageError("give one of --full, --kplane or --family")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file whose keys set option defaults")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (falls back to POLYXFORM_THREADS); results do not depend on it")
    p.add_argument("--out", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyxform", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", help="check the admissibility conditions")
    _add_family(p)
    _add_common(p)
    p.add_argument("--allow-degenerate", action="store_true",
                   help="do not require the zero multiindex in every layer")

    p = sub.add_parser("exponents", help="print the sharp exponent pair")
    _add_family(p)
    _add_common(p)
    p.add_argument("--allow-degenerate", action="store_true")

    p = sub.add_parser("polygon", help="Riesz polygon vertices of the full family")
    p.add_argument("--full", nargs=3, type=int, metavar=("N", "NPRIME", "D"), required=True)
    p.add_argument("--csv", help="write all vertices as CSV")
    p.add_argument("--svg", help="write the diagram as SVG")
    _add_common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--nprime", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=_count, default=200_000)
    p.add_argument("--draws", type=_count, default=20)
    _add_common(p)

    p = sub.add_parser("transform", help="evaluate the averaging operator")
    tsub = p.add_subparsers(dest="action", required=True)
    q = tsub.add_parser("apply", help="T_A f(u) for a preset f")
    _add_family(q)
    q.add_argument("--preset", choices=sorted(PRESETS), default="gauss")
    q.add_argument("--preset-params", default="{}", help="JSON keyword arguments for the preset")
    q.add_argument("--u", nargs="+", type=float, required=True,
                   help="coefficients in canonical order (by component, then dictionary order)")
    q.add_argument("--order", type=int, default=4)
    q.add_argument("--method", choices=["linear", "cubic", "exact"], default="linear")
    _add_common(q)

    p = sub.add_parser("sweep", help="scaling sweep on an extremal family")
    p.add_argument("--full", nargs=3, type=int, metavar=("N", "NPRIME", "D"), required=True)
    p.add_argument("--kind", choices=["F", "Fprime"], default="F")
    p.add_argument("--l", type=int, default=None, help="level (defaults to d)")
    p.add_argument("--p", default=None, help="exponent p as a rational (defaults to the sharp one)")
    p.add_argument("--q", default=None)
    p.add_argument("--deltas", nargs="+", type=float, default=None)
    p.add_argument("--samples", type=_count, default=4096)
    p.add_argument("--csv")
    p.add_argument("--svg")
    _add_common(p)
    return ap


def _subparser(ap: argparse.ArgumentParser, argv):
    """The innermost subparser selected by argv (for validating config keys)."""
    parser = ap
    for tok in argv:
        acts = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
        if not acts:
            break
        if tok in acts[0].choices:
            parser = acts[0].choices[tok]
    return parser


def parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        sp = _subparser(ap, argv)
        known = {a.dest for a in sp._actions} - {"help", "config"}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        sp.set_defaults(**cfg)
        args = ap.parse_args(argv)
    if args.threads is None:
        env = os.environ.get("POLYXFORM_THREADS")
        args.threads = int(env) if env else 1
    return args


def _config_dict(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out",):
            continue
        out[k] = v
    return out


def _emit(args, result: dict) -> str:
    report = {"command": args.command, "config": _config_dict(args), "seed": args.seed,
              "version": __version__, "result": result}
    text = json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    return text


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def cmd_admissible(args) -> int:
    rep = analyze(_family(args))
    ok = rep.first_failure(require_nondegeneracy=not args.allow_degenerate) is None
    text = _emit(args, {"report": rep.to_json(), "admissible": ok})
    sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_exponents(args) -> int:
    fam = _family(args)
    rep = analyze(fam)
    failed = rep.first_failure(require_nondegeneracy=not args.allow_degenerate)
    if failed is not None:
        print(f"not admissible: fails the {failed} condition")
        return EXIT_FAIL
    pq = exponents(rep, allow_degenerate=args.allow_degenerate)
    if args.out:
        _emit(args, {"p": str(pq.p), "q": str(pq.q)})
    print(pq)
    return EXIT_OK


def cmd_polygon(args) -> int:
    poly = riesz_polygon(*args.full)
    sys.stdout.write(poly.to_csv(nontrivial_only=True))
    if args.csv:
        Path(args.csv).write_text(poly.to_csv())
    if args.svg:
        Path(args.svg).write_text(poly.to_svg())
    if args.out:
        _emit(args, {"vertices": [[str(x), str(y)] for x, y in poly.vertices],
                     "nontrivial": [[str(x), str(y)] for x, y in poly.nontrivial_vertices]})
    return EXIT_OK


def cmd_verify(args) -> int:
    opt = SuiteOptions(n=args.n, nprime=args.nprime, d=args.d, samples=args.samples,
                       seed=args.seed, draws=args.draws)
    res = run_suite(args.suite, opt)
    for name, checks in res["suites"].items():
        for c in checks:
            print(f"[{'PASS' if c['pass'] else 'FAIL'}] {name}: {c['name']}")
    text = _emit(args, res)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if res["pass"] else EXIT_FAIL


def cmd_transform(args) -> int:
    fam = _family(args)
    try:
        params = json.loads(args.preset_params)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad --preset-params: {exc}") from exc
    D = fam.n + fam.nprime
    if args.preset == "box":
        params.setdefault("lo", [0.0] * D)
        params.setdefault("hi", [1.0] * D)
        f = box_preset(**params)
    else:
        f = PRESETS[args.preset](D, **params)
    val = apply_T(fam, f, args.u, order=args.order, method=args.method)
    _emit(args, {"value": val})
    print(repr(val))
    return EXIT_OK


def _rational(text):
    return None if text is None else Fraction(text)


def cmd_sweep(args) -> int:
    n, npr, d = args.full
    pq = full_family_exponents(n, npr, d)
    if args.p is not None or args.q is not None:
        pq = ExponentPair(_rational(args.p) or pq.p, _rational(args.q) or pq.q)
    kw = {} if args.deltas is None else {"deltas": tuple(args.deltas)}
    fam = ExtremalFamily(args.kind, n, npr, d, args.l if args.l is not None else d, **kw)
    res = extremal_sweep(fam, pq, samples=args.samples, seed=args.seed)
    if args.csv:
        Path(args.csv).write_text(res.to_csv())
    if args.svg:
        Path(args.svg).write_text(res.to_svg())
    blob = res.to_json()
    text = _emit(args, blob)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if res.verdict["pass"] else EXIT_FAIL


COMMANDS = {"admissible": cmd_admissible, "exponents": cmd_exponents, "polygon": cmd_polygon,
            "verify": cmd_verify, "transform": cmd_transform, "sweep": cmd_sweep}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:          # argparse usage errors
        return int(exc.code) if exc.code is not None else EXIT_OK
    except UsageError as exc:
        print(f"polyxform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PolyxformError, ValueError, TypeError, KeyError) as exc:
        print(f"polyxform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

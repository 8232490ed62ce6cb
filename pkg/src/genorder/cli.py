"""Command line interface: ``classify``, ``verify`` and ``fixtures``.

Exit codes: 0 certified (or all checks passed), 1 a verification check
failed, 2 bad flags or an unparsable expression, 3 a domain error, 4 an
inconclusive classification (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from . import expr as ex
from . import fixtures as fx
from .classes import (characterize, check_assumption, estimate_order_M, estimate_order_sn,
                      estimate_order_tail, estimate_order_weighted)
from .errors import (BNotSuitable, DomainError, GenOrderError, Inconclusive, NormalizerDegenerate,
                     ParseError, TailVanished)
from .functions import NormalizerSpec
from .numerics import Grid
from .suites import SUITES, SuiteInput, eps_set

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DOMAIN, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
CLASS_NAMES = {"m": "M", "m0": "M0", "m0minus": "M0minus", "m0plus": "M0plus", "m1": "M1"}
DOMAIN_ERRORS = (DomainError, TailVanished, NormalizerDegenerate, BNotSuitable)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- report encoding


def _clean(obj):
    """JSON-safe copy: infinities as strings, NaN as null, numpy to builtins."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(report: Dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _text(report: Dict) -> str:
    lines = []

    def walk(d, prefix=""):
        for k in sorted(d):
            v = d[k]
            if isinstance(v, dict):
                walk(v, f"{prefix}{k}.")
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                for i, item in enumerate(v):
                    walk(item, f"{prefix}{k}[{i}].")
            else:
                lines.append(f"{prefix}{k}: {v}")
    walk(_clean(report))
    return "\n".join(lines) + "\n"


def _csv(table: Dict[str, np.ndarray]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "x", "H", "logU", "ratio"])
    for k, row in enumerate(zip(table["x"], table["H"], table["logU"], table["ratio"])):
        w.writerow([k] + [repr(float(v)) for v in row])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- shared flag handling


def _grid(args) -> Grid:
    try:
        return Grid(args.x0, args.ratio, args.steps)
    except ValueError as err:
        raise UsageError(str(err))


def _parse(text: Optional[str], flag: str) -> Optional[ex.Expr]:
    if text is None:
        return None
    try:
        return ex.parse(text)
    except ParseError as err:
        raise UsageError(f"{flag}: {err}")


def _resolve_class(args, grid):
    """Class id, normalizer and assumption verdict for the given flags."""
    cls = args.cls
    anchor = args.anchor
    if cls == "auto":
        if args.b_expr is not None:
            cls = "m1"
        elif args.norm_expr is None:
            cls = "m"
    if cls == "m1":
        if args.b_expr is None:
            raise UsageError("--class m1 needs --b-expr")
        return "m1", NormalizerSpec.sn(args.b_expr, 1.0 if anchor is None else anchor), None
    if cls == "m":
        return "m", NormalizerSpec.log(), None
    if args.norm_expr is None:
        raise UsageError(f"--class {cls} needs --norm-expr")
    a = 1.0 if anchor is None else anchor
    verdict = check_assumption(args.norm_expr, a, grid)
    if cls == "auto":
        cls = {"A": "m0", "B": "m0plus", "C": "m0minus"}.get(verdict.label, "m0")
    if cls == "m0minus":
        return cls, NormalizerSpec.tail(args.norm_expr, a), verdict
    return cls, NormalizerSpec.weighted(args.norm_expr, a), verdict


def _input_echo(args, grid) -> Dict:
    return {"expr": args.expr, "norm_expr": args.norm_expr, "b_expr": args.b_expr,
            "anchor": args.anchor, "class": args.cls, "rho": args.rho, "tol": args.tol,
            "grid": {"x0": grid.x0, "ratio": grid.ratio, "steps": grid.steps}}


# ---------------------------------------------------------------- classify


def cmd_classify(args) -> int:
    grid = _grid(args)
    U = _parse(args.expr, "--expr")
    _parse(args.norm_expr, "--norm-expr")
    _parse(args.b_expr, "--b-expr")
    report: Dict = {"command": "classify", "input": _input_echo(args, grid), "version": __version__,
                    "warnings": []}
    code = EXIT_INCONCLUSIVE
    table = None
    try:
        cls, norm, verdict = _resolve_class(args, grid)
        report["assumption"] = None if verdict is None else verdict.label
        report["class"] = CLASS_NAMES[cls]
        if verdict is not None and verdict.label is None:
            report["warnings"].append("L satisfies none of the assumptions A, B, C")
        if cls == "m":
            est = estimate_order_M(U, grid)
        elif cls == "m1":
            est = estimate_order_sn(U, norm.expr, norm.anchor, grid)
        elif cls == "m0minus":
            est = estimate_order_tail(U, norm.expr, norm.anchor, grid)
        else:
            est = estimate_order_weighted(U, norm.expr, norm.anchor, grid, assumption=verdict)
        table = est.table
        report["warnings"].extend(est.warnings)
        report.update({"rho": est.rho, "rho_lower": est.rho_L, "rho_upper": est.rho_U,
                       "converged": est.converged, "oscillatory": est.limit.oscillatory,
                       "uncertainty": est.uncertainty, "method": est.limit.method,
                       "anchor_used": norm.anchor})
        certified = est.converged and math.isfinite(est.rho)
        if args.rho is not None:
            agrees = abs(est.rho - args.rho) <= args.tol
            report["rho_matches_declared"] = agrees
            certified = certified and agrees
        if certified and cls != "m0minus":
            checks = []
            for eps in eps_set(est.rho):
                try:
                    v = characterize(U, norm, est.rho, eps, grid)
                    checks.append({"eps": eps, "passed": v.characterization_passed,
                                   "x_epsilon": v.x_epsilon, "notes": v.notes})
                except Inconclusive as err:
                    checks.append({"eps": eps, "passed": None, "notes": [str(err)]})
            report["characterization"] = checks
            certified = all(c["passed"] for c in checks)
        elif cls == "m0minus":
            report["warnings"].append("characterization not applicable to a tail normalizer")
        report["member"] = certified
        code = EXIT_OK if certified else EXIT_INCONCLUSIVE
    except DOMAIN_ERRORS as err:
        report["error"] = f"{type(err).__name__}: {err}"
        code = EXIT_DOMAIN
    except Inconclusive as err:
        report["error"] = f"{type(err).__name__}: {err}"
        report["member"] = None
        code = EXIT_INCONCLUSIVE
    if args.format == "csv":
        if table is None:
            sys.stderr.write(report.get("error", "no table") + "\n")
            return code
        _emit(_csv(table), args.out)
    else:
        _emit(dumps(report) if args.format == "json" else _text(report), args.out)
    return code


# ---------------------------------------------------------------- verify


def _suite_input(args, grid) -> SuiteInput:
    norm = None
    if args.norm_expr is not None:
        a = 1.0 if args.anchor is None else args.anchor
        if args.cls == "m0minus":
            norm = NormalizerSpec.tail(args.norm_expr, a)
        else:
            norm = NormalizerSpec.weighted(args.norm_expr, a)
    elif args.b_expr is not None and args.suite not in ("sn", "gamma", "inverse"):
        norm = NormalizerSpec.sn(args.b_expr, 1.0 if args.anchor is None else args.anchor)
    return SuiteInput(args.expr, norm, args.b_expr, args.rho, args.expr2, grid)


def cmd_verify(args) -> int:
    grid = _grid(args)
    for flag, text in (("--expr", args.expr), ("--expr2", args.expr2),
                       ("--norm-expr", args.norm_expr), ("--b-expr", args.b_expr)):
        _parse(text, flag)
    fn = SUITES[args.suite]
    report: Dict = {"command": "verify", "suite": args.suite, "fixtures": bool(args.fixtures),
                    "input": _input_echo(args, grid), "version": __version__, "warnings": []}
    if not args.fixtures and all(v is None for v in (args.expr, args.norm_expr, args.b_expr)):
        raise UsageError("give --fixtures or the function flags the suite needs")
    try:
        checks = fn() if args.fixtures else fn(_suite_input(args, grid))
    except ValueError as err:
        if isinstance(err, GenOrderError):
            raise
        raise UsageError(str(err))
    except DOMAIN_ERRORS as err:
        report["error"] = f"{type(err).__name__}: {err}"
        _emit(dumps(report), args.out)
        return EXIT_DOMAIN
    report["checks"] = [c.as_dict() for c in checks]
    report["failed"] = [c.name for c in checks if not c.passed]
    report["passed"] = not report["failed"]
    _emit(dumps(report) if args.format == "json" else _text(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_FAILED


# ---------------------------------------------------------------- fixtures


def cmd_fixtures(args) -> int:
    entries = [f.as_dict() for f in fx.FIXTURES]
    if args.format == "json":
        _emit(dumps({"fixtures": entries, "version": __version__}), args.out)
        return EXIT_OK
    lines = []
    for e in entries:
        rho = "none" if e["rho"] is None else f"{e['rho']:g}"
        lines.append(f"{e['name']:<20} {e['class']:<8} rho={rho:<5} U = {e['expr']:<26} "
                     f"{e['normalizer'] or '-':<22} a={e['anchor']:.6g}")
        lines.append(f"{'':<20} {e['family']}" + (f" ({e['note']})" if e["note"] else ""))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_function_flags(p: argparse.ArgumentParser):
    p.add_argument("--expr", help="the function U, e.g. \"(log(x))^2\"")
    p.add_argument("--norm-expr", help="L for the classes M0, M0minus, M0plus")
    p.add_argument("--b-expr", help="b for the class M1 and the SN/Gamma checks")
    p.add_argument("--anchor", type=float, default=None,
                   help="lower limit a of the normalizer integral (default 1, shifted if needed)")
    p.add_argument("--class", dest="cls", default="auto",
                   choices=["auto", "m", "m0", "m0minus", "m0plus", "m1"])
    p.add_argument("--rho", type=float, default=None, help="declared order")
    p.add_argument("--x0", type=float, default=10.0)
    p.add_argument("--ratio", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--tol", type=float, default=0.05,
                   help="tolerance for agreement with --rho")
    p.add_argument("--out", default=None, help="report path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genorder",
                                     description="Orders of functions at infinity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="estimate the order of a function in a class")
    _add_function_flags(p)
    p.add_argument("--format", choices=["json", "text", "csv"], default="json")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--fixtures", action="store_true", help="run on the built-in fixtures")
    p.add_argument("--expr2", help="second function (algebra suite)")
    _add_function_flags(p)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fixtures", help="list the built-in fixtures")
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "expr", "") is None and args.command == "classify":
        parser.error("classify needs --expr")
    try:
        return args.func(args)
    except UsageError as err:
        sys.stderr.write(f"genorder: error: {err}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

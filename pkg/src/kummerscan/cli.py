"""``kummerscan`` command line.

Exit codes: 0 all checks pass or every cell is increasing; 1 a violation was
found (witness on stdout); 2 inconclusive, vacuous, skipped or errored cells
and no violation; 3 usage or domain error (one line on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Callable, Sequence, TextIO

from . import __version__
from .errors import KummerScanError
from .harness import (
    DEFAULT_ABC_AXES,
    DEFAULT_ABC_X_MAX,
    SCHEMA_VERSION,
    _hash,
    _report_cell,
    ScanGrid,
    ScanResult,
    conjecture_document,
    dumps,
    run_scan,
    save_result,
    verify_bounds,
)
from .monotone import MonotoneConfig, MonotonicityReport, Verdict, check_monotone, write_trace_csv
from .ratios import RatioSpec, RatioValue, UNKNOWN, ratio_derivative, ratio_limits, ratio_value
from .sfcore import (
    DEFAULT_PREC,
    EvalResult,
    eval_to_tolerance,
    exp_remainder,
    exp_remainder_via_gamma,
    exp_remainder_via_kummer,
    kummer_1f1,
    kummer_1f1_dx,
    max_precision,
    pfq,
    pochhammer,
    reg_lower_gamma,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3

logger = logging.getLogger("kummerscan")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        raise UsageError(message)


# ---------------------------------------------------------------------------
# value parsing


def _decimal(text: str) -> Decimal:
    try:
        d = Decimal(text.strip())
    except InvalidOperation:
        raise UsageError(f"not a number: {text!r}") from None
    if not d.is_finite():
        raise UsageError(f"not a finite number: {text!r}")
    return d


def _plain(d: Decimal) -> int | float:
    return int(d) if d == d.to_integral_value() else float(d)


def parse_range(text: str) -> list[int | float]:
    """Parse ``v``, ``v1,v2,...``, ``lo..hi`` or ``lo..hi:step`` (inclusive).

    Comma-separated parts may mix single values and ranges. Without a step,
    ranges advance by 1.
    """
    out: list[int | float] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError(f"empty item in {text!r}")
        if ".." in part:
            body, _, step_txt = part.partition(":")
            lo_txt, _, hi_txt = body.partition("..")
            lo, hi = _decimal(lo_txt), _decimal(hi_txt)
            step = _decimal(step_txt) if step_txt else Decimal(1)
            if step <= 0:
                raise UsageError(f"range step must be positive in {part!r}")
            if hi < lo:
                raise UsageError(f"range end below start in {part!r}")
            v = lo
            while v <= hi:
                out.append(_plain(v))
                v += step
        else:
            out.append(_plain(_decimal(part)))
    return out


def parse_vector(text: str) -> list[str]:
    """Comma-separated numbers kept as exact decimal strings."""
    items = [t.strip() for t in text.split(",")]
    for t in items:
        _decimal(t)
    return items


def parse_vector_axis(text: str) -> list[tuple]:
    """``;``-separated vectors, each comma-separated: ``"2,4;3,5"``."""
    return [tuple(_plain(_decimal(t)) for t in chunk.split(",")) for chunk in text.split(";")]


def _scalar(text: str | None, name: str) -> str:
    if text is None:
        raise UsageError(f"--{name} is required")
    _decimal(text)
    return text.strip()


def _int(text: str | None, name: str) -> int:
    if text is None:
        raise UsageError(f"--{name} is required")
    d = _decimal(text)
    if d != d.to_integral_value():
        raise UsageError(f"--{name} must be an integer, got {text!r}")
    return int(d)


def _ints(text: str, name: str) -> list[int]:
    vals = parse_range(text)
    if any(not isinstance(v, int) for v in vals):
        raise UsageError(f"--{name} must list integers, got {text!r}")
    return vals


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value: Any, digits: int) -> str:
    return format(value, f".{digits}g")


def _bound(value: Any) -> float:
    return float(value)


def _envelope(kind: str, grid: dict, cells: list[dict], prec: int, **extra: Any) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "grid": grid, "cells": cells,
           "metadata": {"precision_bits": prec, "grid_hash": None, "tool_version": __version__}}
    doc.update(extra)
    return doc


def _emit_json(doc: dict, out: TextIO) -> None:
    out.write(dumps(doc))
    out.write("\n")


def _limit_repr(v: Any) -> Any:
    if v == UNKNOWN:
        return UNKNOWN
    return str(v)


# ---------------------------------------------------------------------------
# subcommands


def _eval_cells(results: list[tuple[str, EvalResult]], digits: int) -> list[dict]:
    return [{"params": {"quantity": name}, "verdict": "ok", "value": r.to_decimal(digits),
             "rel_error_bound": _bound(r.rel_error_bound), "terms_used": r.terms_used,
             "precision_bits": r.precision_bits} for name, r in results]


def _print_evals(args: argparse.Namespace, grid: dict, results: list[tuple[str, EvalResult]],
                 out: TextIO) -> int:
    cells = _eval_cells(results, args.digits)
    if args.format == "json":
        _emit_json(_envelope("eval", grid, cells, max(r.precision_bits for _, r in results)), out)
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["quantity", "value", "rel_error_bound", "terms_used", "precision_bits"])
        for c in cells:
            w.writerow([c["params"]["quantity"], c["value"], repr(c["rel_error_bound"]),
                        c["terms_used"], c["precision_bits"]])
    else:
        for c in cells:
            out.write(f"{c['params']['quantity']} = {c['value']}  "
                      f"(rel err <= {c['rel_error_bound']:.3g}, {c['terms_used']} terms, "
                      f"{c['precision_bits']} bits)\n")
    return EXIT_OK


def _with_tol(args: argparse.Namespace, fn: Callable[[int], EvalResult]) -> EvalResult:
    if args.rel_tol is None:
        return fn(args.prec)
    return eval_to_tolerance(fn, args.rel_tol, start_prec=args.prec)


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    func = args.func
    if func == "pochhammer":
        a = _scalar(args.a, "a")
        k = _int(args.k, "k")
        if k < 0:
            raise UsageError("--k must be non-negative")
        if _decimal(a) <= 0:
            raise UsageError("--a must be positive for a certified pochhammer bound")
        value = pochhammer(a, k, args.prec)
        # one rounding per factor
        res = EvalResult(value, max(k, 1) * 2.0 ** (1 - args.prec), max(k, 1), args.prec)
        return _print_evals(args, {"func": func, "a": a, "k": k}, [(f"({a})_{k}", res)], out)
    x = _scalar(args.x, "x")
    if func == "gamma-p":
        s = _scalar(args.s, "s")
        res = _with_tol(args, lambda p: reg_lower_gamma(s, x, p))
        return _print_evals(args, {"func": func, "s": s, "x": x}, [(f"P({s}, {x})", res)], out)
    if func in ("1f1", "1f1-dx"):
        a, b = _scalar(args.a, "a"), _scalar(args.b, "b")
        fn = kummer_1f1 if func == "1f1" else kummer_1f1_dx
        res = _with_tol(args, lambda p: fn(a, b, x, p))
        label = f"1F1({a}; {b}; {x})" if func == "1f1" else f"d/dx 1F1({a}; {b}; {x})"
        return _print_evals(args, {"func": func, "a": a, "b": b, "x": x}, [(label, res)], out)
    a = parse_vector(args.a) if args.a else []
    b = parse_vector(args.b) if args.b else []
    res = _with_tol(args, lambda p: pfq(a, b, x, p))
    label = f"{len(a)}F{len(b)}([{', '.join(a)}]; [{', '.join(b)}]; {x})"
    return _print_evals(args, {"func": func, "a": a, "b": b, "x": x}, [(label, res)], out)


def cmd_remainder(args: argparse.Namespace, out: TextIO) -> int:
    n = _int(args.n, "n")
    x = _scalar(args.x, "x")
    routes = {"tail": exp_remainder, "kummer": exp_remainder_via_kummer,
              "gamma": exp_remainder_via_gamma}
    chosen = list(routes) if args.route == "all" else [args.route]
    results = [(f"R_{n}({x}) [{r}]", _with_tol(args, lambda p, f=routes[r]: f(n, x, p)))
               for r in chosen]
    return _print_evals(args, {"func": "remainder", "n": n, "x": x, "routes": chosen}, results, out)


def _spec_from_args(args: argparse.Namespace) -> RatioSpec:
    fam = args.family
    if fam in ("f", "g"):
        n = _int(args.n, "n")
        spec = (RatioSpec.f if fam == "f" else RatioSpec.g)(n, extend_n0=args.extend_n0)
    elif fam == "h":
        spec = RatioSpec.h_abc(_scalar(args.a, "a"), _scalar(args.b, "b"), _scalar(args.c, "c"))
    else:
        for name in ("a", "b", "c"):
            if getattr(args, name) is None:
                raise UsageError(f"--{name} is required for the pfq family")
        spec = RatioSpec.h_pfq(parse_vector(args.a), parse_vector(args.b), parse_vector(args.c))
    return RatioSpec.reciprocal(spec) if args.reciprocal else spec


def _ratio_common(args: argparse.Namespace, out: TextIO, derivative: bool) -> int:
    spec = _spec_from_args(args)
    x = _scalar(args.x, "x")
    fn = ratio_derivative if derivative else ratio_value
    rv: RatioValue = fn(spec, x, args.prec)
    quantity = f"{spec.label()}'({x})" if derivative else f"{spec.label()}({x})"
    limits = ratio_limits(spec)
    cell = {"params": {**spec.to_dict(), "x": x}, "verdict": "ok",
            "value": rv.to_decimal(args.digits),
            "rel_error_bound": _bound(rv.rel_error_bound),
            "abs_error_bound": _bound(rv.abs_error_bound),
            "defined_by_limit": rv.defined_by_limit, "precision_bits": rv.precision_bits}
    if args.format == "json":
        doc = _envelope("ratio" if not derivative else "derivative", {"spec": spec.to_dict(), "x": x},
                        [cell], rv.precision_bits,
                        limits={"x_to_0": _limit_repr(limits.at_zero),
                                "x_to_inf": _limit_repr(limits.at_infinity)})
        _emit_json(doc, out)
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["quantity", "value", "rel_error_bound", "abs_error_bound", "defined_by_limit"])
        w.writerow([quantity, cell["value"], repr(cell["rel_error_bound"]),
                    repr(cell["abs_error_bound"]), rv.defined_by_limit])
    else:
        flag = "  [limit]" if rv.defined_by_limit else ""
        out.write(f"{quantity} = {cell['value']}{flag}  (abs err <= {cell['abs_error_bound']:.3g}, "
                  f"{rv.precision_bits} bits)\n")
    return EXIT_OK


def cmd_ratio(args: argparse.Namespace, out: TextIO) -> int:
    return _ratio_common(args, out, derivative=False)


def cmd_derivative(args: argparse.Namespace, out: TextIO) -> int:
    return _ratio_common(args, out, derivative=True)


def cmd_verify_bounds(args: argparse.Namespace, out: TextIO) -> int:
    ns = _ints(args.n or "1..10", "n")
    report = verify_bounds(ns, args.x_max, args.samples, args.prec)
    if args.out:
        save_result(report, args.out)
    if args.format == "json":
        _emit_json(report.to_dict(), out)
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "x", "value", "error_bound", "lower_margin", "upper_margin", "ok"])
        for s in report.results:
            w.writerow([s.n, repr(s.x), repr(s.value), repr(s.error_bound),
                        repr(s.lower_margin), repr(s.upper_margin), s.ok])
    else:
        for cell in report.per_n():
            lo, up = cell["min_lower_margin"], cell["min_upper_margin"]
            out.write(f"n={cell['params']['n']}: {cell['verdict'].upper()}  "
                      f"min lower margin {lo['value']:.3g} at x={lo['x']:.6g}, "
                      f"min upper margin {up['value']:.3g} at x={up['x']:.6g}\n")
            for v in cell["violations"]:
                out.write(f"  VIOLATION x={v['x']!r} f={v['value']!r} err={v['error_bound']:.3g}\n")
        status = "PASS" if report.passed else "FAIL"
        out.write(f"{status}: {len(report.results)} samples, "
                  f"strictly below 1 everywhere: {report.strict_upper}\n")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _cfg(args: argparse.Namespace) -> MonotoneConfig:
    return MonotoneConfig(
        initial_samples=args.samples,
        max_refinement_depth=args.depth,
        zero_band_factor=args.band_factor,
        precision_bits=args.prec,
        rel_tol=args.rel_tol if args.rel_tol is not None else 1e-12,
    )


def _exit_for(verdicts: Sequence[str]) -> int:
    if any(v == Verdict.VIOLATION.value for v in verdicts):
        return EXIT_VIOLATION
    if verdicts and all(v == Verdict.INCREASING.value for v in verdicts):
        return EXIT_OK
    return EXIT_INCONCLUSIVE


def _report_line(label: str, r: MonotonicityReport) -> str:
    line = f"{label}: {r.verdict.value.upper()}"
    if r.flat:
        line += " (flat, nonstrict)"
    elif r.verdict is Verdict.INCREASING and not r.strict:
        line += " (nonstrict)"
    if r.witness is not None:
        w = r.witness
        line += f"  witness x={w.x!r} derivative={w.derivative!r} error_bound={w.error_bound:.3g}"
        if r.sign_change_bracket:
            line += f"  sign change in [{r.sign_change_bracket[0]!r}, {r.sign_change_bracket[1]!r}]"
    elif r.min_derivative is not None:
        line += f"  min derivative {r.min_derivative[1]:.3g} at x={r.min_derivative[0]:.6g}"
    line += f"  ({r.samples_evaluated} samples, up to {r.max_precision_used} bits)"
    return line


def _write_trace(dirpath: str, name: str, report: MonotonicityReport) -> None:
    Path(dirpath).mkdir(parents=True, exist_ok=True)
    safe = "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in name)
    with open(Path(dirpath) / f"{safe}.csv", "w", newline="") as fh:
        write_trace_csv(report, fh)


def cmd_verify_monotone(args: argparse.Namespace, out: TextIO) -> int:
    cfg = _cfg(args)
    if args.family in ("f", "g"):
        ns = _ints(args.n or "1", "n")
        specs = [(RatioSpec.f if args.family == "f" else RatioSpec.g)(n, extend_n0=args.extend_n0)
                 for n in ns]
        if args.reciprocal:
            specs = [RatioSpec.reciprocal(s) for s in specs]
    else:
        specs = [_spec_from_args(args)]
    keep = args.format == "csv" or args.trace_dir is not None
    reports = [check_monotone(s, (args.x_min, args.x_max), cfg, keep_trace=keep) for s in specs]
    if args.trace_dir:
        for r in reports:
            _write_trace(args.trace_dir, r.spec.label(), r)
    if args.family in ("f", "g") and not args.reciprocal and args.x_min == 0:
        doc = conjecture_document(reports, args.family, args.x_max, cfg)
    else:
        grid = {"specs": [s.to_dict() for s in specs], "x_interval": [args.x_min, args.x_max],
                "config": cfg.to_dict()}
        doc = _envelope("conjecture", grid, [_report_cell(r.spec.to_dict(), r) for r in reports],
                        cfg.precision_bits)
        doc["metadata"]["grid_hash"] = _hash(grid, cfg.precision_bits)
    if args.out:
        save_result(doc, args.out)
    if args.format == "json":
        _emit_json(doc, out)
    elif args.format == "csv":
        if len(reports) != 1:
            raise UsageError("--format csv prints one trace; use --trace-dir for several")
        write_trace_csv(reports[0], out)
    else:
        for r in reports:
            out.write(_report_line(r.spec.label(), r) + "\n")
    return _exit_for([r.verdict.value for r in reports])


def _scan_output(args: argparse.Namespace, result: ScanResult, out: TextIO) -> int:
    verdicts = [c.verdict for c in result.cells]
    if args.format == "json":
        _emit_json(result.to_dict(), out)
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["a", "b", "c", "verdict", "witness_x", "witness_derivative",
                    "min_derivative_x", "min_derivative", "samples", "error"])
        for cell in result.cells:
            d = cell.to_dict()
            wit = d["witness"] or {}
            md = d["min_derivative"] or {}
            w.writerow([json.dumps(d["params"][k]) for k in ("a", "b", "c")] + [
                d["verdict"], wit.get("x", ""), wit.get("derivative", ""),
                md.get("x", ""), md.get("value", ""), d["samples"], d["error"] or ""])
    else:
        for cell in result.cells:
            p = ", ".join(f"{k}={v}" for k, v in cell.params.items())
            if cell.report is not None:
                if cell.verdict != Verdict.INCREASING.value or args.verbose:
                    out.write(_report_line(p, cell.report) + "\n")
            else:
                out.write(f"{p}: {cell.verdict.upper()}  {cell.error}\n")
        summary = ", ".join(f"{k}={v}" for k, v in result.verdicts.items())
        out.write(f"{len(result.cells)} cells: {summary}\n")
        out.write(f"grid hash {result.grid.grid_hash}\n")
    return _exit_for(verdicts)


def _run_grid(args: argparse.Namespace, grid: ScanGrid, out: TextIO) -> int:
    if args.trace_dir:
        # traces need the full sample lists, which scans do not persist
        for params in grid.cells():
            try:
                spec = (RatioSpec.h_abc(params["a"], params["b"], params["c"])
                        if grid.family.value == "h_abc"
                        else RatioSpec.h_pfq(params["a"], params["b"], params["c"]))
                rep = check_monotone(spec, (0.0, grid.x_max), grid.cfg, keep_trace=True)
            except KummerScanError:
                continue
            _write_trace(args.trace_dir, spec.label(), rep)
    result = run_scan(grid, out=args.out, resume=not args.no_resume, workers=args.workers,
                      checkpoint_every=args.checkpoint_every)
    return _scan_output(args, result, out)


def cmd_scan_abc(args: argparse.Namespace, out: TextIO) -> int:
    axes = dict(DEFAULT_ABC_AXES)
    a = parse_range(args.a) if args.a else list(axes["a"])
    b = parse_range(args.b) if args.b else list(axes["b"])
    c = parse_range(args.c) if args.c else list(axes["c"])
    x_max = args.x_max if args.x_max is not None else DEFAULT_ABC_X_MAX
    return _run_grid(args, ScanGrid.abc(a, b, c, x_max, _cfg(args)), out)


def cmd_scan_pfq(args: argparse.Namespace, out: TextIO) -> int:
    for name in ("a", "b", "c"):
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for scan-pfq")
    if args.x_max is None:
        raise UsageError("--x-max is required for scan-pfq")
    grid = ScanGrid.pfq(parse_vector_axis(args.a), parse_vector_axis(args.b),
                        parse_vector_axis(args.c), args.x_max, _cfg(args))
    return _run_grid(args, grid, out)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prec", type=int, default=DEFAULT_PREC, help="mantissa bits (default 128)")
    common.add_argument("--rel-tol", type=float, default=None,
                        help="target relative error (eval) or bisection tolerance (monotone)")
    common.add_argument("--digits", type=int, default=17, help="significant digits printed")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--out", default=None, help="write the JSON result file here")
    common.add_argument("-v", "--verbose", action="store_true")

    params = _Parser(add_help=False)
    for name in ("a", "b", "c"):
        params.add_argument(f"--{name}", default=None)
    params.add_argument("--n", default=None)
    params.add_argument("--x", default=None)

    mono = _Parser(add_help=False)
    mono.add_argument("--samples", type=int, default=256, help="initial grid samples")
    mono.add_argument("--depth", type=int, default=12, help="maximum refinement depth")
    mono.add_argument("--band-factor", type=float, default=10.0, help="zero band multiplier")
    mono.add_argument("--trace-dir", default=None, help="write x,value,derivative,error_bound CSVs")

    parser = _Parser(prog="kummerscan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common, params], help="evaluate a special function")
    p.add_argument("--func", choices=("1f1", "1f1-dx", "pfq", "gamma-p", "pochhammer"),
                   default="1f1")
    p.add_argument("--s", default=None, help="order of the incomplete gamma function")
    p.add_argument("--k", default=None, help="length of the rising factorial")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("remainder", parents=[common, params], help="exponential series remainder")
    p.add_argument("--route", choices=("tail", "kummer", "gamma", "all"), default="tail")
    p.set_defaults(handler=cmd_remainder)

    for name, handler, help_ in (("ratio", cmd_ratio, "evaluate a ratio"),
                                 ("derivative", cmd_derivative, "x-derivative of a ratio")):
        p = sub.add_parser(name, parents=[common, params], help=help_)
        p.add_argument("--family", choices=("f", "g", "h", "pfq"), required=True)
        p.add_argument("--reciprocal", action="store_true")
        p.add_argument("--extend-n0", action="store_true", help="allow n = 0 (R_{-1} = e^x)")
        p.set_defaults(handler=handler)

    p = sub.add_parser("verify-bounds", parents=[common, params],
                       help="check (n+1)/(n+2) <= f_n(x) <= 1")
    p.add_argument("--x-max", type=float, default=100.0)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(handler=cmd_verify_bounds)

    p = sub.add_parser("verify-monotone", parents=[common, params, mono],
                       help="monotonicity check of one ratio or an f/g sweep over n")
    p.add_argument("--family", choices=("f", "g", "h", "pfq"), required=True)
    p.add_argument("--reciprocal", action="store_true")
    p.add_argument("--extend-n0", action="store_true")
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=100.0)
    p.set_defaults(handler=cmd_verify_monotone)

    for name, handler, help_ in (("scan-abc", cmd_scan_abc, "scan the abc ratio over a box"),
                                 ("scan-pfq", cmd_scan_pfq, "scan the pFq ratio over vector axes")):
        p = sub.add_parser(name, parents=[common, params, mono], help=help_)
        p.add_argument("--x-max", type=float, default=None)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--checkpoint-every", type=int, default=25)
        p.add_argument("--no-resume", action="store_true",
                       help="ignore any existing --out file instead of resuming it")
        p.set_defaults(handler=handler)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logging.getLogger().setLevel(logging.INFO)
        if args.prec < 2:
            raise UsageError("--prec must be at least 2 bits")
        if args.digits < 1:
            raise UsageError("--digits must be at least 1")
        if args.rel_tol is not None and not args.rel_tol > 0:
            raise UsageError("--rel-tol must be positive")
        max_precision()
        return args.handler(args, out)
    except (UsageError, KummerScanError) as exc:
        print(f"kummerscan: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"kummerscan: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

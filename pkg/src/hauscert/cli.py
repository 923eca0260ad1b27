"""Config-driven command line interface with JSON report emission."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import certifier, classical, hausdorff, matrices, testfuncs
from .errors import ConfigError, HauscertError
from .exprcfg import parse_expr
from .gaussian import WitnessFunction

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


# ---------------------------------------------------------------------------
# Config -> objects


def _parse_support(text, dim):
    text = text.strip()
    if text == "all":
        return hausdorff.AllSpace()
    for name, cls in (("annulus", hausdorff.Annulus),
                      ("halfline", hausdorff.Interval),
                      ("interval", hausdorff.Interval)):
        if text.startswith(name + "(") and text.endswith(")"):
            parts = text[len(name) + 1:-1].split(",")
            if len(parts) != 2:
                raise ConfigError(f"support {text!r} needs two bounds")
            lo, hi = (math.inf if p.strip() == "inf"
                      else -math.inf if p.strip() == "-inf"
                      else float(p) for p in parts)
            if cls is hausdorff.Interval and dim != 1:
                raise ConfigError("halfline supports are one-dimensional")
            return cls(lo, hi)
    raise ConfigError(f"unknown support descriptor {text!r}")


def build_kernel(section):
    try:
        dim = int(section.get("dim", 1))
        expr = parse_expr(section["expr"], dim)
        support = _parse_support(section.get("support", "all"), dim)
        nonneg = bool(section.get("nonneg", True))
    except KeyError as exc:
        raise ConfigError(f"[kernel] missing key {exc}") from None
    except HauscertError as exc:
        raise ConfigError(f"[kernel] expr: {exc}") from None
    return hausdorff.KernelSpec(dim, expr, support, nonneg=nonneg)


def build_matrix(section, dim):
    variant = section.get("variant", "diag-inverse-norm")
    if variant == "diag-inverse-norm":
        return matrices.DiagonalInverseNorm(dim)
    if variant == "constant":
        return matrices.ConstantMatrix(_square(section["entries"]))
    if variant == "expr":
        entries = section["entries"]
        if entries and not isinstance(entries[0], list):  # row-major flat list
            entries = [entries[i * dim:(i + 1) * dim] for i in range(dim)]
        grid = [[parse_expr(e, dim) for e in row] for row in entries]
        return matrices.ExpressionEntries(dim, grid)
    if variant == "decomposed":
        inner = build_matrix(section["p"], dim) if "p" in section \
            else matrices.DiagonalInverseNorm(dim)
        return matrices.Decomposed(_square(section["lambda"]), inner,
                                   _square(section["q"]))
    raise ConfigError(f"unknown matrix variant {variant!r}")


def _square(entries):
    """Accept either nested rows or a row-major flat list of n^2 numbers."""
    arr = np.asarray(entries, dtype=float)
    if arr.ndim == 1:
        side = int(round(math.sqrt(arr.size)))
        if side * side != arr.size:
            raise ConfigError("flat matrix list must have a square length")
        arr = arr.reshape(side, side)
    return arr


def build_function(section, dim):
    preset = section.get("preset", "gauss")
    if preset == "gauss":
        shifts = section.get("shifts", [0.0] * dim)
        f = testfuncs.gauss_product(dim, shifts, 1)
    elif preset == "G1":
        f = WitnessFunction(1, dim).as_test_function()
    elif preset == "Gm":
        f = WitnessFunction(int(section.get("m", 1)), dim).as_test_function()
    else:
        raise ConfigError(f"unknown function preset {preset!r}")
    dilation = float(section.get("dilation", 1.0))
    if dilation != 1.0:
        f = f.dilate(dilation)
    return f


def load_config(path):
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Report plumbing


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_report(out_path, command, config, results, evidence=None):
    report = {
        "command": command,
        "config": _jsonable(config),
        "results": _jsonable(results),
        "evidence": _jsonable(evidence) if evidence is not None else None,
        "timings": None,  # omitted so reports are byte-identical across runs
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    return report


def write_growth_csv(out_path, rows, header):
    if not out_path:
        return
    path = Path(out_path).with_suffix(".csv")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([row[h] for h in header])


def _condition_evidence(report):
    if report is None:
        return None
    ev = report.quad.evidence
    return {
        "status": report.quad.status.value,
        "value": report.quad.value,
        "breakdown": [b.value for b in report.breakdown],
        "growth": None if ev is None else {
            "law": ev.law,
            "exponent": ev.exponent,
            "levels": ev.levels,
        },
    }


# ---------------------------------------------------------------------------
# Subcommands


def cmd_certify(config, args):
    kernel = build_kernel(config["kernel"])
    fam = build_matrix(config.get("matrix", {}), kernel.dim)
    run = config.get("run", {})
    k = args.k if args.k is not None else int(run.get("k", 0))
    tol = args.tol if args.tol is not None else float(run.get("tol", 1e-7))
    seed = args.seed if args.seed is not None else int(run.get("seed", 7))
    cert = certifier.certify(kernel, fam, k, tol=tol,
                             eta_floor=float(run.get("eta_floor", 1e-6)),
                             seed=seed,
                             inner_schedule=run.get("inner_schedule"),
                             outer_schedule=run.get("outer_schedule"))
    results = {
        "verdict": cert.verdict,
        "constant": cert.constant,
        "reason": cert.reason,
        "preconditions": cert.preconditions,
        "k": k,
    }
    write_report(args.out, "certify", config, results,
                 _condition_evidence(cert.evidence))
    return EXIT_INCONCLUSIVE if cert.verdict == "inconclusive" else EXIT_OK


def cmd_apply(config, args):
    kernel = build_kernel(config["kernel"])
    fam = build_matrix(config.get("matrix", {}), kernel.dim)
    f = build_function(config.get("function", {}), kernel.dim)
    run = config.get("run", {})
    tol = args.tol if args.tol is not None else float(run.get("tol", 1e-8))
    points = run.get("points")
    if not points:
        raise ConfigError("[run] points is required for apply")
    rows = []
    inconclusive = False
    for x in points:
        r = hausdorff.apply_point(kernel, fam, f, np.atleast_1d(x), tol=tol)
        rows.append({"x": x, "value": r.value, "err_est": r.err_est,
                     "status": r.status.value})
        inconclusive |= r.status.value != "converged"
    write_report(args.out, "apply", config, {"points": rows})
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def cmd_wnorm(config, args):
    dim = int(config.get("kernel", {}).get("dim",
                                           config.get("function", {}).get("dim", 1)))
    f = build_function(config.get("function", {}), dim)
    run = config.get("run", {})
    k = args.k if args.k is not None else int(run.get("k", 0))
    norm = certifier.wk1_norm(f, k)
    results = {
        "k": k,
        "total": norm.total,
        "per_alpha": {str(list(a)): v for a, v in norm.per_alpha.items()},
    }
    write_report(args.out, "wnorm", config, results)
    return EXIT_OK


def cmd_verify_derivative(config, args):
    kernel = build_kernel(config["kernel"])
    fam = build_matrix(config.get("matrix", {}), kernel.dim)
    f = build_function(config.get("function", {}), kernel.dim)
    run = config.get("run", {})
    alpha = tuple(int(a) for a in run.get("alpha", [1] * kernel.dim))
    tol = args.tol if args.tol is not None else float(run.get("tol", 1e-4))
    grid = run.get("grid", {})
    lo = float(grid.get("lo", -5.0))
    hi = float(grid.get("hi", 5.0))
    h = float(grid.get("h", 1e-2))
    axis = np.arange(lo, hi + 0.5 * h, h)
    report = certifier.verify_interchange(kernel, fam, f, alpha,
                                          [axis] * kernel.dim, tol)
    results = {
        "alpha": list(alpha),
        "max_abs_discrepancy": report.max_abs_discrepancy,
        "tol": report.tol,
        "pass": report.passed,
    }
    write_report(args.out, "verify-derivative", config, results)
    return EXIT_OK if report.passed else EXIT_INCONCLUSIVE


def cmd_witness(config, args):
    kernel = build_kernel(config["kernel"])
    fam = build_matrix(config.get("matrix", {}), kernel.dim)
    run = config.get("run", {})
    k = args.k if args.k is not None else int(run.get("k", 1))
    radii = run.get("radii", [2.0 ** j for j in range(9)])
    rows = certifier.blowup_witness(kernel, fam, k, radii=radii)
    write_report(args.out, "witness", config, {"k": k, "table": rows})
    write_growth_csv(args.out, rows, ["R", "S", "W"])
    return EXIT_OK


def cmd_hardy_report(config, args):
    run = (config or {}).get("run", {})
    k_max = args.k if args.k is not None else int(run.get("k", 2))
    tol = args.tol if args.tol is not None else float(run.get("tol", 1e-7))
    rows = classical.proposition_report(k_max, tol=tol)
    write_report(args.out, "hardy-report", config or {}, {"table": rows})
    inconclusive = any(r["verdict"] == "inconclusive" for r in rows)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def cmd_cone_measure(config, args):
    entries = config["matrix"]["entries"]
    run = config.get("run", {})
    seed = args.seed if args.seed is not None else int(run.get("seed", 0))
    n_samples = int(run.get("samples", 1_000_000))
    result = matrices.cone_measure(np.asarray(entries, dtype=float),
                                   n_samples, seed)
    write_report(args.out, "cone-measure",
                 config, {"estimate": result["estimate"],
                          "stderr": result["stderr"],
                          "samples": n_samples, "seed": seed})
    return EXIT_OK


_COMMANDS = {
    "certify": (cmd_certify, True),
    "apply": (cmd_apply, True),
    "wnorm": (cmd_wnorm, True),
    "verify-derivative": (cmd_verify_derivative, True),
    "witness": (cmd_witness, True),
    "hardy-report": (cmd_hardy_report, False),
    "cone-measure": (cmd_cone_measure, True),
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hauscert",
        description="Certify Sobolev boundedness of generalized Hausdorff operators.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--k", type=int, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler, needs_config = _COMMANDS[args.command]
    try:
        config = load_config(args.config) if args.config else None
        if needs_config and config is None:
            raise ConfigError(f"{args.command} requires --config")
        return handler(config, args)
    except HauscertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

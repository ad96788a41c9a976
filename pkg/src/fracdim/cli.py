"""Command-line front end.

Subcommands::

    fracdim integrate  --op katugampola --alpha 0.5,0.5 --rho 0,0 --surface constant:1 --point 1,1
    fracdim boxdim     --surface sine:2,2 --n 512 --oversample 4 --k 3:7
    fracdim experiment theorem-main|hadamard|separable [...]
    fracdim verify

Exit status: 0 on success, 1 when a verification fails, 2 on bad arguments.
Options may also come from a flat ``key=value`` file given with ``--config``;
command-line flags take precedence.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from fracdim.boxdim import box_count_curve, curve_csv, estimate_dimension, write_curve_csv
from fracdim.errors import DomainError, InvalidSpecError
from fracdim.experiments import (
    HADAMARD_RECT,
    DIMENSION_SURFACES,
    ExperimentConfig,
    closed_form_checks,
    oracle_checks,
    report_csv,
    run_experiment,
    sandwich_checks,
    separable_check,
    slug,
    write_experiment_outputs,
)
from fracdim.frac_integral import OperatorKind, OperatorSpec, apply_point
from fracdim.surfaces import UNIT_SQUARE, Rect, make_surface, parse_surface_spec, sample_surface

log = logging.getLogger("fracdim")

INTEGRATE_KEYS = ("value", "operator", "order", "rho", "point")
ESTIMATE_KEYS = ("surface", "slope", "intercept", "r_squared", "window", "reliable")
SEPARABLE_KEYS = ("max_rel_error", "gamma1", "a", "c", "points")

# built-in defaults, applied after flags and the config file
DEFAULTS = {
    "op": "katugampola",
    "alpha": "0.5,0.5",
    "rho": "0,0",
    "rule_n": "64",
    "n": "512",
    "grid_n": "512",
    "oversample": "4",
    "k": "3:7",
    "seed": "0",
    "gamma1": "0.5",
    "points": "9",
}


class UsageError(Exception):
    pass


def _json(obj) -> str:
    """JSON with floats printed to 17 significant digits; NaN becomes null."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return "null" if not math.isfinite(obj) else f"{obj:.17g}"
    if isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _floats(text: str, count: int, name: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in str(text).split(","))
    except ValueError:
        raise UsageError(f"--{name}: expected {count} comma-separated numbers, got {text!r}")
    if len(vals) != count:
        raise UsageError(f"--{name}: expected {count} values, got {len(vals)}")
    return vals


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in str(text).split(":"))
    except ValueError:
        raise UsageError(f"--k: expected k_min:k_max, got {text!r}")
    return lo, hi


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    config = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).copy().items():
        if value is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])
    return args


def _operator(args, rect: Rect) -> OperatorSpec:
    kind = OperatorKind(args.op)
    order = _floats(args.alpha, 2, "alpha")
    for v in order:
        if not (0.0 < v <= 1.0):
            raise UsageError(f"invalid order {args.alpha}: each component must lie in (0, 1]")
    a, c = _floats(args.lower, 2, "lower") if getattr(args, "lower", None) else (rect.a, rect.c)
    n = int(args.rule_n)
    if kind is OperatorKind.HADAMARD:
        return OperatorSpec.hadamard(order, a, c, n)
    return OperatorSpec.katugampola(order, _floats(args.rho, 2, "rho"), a, c, n)


def _rect(args, kind: OperatorKind = OperatorKind.KATUGAMPOLA) -> Rect:
    if getattr(args, "rect", None):
        return Rect(*_floats(args.rect, 4, "rect"))
    return HADAMARD_RECT if kind is OperatorKind.HADAMARD else UNIT_SQUARE


def cmd_integrate(args) -> int:
    kind = OperatorKind(args.op)
    rect = _rect(args, kind)
    spec = _operator(args, rect)
    x, y = _floats(args.point, 2, "point")
    f = make_surface(parse_surface_spec(args.surface), rect)
    value = apply_point(f, spec, x, y)
    hadamard = kind is OperatorKind.HADAMARD
    print(_json({
        "value": value,
        "operator": kind.value,
        "order": [spec.order.a1, spec.order.a2],
        "rho": None if hadamard else [spec.params.rho1, spec.params.rho2],
        "point": [x, y],
    }))
    return 0


def cmd_boxdim(args) -> int:
    rect = _rect(args)
    f = make_surface(parse_surface_spec(args.surface), rect)
    k_min, k_max = _window(args.k)
    s = sample_surface(f, int(args.n), int(args.oversample))
    curve = box_count_curve(s, k_min, k_max)
    est = estimate_dimension(curve)
    sys.stdout.write(curve_csv(curve))
    print(_json({
        "surface": f.label,
        "slope": est.slope,
        "intercept": est.intercept,
        "r_squared": est.r_squared,
        "window": list(est.window),
        "reliable": est.reliable,
    }))
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_curve_csv(out / f"boxdim_{slug(f.label)}_curve.csv", curve)
    return 0


def cmd_dimension_experiment(args, name: str, kind: OperatorKind) -> int:
    args.op = kind.value
    rect = _rect(args, kind)
    spec = _operator(args, rect)
    specs = [parse_surface_spec(s) for s in args.surface] if args.surface else list(DIMENSION_SURFACES)
    results = []
    for sspec in specs:
        cfg = ExperimentConfig(
            surface=sspec, rect=rect, operator=spec,
            grid_n=int(args.grid_n), oversample=int(args.oversample),
            k_window=_window(args.k),
            output_dir=Path(args.output_dir) if args.output_dir else None,
            seed=int(args.seed),
        )
        res = run_experiment(cfg)
        log.info("%s: dim f=%.4f dim If=%.4f spot-check rel diff=%.2e",
                 res.label, res.dim_f.slope, res.dim_if.slope, res.spot_check)
        results.append(res)
    sys.stdout.write(report_csv(results))
    if args.output_dir:
        path = write_experiment_outputs(Path(args.output_dir), name, results)
        log.info("wrote %s", path)
    return 0


def cmd_separable(args) -> int:
    a, c = _floats(args.lower, 2, "lower") if args.lower else (0.2, 0.2)
    g1 = float(args.gamma1)
    pts = int(args.points)
    err = separable_check(lambda x: 1.0 + np.sin(2.0 * np.pi * x), g1, a, c, pts)
    print(_json({"max_rel_error": err, "gamma1": g1, "a": a, "c": c, "points": pts}))
    return 0


def cmd_verify(args) -> int:
    checks = closed_form_checks() + oracle_checks(seed=int(args.seed)) + sandwich_checks()
    ok = True
    for chk in checks:
        print(f"{'PASS' if chk.passed else 'FAIL'} {chk.name}: {chk.detail}")
        ok &= chk.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracdim", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, operator=True):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--rect", help="a,b,c,d")
        if operator:
            p.add_argument("--alpha", "--gamma", dest="alpha", help="order pair a1,a2")
            p.add_argument("--rho", help="rho1,rho2 (Katugampola only)")
            p.add_argument("--lower", help="lower limits a,c (default: rectangle corner)")
            p.add_argument("--rule-n", dest="rule_n", help="quadrature nodes per axis")

    p = sub.add_parser("integrate", help="evaluate an operator at one point")
    common(p)
    p.add_argument("--op", choices=[k.value for k in OperatorKind])
    p.add_argument("--surface", required=True)
    p.add_argument("--point", required=True, help="x,y")

    p = sub.add_parser("boxdim", help="box-count a sampled surface")
    common(p, operator=False)
    p.add_argument("--surface", required=True)
    p.add_argument("--n", help="cells per side")
    p.add_argument("--oversample")
    p.add_argument("--k", help="k_min:k_max")
    p.add_argument("--output-dir", dest="output_dir")

    p = sub.add_parser("experiment", help="run a desk-scale experiment")
    esub = p.add_subparsers(dest="experiment", required=True)
    for name in ("theorem-main", "hadamard"):
        e = esub.add_parser(name)
        common(e)
        e.add_argument("--surface", action="append", help="repeatable; default: sine, oscillatory and bilinear")
        e.add_argument("--grid-n", dest="grid_n")
        e.add_argument("--oversample")
        e.add_argument("--k")
        e.add_argument("--output-dir", dest="output_dir")
        e.add_argument("--seed")
    e = esub.add_parser("separable")
    e.add_argument("--config")
    e.add_argument("--gamma1")
    e.add_argument("--lower", help="a,c")
    e.add_argument("--points")

    p = sub.add_parser("verify", help="oracle cross-checks and box-count sandwich")
    p.add_argument("--config")
    p.add_argument("--seed")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        args = _resolve(args)
        if args.command == "integrate":
            return cmd_integrate(args)
        if args.command == "boxdim":
            return cmd_boxdim(args)
        if args.command == "experiment":
            if args.experiment == "separable":
                return cmd_separable(args)
            kind = OperatorKind.HADAMARD if args.experiment == "hadamard" else OperatorKind.KATUGAMPOLA
            return cmd_dimension_experiment(args, args.experiment.replace("-", "_"), kind)
        return cmd_verify(args)
    except (UsageError, InvalidSpecError, DomainError, OSError, ValueError) as exc:
        print(f"fracdim: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

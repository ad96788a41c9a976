"""Desk-scale dimension experiments and verification checks used by the CLI."""

from __future__ import annotations

import csv
import io
import math
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from fracdim.boxdim import (
    BoxCountCurve,
    DimensionEstimate,
    box_count,
    box_count_curve,
    estimate_dimension,
    lemma31_bounds,
    write_curve_csv,
)
from fracdim.errors import InvalidSpecError
from fracdim.frac_integral import (
    OperatorKind,
    OperatorSpec,
    apply_point,
    closed_form_constant,
    hadamard_point,
    hadamard_point_1d,
    integrate_grid,
)
from fracdim.oracle import direct_singular
from fracdim.surfaces import (
    Rect,
    Surface,
    SurfaceKind,
    SurfaceSpec,
    make_surface,
    sample_surface,
)

REPORT_COLUMNS = (
    "surface", "alpha1", "alpha2", "rho1", "rho2",
    "dim_f", "r2_f", "dim_If", "r2_If", "runtime_s",
)

DIMENSION_SURFACES = (
    SurfaceSpec(SurfaceKind.SINE_PRODUCT, (2.0, 2.0)),
    SurfaceSpec(SurfaceKind.OSCILLATORY),
    SurfaceSpec(SurfaceKind.BILINEAR, (1.0, 1.0, 0.0)),
)

CATALOG = (
    SurfaceSpec(SurfaceKind.CONSTANT, (1.0,)),
    SurfaceSpec(SurfaceKind.BILINEAR, (1.0, 1.0, 0.0)),
    SurfaceSpec(SurfaceKind.SINE_PRODUCT, (2.0, 2.0)),
    SurfaceSpec(SurfaceKind.WEIERSTRASS, (2.0, 0.5, 20.0)),
    SurfaceSpec(SurfaceKind.TAKAGI, (0.5, 20.0)),
    SurfaceSpec(SurfaceKind.OSCILLATORY),
)

HADAMARD_RECT = Rect(0.1, 1.0, 0.1, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    surface: SurfaceSpec
    rect: Rect
    operator: OperatorSpec
    grid_n: int = 512
    oversample: int = 4
    k_window: tuple[int, int] = (3, 7)
    output_dir: Path | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        k_min, k_max = self.k_window
        if k_min < 1 or k_max < k_min + 2:
            raise InvalidSpecError(f"k window {k_min}:{k_max} needs k_min >= 1, k_max >= k_min + 2")
        if self.grid_n % (1 << k_max):
            raise InvalidSpecError(f"grid_n={self.grid_n} must be a multiple of 2**{k_max}")
        if self.oversample < 1:
            raise InvalidSpecError("oversample must be >= 1")
        p = self.operator.params
        if (p.a, p.c) != (self.rect.a, self.rect.c):
            raise InvalidSpecError("operator lower limits must equal the rectangle's lower corner")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    label: str
    curve_f: BoxCountCurve
    curve_if: BoxCountCurve
    dim_f: DimensionEstimate
    dim_if: DimensionEstimate
    runtime_s: float
    spot_check: float = field(default=math.nan)

    def row(self) -> dict[str, object]:
        op = self.config.operator
        hadamard = op.kind is OperatorKind.HADAMARD
        return {
            "surface": self.label,
            "alpha1": op.order.a1,
            "alpha2": op.order.a2,
            "rho1": math.nan if hadamard else op.params.rho1,
            "rho2": math.nan if hadamard else op.params.rho2,
            "dim_f": self.dim_f.slope,
            "r2_f": self.dim_f.r_squared,
            "dim_If": self.dim_if.slope,
            "r2_If": self.dim_if.r_squared,
            "runtime_s": self.runtime_s,
        }


def run_experiment(cfg: ExperimentConfig, spot_points: int = 3) -> ExperimentResult:
    """Sample ``f``, integrate it on the same grid and estimate both dimensions.

    ``spot_points`` grid nodes, drawn with ``cfg.seed``, are re-evaluated with
    the direct oracle; the largest relative deviation is kept in ``spot_check``.
    """
    start = time.perf_counter()
    f = make_surface(cfg.surface, cfg.rect)
    sf = sample_surface(f, cfg.grid_n, cfg.oversample)
    sif = integrate_grid(f, cfg.operator, cfg.grid_n, cfg.oversample)
    k_min, k_max = cfg.k_window
    curve_f = box_count_curve(sf, k_min, k_max)
    curve_if = box_count_curve(sif, k_min, k_max)
    runtime = time.perf_counter() - start

    spot = math.nan
    if spot_points:
        rng = np.random.default_rng(cfg.seed)
        idx = rng.integers(1, sif.intervals + 1, size=(spot_points, 2))
        xs, ys = sif.xs(), sif.ys()
        devs = []
        for i, j in idx:
            ref = direct_singular(f, cfg.operator, xs[i], ys[j], tol=1e-10).value
            devs.append(abs(sif.values[j, i] - ref) / max(abs(ref), 1e-300))
        spot = max(devs)

    return ExperimentResult(
        cfg, f.label, curve_f, curve_if,
        estimate_dimension(curve_f), estimate_dimension(curve_if),
        runtime, spot,
    )


def format_value(v: object) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.17g}"
    return str(v)


def report_csv(results: Iterable[ExperimentResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for res in results:
        row = res.row()
        writer.writerow([format_value(row[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "_", label).strip("_")


def write_experiment_outputs(out_dir: Path, name: str, results: list[ExperimentResult]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = out_dir / f"{name}.csv"
    with open(report, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(report_csv(results))
    for res in results:
        stem = slug(res.label)
        write_curve_csv(out_dir / f"{name}_{stem}_f_curve.csv", res.curve_f)
        write_curve_csv(out_dir / f"{name}_{stem}_If_curve.csv", res.curve_if)
    return report


def separable_check(h: Callable[[np.ndarray], np.ndarray], gamma1: float, a: float, c: float,
                    points: int = 9, b: float = 1.0, d: float = 1.0,
                    rule_n: int = 64) -> float:
    """Max relative error of the mixed Hadamard integral of ``f(x, y) = h(x)``
    with ``gamma2 = 1`` against ``log(y/c)`` times the univariate integral of ``h``.

    Points form a ``points x points`` grid strictly inside ``[a, b] x [c, d]``.
    """
    rect = Rect(a, b, c, d)
    f = Surface(rect, lambda x, y: h(np.broadcast_arrays(x, y)[0]), "separable")
    spec = OperatorSpec.hadamard((gamma1, 1.0), a, c, rule_n)
    xs = a + (b - a) * np.arange(1, points + 1) / (points + 1)
    ys = c + (d - c) * np.arange(1, points + 1) / (points + 1)
    worst = 0.0
    for x in xs:
        one_d = hadamard_point_1d(h, gamma1, a, x, rule_n)
        for y in ys:
            mixed = hadamard_point(f, spec, x, y)
            expected = math.log(y / c) * one_d
            worst = max(worst, abs(mixed - expected) / abs(expected))
    return worst


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def oracle_checks(seed: int = 0, points: int = 2,
                  alphas=(0.3, 0.5, 0.8), rhos=(-0.5, 0.0, 1.0)) -> list[CheckResult]:
    """Transformed quadrature against the direct oracle over an order/exponent sweep."""
    rng = np.random.default_rng(seed)
    surfaces = [make_surface(SurfaceSpec(SurfaceKind.SINE_PRODUCT, (2.0, 2.0))),
                make_surface(SurfaceSpec(SurfaceKind.BILINEAR, (1.0, 1.0, 0.0)))]
    out = []
    for f in surfaces:
        worst, count = 0.0, 0
        for a1 in alphas:
            for a2 in alphas:
                for r1 in rhos:
                    for r2 in rhos:
                        spec = OperatorSpec.katugampola((a1, a2), (r1, r2))
                        for x, y in rng.uniform(0.0, 1.0, size=(points, 2)):
                            v = apply_point(f, spec, x, y)
                            o = direct_singular(f, spec, x, y)
                            tol = max(1e-8, 1e-6 * abs(v))
                            worst = max(worst, abs(v - o.value) / tol)
                            count += 1
        out.append(CheckResult(f"oracle[{f.label}]", worst <= 1.0,
                               f"{count} points, worst |diff|/tol = {worst:.3g}"))
    return out


def closed_form_checks() -> list[CheckResult]:
    one = make_surface(SurfaceSpec(SurfaceKind.CONSTANT, (1.0,)))
    out = []
    kat = OperatorSpec.katugampola((0.5, 0.5))
    had = OperatorSpec.hadamard((1.0, 1.0), 0.1, 0.1)
    for name, spec in (("closed_form[katugampola]", kat), ("closed_form[hadamard]", had)):
        v = apply_point(one, spec, 1.0, 1.0)
        err = abs(v - closed_form_constant(spec, 1.0, 1.0))
        out.append(CheckResult(name, err <= 1e-9, f"abs error {err:.3g}"))
    return out


def sandwich_checks(n: int = 128, oversample: int = 4,
                    levels=range(2, 8)) -> list[CheckResult]:
    """Lower count never exceeds the upper bound and equals the box count."""
    out = []
    for spec in CATALOG:
        s = sample_surface(make_surface(spec), n, oversample)
        bad = []
        for k in levels:
            lower, upper = lemma31_bounds(s, k)
            if not (lower <= upper and box_count(s, k) == lower):
                bad.append(k)
        detail = "all levels ok" if not bad else f"failed at k={bad}"
        out.append(CheckResult(f"sandwich[{spec.label}]", not bad, detail))
    return out

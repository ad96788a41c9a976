"""Mixed Katugampola and mixed Hadamard fractional integrals.

Both operators are evaluated in transformed variables where the kernel
becomes the Beta weight ``(1 - u)**(alpha - 1)`` on ``[0, 1]``. Per axis,
with ``P = rho + 1``:

* Katugampola: ``u = (s**P - a**P) / (x**P - a**P)``, so the axis integral is
  ``P**-alpha * (x**P - a**P)**alpha / Gamma(alpha) * int (1-u)**(alpha-1) f(s(u)) du``.
* Hadamard: ``u = log(s/a) / log(x/a)``, giving
  ``log(x/a)**gamma / Gamma(gamma) * int (1-u)**(gamma-1) f(a*(x/a)**u) du``.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from fracdim.errors import DomainError, InvalidSpecError
from fracdim.special import QuadratureRule, gamma, jacobi_rule
from fracdim.surfaces import SampledSurface, Surface, grid_axis

DEFAULT_RULE_N = 64
# sigmoid grading of the Legendre variable; see jacobi_rule
OPERATOR_GRADING = 2


class OperatorKind(enum.Enum):
    KATUGAMPOLA = "katugampola"
    HADAMARD = "hadamard"


@dataclass(frozen=True)
class FractionalOrder:
    a1: float
    a2: float

    def __post_init__(self) -> None:
        for name, v in (("a1", self.a1), ("a2", self.a2)):
            if not (0.0 < v <= 1.0):
                raise InvalidSpecError(f"fractional order {name}={v} must lie in (0, 1]")


@dataclass(frozen=True)
class KatugampolaParams:
    rho1: float = 0.0
    rho2: float = 0.0
    a: float = 0.0
    c: float = 0.0

    def __post_init__(self) -> None:
        for name, v in (("rho1", self.rho1), ("rho2", self.rho2)):
            if not (v > -1.0) or not math.isfinite(v):
                raise InvalidSpecError(f"{name}={v} must be finite and > -1")
        if not (self.a >= 0.0 and self.c >= 0.0):
            raise InvalidSpecError(f"lower limits must be >= 0, got a={self.a}, c={self.c}")


@dataclass(frozen=True)
class OperatorSpec:
    kind: OperatorKind
    order: FractionalOrder
    params: KatugampolaParams = KatugampolaParams()
    rule_n: int = DEFAULT_RULE_N

    def __post_init__(self) -> None:
        if self.kind is OperatorKind.HADAMARD and not (self.params.a > 0 and self.params.c > 0):
            raise InvalidSpecError("the Hadamard operator needs lower limits a > 0 and c > 0")
        if self.rule_n < 2:
            raise InvalidSpecError(f"rule_n must be >= 2, got {self.rule_n}")

    @classmethod
    def katugampola(cls, alpha: tuple[float, float], rho=(0.0, 0.0), a=0.0, c=0.0,
                    rule_n=DEFAULT_RULE_N) -> OperatorSpec:
        return cls(OperatorKind.KATUGAMPOLA, FractionalOrder(*alpha),
                   KatugampolaParams(rho[0], rho[1], a, c), rule_n)

    @classmethod
    def hadamard(cls, gamma_: tuple[float, float], a: float, c: float,
                 rule_n=DEFAULT_RULE_N) -> OperatorSpec:
        return cls(OperatorKind.HADAMARD, FractionalOrder(*gamma_),
                   KatugampolaParams(0.0, 0.0, a, c), rule_n)


def katugampola_nodes(u, rho: float, a: float, x, complement=None):
    """Map ``u in [0, 1]`` to ``s in [a, x]`` through ``s**(rho+1)`` affine in ``u``.

    ``complement``, if given, must equal ``1 - u`` and is used instead of
    ``u`` because it carries more precision close to ``s = x``.
    """
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    p = rho + 1.0
    if complement is None:
        if a == 0.0:
            return x * u ** (1.0 / p)
        return (a**p + u * _power_gap(a, x, p)) ** (1.0 / p)
    v = np.asarray(complement, dtype=float)
    if a == 0.0:
        with np.errstate(divide="ignore"):  # v == 1 maps to s == 0
            return x * np.exp(np.log1p(-v) / p)
    return (x**p - v * _power_gap(a, x, p)) ** (1.0 / p)


def hadamard_nodes(u, a: float, x, complement=None):
    x = np.asarray(x, dtype=float)
    if complement is None:
        return a * np.exp(np.asarray(u, dtype=float) * np.log(x / a))
    return x * np.exp(np.asarray(complement, dtype=float) * np.log(a / x))


def _power_gap(a: float, x, p: float):
    """``x**p - a**p`` without cancellation when ``p`` is small."""
    x = np.asarray(x, dtype=float)
    if a == 0.0:
        return x**p
    return -(x**p) * np.expm1(p * np.log(a / np.where(x > 0, x, a)))


def _rule(alpha: float, n: int) -> QuadratureRule:
    return jacobi_rule(alpha, n, OPERATOR_GRADING)


def _axis(kind: OperatorKind, alpha: float, rho: float, lo: float, xs: np.ndarray,
          n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes ``(len(xs), n)``, per-point scale and rule weights for one axis."""
    rule = _rule(alpha, n)
    xs = np.asarray(xs, dtype=float)
    if kind is OperatorKind.KATUGAMPOLA:
        p = rho + 1.0
        nodes = katugampola_nodes(rule.nodes[None, :], rho, lo, xs[:, None],
                                  rule.complements[None, :])
        scale = (_power_gap(lo, xs, p) / p) ** alpha / gamma(alpha)
    else:
        nodes = hadamard_nodes(rule.nodes[None, :], lo, xs[:, None], rule.complements[None, :])
        scale = np.log(xs / lo) ** alpha / gamma(alpha)
    # the boundary x == lo is exactly annihilated
    scale = np.where(xs == lo, 0.0, scale)
    return nodes, scale, rule.weights


def _check_point(f: Surface, spec: OperatorSpec, x: float, y: float) -> None:
    r = f.rect
    lo_x, lo_y = spec.params.a, spec.params.c
    if not (lo_x <= x <= r.b and lo_y <= y <= r.d):
        raise DomainError(f"point ({x}, {y}) outside [{lo_x}, {r.b}] x [{lo_y}, {r.d}]")
    if lo_x < r.a or lo_y < r.c:
        raise DomainError(
            f"lower limits ({lo_x}, {lo_y}) lie outside the surface domain {r}"
        )


def _point(f: Surface, spec: OperatorSpec, x: float, y: float) -> float:
    _check_point(f, spec, x, y)
    p = spec.params
    sx, cx, w1 = _axis(spec.kind, spec.order.a1, p.rho1, p.a, np.array([x]), spec.rule_n)
    sy, cy, w2 = _axis(spec.kind, spec.order.a2, p.rho2, p.c, np.array([y]), spec.rule_n)
    if cx[0] == 0.0 or cy[0] == 0.0:
        return 0.0
    vals = f(sx[0][:, None], sy[0][None, :])
    return float(cx[0] * cy[0] * (w1 @ vals @ w2))


def katugampola_point(f: Surface, spec: OperatorSpec, x: float, y: float) -> float:
    """Mixed Katugampola integral of ``f`` at ``(x, y)`` with lower limits ``(a, c)``."""
    if spec.kind is not OperatorKind.KATUGAMPOLA:
        raise InvalidSpecError("katugampola_point needs a Katugampola operator spec")
    return _point(f, spec, x, y)


def hadamard_point(f: Surface, spec: OperatorSpec, x: float, y: float) -> float:
    """Mixed Hadamard integral of ``f`` at ``(x, y)``; needs ``a, c > 0``."""
    if spec.kind is not OperatorKind.HADAMARD:
        raise InvalidSpecError("hadamard_point needs a Hadamard operator spec")
    return _point(f, spec, x, y)


def apply_point(f: Surface, spec: OperatorSpec, x: float, y: float) -> float:
    return _point(f, spec, x, y)


def hadamard_point_1d(h: Callable[[np.ndarray], np.ndarray], gamma1: float, a: float,
                      x: float, rule_n: int = DEFAULT_RULE_N) -> float:
    """Univariate Hadamard integral ``1/Gamma(g) int_a^x log(x/u)**(g-1) h(u) du/u``."""
    if not (0.0 < gamma1 <= 1.0):
        raise InvalidSpecError(f"order {gamma1} must lie in (0, 1]")
    if not (0.0 < a <= x):
        raise DomainError(f"need 0 < a <= x, got a={a}, x={x}")
    nodes, scale, w = _axis(OperatorKind.HADAMARD, gamma1, 0.0, a, np.array([x]), rule_n)
    if scale[0] == 0.0:
        return 0.0
    return float(scale[0] * (w @ np.asarray(h(nodes[0]), dtype=float)))


def _worker_count() -> int:
    env = os.environ.get("FRACDIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def integrate_grid(f: Surface, spec: OperatorSpec, grid_n: int,
                   oversample: int = 1) -> SampledSurface:
    """Sample ``I f`` on the uniform grid over ``[a, b] x [c, d]``.

    ``a`` and ``c`` are the operator's lower limits and must coincide with
    the surface rectangle's lower corner. Returns ``(grid_n*oversample + 1)**2``
    samples; the first row and column are exactly zero.
    """
    if grid_n < 2 or oversample < 1:
        raise DomainError(f"need grid_n >= 2 and oversample >= 1, got {grid_n}, {oversample}")
    r = f.rect
    p = spec.params
    if (p.a, p.c) != (r.a, r.c):
        raise DomainError(
            f"operator lower limits ({p.a}, {p.c}) must match the rectangle corner ({r.a}, {r.c})"
        )
    m = grid_n * oversample
    xs = grid_axis(r.a, r.b, m)
    ys = grid_axis(r.c, r.d, m)
    sx, cx, w1 = _axis(spec.kind, spec.order.a1, p.rho1, p.a, xs, spec.rule_n)
    sy, cy, w2 = _axis(spec.kind, spec.order.a2, p.rho2, p.c, ys, spec.rule_n)

    if f.low_rank is not None:
        lr = f.low_rank
        n = spec.rule_n
        bx = lr.basis_x(sx.ravel()).reshape(len(xs), n, -1)
        by = lr.basis_y(sy.ravel()).reshape(len(ys), n, -1)
        ax = cx[:, None] * np.einsum("xnp,n->xp", bx, w1)
        ay = cy[:, None] * np.einsum("ynq,n->yq", by, w2)
        values = ay @ lr.coef.T @ ax.T
    else:
        values = _integrate_grid_direct(f, sx, cx, w1, sy, cy, w2)

    values[0, :] = 0.0
    values[:, 0] = 0.0
    values = np.ascontiguousarray(values)
    values.flags.writeable = False
    kind = spec.kind.value
    return SampledSurface(r, grid_n, oversample, values, f"{kind}[{f.label}]")


def _integrate_grid_direct(f, sx, cx, w1, sy, cy, w2) -> np.ndarray:
    ny, nx = sy.shape[0], sx.shape[0]
    out = np.empty((ny, nx))

    def row(j: int) -> None:
        # vals[i, k, l] = f(sx[i, k], sy[j, l])
        vals = f(sx[:, :, None], sy[j][None, None, :])
        out[j] = cy[j] * cx * np.einsum("ikl,k,l->i", vals, w1, w2)

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        list(pool.map(row, range(ny)))
    return out


def rho_limit_gap(f: Surface, order: FractionalOrder, rho_seq: Sequence[float], a: float,
                  c: float, x: float, y: float, rule_n: int = DEFAULT_RULE_N) -> list[float]:
    """``|Katugampola(rho, rho) - Hadamard|`` at ``(x, y)`` for each ``rho`` in the sequence."""
    if not (a > 0 and c > 0):
        raise DomainError("the Hadamard limit needs a > 0 and c > 0")
    had = OperatorSpec(OperatorKind.HADAMARD, order, KatugampolaParams(0.0, 0.0, a, c), rule_n)
    ref = hadamard_point(f, had, x, y)
    gaps = []
    for rho in rho_seq:
        spec = replace(had, kind=OperatorKind.KATUGAMPOLA,
                       params=KatugampolaParams(rho, rho, a, c))
        gaps.append(abs(katugampola_point(f, spec, x, y) - ref))
    return gaps


def closed_form_constant(spec: OperatorSpec, x: float, y: float, value: float = 1.0) -> float:
    """Exact integral of the constant ``value`` (the Beta integral of the weight)."""
    p = spec.params
    out = value
    for alpha, rho, lo, t in ((spec.order.a1, p.rho1, p.a, x), (spec.order.a2, p.rho2, p.c, y)):
        if spec.kind is OperatorKind.KATUGAMPOLA:
            base = float(_power_gap(lo, t, rho + 1.0)) / (rho + 1.0)
        else:
            base = math.log(t / lo)
        out *= base**alpha / math.gamma(alpha + 1.0)
    return out

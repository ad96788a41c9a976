"""Direct evaluation of the raw singular-kernel integrals.

This is a slow cross-check for :mod:`fracdim.frac_integral`. It integrates
in the original variables ``(s, t)`` and never uses the Beta-weight rules or
the node substitutions of that module.

Each axis ``[lo, x]`` is split at its midpoint. Halves that end at a
singular point are covered by composite Gauss-Legendre panels whose widths
shrink geometrically (ratio ``r``) toward that endpoint; the innermost panel
keeps its plain Gauss rule. With ``L`` panels the error of such a half is an
expansion ``sum_p c_p * r**(-L p)`` whose exponents ``p`` follow from the
kernel's algebraic behaviour at the endpoint. Rules at consecutive depths
are combined so that the leading terms cancel (Richardson), and the depth
is increased until two successive estimates agree to ``tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracdim.errors import DomainError
from fracdim.frac_integral import OperatorKind, OperatorSpec
from fracdim.surfaces import Surface

PANEL_NODES = 12
MAX_EXPONENT = 3.0
MAX_ELIMINATED = 6


@dataclass(frozen=True)
class OracleResult:
    value: float
    error_estimate: float
    subdivisions: int
    converged: bool = True


@lru_cache(maxsize=None)
def _gauss(m: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (t + 1.0), 0.5 * w


def _upper_exponents(order: float) -> list[float]:
    if order >= 1.0:
        return []
    return [order + j for j in range(int(MAX_EXPONENT) + 1) if order + j < MAX_EXPONENT]


def _lower_exponents(rho: float) -> list[float]:
    """Non-integer powers ``(k+1)(rho+1) + j`` left by ``s**rho`` terms at ``s = 0``.

    The innermost panel integrates the ``j = 0`` family exactly, so only
    ``j >= 1`` remains.
    """
    p = rho + 1.0
    out = []
    k = 0
    while (k + 1) * p + 1 < MAX_EXPONENT:
        for j in range(1, int(MAX_EXPONENT) + 1):
            e = (k + 1) * p + j
            if e < MAX_EXPONENT and abs(e - round(e)) > 1e-9:
                out.append(e)
        k += 1
    return out


def _richardson_weights(exponents: list[float], ratio: float) -> np.ndarray:
    k = len(exponents)
    mat = np.ones((k + 1, k + 1))
    steps = np.arange(k + 1)
    for row, p in enumerate(exponents, start=1):
        mat[row] = ratio ** (-steps * p)
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    return np.linalg.solve(mat, rhs)


def _graded_half(width: float, depth: int, lam: np.ndarray, ratio: float,
                 inner_power: float = 1.0):
    """Distances from the graded endpoint and weights of the combined rule.

    Component rules have depths ``depth - K .. depth``; panels shared by
    several components are merged. The innermost panel ``[0, w]`` of each
    component uses Gauss-Legendre in ``(d / w)**inner_power``, which is exact
    for ``d**(inner_power - 1)`` times a polynomial in ``d**inner_power``.
    """
    gx, gw = _gauss(PANEL_NODES)
    k = lam.size - 1
    base = depth - k
    edges = width * ratio ** -np.arange(depth + 1.0)
    dist, wts = [], []
    for level in range(depth):
        coef = lam[max(0, level + 1 - base):].sum()
        lo, hi = edges[level + 1], edges[level]
        dist.append(lo + (hi - lo) * gx)
        wts.append(coef * (hi - lo) * gw)
    inner_x = gx ** (1.0 / inner_power)
    inner_w = gw * inner_x / (inner_power * gx)
    for i in range(k + 1):
        w = edges[base + i]
        dist.append(w * inner_x)
        wts.append(lam[i] * w * inner_w)
    return np.concatenate(dist), np.concatenate(wts)


def _plain_half(width: float):
    gx, gw = _gauss(PANEL_NODES)
    # four uniform panels
    edges = np.linspace(0.0, width, 5)
    dist = np.concatenate([edges[i] + (edges[i + 1] - edges[i]) * gx for i in range(4)])
    return dist, np.tile(gw * (width / 4), 4)


def _dedupe(exps: list[float]) -> list[float]:
    out: list[float] = []
    for e in sorted(exps):
        if not out or abs(e - out[-1]) > 1e-9:
            out.append(e)
    return out[:MAX_ELIMINATED]


def _axis_rule(kind: OperatorKind, order: float, rho: float, lo: float, x: float,
               depth: int, ratio: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``s`` in ``(lo, x)`` and weights that include kernel and normalisation."""
    half = 0.5 * (x - lo)
    mid = lo + half

    up_exps = _dedupe(_upper_exponents(order))
    lam_up = _richardson_weights(up_exps, ratio)
    d_up, w_up = _graded_half(half, depth, lam_up, ratio)
    s_up = x - d_up

    singular_lo = kind is OperatorKind.KATUGAMPOLA and lo == 0.0 and rho != 0.0
    if singular_lo:
        lo_exps = _dedupe(_lower_exponents(rho))
        d_lo, w_lo = _graded_half(half, depth, _richardson_weights(lo_exps, ratio), ratio,
                                  inner_power=rho + 1.0)
    else:
        d_lo, w_lo = _plain_half(half)
    s_lo = lo + d_lo

    if kind is OperatorKind.KATUGAMPOLA:
        p = rho + 1.0
        xp = x**p
        # x**p - s**p, written through the distance to x near the singular end
        gap_up = -xp * np.expm1(p * np.log1p(-d_up / x))
        k_up = gap_up ** (order - 1.0) * s_up**rho
        k_lo = (xp - s_lo**p) ** (order - 1.0) * s_lo**rho
        norm = p ** (1.0 - order) / math.gamma(order)
    else:
        k_up = (-np.log1p(-d_up / x)) ** (order - 1.0) / s_up
        k_lo = np.log(x / s_lo) ** (order - 1.0) / s_lo
        norm = 1.0 / math.gamma(order)

    assert np.all(s_lo <= mid + 1e-15 * max(1.0, x)) and np.all(s_up >= mid - 1e-15 * max(1.0, x))
    nodes = np.concatenate([s_lo, s_up])
    weights = norm * np.concatenate([w_lo * k_lo, w_up * k_up])
    return nodes, weights


def _estimate(f: Surface, spec: OperatorSpec, x: float, y: float, depth: int,
              ratio: float) -> float:
    p = spec.params
    s, ws = _axis_rule(spec.kind, spec.order.a1, p.rho1, p.a, x, depth, ratio)
    t, wt = _axis_rule(spec.kind, spec.order.a2, p.rho2, p.c, y, depth, ratio)
    vals = np.asarray(f(s[:, None], t[None, :]), dtype=float)
    return float(ws @ vals @ wt)


def direct_singular(f: Surface, spec: OperatorSpec, x: float, y: float, tol: float = 1e-10,
                    max_levels: int = 16, ratio: float = 2.0) -> OracleResult:
    """Integrate the operator's defining double integral directly.

    ``subdivisions`` is the grading depth at which the estimate stopped.
    When ``max_levels`` is reached first the result carries
    ``converged=False`` and the caller decides what to do with it.
    """
    if tol < 1e-10:
        raise DomainError(f"tol must be >= 1e-10, got {tol}")
    if ratio <= 1.0:
        raise DomainError(f"refinement ratio must exceed 1, got {ratio}")
    p = spec.params
    if not (p.a <= x and p.c <= y):
        raise DomainError(f"point ({x}, {y}) lies below the lower limits ({p.a}, {p.c})")
    if x == p.a or y == p.c:
        return OracleResult(0.0, 0.0, 0)

    start = MAX_ELIMINATED + 1
    if max_levels < start + 1:
        raise DomainError(f"max_levels must be at least {start + 1}")
    prev = _estimate(f, spec, x, y, start, ratio)
    for depth in range(start + 1, max_levels + 1):
        cur = _estimate(f, spec, x, y, depth, ratio)
        diff = abs(cur - prev)
        if diff < tol:
            return OracleResult(cur, diff, depth)
        prev = cur
    return OracleResult(cur, diff, max_levels, converged=False)

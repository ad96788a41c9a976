"""Scalar special functions and endpoint-singular quadrature rules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracdim.errors import DomainError

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
GAMMA_MAX_ARG = 171.0


def gamma(x: float) -> float:
    """Gamma function for real ``0 < x <= 171``.

    Uses a Lanczos rational approximation; for ``x < 0.5`` the reflection
    formula is applied so that the series is always evaluated on ``x >= 0.5``.
    """
    x = float(x)
    if not (x > 0.0) or x > GAMMA_MAX_ARG or math.isnan(x):
        raise DomainError(f"gamma is defined here for 0 < x <= {GAMMA_MAX_ARG}, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))

    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z + 0.5) cannot overflow before exp(-t) is applied
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


@dataclass(frozen=True)
class QuadratureRule:
    """Rule for ``int_0^1 (1 - u)**(alpha - 1) g(u) du ~ sum(weights * g(nodes))``."""

    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    complements: np.ndarray | None = None
    """``1 - nodes`` computed without rounding; nodes may round to 1.0 for small alpha."""

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Contract the last axis of ``values`` (sampled at the nodes) with the weights."""
        return np.asarray(values) @ self.weights


@lru_cache(maxsize=None)
def _legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (t + 1.0), 0.5 * w


@lru_cache(maxsize=256)
def jacobi_rule(alpha: float, n: int, grading: int = 1) -> QuadratureRule:
    """Build an ``n``-point rule for the weight ``(1 - u)**(alpha - 1)`` on ``[0, 1]``.

    The substitution ``z = (1 - u)**alpha`` turns the weighted integral into
    ``(1/alpha) * int_0^1 g(1 - z**(1/alpha)) dz``, which is then integrated by
    Gauss-Legendre in ``z``.

    With ``grading > 1`` the Legendre variable is additionally pushed through
    the sigmoid ``z = t**q / (t**q + (1 - t)**q)``, which flattens both ends of
    the ``z`` interval. This recovers spectral accuracy when ``1/alpha`` is not
    an integer or when ``g`` has an algebraic kink at ``u = 0``, at the price
    of losing exactness for polynomial ``g``.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"weight exponent alpha must lie in (0, 1], got {alpha}")
    if int(n) != n or n < 2:
        raise DomainError(f"need at least 2 nodes, got {n}")
    if int(grading) != grading or grading < 1:
        raise DomainError(f"grading must be a positive integer, got {grading}")

    t, w = _legendre01(int(n))
    if grading == 1:
        z = t
    else:
        q = int(grading)
        tq, sq = t**q, (1.0 - t) ** q
        den = tq + sq
        z = tq / den
        w = w * q * t ** (q - 1) * (1.0 - t) ** (q - 1) / den**2

    # ascending z gives descending u
    comp = (z ** (1.0 / alpha))[::-1].copy()
    nodes = 1.0 - comp
    weights = (w / alpha)[::-1].copy()
    for arr in (nodes, weights, comp):
        arr.flags.writeable = False
    return QuadratureRule(nodes=nodes, weights=weights, alpha=alpha, complements=comp)

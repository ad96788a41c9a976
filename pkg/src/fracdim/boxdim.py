"""Range-based box counting and log-log estimation of the box dimension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fracdim.errors import AlignmentError, DomainError
from fracdim.surfaces import SampledSurface, block_ranges

RELIABLE_R2 = 0.9
# R/delta values within this relative slack of an integer are not rounded up
_CEIL_SLACK = 1e-9


@dataclass(frozen=True)
class BoxCountCurve:
    levels: tuple[int, ...]
    counts: tuple[int, ...]
    deltas: tuple[float, ...]
    label: str = ""
    oversample: int = 1

    def __post_init__(self) -> None:
        if not (len(self.levels) == len(self.counts) == len(self.deltas)):
            raise DomainError("levels, counts and deltas must have equal length")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise DomainError("levels must be strictly increasing")


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[int, int]
    label: str = field(default="", compare=False)

    @property
    def reliable(self) -> bool:
        """False when the fit is degenerate or ``r_squared`` is below 0.9."""
        return not math.isnan(self.r_squared) and self.r_squared >= RELIABLE_R2


def box_size(s: SampledSurface, k: int) -> float:
    return s.rect.width * 2.0**-k


def cell_ranges(s: SampledSurface, k: int) -> np.ndarray:
    """Sampled ranges over the ``2**k x 2**k`` dyadic cells, indexed ``[row, column]``."""
    if k < 0 or s.n % (1 << k):
        raise AlignmentError(f"level {k} does not align with n={s.n} cells per side")
    return block_ranges(s.values, s.intervals >> k)


def _count_cells(ratios: np.ndarray) -> np.ndarray:
    up = np.ceil(ratios * (1.0 - _CEIL_SLACK))
    return np.maximum(up, 1.0)


def box_count(s: SampledSurface, k: int) -> int:
    """``sum max(ceil(R_ij / delta), 1)`` over the dyadic cells of level ``k``."""
    ratios = cell_ranges(s, k) / box_size(s, k)
    return int(_count_cells(ratios).sum())


def lemma31_bounds(s: SampledSurface, k: int) -> tuple[int, float]:
    """Lower count (equal to :func:`box_count`) and the upper bound ``2mn + sum R / delta``."""
    ratios = cell_ranges(s, k) / box_size(s, k)
    m = 1 << k
    lower = int(_count_cells(ratios).sum())
    upper = 2.0 * m * m + float(ratios.sum())
    return lower, upper


def box_count_curve(s: SampledSurface, k_min: int, k_max: int) -> BoxCountCurve:
    if k_min < 1 or k_max < k_min + 2:
        raise DomainError(f"need k_min >= 1 and k_max >= k_min + 2, got {k_min}:{k_max}")
    if s.n % (1 << k_max):
        raise AlignmentError(f"n={s.n} is not a multiple of 2**{k_max}")
    levels = tuple(range(k_min, k_max + 1))
    return BoxCountCurve(
        levels=levels,
        counts=tuple(box_count(s, k) for k in levels),
        deltas=tuple(box_size(s, k) for k in levels),
        label=s.label,
        oversample=s.oversample,
    )


def estimate_dimension(curve: BoxCountCurve) -> DimensionEstimate:
    """Least-squares slope of ``log2 N`` against ``k``.

    ``r_squared`` is NaN when all counts are equal.
    """
    if len(curve.levels) < 3:
        raise DomainError("need at least 3 points to estimate a dimension")
    k = np.asarray(curve.levels, dtype=float)
    logn = np.log2(np.asarray(curve.counts, dtype=float))
    kc = k - k.mean()
    slope = float(kc @ (logn - logn.mean()) / (kc @ kc))
    intercept = float(logn.mean() - slope * k.mean())
    resid = logn - (intercept + slope * k)
    ss_tot = float(((logn - logn.mean()) ** 2).sum())
    if ss_tot == 0.0:
        r2 = math.nan
    else:
        r2 = min(1.0, max(0.0, 1.0 - float(resid @ resid) / ss_tot))
    return DimensionEstimate(slope, intercept, r2, (curve.levels[0], curve.levels[-1]), curve.label)


CURVE_COLUMNS = ("k", "delta", "N", "logN")


def curve_csv(curve: BoxCountCurve) -> str:
    """CSV text with columns ``k,delta,N,logN`` (``logN`` is base 2)."""
    lines = [",".join(CURVE_COLUMNS)]
    for k, d, n in zip(curve.levels, curve.deltas, curve.counts):
        lines.append(f"{k},{d:.17g},{n},{math.log2(n):.17g}")
    return "\n".join(lines) + "\n"


def write_curve_csv(path: str | Path, curve: BoxCountCurve) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(curve_csv(curve))

"""Catalog of bivariate test surfaces, uniform sampling and cell ranges."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from fracdim.errors import DomainError, InvalidSpecError

Basis = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Rect:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.a < self.b and 0.0 <= self.c < self.d):
            raise DomainError(f"need 0 <= a < b and 0 <= c < d, got {self}")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    def contains(self, x: float, y: float) -> bool:
        return self.a <= x <= self.b and self.c <= y <= self.d


UNIT_SQUARE = Rect(0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class LowRankForm:
    """``f(x, y) = basis_x(x) @ coef @ basis_y(y).T``.

    ``basis_x`` maps a 1-D array of length ``N`` to an ``(N, p)`` matrix and
    ``basis_y`` to ``(N, q)``; ``coef`` is ``(p, q)``. Every catalog surface
    is a short sum of products of univariate functions, and this form lets
    the fractional integrals be computed one axis at a time.
    """

    basis_x: Basis
    coef: np.ndarray
    basis_y: Basis

    def evaluate_grid(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Values on the tensor grid, shape ``(len(ys), len(xs))``."""
        bx = self.basis_x(np.asarray(xs, dtype=float))
        by = self.basis_y(np.asarray(ys, dtype=float))
        return by @ self.coef.T @ bx.T


@dataclass(frozen=True)
class Surface:
    """A continuous function on a rectangle.

    ``func`` must accept broadcastable numpy arrays. ``low_rank``, when
    present, describes the same function and is used for fast grid work.
    """

    rect: Rect
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str
    low_rank: LowRankForm | None = field(default=None, compare=False)

    def __call__(self, x, y):
        return self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


class SurfaceKind(enum.Enum):
    CONSTANT = "constant"
    BILINEAR = "bilinear"
    SINE_PRODUCT = "sine"
    WEIERSTRASS = "weierstrass"
    TAKAGI = "takagi"
    OSCILLATORY = "oscillatory"
    GRID = "grid"


@dataclass(frozen=True)
class SurfaceSpec:
    kind: SurfaceKind
    params: tuple[float, ...] = ()
    data: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        p = self.params
        nparams = {
            SurfaceKind.CONSTANT: 1,
            SurfaceKind.BILINEAR: 3,
            SurfaceKind.SINE_PRODUCT: 2,
            SurfaceKind.WEIERSTRASS: 3,
            SurfaceKind.TAKAGI: 2,
            SurfaceKind.OSCILLATORY: 0,
            SurfaceKind.GRID: 0,
        }[self.kind]
        if len(p) != nparams:
            raise InvalidSpecError(
                f"{self.kind.value} takes {nparams} parameter(s), got {len(p)}"
            )
        if not all(math.isfinite(v) for v in p):
            raise InvalidSpecError(f"non-finite parameter in {p}")
        if self.kind is SurfaceKind.WEIERSTRASS:
            lam, hurst, k = p
            if not (lam > 1.0 and 0.0 < hurst < 1.0 and k >= 1 and k == int(k)):
                raise InvalidSpecError(
                    f"weierstrass needs lambda > 1, 0 < H < 1, integer K >= 1; got {p}"
                )
        if self.kind is SurfaceKind.TAKAGI:
            w, k = p
            if not (0.5 <= w < 1.0 and k >= 1 and k == int(k)):
                raise InvalidSpecError(f"takagi needs 0.5 <= w < 1, integer K >= 1; got {p}")
        if self.kind is SurfaceKind.GRID:
            if self.data is None:
                raise InvalidSpecError("grid surface needs data")
            arr = np.asarray(self.data, dtype=float)
            if arr.ndim != 2 or min(arr.shape) < 2 or not np.all(np.isfinite(arr)):
                raise InvalidSpecError("grid data must be a finite 2-D array, at least 2x2")

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind.value
        return f"{self.kind.value}:" + ",".join(f"{v:g}" for v in self.params)


def parse_surface_spec(text: str) -> SurfaceSpec:
    """Parse ``kind[:p1,p2,...]``, e.g. ``sine:2,2`` or ``grid:data.csv``."""
    kind_name, _, rest = text.strip().partition(":")
    try:
        kind = SurfaceKind(kind_name.lower())
    except ValueError:
        names = ", ".join(k.value for k in SurfaceKind)
        raise InvalidSpecError(f"unknown surface {kind_name!r}; choose from {names}") from None
    if kind is SurfaceKind.GRID:
        if not rest:
            raise InvalidSpecError("grid surface needs a CSV path: grid:<path>")
        return SurfaceSpec(kind, data=read_grid_csv(rest))
    try:
        params = tuple(float(v) for v in rest.split(",")) if rest else ()
    except ValueError:
        raise InvalidSpecError(f"bad surface parameters {rest!r}") from None
    return SurfaceSpec(kind, params)


def _ones(t: np.ndarray) -> np.ndarray:
    return np.ones((t.size, 1))


def _osc(u):
    u = np.asarray(u, dtype=float)
    pos = u > 0
    safe = np.where(pos, u, 1.0)
    return np.where(pos, safe * np.sin(1.0 / safe), 0.0)


def _tri(t):
    return np.abs(t - np.round(t))


def _hat_basis(knots: np.ndarray) -> Basis:
    eye = np.eye(knots.size)

    def basis(t: np.ndarray) -> np.ndarray:
        t = np.clip(t, knots[0], knots[-1])
        return np.stack([np.interp(t, knots, eye[i]) for i in range(knots.size)], axis=-1)

    return basis


def make_surface(spec: SurfaceSpec, rect: Rect = UNIT_SQUARE) -> Surface:
    """Build an evaluatable surface. Shifted variants are non-negative on ``[0, 1]^2``."""
    kind, p = spec.kind, spec.params

    if kind is SurfaceKind.CONSTANT:
        (c0,) = p
        return Surface(
            rect,
            lambda x, y: np.full(np.broadcast(x, y).shape, c0),
            spec.label,
            LowRankForm(_ones, np.array([[c0]]), _ones),
        )

    if kind is SurfaceKind.BILINEAR:
        px, qy, r0 = p
        lin = lambda t: np.stack([np.ones_like(t), t], axis=-1)  # noqa: E731
        return Surface(
            rect,
            lambda x, y: px * x + qy * y + r0,
            spec.label,
            LowRankForm(lin, np.array([[r0, qy], [px, 0.0]]), lin),
        )

    if kind is SurfaceKind.SINE_PRODUCT:
        k1, k2 = p
        return Surface(
            rect,
            lambda x, y: 1.0 + np.sin(k1 * np.pi * x) * np.sin(k2 * np.pi * y),
            spec.label,
            LowRankForm(
                lambda t: np.stack([np.ones_like(t), np.sin(k1 * np.pi * t)], axis=-1),
                np.eye(2),
                lambda t: np.stack([np.ones_like(t), np.sin(k2 * np.pi * t)], axis=-1),
            ),
        )

    if kind is SurfaceKind.WEIERSTRASS:
        lam, hurst, kmax = p
        freqs = np.pi * lam ** np.arange(int(kmax) + 1)
        amps = lam ** (-hurst * np.arange(int(kmax) + 1))
        shift = float(amps.sum())

        def weier(x, y):
            x, y = np.broadcast_arrays(x, y)
            out = np.full(x.shape, shift)
            for fk, ak in zip(freqs, amps):
                out += ak * np.sin(fk * x) * np.sin(fk * y)
            return out

        basis = lambda t: np.concatenate(  # noqa: E731
            [np.ones((t.size, 1)), np.sin(np.multiply.outer(t, freqs))], axis=-1
        )
        return Surface(rect, weier, spec.label, LowRankForm(basis, np.diag([shift, *amps]), basis))

    if kind is SurfaceKind.TAKAGI:
        w, kmax = p
        scales = 2.0 ** np.arange(int(kmax) + 1)
        amps = w ** np.arange(int(kmax) + 1)

        def takagi(x, y):
            x, y = np.broadcast_arrays(x, y)
            out = np.zeros(x.shape)
            for sk, ak in zip(scales, amps):
                out += ak * _tri(sk * x) * _tri(sk * y)
            return out

        basis = lambda t: _tri(np.multiply.outer(t, scales))  # noqa: E731
        return Surface(rect, takagi, spec.label, LowRankForm(basis, np.diag(amps), basis))

    if kind is SurfaceKind.OSCILLATORY:
        pair = lambda t: np.stack([np.ones_like(t), _osc(t)], axis=-1)  # noqa: E731
        return Surface(
            rect,
            lambda x, y: 1.0 + _osc(x) * _osc(y),
            spec.label,
            LowRankForm(pair, np.eye(2), pair),
        )

    if kind is SurfaceKind.GRID:
        data = np.asarray(spec.data, dtype=float)  # data[j, i] = value at (x_i, y_j)
        xk = np.linspace(rect.a, rect.b, data.shape[1])
        yk = np.linspace(rect.c, rect.d, data.shape[0])
        bx, by = _hat_basis(xk), _hat_basis(yk)
        form = LowRankForm(bx, data.T.copy(), by)

        def interp(x, y):
            x, y = np.broadcast_arrays(x, y)
            flat = np.einsum("np,pq,nq->n", bx(x.ravel()), form.coef, by(y.ravel()))
            return flat.reshape(x.shape)

        return Surface(rect, interp, f"grid:{data.shape[1]}x{data.shape[0]}", form)

    raise InvalidSpecError(f"unhandled surface kind {kind}")  # pragma: no cover


def read_grid_csv(path: str | Path) -> np.ndarray:
    """Read gridded surface data.

    Layout: a header line ``x_count,y_count`` (the literal names may precede
    the numeric counts on their own line), then ``y_count`` lines of
    ``x_count`` comma-separated values. Row ``j`` holds the samples at the
    ``j``-th y knot.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise InvalidSpecError(f"{path}: empty grid file")
    head = rows.pop(0)
    if [h.strip() for h in head] == ["x_count", "y_count"]:
        if not rows:
            raise InvalidSpecError(f"{path}: missing counts line")
        head = rows.pop(0)
    try:
        nx, ny = (int(h) for h in head)
        data = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise InvalidSpecError(f"{path}: {exc}") from None
    if data.shape != (ny, nx):
        raise InvalidSpecError(f"{path}: header says {nx}x{ny}, found {data.shape[::-1]}")
    return data


def write_grid_csv(path: str | Path, data: np.ndarray) -> None:
    data = np.asarray(data, dtype=float)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(f"{data.shape[1]},{data.shape[0]}\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@dataclass(frozen=True)
class SampledSurface:
    """Uniform samples ``values[j, i] = f(x_i, y_j)`` with ``n * oversample`` intervals per side."""

    rect: Rect
    n: int
    oversample: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        side = self.n * self.oversample + 1
        if self.values.shape != (side, side):
            raise DomainError(f"expected {side}x{side} samples, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("sampled surface contains non-finite values")

    @property
    def intervals(self) -> int:
        return self.n * self.oversample

    def xs(self) -> np.ndarray:
        return grid_axis(self.rect.a, self.rect.b, self.intervals)

    def ys(self) -> np.ndarray:
        return grid_axis(self.rect.c, self.rect.d, self.intervals)


def grid_axis(lo: float, hi: float, intervals: int) -> np.ndarray:
    return lo + np.arange(intervals + 1) * ((hi - lo) / intervals)


def sample_surface(f: Surface, n: int, oversample: int = 4) -> SampledSurface:
    if n < 1 or oversample < 1:
        raise DomainError(f"need n >= 1 and oversample >= 1, got n={n}, oversample={oversample}")
    m = n * oversample
    xs = grid_axis(f.rect.a, f.rect.b, m)
    ys = grid_axis(f.rect.c, f.rect.d, m)
    if f.low_rank is not None:
        values = f.low_rank.evaluate_grid(xs, ys)
    else:
        values = np.asarray(f(xs[None, :], ys[:, None]), dtype=float)
    values = np.ascontiguousarray(values)
    values.flags.writeable = False
    return SampledSurface(f.rect, n, oversample, values, f.label)


def block_ranges(values: np.ndarray, step: int) -> np.ndarray:
    """Max minus min over closed blocks of ``step`` sample intervals.

    Adjacent blocks share their boundary row/column of samples, so each
    block sees ``(step + 1)**2`` samples.
    """
    m = values.shape[0] - 1
    if m % step:
        raise DomainError(f"block of {step} intervals does not tile {m}")
    nb = m // step

    def reduce(op):
        # rows: blocks [i*step, i*step + step] inclusive
        r = op(values[:-1].reshape(nb, step, m + 1), axis=1)
        r = op(np.stack([r, values[step::step]]), axis=0)
        c = op(r[:, :-1].reshape(nb, nb, step), axis=2)
        return op(np.stack([c, r[:, step::step]]), axis=0)

    return reduce(np.max) - reduce(np.min)


def range_over_cell(s: SampledSurface, i: int, j: int) -> float:
    """Sampled maximum range of the surface over cell column ``i``, row ``j``."""
    if not (0 <= i < s.n and 0 <= j < s.n):
        raise IndexError(f"cell ({i}, {j}) outside the {s.n}x{s.n} grid")
    r = s.oversample
    block = s.values[j * r : (j + 1) * r + 1, i * r : (i + 1) * r + 1]
    return float(block.max() - block.min())

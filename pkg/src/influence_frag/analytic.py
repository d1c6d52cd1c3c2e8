"""Deterministic recurrences and closed-form predictors for the active count.

``recurrence_a`` / ``recurrence_stubborn`` iterate the mean-field
recurrences step by step; ``closed_b``, ``closed_c`` and ``closed_bk`` are
their continuous approximations.  Without stubborn vertices the edge count
is ``N = C(n,2)``; with ``k`` stubborn vertices it is
``N_eff = C(n,2) + k*n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .process_sim import total_edges


class CurveKind(str, Enum):
    RECURRENCE_A = "RecurrenceA"
    RECURRENCE_STUBBORN = "RecurrenceStubborn"
    CLOSED_B = "ClosedB"
    CLOSED_C = "ClosedC"
    CLOSED_BK = "ClosedBk"


@dataclass
class AnalyticCurve:
    n: int
    k: int
    grid: np.ndarray
    values: np.ndarray
    kind: CurveKind

    def __post_init__(self):
        self.kind = CurveKind(self.kind)
        self.grid = np.asarray(self.grid, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have the same length")

    def at(self, t: int) -> float:
        i = int(np.searchsorted(self.grid, t))
        if i >= len(self.grid) or self.grid[i] != t:
            raise KeyError(f"t={t} is not on the grid")
        return float(self.values[i])


def _check_grid(grid, upper: int) -> np.ndarray:
    g = np.asarray(grid, dtype=np.int64)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("grid must be a nonempty 1-d sequence of steps")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    if g[0] < 0 or g[-1] > upper:
        raise ValueError(f"grid must lie in [0, {upper}]")
    return g


def _iterate(n: int, k: int, N: int, t_max: int, floor: float, grid) -> tuple[np.ndarray, np.ndarray]:
    if t_max >= N:
        raise ValueError(f"t_max must be < N={N}, got {t_max}")
    g = np.arange(t_max + 1) if grid is None else _check_grid(grid, t_max)
    out = np.empty(g.size)
    want = iter(g.tolist())
    nxt = next(want)
    i = 0
    a = float(n)
    for t in range(t_max + 1):
        if t == nxt:
            out[i] = a
            i += 1
            nxt = next(want, -1)
            if nxt < 0:
                break
        rem = N - t
        a = a - k * a / rem - a * (a - 1.0) / (2.0 * rem)
        if a < floor:
            a = floor
    return g, out


def recurrence_a(n: int, t_max: int, N: int | None = None, grid=None) -> AnalyticCurve:
    """Iterate ``a_{t+1} = a_t - a_t(a_t-1) / (2(N-t))`` from ``a_0 = n``.

    Values are clamped at 1 from below.  With ``grid=None`` every step
    ``0..t_max`` is returned.
    """
    N = total_edges(n) if N is None else N
    g, v = _iterate(n, 0, N, t_max, 1.0, grid)
    return AnalyticCurve(n, 0, g, v, CurveKind.RECURRENCE_A)


def recurrence_stubborn(n: int, k: int, t_max: int, grid=None) -> AnalyticCurve:
    """Mean-field recurrence for independent actives with ``k`` stubborn vertices.

    ``a_{t+1} = a_t - k a_t/(N-t) - a_t(a_t-1)/(2(N-t))`` with
    ``N = N_eff``, clamped at 0 (at 1 when ``k = 0``, matching
    :func:`recurrence_a` exactly).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    g, v = _iterate(n, k, total_edges(n, k), t_max, 1.0 if k == 0 else 0.0, grid)
    return AnalyticCurve(n, k, g, v, CurveKind.RECURRENCE_STUBBORN)


def closed_b(n: int, t, N: int | None = None):
    """``1 / (1 - (1-1/n) sqrt(1-t/N))``; exactly ``n`` at t=0 and 1 at t=N."""
    N = total_edges(n) if N is None else N
    root = np.sqrt(1.0 - np.asarray(t, dtype=float) / N)
    # n / (n - (n-1) root) keeps both endpoints exact in floating point.
    val = n / (n - (n - 1) * root)
    return float(val) if np.ndim(val) == 0 else val


def closed_c(n: int, t):
    """Sparse-regime approximation ``n^2 / (n + t)``."""
    val = n * n / (n + np.asarray(t, dtype=float))
    return float(val) if np.ndim(val) == 0 else val


def closed_bk(n: int, k: int, t, N: int | None = None):
    """Independent-active prediction with ``k >= 1`` stubborn vertices.

    With ``beta = 2k - 1`` and ``x = (1 - t/N)^(beta/2)``::

        b_k(t) = beta * (n/(n+beta)) x / (1 - (n/(n+beta)) x)
               = beta n x / (n + beta - n x)

    ``N`` defaults to ``N_eff = C(n,2) + k n``.
    """
    if k < 1:
        raise ValueError("closed_bk requires k >= 1")
    N = total_edges(n, k) if N is None else N
    beta = 2 * k - 1
    x = (1.0 - np.asarray(t, dtype=float) / N) ** (beta / 2.0)
    val = beta * n * x / (n + beta - n * x)
    return float(val) if np.ndim(val) == 0 else val


def curve_grid(kind: CurveKind | str, n: int, k: int, grid: Sequence[int]) -> AnalyticCurve:
    """Evaluate one curve kind on an explicit step grid."""
    kind = CurveKind(kind)
    if kind is CurveKind.RECURRENCE_A:
        g = _check_grid(grid, total_edges(n) - 1)
        return recurrence_a(n, int(g[-1]), grid=g)
    if kind is CurveKind.RECURRENCE_STUBBORN:
        g = _check_grid(grid, total_edges(n, k) - 1)
        return recurrence_stubborn(n, k, int(g[-1]), grid=g)
    if kind is CurveKind.CLOSED_B:
        g = _check_grid(grid, total_edges(n))
        return AnalyticCurve(n, k, g, np.atleast_1d(closed_b(n, g)), kind)
    if kind is CurveKind.CLOSED_C:
        g = _check_grid(grid, np.iinfo(np.int64).max)
        return AnalyticCurve(n, k, g, np.atleast_1d(closed_c(n, g)), kind)
    g = _check_grid(grid, total_edges(n, k))
    return AnalyticCurve(n, k, g, np.atleast_1d(closed_bk(n, k, g)), kind)


def p_to_m(p: float, N: int) -> int:
    """Edge budget for density ``p``: ``round(p*N)``, halves rounded up."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return min(N, int(math.floor(p * N + 0.5)))


def p_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, computed by index to avoid float drift."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]

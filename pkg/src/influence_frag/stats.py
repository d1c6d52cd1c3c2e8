"""Aggregation and goodness-of-fit helpers for the acceptance suite and CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .analytic import AnalyticCurve
from .process_sim import Trajectory

MIN_EXPECTED = 5.0
Z_UPPER = 3.0


@dataclass(frozen=True)
class SummaryRow:
    t: int
    mean: float
    var: float
    min: float
    max: float
    reps: int
    se: float


@dataclass
class SummaryTable:
    rows: list[SummaryRow]

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def summarize_values(t_values: Sequence[int], columns: Sequence[Sequence[float]]) -> SummaryTable:
    """Per-checkpoint moments; ``columns[r][i]`` is replication r at checkpoint i.

    Welford updates in replication order, so the result is bit-reproducible.
    """
    if not columns:
        raise ValueError("need at least one replication")
    width = len(t_values)
    if any(len(c) != width for c in columns):
        raise ValueError("every replication needs one value per checkpoint")
    rows = []
    for i, t in enumerate(t_values):
        mean = 0.0
        m2 = 0.0
        lo = hi = float(columns[0][i])
        for r, col in enumerate(columns, start=1):
            x = float(col[i])
            d = x - mean
            mean += d / r
            m2 += d * (x - mean)
            lo = min(lo, x)
            hi = max(hi, x)
        reps = len(columns)
        var = m2 / (reps - 1) if reps > 1 else 0.0
        var = max(var, 0.0)
        rows.append(SummaryRow(int(t), mean, var, lo, hi, reps, math.sqrt(var / reps)))
    return SummaryTable(rows)


def summarize(trajectories: Sequence[Trajectory], field_name: str = "a_values") -> SummaryTable:
    """Aggregate aligned trajectories (``a_values`` by default) in the given order."""
    if not trajectories:
        raise ValueError("need at least one trajectory")
    grid = trajectories[0].checkpoints
    if any(tr.checkpoints != grid for tr in trajectories):
        raise ValueError("trajectories have mismatched checkpoint grids")
    return summarize_values(grid, [getattr(tr, field_name) for tr in trajectories])


# Regularized incomplete gamma --------------------------------------------

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 10_000


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized P(a, x) by its power series (good for x < a+1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cont_frac(a: float, x: float) -> float:
    """Upper regularized Q(a, x) by Lentz's continued fraction (x >= a+1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_lower(a: float, x: float) -> float:
    if a <= 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cont_frac(a, x)


def gammainc_upper(a: float, x: float) -> float:
    if a <= 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cont_frac(a, x)


def chi2_sf(statistic: float, df: int) -> float:
    """Chi-square survival function ``Q(df/2, statistic/2)``."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if statistic <= 0:
        return 1.0
    return min(1.0, max(0.0, gammainc_upper(df / 2.0, statistic / 2.0)))


# Chi-square tests ---------------------------------------------------------

@dataclass
class GofReport:
    statistic: float
    df: int
    p_value: float
    observed: list[float] = field(default_factory=list)
    expected: list[float] = field(default_factory=list)
    labels: list = field(default_factory=list)


def _merge_cells(groups: list[list[int]], weight: list[float], min_count: float) -> list[list[int]]:
    """Greedy adjacent merging until every cell reaches ``min_count``."""
    cells = [list(g) for g in groups]
    w = list(weight)
    while len(cells) > 1:
        i = min(range(len(cells)), key=lambda j: (w[j], j))
        if w[i] >= min_count:
            break
        if i == 0:
            j = 1
        elif i == len(cells) - 1:
            j = i - 1
        else:
            j = i - 1 if w[i - 1] <= w[i + 1] else i + 1
        lo, hi = min(i, j), max(i, j)
        cells[lo] = cells[lo] + cells[hi]
        w[lo] += w[hi]
        del cells[hi], w[hi]
    return cells


def chi_square_gof(observed: Sequence[float], expected: Sequence[float],
                   min_expected: float = MIN_EXPECTED, labels: Sequence | None = None) -> GofReport:
    """Pearson goodness of fit of counts against category probabilities."""
    if len(observed) != len(expected):
        raise ValueError("observed and expected must have the same length")
    total = float(sum(observed))
    if total <= 0:
        raise ValueError("need a positive total count")
    if abs(sum(expected) - 1.0) > 1e-9:
        raise ValueError("expected probabilities must sum to 1")
    exp_counts = [total * p for p in expected]
    cells = _merge_cells([[i] for i in range(len(observed))], exp_counts, min_expected)
    if len(cells) < 2:
        raise ValueError("fewer than 2 categories remain after merging")
    obs = [float(sum(observed[i] for i in c)) for c in cells]
    exp = [sum(exp_counts[i] for i in c) for c in cells]
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, exp) if e > 0)
    df = len(cells) - 1
    lab = [tuple(labels[i] for i in c) for c in cells] if labels is not None else cells
    return GofReport(stat, df, chi2_sf(stat, df), obs, exp, lab)


def chi_square_homogeneity(counts_a: Sequence[float], counts_b: Sequence[float],
                           min_expected: float = MIN_EXPECTED) -> GofReport:
    """Two-sample chi-square test that two count vectors share one distribution."""
    if len(counts_a) != len(counts_b):
        raise ValueError("count vectors must have the same length")
    na, nb = float(sum(counts_a)), float(sum(counts_b))
    if na <= 0 or nb <= 0:
        raise ValueError("both samples must be nonempty")
    pooled = [a + b for a, b in zip(counts_a, counts_b)]
    # A cell's smallest expected count is min(na, nb) * pooled / (na + nb).
    scale = min(na, nb) / (na + nb)
    cells = _merge_cells([[i] for i in range(len(pooled))], [p * scale for p in pooled],
                         min_expected)
    if len(cells) < 2:
        raise ValueError("fewer than 2 categories remain after merging")
    stat = 0.0
    obs, exp = [], []
    for c in cells:
        pa = sum(counts_a[i] for i in c)
        pb = sum(counts_b[i] for i in c)
        pool = pa + pb
        ea, eb = pool * na / (na + nb), pool * nb / (na + nb)
        stat += (pa - ea) ** 2 / ea + (pb - eb) ** 2 / eb
        obs.append((pa, pb))
        exp.append((ea, eb))
    df = len(cells) - 1
    return GofReport(stat, df, chi2_sf(stat, df), obs, exp, cells)


def counts_by_category(samples, categories: Sequence) -> list[int]:
    """Tally hashable samples over a fixed category list; unknown samples raise."""
    index = {c: i for i, c in enumerate(categories)}
    counts = [0] * len(categories)
    for s in samples:
        counts[index[s]] += 1
    return counts


# Curve comparisons and tails ---------------------------------------------

@dataclass(frozen=True)
class DeviationRow:
    t: int
    mean: float
    curve: float
    rel_dev: float
    se: float
    upper_ok: bool


def deviation_report(summary: SummaryTable, curve: AnalyticCurve | Mapping[int, float],
                     tol: float = 0.05, z: float = Z_UPPER) -> list[DeviationRow]:
    """Relative deviation of simulated means from a curve, plus the upper-bound flag.

    The flag passes when ``mean <= curve * (1 + tol) + z * SE``.
    """
    if isinstance(curve, AnalyticCurve):
        lookup = dict(zip(curve.grid.tolist(), curve.values.tolist()))
    else:
        lookup = dict(curve)
    out = []
    for row in summary.rows:
        if row.t not in lookup:
            raise ValueError(f"curve has no value at t={row.t}")
        c = float(lookup[row.t])
        if c != 0:
            rel = (row.mean - c) / c
        else:
            rel = 0.0 if row.mean == c else math.copysign(math.inf, row.mean - c)
        ok = row.mean <= c * (1.0 + tol) + z * row.se
        out.append(DeviationRow(row.t, row.mean, c, rel, row.se, ok))
    return out


def empirical_tail(samples: Sequence[float], x: float) -> float:
    """Fraction of samples ``>= x``."""
    if len(samples) == 0:
        raise ValueError("empty sample")
    return int(np.count_nonzero(np.asarray(samples, dtype=float) >= x)) / len(samples)


def empirical_cdf(samples: Sequence[float], x: float) -> float:
    """Fraction of samples ``<= x``."""
    if len(samples) == 0:
        raise ValueError("empty sample")
    return int(np.count_nonzero(np.asarray(samples, dtype=float) <= x)) / len(samples)

"""Fragment-size laws at a fixed number of fragments.

With ``k`` fragments over ``n`` vertices the ordered size vector is uniform
over the ``C(n-1, k-1)`` compositions of ``n`` into ``k`` positive parts.
This module samples that law two ways (backward Polya urn, random cut
points on a path), counts it exactly, and handles the ``n -> inf`` limit
of uniform stick breaking.

Combinatorial results are exact (``int`` / ``Fraction``); samplers take a
caller-supplied :class:`numpy.random.Generator`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import numpy as np

DEFAULT_WORK_BOUND = 2_000_000


@dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"parts must be positive, got {self.parts}")

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class SpacingSample:
    spacings: tuple[float, ...]

    @property
    def largest(self) -> float:
        return self.spacings[-1]


def _check_nk(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


def polya_backward_sample(n: int, k: int, rng: np.random.Generator) -> Composition:
    """k-coloured Polya urn run for ``n - k`` draws from one ball per colour.

    Each draw picks a ball uniformly and adds another of its colour.
    """
    _check_nk(n, k)
    counts = [1] * k
    balls = k
    for _ in range(n - k):
        r = int(rng.integers(balls))
        for colour, c in enumerate(counts):
            if r < c:
                counts[colour] += 1
                break
            r -= c
        balls += 1
    return Composition(tuple(counts))


def uniform_composition_sample(n: int, k: int, rng: np.random.Generator) -> Composition:
    """Cut the path ``1..n`` at ``k-1`` distinct uniform starts from ``{2..n}``."""
    _check_nk(n, k)
    cuts = np.sort(rng.choice(np.arange(2, n + 1), size=k - 1, replace=False))
    bounds = np.concatenate(([1], cuts, [n + 1]))
    return Composition(tuple(int(d) for d in np.diff(bounds)))


def count_compositions(n: int, k: int) -> int:
    _check_nk(n, k)
    return math.comb(n - 1, k - 1)


def enumerate_compositions(n: int, k: int, work_bound: int = DEFAULT_WORK_BOUND
                           ) -> Iterator[Composition]:
    """Every composition of ``n`` into ``k`` parts, in lexicographic order."""
    total = count_compositions(n, k)
    if total > work_bound:
        raise ValueError(f"C({n - 1},{k - 1}) = {total} exceeds work bound {work_bound}")
    # Cut sets from combinations() come out lexicographically, and so do the parts.
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0, *cuts, n)
        yield Composition(tuple(b - a for a, b in zip(bounds, bounds[1:])))


def expected_fragments_of_size(n: int, k: int, l: int) -> Fraction:
    """Mean number of fragments of size exactly ``l``: ``k C(n-l-1, k-2) / C(n-1, k-1)``."""
    if k < 2:
        raise ValueError("expected_fragments_of_size needs k >= 2")
    _check_nk(n, k)
    if not 1 <= l <= n - k + 1:
        raise ValueError(f"l must lie in [1, {n - k + 1}], got {l}")
    return Fraction(k * math.comb(n - l - 1, k - 2), math.comb(n - 1, k - 1))


def prob_fragment_of_size(n: int, k: int, l: int,
                          work_bound: int = DEFAULT_WORK_BOUND) -> Fraction:
    """P(at least one fragment has size ``l``), by enumeration."""
    hits = sum(1 for c in enumerate_compositions(n, k, work_bound) if l in c.parts)
    return Fraction(hits, count_compositions(n, k))


@dataclass(frozen=True)
class TailBound:
    bound: Fraction
    exact: Fraction | None


def largest_fragment_tail_exact(n: int, k: int, l0: int,
                                work_bound: int = DEFAULT_WORK_BOUND) -> TailBound:
    """First-moment bound on ``P(F_(1) >= l0)`` and, when cheap, the exact value.

    The bound sums :func:`expected_fragments_of_size` over ``l >= l0``.
    The exact probability is enumerated when ``C(n-1,k-1) <= work_bound``.
    """
    if k < 2:
        raise ValueError("largest_fragment_tail_exact needs k >= 2")
    _check_nk(n, k)
    top = n - k + 1
    l0 = max(1, l0)
    if l0 > top:
        bound = Fraction(0)
    else:
        denom = math.comb(n - 1, k - 1)
        num = sum(k * math.comb(n - l - 1, k - 2) for l in range(l0, top + 1))
        bound = Fraction(num, denom)
    exact = None
    if count_compositions(n, k) <= work_bound:
        hits = sum(1 for c in enumerate_compositions(n, k, work_bound) if max(c.parts) >= l0)
        exact = Fraction(hits, count_compositions(n, k))
    return TailBound(bound, exact)


def stick_break_samples(k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent uniform stick breakings, each row sorted ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    u = np.sort(rng.random((size, k - 1)), axis=1)
    edges = np.concatenate((np.zeros((size, 1)), u, np.ones((size, 1))), axis=1)
    return np.sort(np.diff(edges, axis=1), axis=1)


def stick_break_sample(k: int, rng: np.random.Generator) -> SpacingSample:
    """Break ``[0, 1]`` at ``k-1`` uniform points; spacings sorted ascending."""
    return SpacingSample(tuple(float(x) for x in stick_break_samples(k, 1, rng)[0]))


def harmonic(k: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, k + 1)), Fraction(0))


def expected_spacing(i: int, k: int) -> float:
    """``E S_(i) = (1/k) sum_{j<i} 1/(k-j)`` for the i-th smallest of k spacings."""
    return float(expected_spacing_exact(i, k))


def expected_spacing_exact(i: int, k: int) -> Fraction:
    if not 1 <= i <= k:
        raise ValueError(f"rank must lie in [1, {k}], got {i}")
    return sum((Fraction(1, k - j) for j in range(i)), Fraction(0)) / k


def largest_spacing_cdf(x: float, k: int) -> float:
    """Limiting ``P(S_(k) <= x) ~ exp(-k e^{-kx})`` (Gumbel).

    A large-k approximation: at ``x = 0`` it gives ``exp(-k) > 0``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if x == math.inf:
        return 1.0
    return math.exp(-k * math.exp(-k * x))


def largest_spacing_sf(x: float, k: int) -> float:
    """``1 - largest_spacing_cdf``: the limiting upper tail of the largest spacing."""
    return 1.0 - largest_spacing_cdf(x, k)


def largest_spacing_cdf_exact(x: float, k: int) -> float:
    """Finite-k ``P(S_(k) <= x) = sum_j (-1)^j C(k,j) (1 - jx)_+^{k-1}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x >= 1:
        return 1.0
    if x <= 0:
        return 0.0
    x = Fraction(x)
    total = Fraction(0)
    for j in range(k + 1):
        base = 1 - j * x
        if base <= 0:
            break
        total += (-1) ** j * math.comb(k, j) * base ** (k - 1)
    return float(total)

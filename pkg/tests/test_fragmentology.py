import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from influence_frag import fragmentology as fr
from influence_frag.stats import chi_square_gof, chi_square_homogeneity, counts_by_category


def brute_compositions(n, k):
    """All positive k-tuples summing to n, built part by part from the definition."""
    if k == 1:
        return [(n,)]
    return sorted((first,) + rest for first in range(1, n - k + 2)
                  for rest in brute_compositions(n - first, k - 1))


def test_brute_force_oracle_against_product_filter():
    for n in range(1, 7):
        for k in range(1, n + 1):
            filtered = sorted(c for c in product(range(1, n + 1), repeat=k) if sum(c) == n)
            assert brute_compositions(n, k) == filtered


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def test_enumerate_small_cases():
    assert [c.parts for c in fr.enumerate_compositions(4, 2)] == [(1, 3), (2, 2), (3, 1)]
    assert [c.parts for c in fr.enumerate_compositions(3, 3)] == [(1, 1, 1)]


@pytest.mark.parametrize("n", range(1, 9))
def test_enumerate_matches_brute_force(n):
    for k in range(1, n + 1):
        assert [c.parts for c in fr.enumerate_compositions(n, k)] == brute_compositions(n, k)


def test_enumeration_counts():
    for n in range(1, 13):
        for k in range(1, n + 1):
            assert sum(1 for _ in fr.enumerate_compositions(n, k)) == fr.count_compositions(n, k)


def test_count_compositions_examples():
    assert fr.count_compositions(5, 3) == 6
    assert fr.count_compositions(9, 1) == 1
    assert fr.count_compositions(9, 9) == 1
    assert fr.count_compositions(500, 250) == math.comb(499, 249)
    with pytest.raises(ValueError):
        fr.count_compositions(3, 4)


def test_enumerate_work_bound():
    with pytest.raises(ValueError, match="work bound"):
        list(fr.enumerate_compositions(30, 15, work_bound=1000))


def test_samplers_trivial_cases(rng):
    assert fr.polya_backward_sample(5, 5, rng).parts == (1,) * 5
    assert fr.polya_backward_sample(5, 1, rng).parts == (5,)
    assert fr.uniform_composition_sample(7, 1, rng).parts == (7,)
    assert fr.uniform_composition_sample(4, 4, rng).parts == (1, 1, 1, 1)
    for bad in [(3, 0), (3, 4)]:
        with pytest.raises(ValueError):
            fr.polya_backward_sample(*bad, rng)
        with pytest.raises(ValueError):
            fr.uniform_composition_sample(*bad, rng)


@settings(max_examples=50)
@given(st.integers(1, 40), st.data(), st.integers(0, 2**32))
def test_samplers_return_compositions(n, data, seed):
    k = data.draw(st.integers(1, n))
    rng = np.random.default_rng(seed)
    for sampler in (fr.polya_backward_sample, fr.uniform_composition_sample):
        c = sampler(n, k, rng)
        assert c.total == n and c.k == k


def test_polya_uniform_n5_k2(rng):
    comps = [c.parts for c in fr.enumerate_compositions(5, 2)]
    counts = counts_by_category((fr.polya_backward_sample(5, 2, rng).parts for _ in range(40_000)),
                                comps)
    assert chi_square_gof(counts, [0.25] * 4).p_value > 0.001


def test_cut_sampler_matches_urn_n5_k3(rng):
    comps = [c.parts for c in fr.enumerate_compositions(5, 3)]
    urn = counts_by_category((fr.polya_backward_sample(5, 3, rng).parts for _ in range(40_000)), comps)
    cuts = counts_by_category((fr.uniform_composition_sample(5, 3, rng).parts for _ in range(40_000)),
                              comps)
    assert chi_square_homogeneity(urn, cuts).p_value > 0.001


def test_expected_fragments_examples():
    assert fr.expected_fragments_of_size(4, 2, 2) == Fraction(2, 3)
    assert fr.expected_fragments_of_size(4, 2, 3) == Fraction(2, 3)
    with pytest.raises(ValueError):
        fr.expected_fragments_of_size(4, 1, 2)
    with pytest.raises(ValueError):
        fr.expected_fragments_of_size(4, 2, 4)


@pytest.mark.parametrize("n", range(2, 13))
def test_expected_fragments_exact_against_enumeration(n):
    for k in range(2, n + 1):
        comps = brute_compositions(n, k)
        total = sum(fr.expected_fragments_of_size(n, k, l) for l in range(1, n - k + 2))
        mass = sum(l * fr.expected_fragments_of_size(n, k, l) for l in range(1, n - k + 2))
        assert total == k and mass == n
        for l in range(1, n - k + 2):
            counted = Fraction(sum(c.count(l) for c in comps), len(comps))
            assert fr.expected_fragments_of_size(n, k, l) == counted


def test_first_moment_overcounts_at_least_one():
    # (2,2) has two fragments of size 2, so the count exceeds the probability.
    assert fr.prob_fragment_of_size(4, 2, 2) == Fraction(1, 3)
    assert fr.expected_fragments_of_size(4, 2, 2) > fr.prob_fragment_of_size(4, 2, 2)


def test_tail_bound_l0_one_is_k():
    for n, k in [(5, 2), (12, 7), (40, 3)]:
        assert fr.largest_fragment_tail_exact(n, k, 1).bound == k


def test_tail_n12_k3_l10():
    tb = fr.largest_fragment_tail_exact(12, 3, 10)
    hits = [c for c in brute_compositions(12, 3) if max(c) >= 10]
    # With three positive parts summing to 12, a part of 10 forces (10,1,1).
    assert hits == [(1, 1, 10), (1, 10, 1), (10, 1, 1)]
    assert tb.exact == Fraction(3, 55)
    assert tb.bound == Fraction(3, 55)


@pytest.mark.parametrize("n", range(2, 13))
def test_tail_bound_dominates_exact(n):
    for k in range(2, n + 1):
        for l0 in range(1, n + 2):
            tb = fr.largest_fragment_tail_exact(n, k, l0)
            assert tb.exact is not None and tb.bound >= tb.exact


def test_tail_bound_hockey_stick_and_large_instance():
    n, k = 10**4, 100
    l0 = math.ceil((n / k) * (math.log(k) + 3))
    tb = fr.largest_fragment_tail_exact(n, k, l0, work_bound=0)
    assert tb.exact is None
    # sum_{l>=l0} C(n-l-1, k-2) = C(n-l0, k-1)
    assert tb.bound == Fraction(k * math.comb(n - l0, k - 1), math.comb(n - 1, k - 1))
    assert float(tb.bound) <= 3 * math.exp(-3)


def test_stick_break_trivial(rng):
    assert fr.stick_break_sample(1, rng).spacings == (1.0,)
    with pytest.raises(ValueError):
        fr.stick_break_sample(0, rng)


@settings(max_examples=50)
@given(st.integers(1, 60), st.integers(0, 2**32))
def test_stick_break_sums_to_one_sorted(k, seed):
    s = fr.stick_break_sample(k, np.random.default_rng(seed)).spacings
    assert abs(sum(s) - 1) <= 1e-12
    assert list(s) == sorted(s) and min(s) >= 0


def test_stick_break_k2_means(rng):
    s = fr.stick_break_samples(2, 100_000, rng)
    assert s[:, 0].mean() == pytest.approx(0.25, rel=0.01)
    assert s[:, 1].mean() == pytest.approx(0.75, rel=0.01)


def test_expected_spacing_examples():
    assert fr.expected_spacing(1, 1) == 1
    assert fr.expected_spacing_exact(3, 3) == Fraction(11, 18)
    assert fr.expected_spacing_exact(2, 2) == Fraction(3, 4)
    with pytest.raises(ValueError):
        fr.expected_spacing(4, 3)


@pytest.mark.parametrize("k", [1, 2, 5, 30, 100])
def test_expected_spacing_sums_and_monotone(k):
    vals = [fr.expected_spacing_exact(i, k) for i in range(1, k + 1)]
    assert sum(vals) == 1
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] == fr.harmonic(k) / k


def test_spacing_means_monte_carlo(rng):
    s = fr.stick_break_samples(5, 100_000, rng)
    se = s.std(axis=0, ddof=1) / math.sqrt(len(s))
    for i in range(5):
        assert abs(s[:, i].mean() - fr.expected_spacing(i + 1, 5)) <= 3 * se[i]


def test_largest_spacing_cdf_values():
    k = 50
    assert fr.largest_spacing_cdf(math.inf, k) == 1.0
    assert fr.largest_spacing_cdf(10.0, k) == pytest.approx(1.0)
    assert fr.largest_spacing_cdf((math.log(k) + 1) / k, k) == pytest.approx(math.exp(-math.exp(-1)))
    assert math.exp(-math.exp(-1)) == pytest.approx(0.6922, abs=1e-4)
    assert fr.largest_spacing_cdf(0.0, k) == pytest.approx(math.exp(-k))
    xs = np.linspace(0, 1, 200)
    vals = [fr.largest_spacing_cdf(x, k) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert fr.largest_spacing_sf(0.1, k) == 1 - fr.largest_spacing_cdf(0.1, k)


def test_exact_largest_spacing_cdf_vs_monte_carlo(rng):
    k = 8
    s = fr.stick_break_samples(k, 100_000, rng)[:, -1]
    for x in (0.2, 0.3, 0.45):
        p = fr.largest_spacing_cdf_exact(x, k)
        assert abs(np.mean(s <= x) - p) <= 4 * math.sqrt(p * (1 - p) / len(s))


def test_limit_law_k200(rng):
    k = 200
    x = (math.log(k) + 1) / k
    s = np.concatenate([fr.stick_break_samples(k, 10_000, rng)[:, -1] for _ in range(10)])
    target = fr.largest_spacing_cdf(x, k)
    assert abs(np.mean(s <= x) - target) <= 0.02
    assert abs(fr.largest_spacing_cdf_exact(x, k) - target) <= 0.02

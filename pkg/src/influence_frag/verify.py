"""Acceptance criteria, shared by ``influence-frag verify`` and the test suite.

Each ``criterion_*`` function returns a :class:`CriterionResult` with the
measured values; tolerances are fixed here.  ``level="fast"`` shrinks the
replication counts of the slow criteria, ``"full"`` uses the stated ones.
"""

from __future__ import annotations

import contextlib
import io
import math
import os
import tempfile
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import analytic as an
from . import fragmentology as fr
from .process_sim import (
    Engine,
    SimConfig,
    enumerate_process_outcomes,
    run_replications,
    run_until_k_roots,
    total_edges,
)
from .seeding import DEFAULT_SEED, rep_generator
from .stats import (
    chi_square_gof,
    chi_square_homogeneity,
    counts_by_category,
    deviation_report,
    empirical_cdf,
    summarize,
)

P_MIN = 0.001


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:>2} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _reps(level: str, full: int, fast: int) -> int:
    return full if level == "full" else fast


def criterion_1(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Mean active count against the closed form over the full p range."""
    start = time.perf_counter()
    n, reps = 1000, 50
    N = total_edges(n)
    grid = an.p_grid(0.02, 1.0, 0.02)
    ms = [an.p_to_m(p, N) for p in grid]
    config = SimConfig(n=n, m=ms[-1], engine=Engine.SKIP_CHAIN, seed=seed, reps=reps,
                       checkpoints=tuple(ms))
    table = summarize(run_replications(config, threads))
    curve = {m: an.closed_b(n, m) for m in ms}
    rows = deviation_report(table, curve, tol=0.05, z=3.0)
    tracked = [r for r in rows if r.curve >= 10]
    worst = max(abs(r.rel_dev) for r in tracked)
    upper_fail = [r.t for r in rows if not r.upper_ok]
    elapsed = time.perf_counter() - start
    ok = worst <= 0.10 and not upper_fail and len(rows) == 50 and elapsed < 60
    detail = (f"{len(rows)} grid points, max |a/b-1| over b>=10 = {worst:.4f} (<= 0.10), "
              f"upper-bound failures {len(upper_fail)}")
    return CriterionResult(1, "Full-range sweep", ok, detail, elapsed)


def criterion_2(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Sparse regime: recurrence vs n^2/(n+t), and n^2/(n+t) vs the closed form."""
    start = time.perf_counter()
    n = 10_000
    N = total_edges(n)
    t_top = N // 100
    grid = np.unique(np.linspace(0, t_top, 100).round().astype(np.int64))
    a = an.recurrence_a(n, t_top, grid=grid).values
    c = an.closed_c(n, grid)
    b = an.closed_b(n, grid)
    env = 2 * grid / (N - grid)
    err_ac = np.abs(a / c - 1)
    err_cb = np.abs(c / b - 1)
    ok_env = bool(np.all(err_ac <= env))
    elapsed = time.perf_counter() - start
    ok = ok_env and float(err_cb.max()) <= 0.02 and elapsed < 1.0
    detail = (f"{grid.size} points, |a/c-1| within 2t/(N-t): {ok_env} "
              f"(max ratio {float(np.max(err_ac[1:] / env[1:])):.3f}), max |c/b-1| = {err_cb.max():.2e}")
    return CriterionResult(2, "Sparse closed form", ok, detail, elapsed)


def criterion_3(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Recurrence vs its ODE solution up to 0.99 N."""
    start = time.perf_counter()
    n = 1000
    N = total_edges(n)
    t_max = int(0.99 * N)
    curve = an.recurrence_a(n, t_max)
    b = an.closed_b(n, curve.grid)
    worst = float(np.max(np.abs(curve.values / b - 1)))
    elapsed = time.perf_counter() - start
    ok = worst <= 0.02 and elapsed < 5.0
    return CriterionResult(3, "Recurrence vs ODE", ok,
                           f"t <= {t_max}, max |a_t/b_t-1| = {worst:.2e} (<= 0.02)", elapsed)


def _final_a_counts(config: SimConfig, threads: int) -> list[int]:
    finals = [tr.final_a for tr in run_replications(config, threads)]
    return counts_by_category(finals, list(range(1, config.n + 1)))


def _outcome_match(config: SimConfig, exact: dict, threads: int) -> tuple[bool, float]:
    reps = config.reps
    freq = Counter(tr.outcome() for tr in run_replications(config, threads))
    worst = 0.0
    ok = set(freq) <= set(exact)
    for outcome, p in exact.items():
        p = float(p)
        se = math.sqrt(p * (1 - p) / reps)
        dev = abs(freq.get(outcome, 0) / reps - p)
        z = dev / se if se > 0 else (0.0 if dev == 0 else math.inf)
        worst = max(worst, z)
        ok = ok and dev <= 3 * se
    return ok, worst


def criterion_4(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Engines agree with each other and with brute-force enumeration."""
    start = time.perf_counter()
    reps = _reps(level, 20_000, 5_000)
    counts = {}
    for eng in Engine:
        cfg = SimConfig(n=30, m=100, engine=eng, seed=seed, reps=reps)
        counts[eng] = _final_a_counts(cfg, threads)
    engines = list(Engine)
    pvals = {}
    for i in range(len(engines)):
        for j in range(i + 1, len(engines)):
            rep = chi_square_homogeneity(counts[engines[i]], counts[engines[j]])
            pvals[(engines[i].value, engines[j].value)] = rep.p_value
    exact = enumerate_process_outcomes(4, 3)
    exact_ok = True
    worst_z = 0.0
    for eng in Engine:
        cfg = SimConfig(n=4, m=3, engine=eng, seed=seed + 1, reps=reps)
        ok, z = _outcome_match(cfg, exact, threads)
        exact_ok = exact_ok and ok
        worst_z = max(worst_z, z)
    min_p = min(pvals.values())
    ok = min_p > P_MIN and exact_ok
    detail = (f"{reps} reps/engine, min pairwise p = {min_p:.3g} (> {P_MIN}); "
              f"n=4,m=3 worst |z| vs exact = {worst_z:.2f} (<= 3)")
    return CriterionResult(4, "Engine equivalence", ok, detail, time.perf_counter() - start)


def criterion_5(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Ordered fragment sizes at k roots are uniform over compositions."""
    start = time.perf_counter()
    n, k = 6, 3
    reps = _reps(level, 30_000, 10_000)
    comps = [c.parts for c in fr.enumerate_compositions(n, k)]
    uniform = [1 / len(comps)] * len(comps)
    cfg = SimConfig(n=n, m=total_edges(n), seed=seed, reps=reps)
    process = counts_by_category((run_until_k_roots(cfg, k, r) for r in range(reps)), comps)
    rng_a = rep_generator(seed, 0, stream=5)
    rng_b = rep_generator(seed, 0, stream=6)
    urn = counts_by_category((fr.polya_backward_sample(n, k, rng_a).parts for _ in range(reps)), comps)
    cuts = counts_by_category((fr.uniform_composition_sample(n, k, rng_b).parts for _ in range(reps)),
                              comps)
    p = {
        "process~uniform": chi_square_gof(process, uniform).p_value,
        "urn~uniform": chi_square_gof(urn, uniform).p_value,
        "cuts~uniform": chi_square_gof(cuts, uniform).p_value,
        "process~urn": chi_square_homogeneity(process, urn).p_value,
        "process~cuts": chi_square_homogeneity(process, cuts).p_value,
        "urn~cuts": chi_square_homogeneity(urn, cuts).p_value,
    }
    ok = min(p.values()) > P_MIN
    detail = f"{reps} samples each over {len(comps)} compositions, " + ", ".join(
        f"{key} p={v:.3g}" for key, v in p.items())
    return CriterionResult(5, "Composition uniformity", ok, detail, time.perf_counter() - start)


def largest_spacings(k: int, size: int, rng: np.random.Generator, chunk: int = 10_000) -> np.ndarray:
    parts = []
    left = size
    while left > 0:
        c = min(chunk, left)
        parts.append(fr.stick_break_samples(k, c, rng)[:, -1])
        left -= c
    return np.concatenate(parts)


def criterion_6(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Stick-breaking spacing means and the limiting law of the largest spacing."""
    start = time.perf_counter()
    samples = 100_000
    rng = rep_generator(seed, 0, stream=7)
    big = largest_spacings(100, samples, rng)
    target = float(fr.harmonic(100)) / 100
    rel = abs(big.mean() / target - 1)

    s5 = fr.stick_break_samples(5, samples, rng)
    means = s5.mean(axis=0)
    ses = s5.std(axis=0, ddof=1) / math.sqrt(samples)
    z5 = [abs(means[i] - fr.expected_spacing(i + 1, 5)) / ses[i] for i in range(5)]

    k = 200
    x = (math.log(k) + 1) / k
    emp = empirical_cdf(largest_spacings(k, samples, rng), x)
    limit = fr.largest_spacing_cdf(x, k)
    ok = rel <= 0.01 and max(z5) <= 3 and abs(emp - limit) <= 0.02
    detail = (f"k=100 mean largest rel err {rel:.2e} (<= 1%); k=5 worst |z| {max(z5):.2f} (<= 3); "
              f"k=200 P(S_(k)<=x) = {emp:.4f} vs {limit:.4f} (+-0.02)")
    return CriterionResult(6, "Spacings", ok, detail, time.perf_counter() - start)


def criterion_7(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Exact fragment-size counts and first-moment tail bound, n <= 12."""
    start = time.perf_counter()
    instances = 0
    mismatches = []
    bound_fail = []
    for n in range(2, 13):
        for k in range(2, n + 1):
            comps = [c.parts for c in fr.enumerate_compositions(n, k)]
            total = len(comps)
            for l in range(1, n - k + 2):
                counted = Fraction(sum(c.count(l) for c in comps), total)
                if counted != fr.expected_fragments_of_size(n, k, l):
                    mismatches.append((n, k, l))
            for l0 in range(1, n + 1):
                tb = fr.largest_fragment_tail_exact(n, k, l0)
                exact = Fraction(sum(1 for c in comps if max(c) >= l0), total)
                if tb.exact != exact or tb.bound < exact:
                    bound_fail.append((n, k, l0))
            instances += 1
    ok = not mismatches and not bound_fail
    detail = (f"{instances} (n,k) instances, count mismatches {len(mismatches)}, "
              f"tail-bound violations {len(bound_fail)}")
    return CriterionResult(7, "Finite largest-fragment formula", ok, detail,
                           time.perf_counter() - start)


def criterion_8(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """One stubborn vertex shrinks the independent actives by sqrt(1-c)."""
    start = time.perf_counter()
    n = 100_000
    N0, N1 = total_edges(n), total_edges(n, 1)
    worst = 0.0
    for i in range(1, 10):
        c = i / 10
        ratio = an.closed_bk(n, 1, c * N1) / an.closed_b(n, c * N0)
        worst = max(worst, ratio / math.sqrt(1 - c))
    n_sim = 1000
    m = an.p_to_m(0.75, total_edges(n_sim, 1))
    cfg = SimConfig(n=n_sim, m=m, k=1, seed=seed, reps=100)
    row = summarize(run_replications(cfg, threads)).rows[-1]
    bk = an.closed_bk(n_sim, 1, m)
    ok = worst <= 1.05 and row.mean <= bk * 1.05 + 3 * row.se
    detail = (f"max (b_1/b)/sqrt(1-c) = {worst:.4f} (<= 1.05); sim mean a_1 = {row.mean:.3f} "
              f"vs b_1*1.05 + 3SE = {bk * 1.05 + 3 * row.se:.3f}")
    return CriterionResult(8, "Stubborn reduction", ok, detail, time.perf_counter() - start)


def criterion_9(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Many stubborn vertices leave no independent actives."""
    start = time.perf_counter()
    n, k = 2000, 100
    m = total_edges(n, k) // 10
    cfg = SimConfig(n=n, m=m, k=k, seed=seed, reps=100)
    finals = [tr.final_a for tr in run_replications(cfg, threads)]
    frac = sum(1 for a in finals if a == 0) / len(finals)
    ok = frac >= 0.95
    return CriterionResult(9, "Extinction", ok,
                           f"{frac:.2%} of 100 runs end with no independent actives (>= 95%); "
                           f"b_k = {an.closed_bk(n, k, m):.2e}",
                           time.perf_counter() - start)


def _cli_outputs(argv_sets: list[list[str]], threads: int) -> dict[str, bytes]:
    from .cli import main

    out = {}
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(argv_sets):
            d = Path(tmp) / str(i)
            with contextlib.redirect_stdout(io.StringIO()):
                code = main([*argv, "--threads", str(threads), "--out", str(d)])
            if code != 0:
                raise RuntimeError(f"command {argv} exited with {code}")
            for f in sorted(d.glob("*.csv")):
                out[f"{i}/{f.name}"] = f.read_bytes()
    return out


DETERMINISM_COMMANDS = [
    ["simulate", "--n", "200", "--p", "0.3", "--reps", "24", "--seed", "7"],
    ["simulate", "--n", "40", "--m", "300", "--k", "2", "--engine", "PermutationReveal",
     "--reps", "24", "--seed", "7"],
    ["simulate", "--n", "25", "--m", "120", "--engine", "FixedGraphProtocol", "--mode",
     "VertexModel", "--reps", "24", "--seed", "7"],
    ["sweep", "--n", "200", "--p-grid", "0.1:1.0:0.1", "--k", "1", "--reps", "24", "--seed", "7"],
    ["fragments", "--n", "150", "--p-grid", "0.05:0.5:0.05", "--reps", "24", "--seed", "7"],
]


def criterion_10(level: str = "full", threads: int = 1, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Byte-identical CSV across reruns and worker counts."""
    start = time.perf_counter()
    many = max(2, threads, os.cpu_count() or 1)
    first = _cli_outputs(DETERMINISM_COMMANDS, 1)
    again = _cli_outputs(DETERMINISM_COMMANDS, 1)
    parallel = _cli_outputs(DETERMINISM_COMMANDS, many)
    ok = first == again == parallel and len(first) == len(DETERMINISM_COMMANDS)
    detail = f"{len(first)} CSV files identical across reruns and threads=1 vs {many}: {ok}"
    return CriterionResult(10, "Determinism", ok, detail, time.perf_counter() - start)


CRITERIA: list[Callable[..., CriterionResult]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
]


def root_label_check(reps: int = 8000, seed: int = DEFAULT_SEED, threads: int = 1) -> CriterionResult:
    """Final root of the complete graph K_4 is uniform over vertices.

    Equivalence and size checks are blind to a biased absorber coin; this
    one is not.
    """
    start = time.perf_counter()
    pvals = []
    for eng in (Engine.PERMUTATION_REVEAL, Engine.SKIP_CHAIN, Engine.FIXED_GRAPH):
        cfg = SimConfig(n=4, m=6, engine=eng, seed=seed, reps=reps)
        roots = [next(iter(tr.final_sizes)) for tr in run_replications(cfg, threads)]
        pvals.append(chi_square_gof(counts_by_category(roots, range(4)), [0.25] * 4).p_value)
    ok = min(pvals) > P_MIN
    return CriterionResult(0, "Root-label symmetry", ok,
                           "p = " + ", ".join(f"{p:.3g}" for p in pvals),
                           time.perf_counter() - start)


def run_all(level: str = "fast", threads: int = 1) -> list[CriterionResult]:
    results = [crit(level=level, threads=threads) for crit in CRITERIA]
    results.append(root_label_check(threads=threads))
    return results


def format_report(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} passed")
    return "\n".join(lines)

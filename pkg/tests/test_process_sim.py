import itertools
import math
import random
from collections import Counter, defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from influence_frag import process_sim as ps
from influence_frag.analytic import recurrence_a
from influence_frag.process_sim import (
    ConfigError,
    Engine,
    Mode,
    Outcome,
    ProcessState,
    SimConfig,
    enumerate_ordering_outcomes,
    enumerate_process_outcomes,
    enumerate_protocol_outcomes,
    run_fixed_graph_protocol,
    run_permutation_reveal,
    run_replications,
    run_skip_chain,
    run_until_k_roots,
    total_edges,
)
from influence_frag.stats import chi_square_gof, counts_by_category, summarize

EDGE_ENGINES = [Engine.PERMUTATION_REVEAL, Engine.SKIP_CHAIN, Engine.FIXED_GRAPH]


def literal_reveal_law(n, m, k=0):
    """Independent brute force: every ordered m-prefix of edges, every coin sequence.

    Shares no code with the package beyond plain Python.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    pairs += [(v, n + s) for s in range(k) for v in range(n)]
    law = defaultdict(Fraction)
    prefixes = list(itertools.permutations(range(len(pairs)), m))
    for prefix in prefixes:
        for coins in itertools.product((0, 1), repeat=m):
            active = set(range(n))
            size = {v: 1 for v in range(n + k)}
            for e, coin in zip(prefix, coins):
                u, v = pairs[e]
                if v >= n:
                    if u in active:
                        active.discard(u)
                        size[v] += size.pop(u)
                elif u in active and v in active:
                    win, lose = (u, v) if coin else (v, u)
                    active.discard(lose)
                    size[win] += size.pop(lose)
            out = Outcome(len(active), tuple(sorted((size[v] for v in active), reverse=True)),
                          tuple(size[n + s] for s in range(k)))
            law[out] += Fraction(1, len(prefixes) * 2**m)
    return dict(law)


# Configuration ------------------------------------------------------------

def test_total_edges_counts_stubborn_pairs():
    assert total_edges(10) == 45
    assert total_edges(10, 3) == 45 + 30


@pytest.mark.parametrize("kwargs, msg", [
    (dict(n=0, m=0), "n must be"),
    (dict(n=3, m=4), "N_total=3"),
    (dict(n=3, m=1, engine="SkipChain", mode="VertexModel"), "VertexModel requires"),
    (dict(n=5, m=4, checkpoints=(2, 1)), "strictly increasing"),
    (dict(n=5, m=4, checkpoints=(1, 5)), "checkpoints must lie"),
    (dict(n=5, m=4, reps=0), "reps"),
    (dict(n=5, m=4, k=-1), "k must be"),
    (dict(n=5, m=4, seed=2**64), "64-bit"),
])
def test_invalid_configs_rejected(kwargs, msg):
    with pytest.raises(ConfigError, match=msg):
        SimConfig(**kwargs)


def test_m_equal_to_n_total_is_allowed():
    assert SimConfig(n=4, m=10, k=1).N_total == 10


def test_default_checkpoint_is_m():
    assert SimConfig(n=5, m=7).checkpoints == (7,)


def test_degenerate_single_vertex():
    tr = run_skip_chain(SimConfig(n=1, m=0, checkpoints=(0,)))
    assert tr.a_values == [1]
    assert tr.final_sizes == {0: 1}


# Edge layout and sampling -------------------------------------------------

@given(st.integers(1, 40), st.integers(0, 4), st.data())
def test_edge_index_is_a_bijection(n, k, data):
    N = total_edges(n, k)
    if N == 0:
        return
    e = data.draw(st.integers(0, N - 1))
    u, v = ps.edge_pair(n, e)
    assert u < v and u < n and v < n + k
    assert ps.edge_index(n, u, v) == e


def test_edge_layout_row_major_then_stubborn():
    n = 4
    got = [ps.edge_pair(n, e) for e in range(total_edges(n, 1))]
    assert got == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]


@given(st.integers(1, 60), st.integers(0, 2**32))
def test_sparse_fisher_yates_full_length_is_a_permutation(N, seed):
    perm = list(ps.sample_edge_prefix(N, N, random.Random(seed)))
    assert sorted(perm) == list(range(N))


def test_edge_prefix_is_uniform_over_ordered_pairs():
    rng = random.Random(3)
    counts = Counter(tuple(ps.sample_edge_prefix(4, 2, rng)) for _ in range(24_000))
    cats = list(itertools.permutations(range(4), 2))
    rep = chi_square_gof(counts_by_category(_expand(counts), cats), [1 / 12] * 12)
    assert rep.p_value > 0.001


def _expand(counter):
    for key, c in counter.items():
        for _ in range(c):
            yield key


def _exact_skip(R, E, u):
    surv = Fraction(1)
    j = 0
    while j < R - E:
        nxt = surv * Fraction(R - j - E, R - j)
        if nxt <= u:
            break
        surv = nxt
        j += 1
    return j


@settings(max_examples=300)
@given(st.integers(2, 400), st.data(), st.floats(1e-12, 1.0))
def test_skip_length_matches_exact_inversion(R, data, u):
    E = data.draw(st.integers(1, R))
    got = ps.skip_length(R, E, u)
    want = _exact_skip(R, E, Fraction(u))
    # Only a float-rounding tie at the cell boundary could separate them.
    assert abs(got - want) <= 1
    if got != want:
        lo, hi = sorted((got, want))
        s_hi = Fraction(math.comb(R - hi, E), math.comb(R, E))
        assert abs(float(s_hi) - u) < 1e-9


def test_skip_length_edge_cases():
    assert ps.skip_length(10, 10, 0.3) == 0
    assert ps.skip_length(10, 1, 1.0) == 0
    assert ps.skip_length(10, 1, 1e-300) == 9


# Examples ----------------------------------------------------------------

@pytest.mark.parametrize("engine", EDGE_ENGINES)
def test_single_edge_two_vertices(engine):
    for r in range(20):
        tr = ps.run_replication(SimConfig(n=2, m=1, engine=engine), r)
        assert tr.final_a == 1
        assert sorted(tr.final_sizes.values()) == [2]


@pytest.mark.parametrize("engine", EDGE_ENGINES)
def test_triangle_ends_with_one_active(engine):
    for r in range(50):
        assert ps.run_replication(SimConfig(n=3, m=3, engine=engine), r).final_a == 1


def test_fixed_graph_single_edge_on_three_vertices():
    for r in range(20):
        tr = run_fixed_graph_protocol(SimConfig(n=3, m=1, engine=Engine.FIXED_GRAPH), r)
        assert tr.final_a == 2
        assert sorted(tr.final_sizes.values()) == [1, 2]


def test_skip_chain_first_step_always_merges():
    n = 12
    for r in range(30):
        tr = run_skip_chain(SimConfig(n=n, m=1), r)
        assert tr.final_a == n - 1


@pytest.mark.parametrize("engine", [Engine.PERMUTATION_REVEAL, Engine.SKIP_CHAIN])
@pytest.mark.parametrize("k", [0, 1, 3])
def test_complete_graph_termination(engine, k):
    n = 9
    for r in range(20):
        tr = ps.run_replication(SimConfig(n=n, m=total_edges(n, k), k=k, engine=engine), r)
        if k == 0:
            assert tr.final_a == 1 and tr.largest == n
        else:
            assert tr.final_a == 0
            assert sum(tr.stubborn_sizes()) == n + k


def test_run_until_k_roots_boundaries():
    cfg = SimConfig(n=7, m=total_edges(7))
    assert run_until_k_roots(cfg, 7) == (1,) * 7
    assert run_until_k_roots(cfg, 1) == (7,)
    with pytest.raises(ConfigError):
        run_until_k_roots(cfg, 8)
    with pytest.raises(ConfigError):
        run_until_k_roots(SimConfig(n=7, m=0, k=1), 3)


@pytest.mark.parametrize("target", [1, 2, 4, 6])
def test_run_until_k_roots_shape(target):
    for r in range(10):
        sizes = run_until_k_roots(SimConfig(n=6, m=15), target, r)
        assert len(sizes) == target and sum(sizes) == 6 and min(sizes) >= 1


def test_vertex_mode_requires_fixed_graph():
    with pytest.raises(ConfigError):
        run_skip_chain(SimConfig(n=3, m=2, engine=Engine.FIXED_GRAPH, mode=Mode.VERTEX))


# Invariants --------------------------------------------------------------

@pytest.mark.parametrize("engine", EDGE_ENGINES)
@pytest.mark.parametrize("n, k, m", [(15, 0, 40), (15, 2, 80), (8, 4, 60)])
def test_trace_monotone_and_conserved(engine, n, k, m):
    cps = tuple(range(0, m + 1, 5))
    for r in range(10):
        cfg = SimConfig(n=n, m=m, k=k, engine=engine, checkpoints=cps, trace=True)
        tr = ps.run_replication(cfg, r)
        assert tr.a_values[0] <= n
        assert all(b in (a, a - 1) for a, b in zip(tr.trace, tr.trace[1:]))
        assert all(b <= a for a, b in zip(tr.a_values, tr.a_values[1:]))
        assert sum(tr.final_sizes.values()) == n + k
        assert len(tr.final_sizes) == tr.final_a + k
        assert tr.a_values[-1] == tr.final_a or engine is Engine.FIXED_GRAPH
        assert all(b >= a for a, b in zip(tr.largest_values, tr.largest_values[1:]))
        for cp, stub in zip(tr.checkpoints, tr.stubborn_values):
            assert len(stub) == k


def test_trace_matches_checkpoints():
    cfg = SimConfig(n=20, m=60, checkpoints=tuple(range(61)), trace=True)
    for r in range(5):
        tr = run_permutation_reveal(cfg, r)
        assert tr.trace == tr.a_values


@given(st.integers(1, 12), st.integers(0, 3), st.integers(0, 2**20))
@settings(max_examples=60, deadline=None)
def test_process_state_invariants_under_random_absorptions(n, k, seed):
    rng = random.Random(seed)
    state = ProcessState(n, k)
    while state.eligible_edges:
        if k and rng.random() < 0.4:
            state.absorb(n + rng.randrange(k), state.random_active(rng))
        elif state.a >= 2:
            u, v = state.random_active_pair(rng)
            state.absorb(u, v)
        state.check_invariants()
    assert state.a == (1 if k == 0 else 0)


def test_replications_independent_of_scheduling():
    cfg = SimConfig(n=25, m=80, k=1, engine=Engine.PERMUTATION_REVEAL, reps=13,
                    checkpoints=(0, 20, 80), seed=99)
    serial = run_replications(cfg, threads=1)
    parallel = run_replications(cfg, threads=3)
    assert serial == parallel
    shuffled = [ps.run_replication(cfg, r) for r in reversed(range(13))][::-1]
    assert shuffled == serial


def test_different_seeds_differ():
    a = run_replications(SimConfig(n=40, m=200, reps=5, seed=1))
    b = run_replications(SimConfig(n=40, m=200, reps=5, seed=2))
    assert [t.final_sizes for t in a] != [t.final_sizes for t in b]


# Exact oracles -----------------------------------------------------------

def test_enumeration_trivial_cases():
    assert enumerate_process_outcomes(2, 1) == {Outcome(1, (2,)): 1}
    assert enumerate_process_outcomes(4, 6) == {Outcome(1, (4,)): 1}


def test_enumeration_n3_m2_by_hand():
    # The first edge always merges; of the two remaining edges exactly one
    # joins the survivor to the third vertex.
    assert enumerate_process_outcomes(3, 2) == {
        Outcome(1, (3,)): Fraction(1, 2),
        Outcome(2, (2, 1)): Fraction(1, 2),
    }


@pytest.mark.parametrize("n, m, k", [(4, 3, 0), (4, 2, 0), (3, 3, 1), (3, 2, 1), (4, 4, 0)])
def test_enumeration_matches_literal_brute_force(n, m, k):
    assert enumerate_process_outcomes(n, m, k) == literal_reveal_law(n, m, k)


def test_enumeration_sums_to_one():
    for n, m, k in [(5, 4, 0), (4, 5, 1), (6, 3, 0)]:
        assert sum(enumerate_process_outcomes(n, m, k).values()) == 1


def test_enumeration_work_bound():
    with pytest.raises(ps.EnumerationTooLarge):
        enumerate_process_outcomes(6, 8, k=1, max_states=100)


@pytest.mark.parametrize("n, m, k", [(4, 3, 0), (4, 4, 1), (5, 5, 0)])
def test_fixed_graph_protocol_equals_reveal_on_every_graph(n, m, k):
    graphs = list(ps.all_graphs(n, m, k))
    mixture = defaultdict(Fraction)
    for g in graphs:
        law = enumerate_protocol_outcomes(n, g, k)
        assert law == enumerate_ordering_outcomes(n, g, k)
        for o, p in law.items():
            mixture[o] += p / len(graphs)
    assert dict(mixture) == enumerate_process_outcomes(n, m, k)


def _assert_matches(config, exact, z=4.0):
    reps = config.reps
    freq = Counter(tr.outcome() for tr in run_replications(config))
    assert set(freq) <= set(exact)
    for outcome, p in exact.items():
        p = float(p)
        se = math.sqrt(p * (1 - p) / reps)
        assert abs(freq.get(outcome, 0) / reps - p) <= z * se + 1e-12, outcome


@pytest.mark.parametrize("engine", EDGE_ENGINES)
@pytest.mark.parametrize("n, m, k", [(4, 3, 0), (3, 3, 1), (5, 4, 0)])
def test_engines_match_exact_law(engine, n, m, k):
    cfg = SimConfig(n=n, m=m, k=k, engine=engine, reps=6000, seed=11)
    _assert_matches(cfg, enumerate_process_outcomes(n, m, k))


def test_vertex_model_matches_its_exact_law():
    n, m, k = 4, 4, 1
    graphs = list(ps.all_graphs(n, m, k))
    mixture = defaultdict(Fraction)
    for g in graphs:
        for o, p in enumerate_protocol_outcomes(n, g, k, mode=Mode.VERTEX).items():
            mixture[o] += p / len(graphs)
    cfg = SimConfig(n=n, m=m, k=k, engine=Engine.FIXED_GRAPH, mode=Mode.VERTEX, reps=6000, seed=5)
    _assert_matches(cfg, dict(mixture))


def test_vertex_model_differs_from_edge_model_on_a_path():
    # Path 0-1-2: everything merges iff the middle vertex survives the first
    # interaction, probability 1/2 in the edge model but 1/3 in the vertex model.
    path = [(0, 1), (1, 2)]
    edge = enumerate_protocol_outcomes(3, path)
    vertex = enumerate_protocol_outcomes(3, path, mode=Mode.VERTEX)
    assert edge != vertex
    assert vertex == {Outcome(1, (3,)): Fraction(1, 3), Outcome(2, (2, 1)): Fraction(2, 3)}


# Statistical properties ---------------------------------------------------

def test_mean_step_identity():
    n, k, t = 20, 1, 30
    N = total_edges(n, k)
    cfg = SimConfig(n=n, m=t + 1, k=k, engine=Engine.PERMUTATION_REVEAL, reps=40_000,
                    checkpoints=(t, t + 1), seed=8)
    drops = defaultdict(list)
    for tr in run_replications(cfg):
        a0, a1 = tr.a_values
        drops[a0].append(a0 - a1)
    a_cell = max(drops, key=lambda a: len(drops[a]))
    xs = drops[a_cell]
    mean = sum(xs) / len(xs)
    want = (a_cell * (a_cell - 1) / 2 + k * a_cell) / (N - t)
    se = math.sqrt(want * (1 - want) / len(xs))
    assert abs(mean - want) <= 4 * se


def test_mean_below_recurrence_upper_bound():
    n = 200
    N = total_edges(n)
    cps = tuple(int(f * N) for f in (0.001, 0.01, 0.05, 0.2, 0.5, 0.9))
    table = summarize(run_replications(SimConfig(n=n, m=cps[-1], reps=400, checkpoints=cps, seed=4)))
    rec = recurrence_a(n, cps[-1], grid=cps)
    for row, bound in zip(table.rows, rec.values):
        assert row.mean <= bound + 3 * row.se


def test_biased_coin_is_caught_by_root_label_check(monkeypatch):
    from influence_frag.verify import root_label_check

    assert root_label_check(reps=2000).passed
    monkeypatch.setattr(ps, "_coin", lambda rng: False)
    assert not root_label_check(reps=2000).passed

"""Joining-protocol simulation on G(n, m), optionally with stubborn vertices.

Vertex ids: independent vertices are ``0 .. n-1``, stubborn vertices are
``n .. n+k-1``.  The underlying graph is the complete graph on the
independents plus every stubborn-independent pair, so it has
``C(n,2) + k*n`` edges.  Edge indices are laid out as

* ``[0, C(n,2))``: independent pairs ``(i, j)``, ``i < j``, row-major over
  the upper triangle;
* ``[C(n,2), C(n,2) + k*n)``: index ``C(n,2) + s*n + v`` joins stubborn
  vertex ``n+s`` to independent ``v``.

Three edge-model engines share this layout and have the same law:

``PermutationReveal``
    reveals a uniform random prefix of all edges one at a time.
``SkipChain``
    keeps only the active vertices and jumps straight to the next step at
    which an eligible edge is revealed.
``FixedGraphProtocol``
    draws the graph first, then runs the protocol on it (edge or vertex
    model).

The exact enumerators at the bottom are brute-force oracles for tests.
"""

from __future__ import annotations

import bisect
import math
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterator, NamedTuple, Sequence

from .seeding import DEFAULT_SEED, MAX_SEED, rep_rng


class Engine(str, Enum):
    PERMUTATION_REVEAL = "PermutationReveal"
    SKIP_CHAIN = "SkipChain"
    FIXED_GRAPH = "FixedGraphProtocol"


class Mode(str, Enum):
    EDGE = "EdgeModel"
    VERTEX = "VertexModel"


class ConfigError(ValueError):
    """Invalid experiment description."""


class EnumerationTooLarge(RuntimeError):
    """An exact enumerator exceeded its work bound."""


def total_edges(n: int, k: int = 0) -> int:
    """Edge count of the underlying graph: ``C(n,2) + k*n``."""
    return n * (n - 1) // 2 + k * n


@dataclass(frozen=True)
class SimConfig:
    """Full description of one experiment."""

    n: int
    m: int
    k: int = 0
    engine: Engine = Engine.SKIP_CHAIN
    mode: Mode = Mode.EDGE
    seed: int = DEFAULT_SEED
    reps: int = 1
    checkpoints: tuple[int, ...] = ()
    trace: bool = False

    def __post_init__(self):
        try:
            object.__setattr__(self, "engine", Engine(self.engine))
            object.__setattr__(self, "mode", Mode(self.mode))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cps = tuple(int(c) for c in self.checkpoints) if self.checkpoints else (self.m,)
        object.__setattr__(self, "checkpoints", cps)
        self.validate()

    @property
    def N_total(self) -> int:
        return total_edges(self.n, self.k)

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got n={self.n}")
        if self.k < 0:
            raise ConfigError(f"k must be >= 0, got k={self.k}")
        if not 0 <= self.m <= self.N_total:
            raise ConfigError(
                f"m must satisfy 0 <= m <= N_total={self.N_total}, got m={self.m}"
            )
        if self.mode is Mode.VERTEX and self.engine is not Engine.FIXED_GRAPH:
            raise ConfigError("VertexModel requires engine=FixedGraphProtocol")
        if self.reps < 1:
            raise ConfigError(f"reps must be >= 1, got {self.reps}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        cps = self.checkpoints
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigError("checkpoints must be strictly increasing")
        if cps[0] < 0 or cps[-1] > self.m:
            raise ConfigError(f"checkpoints must lie in [0, m={self.m}]")


class ProcessState:
    """Active set and fragment forest of one run.

    ``fragment_root[v]`` is the vertex that absorbed ``v`` (roots point at
    themselves), so following it from any vertex ends at the fragment's
    root.  ``fragment_size`` is meaningful at roots and zero elsewhere.
    """

    def __init__(self, n: int, k: int = 0):
        self.n = n
        self.k = k
        self.t = 0
        self.fragment_root = list(range(n + k))
        self.fragment_size = [1] * (n + k)
        self.merges = 0
        self.absorptions = 0
        self.largest = 1
        self._active = list(range(n))
        self._pos = list(range(n))

    @property
    def a(self) -> int:
        return len(self._active)

    @property
    def active(self) -> set[int]:
        return set(self._active)

    @property
    def eligible_edges(self) -> int:
        """Unrevealed edges that would trigger an absorption (all are unrevealed)."""
        a = len(self._active)
        return a * (a - 1) // 2 + self.k * a

    def is_active(self, v: int) -> bool:
        return v < self.n and self._pos[v] >= 0

    def random_active(self, rng: random.Random) -> int:
        return self._active[rng.randrange(len(self._active))]

    def random_active_pair(self, rng: random.Random) -> tuple[int, int]:
        a = len(self._active)
        i = rng.randrange(a)
        j = rng.randrange(a - 1)
        if j >= i:
            j += 1
        u, v = self._active[i], self._active[j]
        return (u, v) if u < v else (v, u)

    def absorb(self, winner: int, loser: int) -> None:
        """``loser`` (an active independent) joins the fragment of ``winner``."""
        pos = self._pos[loser]
        last = self._active.pop()
        if last != loser:
            self._active[pos] = last
            self._pos[last] = pos
        self._pos[loser] = -1
        self.fragment_root[loser] = winner
        size = self.fragment_size[winner] + self.fragment_size[loser]
        self.fragment_size[winner] = size
        self.fragment_size[loser] = 0
        if size > self.largest:
            self.largest = size
        if winner >= self.n:
            self.absorptions += 1
        else:
            self.merges += 1

    def root(self, v: int) -> int:
        while self.fragment_root[v] != v:
            v = self.fragment_root[v]
        return v

    def roots(self) -> list[int]:
        return sorted(self._active) + list(range(self.n, self.n + self.k))

    def sizes(self) -> dict[int, int]:
        return {r: self.fragment_size[r] for r in self.roots()}

    def stubborn_sizes(self) -> tuple[int, ...]:
        return tuple(self.fragment_size[self.n:])

    def check_invariants(self) -> None:
        n, k = self.n, self.k
        assert sum(self.fragment_size) == n + k
        assert self.a + self.merges + self.absorptions == n
        roots = set(self.roots())
        assert len(roots) == self.a + k
        for v in range(n + k):
            assert self.root(v) in roots


class Outcome(NamedTuple):
    """Final state modulo vertex labels: the comparison key for exact oracles."""

    a: int
    sizes: tuple[int, ...]  # independent fragment sizes, descending
    stubborn_sizes: tuple[int, ...] = ()  # in stubborn id order


@dataclass
class Trajectory:
    """Checkpoint samples of one replication plus its final composition."""

    n: int
    k: int
    checkpoints: tuple[int, ...]
    a_values: list[int]
    largest_values: list[int]
    stubborn_values: list[tuple[int, ...]]
    final_sizes: dict[int, int]
    end_step: int
    rep_index: int = 0
    trace: list[int] | None = None

    @property
    def final_a(self) -> int:
        return sum(1 for r in self.final_sizes if r < self.n)

    @property
    def largest(self) -> int:
        return max(self.final_sizes.values())

    def independent_sizes(self) -> tuple[int, ...]:
        """Fragment sizes of the active independents, ordered by root id."""
        return tuple(s for r, s in sorted(self.final_sizes.items()) if r < self.n)

    def stubborn_sizes(self) -> tuple[int, ...]:
        return tuple(s for r, s in sorted(self.final_sizes.items()) if r >= self.n)

    def outcome(self) -> Outcome:
        return Outcome(
            self.final_a,
            tuple(sorted(self.independent_sizes(), reverse=True)),
            self.stubborn_sizes(),
        )


class _Recorder:
    """Fills checkpoint samples lazily; the state only changes at events."""

    def __init__(self, config: SimConfig, state: ProcessState):
        self.cps = config.checkpoints
        self.state = state
        self.i = 0
        self.a_values: list[int] = []
        self.largest_values: list[int] = []
        self.stubborn_values: list[tuple[int, ...]] = []
        self.trace: list[int] | None = [] if config.trace else None

    def before_event(self, step: int) -> None:
        """Record every checkpoint strictly before ``step`` with the current state."""
        st = self.state
        while self.i < len(self.cps) and self.cps[self.i] < step:
            self.a_values.append(st.a)
            self.largest_values.append(st.largest)
            self.stubborn_values.append(st.stubborn_sizes())
            self.i += 1
        if self.trace is not None:
            self.trace.extend([st.a] * (step - len(self.trace)))

    def finish(self, config: SimConfig, end_step: int, rep_index: int) -> Trajectory:
        self.before_event(max(self.cps[-1], end_step) + 1)
        if self.trace is not None:
            del self.trace[end_step + 1:]
        self.state.t = end_step
        return Trajectory(
            n=config.n,
            k=config.k,
            checkpoints=self.cps,
            a_values=self.a_values,
            largest_values=self.largest_values,
            stubborn_values=self.stubborn_values,
            final_sizes=self.state.sizes(),
            end_step=end_step,
            rep_index=rep_index,
            trace=self.trace,
        )


def _coin(rng: random.Random) -> bool:
    return rng.getrandbits(1) == 1


def _merge(state: ProcessState, u: int, v: int, rng: random.Random) -> None:
    """Fair coin picks which of two active independents absorbs the other."""
    if _coin(rng):
        u, v = v, u
    state.absorb(u, v)


@lru_cache(maxsize=64)
def _row_starts(n: int) -> tuple[int, ...]:
    return tuple(i * (2 * n - i - 1) // 2 for i in range(n))


def edge_index(n: int, u: int, v: int) -> int:
    """Index of edge ``{u, v}`` in the layout described in the module docstring."""
    if u > v:
        u, v = v, u
    if v >= n:
        return n * (n - 1) // 2 + (v - n) * n + u
    return _row_starts(n)[u] + (v - u - 1)


def edge_pair(n: int, e: int) -> tuple[int, int]:
    """Inverse of :func:`edge_index`; returns ``(u, v)`` with ``u < v``."""
    n_ind = n * (n - 1) // 2
    if e >= n_ind:
        s, v = divmod(e - n_ind, n)
        return v, n + s
    starts = _row_starts(n)
    i = bisect.bisect_right(starts, e) - 1
    return i, e - starts[i] + i + 1


def sample_edge_prefix(N: int, m: int, rng: random.Random) -> Iterator[int]:
    """First ``m`` entries of a uniform permutation of ``range(N)``.

    Sparse Fisher-Yates: position ``i`` swaps with a uniform position in
    ``[i, N)``; only touched positions are stored.
    """
    swapped: dict[int, int] = {}
    for i in range(m):
        j = rng.randrange(i, N)
        ej = swapped.get(j, j)
        swapped[j] = swapped.get(i, i)
        yield ej


def _check_edge_model(config: SimConfig) -> None:
    if config.mode is not Mode.EDGE:
        raise ConfigError(f"{config.engine.value} supports EdgeModel only")


def run_permutation_reveal(config: SimConfig, rep_index: int = 0) -> Trajectory:
    """Reveal the first ``m`` edges of a random edge order one at a time."""
    _check_edge_model(config)
    n, k, m = config.n, config.k, config.m
    rng = rep_rng(config.seed, rep_index)
    state = ProcessState(n, k)
    rec = _Recorder(config, state)
    for t, e in enumerate(sample_edge_prefix(config.N_total, m, rng), start=1):
        if state.eligible_edges == 0:
            break
        u, v = edge_pair(n, e)
        if v >= n:
            if state.is_active(u):
                rec.before_event(t)
                state.absorb(v, u)
        elif state.is_active(u) and state.is_active(v):
            rec.before_event(t)
            _merge(state, u, v, rng)
    return rec.finish(config, m, rep_index)


def _log_survival(R: int, E: int, j: int) -> float:
    """log P(no eligible edge among the next j reveals) = log C(R-j, E) / C(R, E)."""
    lg = math.lgamma
    return lg(R - j + 1) - lg(R - j - E + 1) - lg(R + 1) + lg(R - E + 1)


def skip_length(R: int, E: int, u: float) -> int:
    """Number of empty reveals before the next eligible one, by inversion.

    ``R`` edges remain unrevealed and ``E`` of them are eligible, so the
    count ``J`` satisfies ``P(J >= j) = C(R-j, E) / C(R, E)``.  ``u`` must
    lie in ``(0, 1]``; the result is the largest ``j`` with survival above
    ``u``.
    """
    if E >= R:
        return 0
    jmax = R - E
    logu = math.log(u)
    # Continuous approximation (1 - j/R)**E, then walk to the exact answer.
    j = int(-R * math.expm1(logu / E))
    j = min(max(j, 0), jmax)
    ls = _log_survival(R, E, j)
    while j > 0 and ls <= logu:
        ls -= math.log1p(-E / (R - j + 1))
        j -= 1
    while j < jmax:
        nxt = ls + math.log1p(-E / (R - j))
        if nxt <= logu:
            break
        ls = nxt
        j += 1
    return j


def run_skip_chain(config: SimConfig, rep_index: int = 0) -> Trajectory:
    """Graph-free engine tracking only the active set.

    At step ``t -> t+1`` an active pair merges with probability
    ``C(a,2)/(N-t)`` and an active is absorbed by a stubborn vertex with
    probability ``k*a/(N-t)``.  Runs of empty steps are skipped in one draw
    from their exact law (:func:`skip_length`).
    """
    _check_edge_model(config)
    n, k, m, N = config.n, config.k, config.m, config.N_total
    rng = rep_rng(config.seed, rep_index)
    state = ProcessState(n, k)
    rec = _Recorder(config, state)
    t = 0
    while True:
        a = state.a
        pairs = a * (a - 1) // 2
        eligible = pairs + k * a
        if eligible == 0:
            break
        t += skip_length(N - t, eligible, 1.0 - rng.random()) + 1
        if t > m:
            break
        rec.before_event(t)
        if rng.randrange(eligible) < pairs:
            u, v = state.random_active_pair(rng)
            _merge(state, u, v, rng)
        else:
            state.absorb(n + rng.randrange(k), state.random_active(rng))
    return rec.finish(config, m, rep_index)


def _protocol_edge(state: ProcessState, edges: list[tuple[int, int]], rec: _Recorder,
                   rng: random.Random) -> int:
    n = state.n
    cand = list(edges)
    rounds = 0
    while cand:
        i = rng.randrange(len(cand))
        u, v = cand[i]
        last = cand.pop()
        if i < len(cand):
            cand[i] = last
        # Eligibility only ever decreases, so dropping stale edges keeps the
        # draw uniform over the currently eligible ones.
        if not state.is_active(u):
            continue
        if v >= n:
            rounds += 1
            rec.before_event(rounds)
            state.absorb(v, u)
        elif state.is_active(v):
            rounds += 1
            rec.before_event(rounds)
            _merge(state, u, v, rng)
    return rounds


def _protocol_vertex(state: ProcessState, edges: list[tuple[int, int]], rec: _Recorder,
                     rng: random.Random) -> int:
    n = state.n
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        nbrs[u].add(v)
        if v < n:
            nbrs[v].add(u)
    cand = [u for u in range(n) if nbrs[u]]
    pos = [-1] * n
    for i, u in enumerate(cand):
        pos[u] = i

    def drop(u):
        i = pos[u]
        if i < 0:
            return
        last = cand.pop()
        if last != u:
            cand[i] = last
            pos[last] = i
        pos[u] = -1

    rounds = 0
    while cand:
        u = cand[rng.randrange(len(cand))]
        v = rng.choice(sorted(nbrs[u]))
        rounds += 1
        rec.before_event(rounds)
        # A contacted stubborn vertex absorbs the contacting one.
        winner, loser = (v, u) if v >= n else (u, v)
        state.absorb(winner, loser)
        for w in nbrs[loser]:
            if w < n:
                nbrs[w].discard(loser)
                if not nbrs[w]:
                    drop(w)
        nbrs[loser] = set()
        drop(loser)
    return rounds


def sample_graph(config: SimConfig, rng: random.Random) -> list[tuple[int, int]]:
    """``m`` distinct edges of the underlying graph, uniformly at random."""
    return [edge_pair(config.n, e) for e in sample_edge_prefix(config.N_total, config.m, rng)]


def run_fixed_graph_protocol(config: SimConfig, rep_index: int = 0) -> Trajectory:
    """Draw the graph, then run the protocol on it until all actives are isolated.

    Checkpoints count protocol rounds (one absorption per round).
    """
    rng = rep_rng(config.seed, rep_index)
    state = ProcessState(config.n, config.k)
    rec = _Recorder(config, state)
    edges = sample_graph(config, rng)
    if config.mode is Mode.EDGE:
        rounds = _protocol_edge(state, edges, rec, rng)
    else:
        rounds = _protocol_vertex(state, edges, rec, rng)
    return rec.finish(config, rounds, rep_index)


ENGINES: dict[Engine, Callable[[SimConfig, int], Trajectory]] = {
    Engine.PERMUTATION_REVEAL: run_permutation_reveal,
    Engine.SKIP_CHAIN: run_skip_chain,
    Engine.FIXED_GRAPH: run_fixed_graph_protocol,
}


def run_replication(config: SimConfig, rep_index: int) -> Trajectory:
    return ENGINES[config.engine](config, rep_index)


def _run_chunk(args: tuple[SimConfig, range]) -> list[Trajectory]:
    config, reps = args
    return [run_replication(config, r) for r in reps]


def _chunks(total: int, parts: int) -> list[range]:
    size = max(1, -(-total // (parts * 4)))
    return [range(i, min(i + size, total)) for i in range(0, total, size)]


def run_replications(config: SimConfig, threads: int = 1) -> list[Trajectory]:
    """All ``config.reps`` replications, returned in rep_index order.

    ``threads > 1`` farms chunks out to worker processes; each replication
    seeds itself from ``(seed, rep_index)`` so the output is the same.
    """
    if threads <= 1 or config.reps == 1:
        return _run_chunk((config, range(config.reps)))
    out: list[Trajectory] = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_run_chunk, [(config, c) for c in _chunks(config.reps, threads)]):
            out.extend(part)
    return out


def run_until_k_roots(config: SimConfig, target_k: int, rep_index: int = 0) -> tuple[int, ...]:
    """Fragment sizes, ordered by root id, when ``a`` first equals ``target_k``.

    Stubborn-free skip chain with ``m = N_total``.  Each event is a uniform
    merge of two actives and the waiting times do not affect sizes, so only
    the events are drawn.
    """
    if config.k != 0:
        raise ConfigError("run_until_k_roots requires k=0")
    n = config.n
    if not 1 <= target_k <= n:
        raise ConfigError(f"target_k must satisfy 1 <= target_k <= n={n}, got {target_k}")
    rng = rep_rng(config.seed, rep_index)
    state = ProcessState(n)
    while state.a > target_k:
        u, v = state.random_active_pair(rng)
        _merge(state, u, v, rng)
    return tuple(state.fragment_size[r] for r in state.roots())


# Exact oracles ------------------------------------------------------------

def _absorbed(sizes: tuple[int, ...], winner: int, loser: int) -> tuple[int, ...]:
    s = list(sizes)
    s[winner] += s[loser]
    s[loser] = 0
    return tuple(s)


def _outcome_of(sizes: tuple[int, ...], n: int) -> Outcome:
    ind = sorted((s for s in sizes[:n] if s), reverse=True)
    return Outcome(len(ind), tuple(ind), tuple(sizes[n:]))


def _branches(sizes, u, v, n):
    """(weight, next sizes) for revealing/choosing edge u<v."""
    if not sizes[u]:
        return [(Fraction(1), sizes)]
    if v >= n:
        return [(Fraction(1), _absorbed(sizes, v, u))]
    if not sizes[v]:
        return [(Fraction(1), sizes)]
    half = Fraction(1, 2)
    return [(half, _absorbed(sizes, u, v)), (half, _absorbed(sizes, v, u))]


def _has_eligible(sizes, edges, n):
    return any(sizes[u] and (v >= n or sizes[v]) for u, v in edges)


def enumerate_process_outcomes(n: int, m: int, k: int = 0,
                               max_states: int = 500_000) -> dict[Outcome, Fraction]:
    """Exact law of the final state after revealing ``m`` random edges.

    Brute force over every ordered choice of ``m`` distinct edges and every
    coin flip, memoised on (revealed set, fragment sizes).  Raises
    :class:`EnumerationTooLarge` past ``max_states`` memo entries.
    """
    N = total_edges(n, k)
    if n < 1 or not 0 <= m <= N:
        raise ConfigError(f"need n >= 1 and 0 <= m <= {N}")
    edges = [edge_pair(n, e) for e in range(N)]
    memo: dict[tuple[int, tuple[int, ...]], dict[Outcome, Fraction]] = {}

    def go(mask: int, sizes: tuple[int, ...], left: int) -> dict[Outcome, Fraction]:
        if left == 0 or not _has_eligible(sizes, edges, n):
            return {_outcome_of(sizes, n): Fraction(1)}
        key = (mask, sizes)
        if key in memo:
            return memo[key]
        if len(memo) >= max_states:
            raise EnumerationTooLarge(f"more than {max_states} states for n={n}, m={m}, k={k}")
        free = [e for e in range(N) if not mask >> e & 1]
        p_edge = Fraction(1, len(free))
        acc: dict[Outcome, Fraction] = defaultdict(Fraction)
        for e in free:
            u, v = edges[e]
            for w, nxt in _branches(sizes, u, v, n):
                for out, p in go(mask | 1 << e, nxt, left - 1).items():
                    acc[out] += p_edge * w * p
        memo[key] = dict(acc)
        return memo[key]

    return go(0, tuple([1] * (n + k)), m)


def enumerate_ordering_outcomes(n: int, edges: Sequence[tuple[int, int]],
                                k: int = 0) -> dict[Outcome, Fraction]:
    """Exact law of the reveal process run over a uniform order of a fixed edge set."""
    edges = [tuple(sorted(e)) for e in edges]
    memo: dict[tuple[int, tuple[int, ...]], dict[Outcome, Fraction]] = {}

    def go(mask, sizes):
        if mask == (1 << len(edges)) - 1 or not _has_eligible(sizes, edges, n):
            return {_outcome_of(sizes, n): Fraction(1)}
        key = (mask, sizes)
        if key in memo:
            return memo[key]
        free = [i for i in range(len(edges)) if not mask >> i & 1]
        p_edge = Fraction(1, len(free))
        acc = defaultdict(Fraction)
        for i in free:
            for w, nxt in _branches(sizes, *edges[i], n):
                for out, p in go(mask | 1 << i, nxt).items():
                    acc[out] += p_edge * w * p
        memo[key] = dict(acc)
        return memo[key]

    return go(0, tuple([1] * (n + k)))


def enumerate_protocol_outcomes(n: int, edges: Sequence[tuple[int, int]], k: int = 0,
                                mode: Mode = Mode.EDGE) -> dict[Outcome, Fraction]:
    """Exact law of the fixed-graph protocol on a given edge set."""
    edges = [tuple(sorted(e)) for e in edges]
    mode = Mode(mode)
    memo: dict[tuple[int, ...], dict[Outcome, Fraction]] = {}

    def moves(sizes):
        if mode is Mode.EDGE:
            live = [(u, v) for u, v in edges if sizes[u] and (v >= n or sizes[v])]
            return [(Fraction(1, len(live)) * w, nxt)
                    for u, v in live for w, nxt in _branches(sizes, u, v, n)]
        nb = defaultdict(list)
        for u, v in edges:
            if sizes[u] and (v >= n or sizes[v]):
                nb[u].append(v)
                if v < n:
                    nb[v].append(u)
        out = []
        for u, vs in nb.items():
            for v in vs:
                w = Fraction(1, len(nb) * len(vs))
                out.append((w, _absorbed(sizes, v, u) if v >= n else _absorbed(sizes, u, v)))
        return out

    def go(sizes):
        if sizes in memo:
            return memo[sizes]
        mv = moves(sizes)
        if not mv:
            return {_outcome_of(sizes, n): Fraction(1)}
        acc = defaultdict(Fraction)
        for w, nxt in mv:
            for out, p in go(nxt).items():
                acc[out] += w * p
        memo[sizes] = dict(acc)
        return memo[sizes]

    return go(tuple([1] * (n + k)))


def all_graphs(n: int, m: int, k: int = 0) -> Iterator[tuple[tuple[int, int], ...]]:
    """Every m-edge subgraph of the underlying graph."""
    edges = [edge_pair(n, e) for e in range(total_edges(n, k))]
    return combinations(edges, m)


def final_a_distribution(dist: dict[Outcome, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = defaultdict(Fraction)
    for o, p in dist.items():
        out[o.a] += p
    return dict(out)

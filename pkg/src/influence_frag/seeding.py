"""Per-replication random streams derived from a master seed.

Every replication gets its own stream computed from ``(master_seed,
rep_index)`` alone, so results never depend on how replications are
scheduled across workers.
"""

from __future__ import annotations

import random

import numpy as np

DEFAULT_SEED = 20240101
MAX_SEED = 2**64 - 1


def _sequence(seed: int, rep_index: int, stream: int) -> np.random.SeedSequence:
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if rep_index < 0:
        raise ValueError(f"rep_index must be >= 0, got {rep_index}")
    return np.random.SeedSequence(entropy=seed, spawn_key=(stream, rep_index))


def rep_seed(seed: int, rep_index: int, stream: int = 0) -> int:
    """128-bit integer seed for replication ``rep_index``."""
    words = _sequence(seed, rep_index, stream).generate_state(4, np.uint32)
    return int.from_bytes(words.astype("<u4").tobytes(), "little")


def rep_rng(seed: int, rep_index: int, stream: int = 0) -> random.Random:
    """Scalar-draw stream used by the simulation engines."""
    return random.Random(rep_seed(seed, rep_index, stream))


def rep_generator(seed: int, rep_index: int = 0, stream: int = 1) -> np.random.Generator:
    """Vectorised stream used by the samplers in :mod:`fragmentology`."""
    return np.random.default_rng(_sequence(seed, rep_index, stream))

"""Seed plumbing.

Every random choice in the package draws from a numpy ``Generator`` whose
seed is derived from the user seed plus a tuple of integers naming the
consumer (repetition index, hierarchy level, ...).  Substreams therefore do
not shift when an unrelated consumer draws more or fewer numbers.
"""
from __future__ import annotations

import numpy as np

# stable integer tags for the consumers that share one user seed
STREAM_LDD = 1
STREAM_HIERARCHY = 2
STREAM_COVER = 3
STREAM_EMBED = 4
STREAM_HOPSET = 5
STREAM_ORDERS = 6
STREAM_CLIQUE = 7


def derive_seed(seed: int, *path: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(p) for p in path))


def generator(seed, *path: int) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        ss = np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(int(p) for p in path))
        return np.random.default_rng(ss)
    return np.random.default_rng(derive_seed(seed, *path))


def child_seed(seed: int, *path: int) -> int:
    """A plain 63-bit integer seed for a substream, handy for serialization."""
    return int(derive_seed(seed, *path).generate_state(2, dtype=np.uint32).view(np.uint64)[0] >> 1)

"""Deterministic substream derivation for Monte Carlo work.

Streams are keyed by (master seed, index path) through a counter-based
Philox generator, so a trial's draws depend only on its own key and never
on scheduling, chunking, or worker count.
"""

from __future__ import annotations

import numpy as np

# Tags distinguishing the purpose of a substream under one (seed, trial) key.
DESIGN_TAG = 0
NOISE_TAG = 1
SIGNS_TAG = 2
DIRECTIONS_TAG = 3

_MAX_KEY = 2**32 - 1


def substream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream keyed by a master seed and an index path."""
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    key = []
    for part in path:
        part = int(part)
        if not 0 <= part <= _MAX_KEY:
            raise ValueError("stream path entries must fit in 32 bits")
        key.append(part)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(seed=ss))


def derive_seed(seed: int, *path: int) -> int:
    """A fresh 64-bit master seed for an independent pipeline stage."""
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(p) for p in path))
    hi, lo = ss.generate_state(2)
    return (int(hi) << 32) | int(lo)

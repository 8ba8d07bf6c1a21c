"""Deterministic, splittable random streams.

All randomness in the package flows from a single integer seed.  Streams are
derived with a counter-based Philox generator keyed by ``(seed, *path)``, so a
replicate's output never depends on how many workers ran before it.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20240817


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return an independent generator for the sub-stream ``(seed, *path)``.

    ``path`` is a tuple of non-negative integers naming the consumer, e.g.
    ``stream(seed, experiment_index, replicate_chunk)``.  Identical arguments
    give bit-identical streams regardless of call order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))

"""Seeded random streams.

Every stream is a Philox counter-based generator keyed by a root seed and a
tuple of integer stream ids (for example ``(trial,)`` or ``(trial, restart)``).
Streams with different ids are statistically independent, and the mapping
``(seed, ids) -> stream`` does not depend on execution order, so serial and
parallel runs draw identical numbers.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed=None, *stream: int) -> np.random.Generator:
    """Return a Philox generator for ``seed`` restricted to sub-stream ``stream``.

    A ``Generator`` passed as ``seed`` is returned unchanged (``stream`` must be
    empty in that case).
    """
    if isinstance(seed, np.random.Generator):
        if stream:
            raise ValueError("cannot derive a sub-stream from a live Generator")
        return seed
    if isinstance(seed, np.random.SeedSequence):
        ss = np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(stream))
    else:
        ss = np.random.SeedSequence(seed, spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))

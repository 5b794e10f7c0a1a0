"""Counter-keyed random streams.

Every stochastic step draws from a ``numpy.random.Generator`` keyed by a master
seed and a tuple of non-negative integers, so results never depend on call
order, host, or worker count.
"""

from __future__ import annotations

import numpy as np

# first spawn-key component, separating independent uses of one master seed
NETWORK = 1
DYNAMICS = 2
SELECTION = 3
RESHUFFLE = 4
MISC = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    """Generator for ``(seed, key...)``; identical inputs give identical draws."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)

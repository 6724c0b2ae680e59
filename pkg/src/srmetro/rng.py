"""Seeded random streams.

Every stochastic draw in the package comes from a Philox generator keyed by
the master seed plus a tuple naming its purpose, so a value never depends on
how many other draws happened before it or on which thread made them.
"""

import numpy as np

DEFAULT_SEED = 20140915

# purpose tags (first element of the spawn key)
POSITIONS = 0
SINGLE_RUN = 1
MC_POINT = 2


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))

"""Deterministic stream derivation for seeded, parallelisable generation.

Every random draw in the generator comes from a stream keyed by
(seed, image index, anomaly index, rater index), so results do not
depend on worker count or execution order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# stream tag for the source-pairing permutation, disjoint from image indices
PAIRING_STREAM = 0x50414952


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for (seed, *key); same inputs give the same stream.

    The key length is folded into the entropy: SeedSequence zero-pads
    short entropy up to its pool size, so without it (s, i) and
    (s, i, 0, 0) would seed identical streams.
    """
    entropy = tuple(int(k) & _MASK64 for k in (len(key), seed, *key))
    return np.random.default_rng(np.random.SeedSequence(entropy))

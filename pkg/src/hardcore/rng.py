"""Counter-based random streams.

A stream is addressed by ``(seed, index, block)``: the seed and index form
the Philox key and the block sits in the top word of the counter, so
distinct addresses never overlap in practice and any block can be
regenerated on its own.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# block tags for streams that are not CFTP epochs
GLAUBER = 1 << 62
MONOTONICITY = (1 << 62) + 1


def stream(seed: int, index: int = 0, block: int = 0) -> np.random.Generator:
    if seed < 0 or index < 0 or block < 0:
        raise ValueError("stream address must be nonnegative")
    bitgen = np.random.Philox(key=[seed & MASK64, index & MASK64], counter=[0, 0, 0, block & MASK64])
    return np.random.Generator(bitgen)

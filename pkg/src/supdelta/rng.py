"""Counter-based random streams for reproducible parallel replicates.

Every replicate draws from its own Philox substream keyed by
(base seed, stream id, replicate index), so results are independent of
evaluation order and worker count.
"""

import numpy as np

# Stream ids used by the experiment harness.
STREAM_STAT = 0
STREAM_LIMIT = 1
STREAM_AUX = 2


def substream(seed: int, stream: int, index: int) -> np.random.Generator:
    """Return the generator for replicate `index` of stream `stream`.

    The mapping (seed, stream, index) -> bit stream is injective and has no
    shared mutable state, so replicates can be generated in any order or in
    parallel and still be bit-identical.
    """
    if index < 0:
        raise ValueError("replicate index must be >= 0")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(ss))

import numpy as np


def make_rng(seed, *keys):
    """Counter-based generator for ``seed``, optionally split by integer ``keys``.

    The same ``(seed, *keys)`` always yields the same stream, and distinct
    key tuples yield independent streams.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

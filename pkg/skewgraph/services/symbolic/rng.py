"""Counter-based random streams keyed by (seed, stream, index).

Every random draw in skewgraph comes from a Philox generator whose key is derived from the
experiment seed and a stream path. Draw i of a Monte-Carlo loop uses the path (..., i), so
results do not depend on how the loop is split across threads.
"""

import hashlib

import numpy as np

from skewgraph.exceptions import ValidationError


def stream_id(name: str) -> int:
    """Stable 32-bit integer for a stream name."""
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:4], "big")


def make_rng(seed: int, *path: int | str) -> np.random.Generator:
    """
    Build the generator for one stream.

    Args:
        seed: Experiment seed (nonnegative)
        *path: Stream names or integer indices identifying the draw

    Returns:
        A Philox-backed numpy Generator

    Raises:
        ValidationError: If the seed is negative
    """
    if seed is None or int(seed) < 0:
        raise ValidationError("Seed must be a nonnegative integer", "seed")
    entropy = [int(seed)] + [stream_id(p) if isinstance(p, str) else int(p) for p in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

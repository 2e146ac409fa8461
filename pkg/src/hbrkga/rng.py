"""Deterministic random sub-streams.

Every consumer of randomness asks for a stream keyed by ``(seed, *path)``.
Streams with different paths are statistically independent, and a stream
depends only on its key, so the order in which concurrent workers run never
changes what they draw.
"""

import hashlib

import numpy as np

# Stream purposes used by the optimizers.
INIT = 0
MUTANTS = 1
CROSSOVER = 2
WALK = 3
SAMPLE = 4
TRAIN = 5


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for sub-stream ``path`` of master ``seed``."""
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(seq)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary printable parts.

    Used where a seed must be derived from names (e.g. strategy labels), which
    ``hash()`` cannot do reproducibly across interpreter runs.
    """
    text = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "little")

"""Seed derivation.

Every stochastic routine is driven by a ``numpy.random.Generator`` or an
integer seed. Independent streams are derived with ``SeedSequence`` spawn
keys so that, e.g., replication 17 of a study cell can be rerun alone.
"""
from __future__ import annotations

import numpy as np

SeedLike = int | np.random.Generator | np.random.SeedSequence | None


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def kernel_seed(rng: np.random.Generator) -> int:
    """32-bit seed for the compiled generator, drawn from ``rng``."""
    return int(rng.integers(0, 2**32, dtype=np.uint64))


def seed_to_kernel(seed: int) -> int:
    """Deterministic 32-bit kernel seed from a 64-bit user seed."""
    return int(np.random.SeedSequence(_nonneg(seed)).generate_state(1, np.uint32)[0])


def derive(seed: int, *key: int) -> np.random.SeedSequence:
    """Child stream of ``seed`` identified by the integer path ``key``."""
    return np.random.SeedSequence(_nonneg(seed), spawn_key=tuple(int(k) for k in key))


def _nonneg(seed: int) -> int:
    # SeedSequence rejects negatives; fold them into the unsigned range
    return int(seed) % 2**64

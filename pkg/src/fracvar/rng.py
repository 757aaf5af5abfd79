"""Reproducible random streams keyed by (base seed, labels...)."""
from __future__ import annotations

import hashlib
import os

import numpy as np

SEED_ENV = "FRACVAR_SEED"
MASK64 = (1 << 64) - 1


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & MASK64
    digest = hashlib.blake2b(str(key).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(seed: int | None, *keys) -> np.random.Generator:
    """Counter-based (Philox) generator for the stream named by ``keys``.

    Streams for distinct keys are independent, and adding new keys elsewhere
    never perturbs an existing stream.
    """
    if seed is None:
        seed = default_seed()
    entropy = [int(seed) & MASK64] + [_key_to_int(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        return int(env) & MASK64
    return 0

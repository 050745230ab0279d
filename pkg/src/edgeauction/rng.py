"""Seed derivation.

Every random draw in a run comes from a generator keyed by
``(master_seed, purpose, *index)``. Keys are independent of how many other
keys are used, so extending a sweep never perturbs draws already made.
"""

import zlib

import numpy as np

from .errors import ConfigError

MAX_SEED = 2**64 - 1


def _tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def check_seed(seed, field="seed") -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError(field, f"expected a non-negative integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(field, f"must lie in [0, 2**64 - 1], got {seed}")
    return seed


def seed_sequence(seed: int, purpose: str, *index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(check_seed(seed), spawn_key=(_tag(purpose), *map(int, index)))


def substream(seed: int, purpose: str, *index: int) -> np.random.Generator:
    """Generator for one ``(purpose, index)`` cell under ``seed``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, purpose, *index)))


def derive_seed(seed: int, purpose: str, *index: int) -> int:
    """A 64-bit child seed, for APIs that take an integer seed rather than a generator."""
    return int(seed_sequence(seed, purpose, *index).generate_state(1, np.uint64)[0])

"""Seed plumbing. Every random operation takes ``seed`` as an int, a
``numpy.random.SeedSequence`` or ``None`` and derives child streams from it
so that sub-computations are reproducible in isolation."""

import zlib

import numpy as np


def seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        raise TypeError("pass an int or SeedSequence, not a Generator")
    return np.random.SeedSequence(seed)


def rng(seed):
    return np.random.default_rng(seed_sequence(seed))


def child(seed, *key):
    """Deterministic child stream of ``seed`` addressed by integer ``key``."""
    ss = seed_sequence(seed)
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(int(k) for k in key))


def stable_hash(text):
    """32-bit hash of a string that does not change between interpreter runs."""
    return zlib.crc32(text.encode("utf-8"))


def as_int(seed):
    """Collapse a seed to a single 32-bit integer (for display and CSV)."""
    return int(seed_sequence(seed).generate_state(1)[0])

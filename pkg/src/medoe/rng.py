"""Seed derivation: one root seed, named counter-based substreams."""

import hashlib

import numpy as np


def _words(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def seed_sequence(root_seed: int, *names) -> np.random.SeedSequence:
    """Derive a SeedSequence from (root_seed, component names).

    Hash-based so the stream depends only on the names, never on call order.
    """
    entropy = [int(root_seed) & 0xFFFFFFFFFFFFFFFF]
    for name in names:
        entropy.extend(_words(str(name)))
    return np.random.SeedSequence(entropy)


def stream(root_seed: int, *names) -> np.random.Generator:
    """Counter-based (Philox) generator for a named component."""
    return np.random.Generator(np.random.Philox(seed_sequence(root_seed, *names)))


def env_streams(root_seed: int, scope: str, num_envs: int) -> list[np.random.Generator]:
    """One independent stream per parallel environment index."""
    return [stream(root_seed, scope, "env", i) for i in range(num_envs)]

"""Reproducible randomness: counter-based Philox streams with explicit seeds.

Every stochastic operation in the package takes a ``numpy.random.Generator``.
Streams are derived from a root seed via ``SeedSequence.spawn`` so that
per-shot streams are independent and a (seed, shot_index) pair pins down a
shot exactly.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def spawn_streams(seed: int, count: int) -> list[np.random.Generator]:
    """Independent child streams, stable under the root seed."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(s)) for s in children]


def shot_rng(seed: int, shot_index: int) -> np.random.Generator:
    """Stream for one shot, reproducible without generating earlier shots."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(shot_index,)))
    )


def random_pure_amplitudes(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform unit vector of complex amplitudes."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre ensemble."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real

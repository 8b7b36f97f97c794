"""Deterministic chunked sampling.

Every Monte Carlo loop in the package draws its samples in fixed-size
chunks.  Chunk ``i`` of a draw with integer ``seed`` on stream ``stream``
uses the generator

    numpy.random.default_rng(SeedSequence(entropy=(seed, stream), spawn_key=(i,)))

so the sample set depends only on ``(seed, stream, n, chunk_size)`` and never
on the number of worker threads.  Partial results are always reduced in
chunk order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, TypeVar

import numpy as np

T = TypeVar("T")

CHUNK_SIZE = 1 << 15

# Stream identifiers keep unrelated draws that share a seed independent.
STREAM_VOLUME = 1
STREAM_DIRECTIONS = 2
STREAM_GRAM = 3
STREAM_SUBLEVEL = 4
STREAM_PROBE = 5

_threads: int | None = None


def set_threads(n: int | None) -> None:
    """Bound the worker pool used by :func:`map_chunks` (``None`` = cpu count)."""
    global _threads
    if n is not None and n < 1:
        raise ValueError("thread count must be positive")
    _threads = n


def get_threads() -> int:
    return _threads or os.cpu_count() or 1


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> list[int]:
    if n <= 0:
        raise ValueError("sample count must be positive")
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def chunk_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=(int(seed) & 0xFFFFFFFFFFFFFFFF, stream), spawn_key=(index,))
    return np.random.default_rng(ss)


def iter_chunks(n: int, seed: int, stream: int,
                chunk_size: int = CHUNK_SIZE) -> Iterator[tuple[int, int, np.random.Generator]]:
    for i, size in enumerate(chunk_sizes(n, chunk_size)):
        yield i, size, chunk_rng(seed, stream, i)


def map_chunks(fn: Callable[[np.random.Generator, int, int], T], n: int, seed: int,
               stream: int, chunk_size: int = CHUNK_SIZE,
               threads: int | None = None) -> list[T]:
    """Apply ``fn(rng, size, index)`` to every chunk; results come back in chunk order."""
    jobs = list(iter_chunks(n, seed, stream, chunk_size))
    workers = min(threads or get_threads(), len(jobs))
    if workers <= 1:
        return [fn(rng, size, i) for i, size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(job[2], job[1], job[0]), jobs))


def uniform_sphere(rng: np.random.Generator, size: int, real_dim: int) -> np.ndarray:
    """Uniform points on the unit sphere of R^real_dim, shape (size, real_dim)."""
    x = rng.standard_normal((size, real_dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def derive_seed(seed: int, *keys: int) -> int:
    """Stable 63-bit child seed for ``(seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=(int(seed) & 0xFFFFFFFFFFFFFFFF, *keys))
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 31) ^ int(lo)

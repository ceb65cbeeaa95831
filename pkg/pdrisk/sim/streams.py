"""Counter-derived random streams and chunked parallel evaluation.

Replicates are split into chunks of ``CHUNK_SIZE``. Chunk ``k`` of stream
``s`` always draws from ``SeedSequence(seed, spawn_key=(s, k))``, so a result
depends only on the seed and the chunk layout, never on the worker count.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

from .. import utils

logger = logging.getLogger(__name__)

CHUNK_SIZE = 2**16
DEFAULT_THREADS = 1

T = TypeVar("T")

# stream ids keep unrelated draws apart under one master seed
STREAM_X = 0
STREAM_IMPORTANCE = 1
STREAM_UNBIASED = 2


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def map_chunks(
    fn: Callable[[np.random.Generator, int], T],
    n: int,
    seed: int,
    *,
    stream: int = STREAM_X,
    threads: int = DEFAULT_THREADS,
    chunk_size: int = CHUNK_SIZE,
) -> list[T]:
    """Evaluate ``fn(rng, size)`` on every chunk and return results in chunk order."""

    sizes = utils.chunk_sizes(n, chunk_size)
    jobs = [(chunk_rng(seed, stream, idx), size) for idx, size in enumerate(sizes)]
    if threads <= 1 or len(jobs) == 1:
        return [fn(rng, size) for rng, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, rng, size) for rng, size in jobs]
        return [future.result() for future in futures]


def mean_and_se(parts: Sequence[tuple[int, float, float]]) -> tuple[float, float, int]:
    """Combine per-chunk ``(count, mean, m2)`` summaries into ``(mean, se, n)``."""

    total, mean, m2 = utils.combine_moments(parts)
    if total < 2:
        return mean, float("nan"), total
    variance = m2 / (total - 1)
    return mean, float(np.sqrt(variance / total)), total


def resolve_seed(seed: int | None) -> int:
    """Return ``seed`` or draw a fresh one from OS entropy and log it."""

    if seed is not None:
        return int(seed)
    fresh = int(np.random.SeedSequence().entropy % 2**63)
    logger.info("Generated seed=%s", fresh)
    return fresh


__all__ = [
    "CHUNK_SIZE",
    "STREAM_IMPORTANCE",
    "STREAM_UNBIASED",
    "STREAM_X",
    "chunk_rng",
    "map_chunks",
    "mean_and_se",
    "resolve_seed",
]

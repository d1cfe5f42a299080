"""Counter-based random streams, one per (seed, purpose, path index).

Every path owns a Philox generator keyed by the master seed and a purpose
word, positioned by the path index in the counter. Results therefore depend
only on (seed, purpose, index), never on how paths are split across threads.
"""

import concurrent.futures
import logging
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from _levybsde import constants
from _levybsde.utils import worker_count

logger = logging.getLogger(__name__)

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


def path_generator(seed: int, stream: int, index: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    counter = np.array([0, index & _MASK64, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def chunk_bounds(count: int, chunk_size: int = constants.PATH_CHUNK_SIZE):
    return [(lo, min(lo + chunk_size, count)) for lo in range(0, count, chunk_size)]


def map_paths(
    func: Callable[[int, np.random.Generator], T],
    count: int,
    seed: int,
    stream: int,
    workers: Optional[int] = None,
    chunk_size: int = constants.PATH_CHUNK_SIZE,
) -> List[T]:
    """Evaluate ``func(index, generator)`` for every path index, in index order."""

    def run_chunk(bounds):
        lo, hi = bounds
        return [func(i, path_generator(seed, stream, i)) for i in range(lo, hi)]

    chunks = chunk_bounds(count, chunk_size)
    workers = min(worker_count(workers), max(1, len(chunks)))
    if workers == 1:
        results = [run_chunk(bounds) for bounds in chunks]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            # map keeps submission order, which is index order
            results = list(pool.map(run_chunk, chunks))
    return [item for chunk in results for item in chunk]


def mean_and_se(values: Sequence[float]):
    """Sample mean and its standard error; numpy's pairwise summation keeps it order-stable."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    mean = float(np.mean(values))
    if values.size == 1:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))

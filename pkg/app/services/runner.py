"""
Worker pool and deterministic per-unit random sources
"""
import logging
import multiprocessing as mp
from typing import Any, Callable, Iterable, List, Optional

import numpy as np

from ..config import settings

logger = logging.getLogger(__name__)


def trial_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Generator for one work unit, derived from (master_seed, *keys)"""
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys)))


def resolve_seed(rng_or_seed: Any) -> int:
    """Master seed from an int, a Generator (one draw), or None (settings)"""
    if rng_or_seed is None:
        return int(settings.MASTER_SEED)
    if isinstance(rng_or_seed, np.random.Generator):
        return int(rng_or_seed.integers(0, 2 ** 63 - 1))
    return int(rng_or_seed)


def chunk_sizes(total: int, chunk: int) -> List[int]:
    """Split ``total`` into fixed-size chunks (independent of worker count)"""
    if total < 1:
        return []
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


class WorkerPoolManager:
    """Manages a multiprocessing pool for independent Monte-Carlo units"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = max(1, int(workers if workers is not None else settings.WORKERS))
        self.pool = None

    def initialize(self):
        """Start the pool (no-op for a single worker)"""
        if self.workers > 1 and self.pool is None:
            try:
                self.pool = mp.get_context().Pool(self.workers)
                logger.info(f"✅ Worker pool started with {self.workers} processes")
            except Exception as e:
                logger.error(f"❌ Failed to start worker pool: {e}")
                raise

    def close(self):
        if self.pool is not None:
            self.pool.close()
            self.pool.join()
            self.pool = None
            logger.info("Worker pool closed")

    def __enter__(self):
        self.initialize()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def map(self, fn: Callable[[Any], Any], tasks: Iterable[Any]) -> List[Any]:
        """Run ``fn`` over tasks, results in task order"""
        tasks = list(tasks)
        if self.pool is None:
            return [fn(task) for task in tasks]
        return self.pool.map(fn, tasks, chunksize=1)

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

from ..settings import THREADS

logger = logging.getLogger(__name__)


def parallel_map(fn: Callable, items: Iterable, threads: int | None = None) -> list:
    """fn を items に適用し、入力順のリストを返します。

    threads (既定は SENSORNET_THREADS) が 1 なら逐次実行します。
    """
    items = list(items)
    workers = THREADS if threads is None else max(1, threads)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))

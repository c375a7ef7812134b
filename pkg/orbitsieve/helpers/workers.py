"""Bounded worker pool shared by the enumeration, factoring and closure code."""

import logging
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def make_executor(max_workers: int) -> Executor:
    """Process pool on the fork context, or a thread pool where fork is unavailable."""
    try:
        ctx = multiprocessing.get_context("fork")
        return ProcessPoolExecutor(max_workers=max_workers, mp_context=ctx)
    except (ValueError, OSError) as exc:
        logger.warning("process pool unavailable (%s), falling back to threads", exc)
        return ThreadPoolExecutor(max_workers=max_workers)


def pool_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Ordered map of ``fn`` over ``items``; runs inline when workers <= 1.

    ``fn`` must be a module-level function so it can be sent to worker processes.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with make_executor(min(workers, len(items))) as executor:
        return list(executor.map(fn, items))


def chunked(items: list[T], parts: int) -> list[list[T]]:
    """Split ``items`` into at most ``parts`` contiguous, nearly equal chunks."""
    if parts <= 1 or len(items) <= 1:
        return [items]
    size = -(-len(items) // parts)
    return [items[i : i + size] for i in range(0, len(items), size)]

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from src.core.loader import get_thread_count

T = TypeVar('T')
R = TypeVar('R')


def run_ordered(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map fn over items, on NSPOMDP_THREADS workers when more than one; results keep input order."""
    items = list(items)
    workers = min(get_thread_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

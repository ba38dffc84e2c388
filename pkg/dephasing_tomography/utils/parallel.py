"""
Deterministic fan-out of independent indexed tasks.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar

T = TypeVar('T')


def run_indexed(task: Callable[[int], T], count: int, threads: int = 1) -> List[T]:
    """
    Run task(0) ... task(count - 1) and return the results in index order.

    Results are identical for any thread count because every task derives its
    own randomness from its index.

    Args:
        task: Callable taking a run index
        count: Number of tasks
        threads: Worker threads (1 runs serially)

    Returns:
        List of results sorted by index
    """
    if threads <= 1 or count <= 1:
        return [task(index) for index in range(count)]

    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(task, range(count)))

#!/usr/bin/env python3
"""
Task Pool - Sequential and batch (threaded) execution of independent tasks
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Sequence

from src.errors import ConfigError

logger = logging.getLogger(__name__)


class TaskPool:
    """Runs independent tasks one by one or on a pool of worker threads

    Results always come back in submission order, so merging is deterministic
    whatever the scheduling.
    """

    def __init__(self, jobs: int = 1, verbose: bool = False):
        """Initialize the pool with a worker count"""
        if jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {jobs}", field="jobs")
        self.jobs = jobs
        self.verbose = verbose

    def run(self, fn: Callable[[Any], Any], tasks: Sequence[Any],
            describe: Optional[Callable[[Any], str]] = None) -> List[Any]:
        """Pick batch mode when more than one worker is configured"""
        if self.jobs > 1 and len(tasks) > 1:
            return self.run_batch(fn, tasks, describe)
        return self.run_sequential(fn, tasks, describe)

    def run_sequential(self, fn: Callable[[Any], Any], tasks: Sequence[Any],
                       describe: Optional[Callable[[Any], str]] = None) -> List[Any]:
        """
        Run tasks one after another

        Args:
            fn: Function applied to each task
            tasks: Task descriptions (any picklable or plain values)
            describe: Optional label function for progress messages
        """
        if self.verbose:
            print(f"Running {len(tasks)} task(s) (sequential mode)")

        results = []
        for task in tasks:
            start = time.time()
            results.append(fn(task))
            if self.verbose and describe:
                print(f"  - {describe(task)} done in {time.time() - start:.1f}s")
        return results

    def run_batch(self, fn: Callable[[Any], Any], tasks: Sequence[Any],
                  describe: Optional[Callable[[Any], str]] = None) -> List[Any]:
        """Run tasks concurrently on `jobs` threads"""
        if self.verbose:
            print(f"Running {len(tasks)} task(s) (batch mode, {self.jobs} workers)")

        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            futures = [executor.submit(fn, task) for task in tasks]
            results = []
            for task, future in zip(tasks, futures):
                results.append(future.result())
                if self.verbose and describe:
                    print(f"  - {describe(task)} done")
        logger.debug("Batch of %d task(s) finished", len(tasks))
        return results

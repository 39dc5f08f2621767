"""
Tests for sequential and threaded task execution
"""
import time

import pytest

from src.errors import ConfigError
from src.pool import TaskPool


class TestTaskPool:

    @pytest.mark.parametrize("jobs", [0, -2])
    def test_invalid_jobs(self, jobs):
        with pytest.raises(ConfigError) as err:
            TaskPool(jobs)
        assert err.value.field == "jobs"

    def test_sequential_order(self):
        assert TaskPool(1).run(lambda t: t * t, [3, 1, 2]) == [9, 1, 4]

    def test_batch_keeps_submission_order(self):
        def slow_first(task):
            # Earlier tasks finish later
            time.sleep(0.01 * (5 - task))
            return task

        assert TaskPool(4).run(slow_first, list(range(5))) == [0, 1, 2, 3, 4]

    def test_batch_matches_sequential(self):
        tasks = list(range(10))
        assert TaskPool(3).run(lambda t: t + 1, tasks) == TaskPool(1).run(lambda t: t + 1, tasks)

    def test_exception_propagates(self):
        def fail(task):
            if task == 2:
                raise RuntimeError("boom")
            return task

        with pytest.raises(RuntimeError):
            TaskPool(2).run(fail, [1, 2, 3])

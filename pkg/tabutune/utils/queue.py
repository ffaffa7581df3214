import asyncio
import concurrent.futures
import logging
import multiprocessing
from typing import Any, TypeVar
from collections.abc import Callable, Sequence

logger = logging.getLogger(__name__)

T = TypeVar("T")


class AsyncTaskQueue:
    """
    Bounded worker pool. Blocking jobs run in a thread executor with at most
    `num_workers` in flight; results are returned in submission order.
    """
    poll_interval = 0.01

    def __init__(self, num_workers: int | None=None):
        if num_workers is None:
            num_workers = multiprocessing.cpu_count()

        self.num_workers = max(1, num_workers)
        self.tasks: list[asyncio.Future[Any]] = []

    @property
    def is_full(self) -> bool:
        return len([task for task in self.tasks if not task.done()]) >= self.num_workers

    async def add(self, loop: asyncio.AbstractEventLoop, executor: concurrent.futures.Executor, job: Callable[[], Any]) -> None:
        while self.is_full:
            await asyncio.sleep(self.poll_interval)

        future = loop.run_in_executor(executor, job)
        future.add_done_callback(self.done_callback)
        self.tasks.append(future)

    def done_callback(self, task: asyncio.Future[Any]) -> None:
        logger.debug(f"finished job {self.tasks.index(task)}")

    async def finish(self) -> list[Any]:
        return list(await asyncio.gather(*self.tasks))

    async def _run(self, jobs: Sequence[Callable[[], T]]) -> list[T]:
        loop = asyncio.get_running_loop()
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.num_workers) as executor:
            for job in jobs:
                await self.add(loop, executor, job)

            return await self.finish()

    def map(self, jobs: Sequence[Callable[[], T]]) -> list[T]:
        if self.num_workers == 1 or len(jobs) <= 1:
            return [job() for job in jobs]

        return asyncio.run(self._run(jobs))

#!/usr/bin/env python3
"""
Trial Worker Pool - background threads that run experiment trials.

Each worker pulls (sweep value, trial) units from a shared queue and reports
through the event bus; nothing here touches the result set directly.
"""
import queue
import threading
from typing import Any, Callable, List, Optional

from event_bus import EventBus, EventType
from logger import get_logger


class TrialWorkerPool:
    """Fixed-size pool of daemon threads executing trial tasks."""

    def __init__(self, run_trial: Callable[[Any], List[Any]], event_bus: EventBus, n_workers: int = 1):
        """Initialize worker pool.

        Args:
            run_trial: Called with one task; returns that task's rows
            event_bus: Where TRIAL_* events go
            n_workers: Number of threads
        """
        if n_workers < 1:
            raise ValueError("n_workers must be >= 1")
        self.run_trial = run_trial
        self.event_bus = event_bus
        self.n_workers = n_workers
        self.logger = get_logger()

        self._tasks: "queue.Queue[Any]" = queue.Queue()
        self._threads: List[threading.Thread] = []
        self._running = False

    def start(self, tasks: List[Any]):
        """Queue every task and start the worker threads."""
        if self._running:
            return
        for task in tasks:
            self._tasks.put(task)

        self._running = True
        for i in range(self.n_workers):
            thread = threading.Thread(target=self._worker_loop, args=(f"trial-worker-{i}",),
                                      daemon=True, name=f"TrialWorker-{i}")
            thread.start()
            self._threads.append(thread)
        self.logger.debug("trial workers started", workers=self.n_workers, tasks=len(tasks))

    def stop(self, timeout: Optional[float] = 5.0):
        """Stop handing out tasks and wait for running trials to return."""
        if not self._running:
            return
        self._running = False
        for thread in self._threads:
            thread.join(timeout=timeout)
        self._threads.clear()
        self.logger.debug("trial workers stopped")

    def _worker_loop(self, name: str):
        while self._running:
            try:
                task = self._tasks.get_nowait()
            except queue.Empty:
                return

            self.event_bus.emit(EventType.TRIAL_STARTED, {'task': task}, source=name)
            try:
                rows = self.run_trial(task)
            except Exception as e:
                self.event_bus.emit(EventType.TRIAL_FAILED, {'task': task, 'error': e}, source=name)
            else:
                self.event_bus.emit(EventType.TRIAL_COMPLETED, {'task': task, 'rows': rows}, source=name)
            finally:
                self._tasks.task_done()

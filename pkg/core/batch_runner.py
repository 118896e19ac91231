"""
Batch Runner
Queue-based pipeline solving many operators with a pool of worker threads.
"""

import queue
import threading
from typing import Callable, List, Optional, Sequence

from utils.environment import worker_count
from utils.logger import setup_logger

logger = setup_logger(__name__)


class BatchRunner:
    """Solves batch entries on worker threads and returns reports in input order."""

    def __init__(self, solve_fn: Callable[[str], object], on_error: Callable[[str, Exception], object],
                 workers: Optional[int] = None):
        """
        Initialize batch runner.

        Args:
            solve_fn: Maps one operator text to a report
            on_error: Builds a report for an entry whose solve raised
            workers: Thread count (defaults to utils.environment.worker_count)
        """
        self.solve_fn = solve_fn
        self.on_error = on_error
        self.workers = workers or worker_count()

        self.job_queue = queue.Queue()
        self.results = {}
        self.results_lock = threading.Lock()

        self.running = False
        self.threads = []

        # Callbacks for finished reports
        self.report_callbacks = []

    def register_report_callback(self, callback: Callable):
        """Register a callback receiving (index, text, report) for each finished entry."""
        self.report_callbacks.append(callback)

    def start(self):
        """Start worker threads."""
        self.running = True
        self.threads = [
            threading.Thread(target=self._worker_loop, daemon=True, name=f"hypsolve-worker-{i}")
            for i in range(self.workers)
        ]
        for thread in self.threads:
            thread.start()
        logger.info(f"Batch runner started with {self.workers} worker(s)")

    def stop(self):
        """Stop worker threads."""
        self.running = False
        for thread in self.threads:
            thread.join(timeout=1)
        self.threads = []
        logger.info("Batch runner stopped")

    def submit(self, index: int, text: str):
        """
        Queue one entry.

        Args:
            index: Position of the entry in the output
            text: Operator expression
        """
        self.job_queue.put((index, text))

    def run(self, entries: Sequence[str]) -> List[object]:
        """
        Solve all entries and wait for completion.

        Args:
            entries: Operator expressions

        Returns:
            Reports in the order of the entries
        """
        self.results = {}
        if not entries:
            return []
        for index, text in enumerate(entries):
            self.submit(index, text)
        self.start()
        self.job_queue.join()
        self.stop()
        return [self.results[i] for i in range(len(entries))]

    def _worker_loop(self):
        """Main worker loop."""
        while self.running:
            try:
                index, text = self.job_queue.get(timeout=1)
            except queue.Empty:
                continue
            try:
                self._handle_job(index, text)
            finally:
                self.job_queue.task_done()

    def _handle_job(self, index: int, text: str):
        """Solve one entry; a failure only affects its own report."""
        try:
            report = self.solve_fn(text)
        except Exception as e:
            logger.error(f"Batch entry {index + 1} failed: {type(e).__name__}: {e}")
            report = self.on_error(text, e)

        with self.results_lock:
            self.results[index] = report

        for callback in self.report_callbacks:
            try:
                callback(index, text, report)
            except Exception as e:
                logger.error(f"Error in report callback: {e}")

        logger.debug(f"Batch entry {index + 1} done")

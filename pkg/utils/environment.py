"""
Runtime Environment Probe
Sizes the worker pool and reports process resource usage.
"""
import os

import psutil

from config.settings import Settings


def cpu_count():
    """
    Number of CPUs usable for batch workers.

    Returns:
        int: Physical core count, falling back to logical count, at least 1
    """
    try:
        count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
    except Exception:
        count = None
    return max(1, count or 1)


def worker_count(env=None):
    """
    Worker threads for batch solving, capped by HYP_SOLVE_THREADS.

    Args:
        env: Mapping used instead of os.environ (tests)

    Returns:
        int: Worker count >= 1
    """
    env = os.environ if env is None else env
    count = min(cpu_count(), Settings.MAX_WORKERS)
    cap = env.get(Settings.THREADS_ENV_VAR)
    if cap:
        try:
            count = min(count, int(cap))
        except ValueError:
            pass
    return max(1, count)


def memory_usage_mb():
    """Resident set size of the current process in MB."""
    try:
        return round(psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024), 1)
    except Exception:
        return 0.0

"""
Fixed-size task partitioning and the process pool used by every sweep.

Task boundaries depend only on GRAMGRID_CHUNK_SIZE, never on the worker count,
and results come back in task order, so aggregates do not change with -w.
"""
import logging
import multiprocessing
import os

from django.conf import settings

from ..exceptions import ValidationError

logger = logging.getLogger(__name__)


def partition(start, stop, chunk=None):
    """Split [start, stop) into consecutive (lo, hi) pairs of at most `chunk` items."""
    chunk = settings.GRAMGRID_CHUNK_SIZE if chunk is None else chunk
    if isinstance(chunk, bool) or int(chunk) != chunk or chunk < 1:
        raise ValidationError(f"Chunk size must be a positive integer, got {chunk!r}")
    chunk = int(chunk)
    return [(lo, min(lo + chunk, stop)) for lo in range(start, stop, chunk)]


def chunked(items, chunk=None):
    return [items[lo:hi] for lo, hi in partition(0, len(items), chunk)]


def _init_worker(settings_module):
    """Pool initializer: each spawned worker sets up Django and pins torch."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', settings_module)
    import django
    django.setup()
    import torch
    torch.set_num_threads(1)


def resolve_workers(workers=None):
    workers = settings.GRAMGRID_WORKERS if workers is None else workers
    return max(1, int(workers))


def run_tasks(func, tasks, workers=None):
    """Map a top-level function over tasks, preserving order."""
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]

    settings_module = os.environ.get('DJANGO_SETTINGS_MODULE', 'gram_grid.settings')
    context = multiprocessing.get_context('spawn')
    logger.info(f"Dispatching {len(tasks)} tasks to {workers} workers")
    with context.Pool(processes=min(workers, len(tasks)),
                      initializer=_init_worker,
                      initargs=(settings_module,)) as pool:
        return pool.map(func, tasks, chunksize=1)

# Numerical laboratory for Higgs bundles over model Hermitian manifolds.
#
# Author: The higgs-flow-lab developers
# Last Change: October 19, 2026

"""Concurrent evaluation of independent solves (exhaustion levels, ε-values) using :mod:`multiprocessing`."""

# Standard library modules.
import logging
import multiprocessing
import os
import signal

# External dependencies.
from humanfriendly import Timer
from humanfriendly.text import pluralize

# Modules included in our package.
from higgs_flow_lab import THREADS_VARIABLE

# Public identifiers that require documentation.
__all__ = (
    'ignore_interrupts',
    'logger',
    'map_concurrent',
    'resolve_threads',
)

# Initialize a logger for this module.
logger = logging.getLogger(__name__)


def map_concurrent(function, arguments, concurrency=1):
    """
    Apply a function to a list of arguments, optionally using a process pool.

    :param function: A module level (picklable) callable that takes one argument.
    :param arguments: An iterable of arguments.
    :param concurrency: The number of worker processes (an integer, 1 means
                        everything runs in the current process).
    :returns: A list with the results, in the order of `arguments`.

    Exceptions raised by `function` propagate to the caller (after the pool
    has been terminated).
    """
    arguments = list(arguments)
    concurrency = max(1, min(int(concurrency), len(arguments) or 1))
    timer = Timer()
    if concurrency == 1:
        results = [function(a) for a in arguments]
    else:
        logger.debug("Evaluating %s using %s ..", pluralize(len(arguments), "job"),
                     pluralize(concurrency, "worker"))
        pool = multiprocessing.Pool(concurrency, initializer=ignore_interrupts)
        try:
            results = pool.map(function, arguments, chunksize=1)
            pool.close()
            pool.join()
        except Exception:
            pool.terminate()
            pool.join()
            raise
    logger.debug("Finished %s in %s.", pluralize(len(arguments), "job"), timer)
    return results


def ignore_interrupts():
    """
    Make a worker process ignore Control-C.

    The parent process receives :exc:`KeyboardInterrupt` and terminates the
    pool; letting the workers raise it as well can deadlock the pool.
    """
    signal.signal(signal.SIGINT, signal.SIG_IGN)


def resolve_threads(option=None, configured=None):
    """
    Decide how many worker processes to use.

    :param option: The value of the ``--threads`` option (an integer or :data:`None`).
    :param configured: The ``threads`` value of the experiment configuration (optional).
    :returns: A positive integer, taken from `option`, the environment
              variable ``$HIGGS_FLOW_LAB_THREADS``, `configured` or 1 (in that order).
    :raises: :exc:`~exceptions.ValueError` when the chosen value isn't a positive integer.
    """
    for source, value in (('--threads', option),
                          ('$%s' % THREADS_VARIABLE, os.environ.get(THREADS_VARIABLE)),
                          ('configuration', configured)):
        if value is not None and value != '':
            try:
                threads = int(value)
            except (TypeError, ValueError):
                threads = 0
            if threads < 1:
                raise ValueError("Invalid thread count from %s, expected a positive integer! (%r)" % (source, value))
            return threads
    return 1

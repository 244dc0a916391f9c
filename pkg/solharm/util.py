"""
Utility Module (:mod:`solharm.util`)
====================================


Examples
--------
>>> from solharm.util import enable_debug
>>> enable_debug()
"""

import os
import logging

import wblog

from .errors import ConfigError

logger = wblog.getLogger()

THREADS_ENV = "SOLHARM_THREADS"


def enable_debug():
    """
    Enable debug message

    Notes
    -----
    Messages are written through ``wblog`` to standard error,
    CSV and JSON artifacts on standard output are not affected.
    """
    wblog.start_logging("solharm", level=logging.DEBUG)
    logger.debug("Enable debug mode")


def worker_count(default: int = 4) -> int:
    """
    Number of worker threads for parallel sampling

    Parameters
    ----------
    default : int, optional
        Worker count when ``SOLHARM_THREADS`` is not set. Default is ``4``.

    Returns
    -------
    int
        Worker count, at least ``1``.

    Raises
    ------
    solharm.errors.ConfigError
        If ``SOLHARM_THREADS`` is not a positive integer.
    """
    value = os.environ.get(THREADS_ENV)
    if value is None:
        return max(1, min(default, os.cpu_count() or 1))

    try:
        n = int(value)
    except ValueError:
        raise ConfigError(THREADS_ENV, f"must be integer, but {value!r}")
    if n < 1:
        raise ConfigError(THREADS_ENV, f"must be positive, but {n}")
    return n

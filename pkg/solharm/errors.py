"""
Error Module (:mod:`solharm.errors`)
====================================

Every error raised by solharm is a ``ValueError``, so callers which only
care about invalid input can keep catching ``ValueError``.
"""
from __future__ import annotations
from typing import Optional


__all__ = [
    "SolharmError",
    "NonQMFError",
    "TruncationError",
    "FilterZeroError",
    "RegularityError",
    "ConfigError",
]


class SolharmError(ValueError):
    """
    Base class of solharm errors
    """
    pass


class NonQMFError(SolharmError):
    """
    Filter failed QMF validation, so weight operations refuse it.
    """
    pass


class TruncationError(SolharmError):
    """
    A finite truncation (tree depth, path length, forward budget,
    trigonometric degree, fiber index range) is exhausted.
    """
    pass


class FilterZeroError(SolharmError):
    """
    The filter vanishes on an orbit where a division by it is required.

    Notes
    -----
    The affected points form a set of measure zero, they can still be hit
    by finite precision inputs such as dyadic rationals.
    """
    pass


class RegularityError(SolharmError):
    """
    Kernel operation requested on a tree whose root is not regular.
    """
    def __init__(self, message: str, witness: Optional[str] = None):
        """
        Initialize RegularityError

        Parameters
        ----------
        message : str
            Error message
        witness : str, optional
            Human readable failure witness
        """
        super().__init__(message if witness is None else f"{message}: {witness}")
        self.witness = witness


class ConfigError(SolharmError):
    """
    Invalid run configuration
    """
    def __init__(self, key: str, message: str):
        """
        Initialize ConfigError

        Parameters
        ----------
        key : str
            Offending configuration key (dotted path)
        message : str
            Error message
        """
        super().__init__(f"{key}: {message}")
        self.key = key

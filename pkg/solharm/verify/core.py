"""
Verification Core Module (:mod:`solharm.verify.core`)
=====================================================

This module provides abstract base classes for invariant checks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

import wblog

from solharm.errors import SolharmError

__all__ = [
    "CheckResult",
    "Check",
    "Bound",
    "AtLeast",
    "Flag",
    "Suite",
]

logger = wblog.getLogger()


@dataclass(frozen=True)
class CheckResult:
    """
    Result of a single check

    Attributes
    ----------
    check : str
        Qualified check name ``suite.check``
    statistic : float, optional
        Observed statistic. ``None`` if the check raised.
    threshold : float
        Pass threshold
    passed : bool
        Whether the check passed
    """
    check: str
    statistic: Optional[float]
    threshold: float
    passed: bool

    def to_dict(self) -> Dict:
        return {"check": self.check,
                "statistic": self.statistic,
                "threshold": self.threshold,
                "pass": self.passed}

    def to_json(self) -> str:
        """
        JSON line with sorted keys
        """
        return json.dumps(self.to_dict(), sort_keys=True)


class Check:
    """
    Abstract base class for Check

    See Also
    --------
    solharm.verify.Bound : Check passing when statistic <= threshold
    solharm.verify.AtLeast : Check passing when statistic >= threshold
    solharm.verify.Flag : Boolean check

    Notes
    -----
    Subclass must implement ``Check.compare()``.
    Library errors raised while computing the statistic fail the check
    instead of aborting the suite.
    """
    def __init__(self, name: str, func: Callable[[], float], threshold: float):
        """
        Initialize Check

        Parameters
        ----------
        name : str
            Check name
        func : callable
            Function computing the statistic
        threshold : float
            Pass threshold
        """
        self.name = name
        self.func = func
        self.threshold = float(threshold)

    def compare(self, statistic: float) -> bool:
        """
        Decide pass or fail

        Parameters
        ----------
        statistic : float
            Observed statistic

        Returns
        -------
        bool
            Whether passed

        Notes
        -----
        Subclass must implement this method.
        """
        raise NotImplementedError

    def run(self, prefix: str = "") -> CheckResult:
        name = f"{prefix}.{self.name}" if prefix else self.name
        try:
            s = float(self.func())
        except SolharmError as e:
            logger.warning(f"{name}: {type(e).__name__}: {e}")
            return CheckResult(name, None, self.threshold, False)
        passed = bool(self.compare(s))
        logger.debug(f"{name}: statistic={s}, threshold={self.threshold}, pass={passed}")
        return CheckResult(name, s, self.threshold, passed)


class Bound(Check):
    """
    Check passing when ``statistic <= threshold``
    """
    def compare(self, statistic: float) -> bool:
        return statistic <= self.threshold


class AtLeast(Check):
    """
    Check passing when ``statistic >= threshold``
    """
    def compare(self, statistic: float) -> bool:
        return statistic >= self.threshold


class Flag(Check):
    """
    Boolean check, statistic ``1.0`` (true) or ``0.0`` (false)
    """
    def __init__(self, name: str, func: Callable[[], bool]):
        super().__init__(name, lambda: 1.0 if func() else 0.0, 1.0)

    def compare(self, statistic: float) -> bool:
        return statistic == 1.0


class Suite:
    """
    Named, ordered collection of checks

    Examples
    --------
    >>> from solharm.verify import Suite, Bound
    >>> s = Suite("demo")
    >>> s.add(Bound("zero", lambda: 0.0, 1e-12))
    >>> [r.passed for r in s.run()]
    [True]
    """
    def __init__(self, name: str, checks: Iterable[Check] = ()):
        self.name = name
        self.checks: List[Check] = list(checks)

    def add(self, check: Check):
        self.checks.append(check)

    def run(self) -> List[CheckResult]:
        """
        Run checks in insertion order

        Returns
        -------
        list of solharm.verify.CheckResult
            Results
        """
        logger.debug(f"Suite {self.name}: {len(self.checks)} checks")
        return [c.run(self.name) for c in self.checks]

    def __len__(self) -> int:
        return len(self.checks)

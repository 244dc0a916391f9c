"""
Verification Module (:mod:`solharm.verify`)
===========================================

Executable invariant checks grouped into named suites.


Examples
--------
>>> from solharm.dynsys import SystemSpec
>>> from solharm.filter import bundled_filter
>>> from solharm.verify import build_suites, run_suites
>>> sys = SystemSpec("circle", 2)
>>> results = run_suites(build_suites(["filter"], sys, bundled_filter("haar"), 7))
"""
from .core import (
    CheckResult,
    Check,
    Bound,
    AtLeast,
    Flag,
    Suite,
)
from .suites import SUITES, REGULAR_ROOTS, build_suites, run_suites

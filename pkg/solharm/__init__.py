"""
solharm: Wavelet representations on solenoids
=============================================

solharm computes with the random walk on preimage trees of an
``N``-to-1 circle map weighted by a quadrature mirror filter, and with
the wavelet representation on the solenoid built from it.

See Also
--------
solharm.dynsys : Dynamical System Module
solharm.filter : Filter Module
solharm.tree : Preimage Tree Module
solharm.boundary : Path Space Module
solharm.harmonic : Harmonic Function Module
solharm.solenoid : Solenoid Module
solharm.decomp : Decomposition Module
solharm.verify : Verification Module


Examples
--------
>>> import solharm as sh

>>> sys = sh.SystemSpec("circle", 2)
>>> f = sh.bundled_filter("haar")
>>> T = sh.tree.build_tree(sys, f, 0.1234477851, 4)
>>> len(T)
31
"""
from .errors import (
    SolharmError,
    NonQMFError,
    TruncationError,
    FilterZeroError,
    RegularityError,
    ConfigError,
)
from .dynsys import SystemSpec, TreeSource, ArcSet
from .filter import FilterSpec, bundled_filter
from . import random
from . import dynsys
from . import filter
from . import tree
from . import boundary
from . import harmonic
from . import solenoid
from . import decomp
from . import verify

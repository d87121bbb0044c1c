"""Two-qutrit cross-Kerr gate toolkit: simulation, calibration, benchmarking.

The heavy lifting lives in the compiled extension; this package re-exports it.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"

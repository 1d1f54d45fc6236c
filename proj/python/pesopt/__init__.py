"""Proximal epoch methods for stochastic min-max optimization."""

from ._pes import *  # noqa: F401,F403
from ._pes import __doc__  # noqa: F401

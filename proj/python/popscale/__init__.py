"""Exact absorbing-chain analysis of population scalability for elitist EAs."""

from ._popscale import *  # noqa: F401,F403
from ._popscale import __doc__  # noqa: F401

__version__ = "0.1.0"

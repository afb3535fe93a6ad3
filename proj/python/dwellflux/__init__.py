"""Dwell times and flux-flux correlation functions for free wavepackets."""

from ._core import *  # noqa: F401,F403
from ._core import ConvergenceError, __version__  # noqa: F401

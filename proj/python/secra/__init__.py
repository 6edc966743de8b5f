"""Secrecy-rate power allocation: conventional solvers and an NN surrogate."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401

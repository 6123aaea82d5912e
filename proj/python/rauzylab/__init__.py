"""Rauzy-Veech induction, congruence-group expansion and transfer operator
toolkit (python bindings over the C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401

"""Spin-action optimization toolkit (C++ core with Python bindings)."""

from ._spinopt import *  # noqa: F401,F403
from ._spinopt import __doc__  # noqa: F401

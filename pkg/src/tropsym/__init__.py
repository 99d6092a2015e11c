"""Symmetric powers of metric graphs and divisor theory with exact rationals."""

from .core import *  # noqa: F401,F403
from .chipfiring import *  # noqa: F401,F403
from .sympow import *  # noqa: F401,F403
from .maps import *  # noqa: F401,F403
from .io import FIXTURES, fixture, load_model  # noqa: F401

from . import core, chipfiring, sympow, maps, io  # noqa: F401

__version__ = "0.1.0"

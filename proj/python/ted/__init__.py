"""Training and deployment engine for lost-sales inventory agents."""

from ted._core import *  # noqa: F401,F403
from ted._core import __doc__  # noqa: F401

"""Heat kernels, resolvents and decay rates of radial Levy processes."""

from ._levyk import *  # noqa: F401,F403
from ._levyk import __version__  # noqa: F401

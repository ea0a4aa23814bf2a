"""Coagulating Brownian particles with Stokes drag."""

try:
    from ._smolv import *  # noqa: F401,F403
    from ._smolv import __doc__  # noqa: F401
except ImportError:  # build-tree layout: extension on PYTHONPATH next to the package
    from _smolv import *  # noqa: F401,F403

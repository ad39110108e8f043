"""Two-mode Bose-Josephson junction: mean-field dynamics, geometric phases and
the Bloch-sphere space curve."""

from ._bjj import *  # noqa: F401,F403
from ._bjj import Error  # noqa: F401

__version__ = "0.1.0"

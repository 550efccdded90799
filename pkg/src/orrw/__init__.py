"""Once-reinforced random walk (ORRW) on the half-line.

Simulation, exact dynamic programming, closed-form generating functions and
the limit constants of the range moments.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from ._rng import SeedSpec
from .walk import ReinforcementParams, WalkState, StepCapExceeded

__all__ = [
    "BACKEND",
    "ReinforcementParams",
    "SeedSpec",
    "StepCapExceeded",
    "WalkState",
    "__version__",
]

"""Validated-numerics toolkit for the De Gregorio (a = 1) blowup profile.

Reconstructs the approximate self-similar profile by dynamic rescaling and
rigorously verifies, in outward-rounded interval arithmetic, every numerical
inequality the computer-assisted stability argument needs: the constants
table, the damping and cross-term coefficient signs, the Schatten-norm
eigenvalue bounds, the residual-error bounds, and the final bootstrap and
convergence inequalities.
"""

from .interval import Interval, IntervalError, DomainError, round_up_sig
from .ivec import IntervalVec
from .grid import Grid
from .profile import HermiteProfile, build_spline, read_profile, write_profile
from .gauss import GaussRule

__all__ = [
    "Interval",
    "IntervalError",
    "DomainError",
    "round_up_sig",
    "IntervalVec",
    "Grid",
    "HermiteProfile",
    "build_spline",
    "read_profile",
    "write_profile",
    "GaussRule",
]

__version__ = "0.1.0"

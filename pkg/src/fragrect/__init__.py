"""fragrect: simulator and numerical toolkit for shape-dependent rectangle fragmentation.

A unit square fragments into rectangles that split at shape-dependent
rates and prefer to break along their longest side.  In log coordinates
the fragment sizes form a branching random walk; this package simulates
that system exactly, evaluates the associated growth/cost functionals
in closed or quadrature form, and cross-validates the analytic
quantities against Monte Carlo at desk scale.
"""

from .errors import (
    ConfigError,
    DomainError,
    InfeasibleError,
    ResourceCapError,
    VerificationError,
)
from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION

__version__ = "0.1.0"

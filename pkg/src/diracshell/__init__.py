"""Boundary-integral toolkit for two-dimensional Dirac shell interactions.

Subpackages: geometry (curves and grids), kernels (special functions and
fundamental solutions), boundary_ops (Nystrom operators and layer
potentials), corner_symbol (polygon Fredholm criterion), classify (the
self-adjointness decision engine), spectral (gap eigenvalues and identity
verification), cli (command-line front end).
"""

from .kernels import Coupling

__all__ = ["Coupling"]
__version__ = "0.1.0"

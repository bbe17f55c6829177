"""Resonant acceleration of a charged particle in a magnetic field with a time-dependent Aharonov-Bohm flux.

Landau-level basis, the Jacobi operator of the averaged Floquet problem,
first-order quantum averaging, and a direct propagator for the truncated
Schroedinger equation.
"""

from .params import DriveSpec, ModelParams

__all__ = ["DriveSpec", "ModelParams"]
__version__ = "0.1.0"

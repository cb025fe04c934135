"""
Dressed-mode master equations for quadratic bosonic systems.

The package diagonalizes quadratic Hamiltonians, builds local and global
(dressed) Lindblad models, derives first-moment drift matrices, eliminates
fast modes and scans the resulting effective Hamiltonians for exceptional
points.  A truncated-Fock integrator checks the moment equations directly.
"""

from .errors import DressedMEError
from .nambu import BogoliubovTransform, QuadraticSystem, build_hb_matrix, diagonalize
from .bath import BathSpec, FlatDensity, OhmicDensity
from .lindblad import LindbladModel, build, build_global, build_global_degenerate, build_local
from .moments import DriftMatrix, EffectiveHamiltonian, drift, effective_hamiltonian
from .reduction import eliminate
from .ep import EPReport, SpectrumPoint, classify, ep_scan
from .scenario import Scenario, load_preset

__all__ = [
    "BathSpec", "BogoliubovTransform", "DressedMEError", "DriftMatrix", "EPReport",
    "EffectiveHamiltonian", "FlatDensity", "LindbladModel", "OhmicDensity", "QuadraticSystem",
    "Scenario", "SpectrumPoint", "build", "build_global", "build_global_degenerate",
    "build_hb_matrix", "build_local", "classify", "diagonalize", "drift", "effective_hamiltonian",
    "eliminate", "ep_scan", "load_preset",
]
__version__ = "0.1.0"

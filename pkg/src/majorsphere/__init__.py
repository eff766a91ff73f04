"""Majorization, energy bounds and design certificates for point sets on spheres."""

from .configurations import DistanceFunctional, SphericalConfiguration, generate
from .errors import MajorsphereError
from .majorization import MajorizationOrder, RealSequence, compare, extremal_sequence

__version__ = "0.1.0"

__all__ = [
    "DistanceFunctional",
    "MajorizationOrder",
    "MajorsphereError",
    "RealSequence",
    "SphericalConfiguration",
    "compare",
    "extremal_sequence",
    "generate",
]

"""Laguerre-Sobolev orthogonal polynomials: construction, structure relations
and the electrostatic interpretation of their zeros."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .laguerre import LaguerreFamily, laguerre_family
from .poly import RATIONAL, Polynomial, float_field
from .sobolev import MassPoint, SobolevConfig, gram_schmidt_oracle, sobolev_poly
from .structure import SobolevSequence

__all__ = [
    "__version__",
    "RATIONAL",
    "Polynomial",
    "float_field",
    "LaguerreFamily",
    "laguerre_family",
    "MassPoint",
    "SobolevConfig",
    "SobolevSequence",
    "sobolev_poly",
    "gram_schmidt_oracle",
]

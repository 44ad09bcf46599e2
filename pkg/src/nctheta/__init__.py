"""Theta functions on commutative and noncommutative complex tori.

Evaluation of theta functions with characteristics and the basis functions
e_ab^mu, Moyal star products of their Fourier series, structure constants
(analytic and from mirror triangles), Heisenberg modules, and Hom-space quivers.
"""
from .errors import ThetaError
from .linalg_core import CosetIndex, IntSymMatrix, SkewMatrix, coset_representatives
from .structure_constants import LabelTriple, c_comm, c_nc, structure_tensor
from .theta_eval import ThetaCharacteristics, SiegelPoint, e_comm, e_nc, theta_with_char

__all__ = [
    "ThetaError",
    "CosetIndex",
    "IntSymMatrix",
    "SkewMatrix",
    "coset_representatives",
    "LabelTriple",
    "c_comm",
    "c_nc",
    "structure_tensor",
    "ThetaCharacteristics",
    "SiegelPoint",
    "e_comm",
    "e_nc",
    "theta_with_char",
]

__version__ = "0.1.0"

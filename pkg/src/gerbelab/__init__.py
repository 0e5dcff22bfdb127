"""Discrete line bundles and gerbes on simplicial complexes.

Berry phases, Chern and Dixmier-Douady numbers as quantized cochain sums,
gerbe trivialization and the cylinder holonomy identity.
"""

from .complex import Chain, SimplicialComplex, SimplicialMap
from .cochain import Cochain, Obstruction, coboundary, integrate, pullback, restrict, solve_coboundary
from .meshes import build_mesh

__all__ = [
    "Chain",
    "Cochain",
    "Obstruction",
    "SimplicialComplex",
    "SimplicialMap",
    "build_mesh",
    "coboundary",
    "integrate",
    "pullback",
    "restrict",
    "solve_coboundary",
]
__version__ = "0.1.0"

"""
latclass source package
Even lattices, finite quadratic forms and involutions of K3^[n]-type
"""

from .classification import classify_rank1, classify_rank2, maximal_families
from .errors import LatticeError
from .lattice import Lattice, k3n_lattice, make_standard, mukai_lattice

__all__ = [
    "Lattice",
    "LatticeError",
    "classify_rank1",
    "classify_rank2",
    "k3n_lattice",
    "make_standard",
    "maximal_families",
    "mukai_lattice",
]

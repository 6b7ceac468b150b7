"""Symbolic and numerical Foldy-Wouthuysen laboratory.

Exact word-algebra construction of the block-diagonalizing (Eriksen)
transformation, its comparison with the classical eighth-order series,
the grade-one equivalence with the closed-form relativistic Hamiltonian,
and dense-matrix experiments on lattice Dirac and spin-1 Landau models.
"""

__version__ = "0.1.0"

from . import eriksen, fseries, matfun, models, ncalg, relfw

__all__ = [
    "__version__",
    "ncalg",
    "fseries",
    "eriksen",
    "relfw",
    "matfun",
    "models",
]

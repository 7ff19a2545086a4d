"""Numerical checks of Lie-Poisson and bi-Hamiltonian structures behind the
Mikhalev-Pavlov and Plebanski heavenly equations."""

from .grid import Grid, GridFunction, derivative, antiderivative, delta_kernel, green_kernel
from .loop_algebra import LaurentVectorField, LaurentOneForm, commutator, r_bracket, residue_pairing, coadjoint_action
from .lie_poisson import Case, make_seed, bracket_kernel
from .report import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "GridFunction",
    "derivative",
    "antiderivative",
    "delta_kernel",
    "green_kernel",
    "LaurentVectorField",
    "LaurentOneForm",
    "commutator",
    "r_bracket",
    "residue_pairing",
    "coadjoint_action",
    "Case",
    "make_seed",
    "bracket_kernel",
    "VerificationReport",
]

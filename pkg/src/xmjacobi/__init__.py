"""Exceptional X_m-Jacobi polynomials, their shape-invariant potentials and
s-wave scattering, with a Numerov oracle for independent checks."""

from ._kernels import BACKEND
from .errors import XmJacobiError
from .params import FamilyParams
from .potential import bound_energies, eigenfunction_spec, eigenfunction_value, potential_hat
from .scattering import phase_shift, s_gpt, s_xm

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FamilyParams",
    "XmJacobiError",
    "bound_energies",
    "eigenfunction_spec",
    "eigenfunction_value",
    "phase_shift",
    "potential_hat",
    "s_gpt",
    "s_xm",
]

"""Exact invariant contact and symplectic geometry on low-dimensional Lie algebras."""

from .exterior import KForm, pfaffian
from .liealg import LieAlgebra
from .poly import Poly
from .report import Report

__all__ = ["KForm", "LieAlgebra", "Poly", "Report", "pfaffian"]
__version__ = "0.1.0"

"""Toeplitz operators with quasihomogeneous symbols on the Bergman space.

Modules: ``radial`` (radial term algebra), ``mellin`` (closed-form and
quadrature Mellin transforms), ``operator`` (weighted shifts, matrices,
commutators), ``commutant`` (exact null-space solver), ``verify`` (proof
replays and the constants cross-check) and ``cli``.
"""

from .scalar import Scalar, parse_scalar
from .radial import DomainError, RadialFunction, RadialTerm, l1_membership
from .mellin import DivergenceError, mellin_eval, mellin_quadrature
from .operator import PolarSymbol, QuasiSymbol, apply, assemble_matrix, commutator
from .commutant import Ansatz, CommutantProblem, null_space, residual, solve

__all__ = [
    "Scalar", "parse_scalar", "DomainError", "RadialFunction", "RadialTerm",
    "l1_membership", "DivergenceError", "mellin_eval", "mellin_quadrature",
    "PolarSymbol", "QuasiSymbol", "apply", "assemble_matrix", "commutator",
    "Ansatz", "CommutantProblem", "null_space", "residual", "solve",
]

__version__ = "0.1.0"

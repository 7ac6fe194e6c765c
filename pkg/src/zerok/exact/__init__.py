"""Exact arithmetic substrate over the Gaussian rationals Q(i)."""

from .gaussian import GaussianRational, QI, as_qi, I, ONE, ZERO
from .multipoly import MultiPoly, poly_gcd
from .ratfunc import RatFunc, SingularPointError, homogeneous_degree
from .unipoly import UniPoly, integer_roots, gaussian_rational_roots, squarefree_decomposition
from .hermite import hermite, hermite_expand, HermiteExpansion, gaussian_moment

__all__ = [
    "GaussianRational",
    "QI",
    "as_qi",
    "I",
    "ONE",
    "ZERO",
    "MultiPoly",
    "poly_gcd",
    "RatFunc",
    "SingularPointError",
    "homogeneous_degree",
    "UniPoly",
    "integer_roots",
    "gaussian_rational_roots",
    "squarefree_decomposition",
    "hermite",
    "hermite_expand",
    "HermiteExpansion",
    "gaussian_moment",
]

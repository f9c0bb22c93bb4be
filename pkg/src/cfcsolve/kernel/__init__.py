"""Exact Gaussian-rational scalars, dense matrices and elimination."""
from .linalg import (char_poly, gauss_elim, inverse, is_invertible, nullspace,
                     nullspace_matrix, poly_eval_matrix, rank, rref, solve)
from .matrix import Matrix, direct_sum, matrix_algebra
from .scalar import (GQ, I, ONE, ZERO, format_scalar, gq, is_exact,
                     parse_scalar, principal_sqrt_complex, sqrt_exact)

__all__ = [
    "GQ", "I", "ONE", "ZERO", "gq", "is_exact", "format_scalar", "parse_scalar",
    "sqrt_exact", "principal_sqrt_complex", "Matrix", "direct_sum",
    "matrix_algebra", "rank", "inverse", "nullspace", "nullspace_matrix",
    "solve", "rref", "gauss_elim", "is_invertible", "char_poly",
    "poly_eval_matrix",
]

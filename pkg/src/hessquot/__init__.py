"""Hessian quotient type equations with Neumann data: operators, solvers, checks."""

from .compound import (OperatorSignature, F_gradient, F_value, additive_compound, index_sets,
                       is_admissible, lambda_of, regime_constants)
from .symfun import (in_gamma_k, newton_transform, quotient_f, quotient_grad, sigma_k,
                     sigma_k_of_matrix, sigma_partial)

__version__ = "0.1.0"

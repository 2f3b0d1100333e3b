"""The Λ operator through additive compound matrices, and F with its derivative.

Run: python3 demos/03_compound_operator.py
"""

import numpy as np

from hessquot.compound import (OperatorSignature, F_gradient, F_value, additive_compound,
                               index_sets, lambda_of, regime_constants)

A = np.array([[3.0, 0.4, 0.0], [0.4, 1.0, 0.2], [0.0, 0.2, 0.0]])
print("index sets (3, 2):", index_sets(3, 2).sets)
print("A^[2] =\n", additive_compound(A, 2))

lam = np.linalg.eigvalsh(A)[::-1]
print("Lambda(A)     :", np.round(lambda_of(A, 2), 6))
print("pairwise sums :", np.round(sorted([lam[0] + lam[1], lam[0] + lam[2], lam[1] + lam[2]], reverse=True), 6))

sig = OperatorSignature(3, 2, 2, 0)
print(f"F(A) = {F_value(A, sig):.6f}")
G = F_gradient(A, sig)
print("F^ij =\n", np.round(G, 6))
print("eigenvalues of F^ij:", np.round(np.linalg.eigvalsh(G), 6), "(positive: elliptic)")
print(f"trace F^ij = {np.trace(G):.6f} >= p (C_N^k/C_N^l)^(1/(k-l)) = {regime_constants(sig):.6f}")

"""Cyclic Jacobi on a small symmetric matrix.

Run: python3 demos/02_jacobi.py
"""

import numpy as np

from hessquot.spectral import eigen_sym

rng = np.random.default_rng(0)
a = rng.standard_normal((6, 6))
M = a + a.T

d = eigen_sym(M)
print("eigenvalues (descending):", np.round(d.eigenvalues, 6))
print("sweeps:", d.sweeps)
Q = d.eigenvectors
print("reconstruction error:", np.abs(Q.T @ np.diag(d.eigenvalues) @ Q - M).max())
print("orthogonality error :", np.abs(Q @ Q.T - np.eye(6)).max())
print("LAPACK difference   :", np.abs(d.eigenvalues - np.linalg.eigvalsh(M)[::-1]).max())

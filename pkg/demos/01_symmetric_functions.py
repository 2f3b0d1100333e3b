"""Elementary symmetric functions, Garding cones and the quotient f.

Run: python3 demos/01_symmetric_functions.py
"""

import numpy as np

from hessquot import symfun

lam = np.array([-1.0, 3.0, 3.0])
print("lambda =", lam)
for k in range(4):
    print(f"  sigma_{k} = {symfun.sigma_k(lam, k):+g}")

# One negative entry is tolerated by Γ_2 but not by Γ_3.
print("in Gamma_2:", symfun.in_gamma_k(lam, 2), " in Gamma_3:", symfun.in_gamma_k(lam, 3))

# f = (σ_2/σ_0)^{1/2} and its gradient; every component is positive inside the cone.
f = symfun.quotient_f(lam, 2, 0)
g = symfun.quotient_grad(lam, 2, 0)
print(f"f = {f:.6f}, grad f = {np.round(g, 6)}, sum = {g.sum():.6f} >= {np.sqrt(3):.6f}")

# Concavity along a segment inside Γ_2.
mu = np.array([2.0, 0.5, 1.0])
ts = np.linspace(0, 1, 6)
vals = [symfun.quotient_f((1 - t) * lam + t * mu, 2, 0) for t in ts]
chords = [(1 - t) * vals[0] + t * vals[-1] for t in ts]
print("f along segment :", np.round(vals, 4))
print("chord           :", np.round(chords, 4))

# σ_k of a matrix without diagonalizing it.
M = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
print("sigma_2(M) =", symfun.sigma_k_of_matrix(M, 2),
      " via eigenvalues:", symfun.sigma_k(np.linalg.eigvalsh(M), 2))

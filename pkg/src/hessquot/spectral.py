"""Cyclic Jacobi eigensolver for small dense symmetric matrices."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError
from .symfun import sym_matrix

MAX_SWEEPS = 50


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; row ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``.

    ``eigenvectors.T @ diag(eigenvalues) @ eigenvectors`` reconstructs the matrix.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.sqrt(np.sum(off * off))


def eigen_sym(M, tol=1e-12):
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit the upper triangle row by row and stop once the
    off-diagonal Frobenius norm is at most ``tol * ||M||_F``.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    a = sym_matrix(M)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    target = tol * scale
    sweeps = 0
    while _off_norm(a) > target:
        if sweeps == MAX_SWEEPS:
            raise NumericalError(
                f"Jacobi did not converge in {MAX_SWEEPS} sweeps "
                f"(off-diagonal residual {_off_norm(a):.3e}, target {target:.3e})"
            )
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) plane rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order].T.copy(), sweeps)


def eigvals_sym(M, tol=1e-12):
    return eigen_sym(M, tol).eigenvalues

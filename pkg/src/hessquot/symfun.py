"""Elementary symmetric functions, Garding cones and Hessian quotients.

Vectors of eigenvalues are plain 1-D float arrays; symmetric matrices are
2-D float arrays whose upper triangle is authoritative.  Every public
function has a batched twin (leading ``...`` axes) used by the PDE code.
"""

from math import comb

import numpy as np

from .errors import AdmissibilityError, InvalidInputError

__all__ = [
    "eigen_tuple",
    "sym_matrix",
    "elementary",
    "deleted_elementary",
    "sigma_k",
    "sigma_partial",
    "in_gamma_k",
    "gamma_mask",
    "quotient_f",
    "quotient_grad",
    "quotient_batch",
    "newton_transforms",
    "newton_transform",
    "sigma_k_of_matrix",
    "binomial",
]


def binomial(n, k):
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def eigen_tuple(lam):
    """Validate ``lam`` as a finite, non-empty 1-D vector."""
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("eigenvalue tuple must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("eigenvalue tuple has non-finite entries")
    return arr


def sym_matrix(a):
    """Return a symmetric copy of ``a`` built from its upper triangle."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError("symmetric matrix must be square and non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("symmetric matrix has non-finite entries")
    upper = np.triu(arr)
    return upper + np.triu(arr, 1).T


def elementary(lam, kmax):
    """σ_0..σ_kmax of the last axis of ``lam``, shape ``(..., kmax+1)``.

    Uses the prefix recurrence S_j(λ_1..λ_i) = S_j(λ_1..λ_{i-1}) + λ_i S_{j-1}(λ_1..λ_{i-1}).
    Orders above the vector length come out as exact zeros.
    """
    lam = np.asarray(lam, dtype=float)
    m = lam.shape[-1]
    kmax = max(int(kmax), 0)
    out = np.zeros(lam.shape[:-1] + (kmax + 1,))
    out[..., 0] = 1.0
    for i in range(m):
        top = min(i + 1, kmax)
        # descending j so out[..., j-1] is still the previous prefix value
        for j in range(top, 0, -1):
            out[..., j] += lam[..., i] * out[..., j - 1]
    return out


def deleted_elementary(lam, kmax):
    """σ_j(λ|i) for every deleted index i, shape ``(..., m, kmax+1)``."""
    lam = np.asarray(lam, dtype=float)
    m = lam.shape[-1]
    out = np.empty(lam.shape[:-1] + (m, max(int(kmax), 0) + 1))
    for i in range(m):
        rest = np.delete(lam, i, axis=-1)
        out[..., i, :] = elementary(rest, kmax)
    return out


def _sigma_at(table, k):
    if k < 0 or k >= table.shape[-1]:
        return np.zeros(table.shape[:-1])
    return table[..., k]


def sigma_k(lam, k):
    """k-th elementary symmetric function; σ_0 = 1 and σ_k = 0 outside 0..m."""
    lam = eigen_tuple(lam)
    k = int(k)
    if k < 0 or k > lam.size:
        return 0.0
    return float(elementary(lam, k)[k])


def sigma_partial(lam, k, i):
    """∂σ_k/∂λ_i = σ_{k-1}(λ|i), with ``i`` a 0-based index."""
    lam = eigen_tuple(lam)
    if not 0 <= i < lam.size:
        raise InvalidInputError(f"index {i} out of range for length {lam.size}")
    rest = np.delete(lam, i)
    if k - 1 < 0 or k - 1 > rest.size:
        return 0.0
    return float(elementary(rest, k - 1)[k - 1])


def gamma_mask(lam, k):
    """Batched strict cone test: σ_j > 0 for 1 <= j <= k."""
    table = elementary(lam, k)
    return np.all(table[..., 1 : k + 1] > 0.0, axis=-1)


def in_gamma_k(lam, k):
    lam = eigen_tuple(lam)
    if not 1 <= k <= lam.size:
        raise InvalidInputError(f"cone order k={k} must satisfy 1 <= k <= {lam.size}")
    return bool(gamma_mask(lam, k))


def _check_orders(m, k, l):
    if not (0 <= l < k <= m):
        raise InvalidInputError(f"orders must satisfy 0 <= l < k <= m (got l={l}, k={k}, m={m})")


def quotient_batch(lam, k, l, grad=False):
    """Batched (σ_k/σ_l)^{1/(k-l)} and optionally its λ-gradient.

    Returns ``(f, g, ok)``; ``ok`` flags membership in Γ_k and ``f``/``g``
    are NaN where it is False.  ``g`` is None unless requested.
    """
    lam = np.asarray(lam, dtype=float)
    table = elementary(lam, k)
    ok = np.all(table[..., 1 : k + 1] > 0.0, axis=-1)
    sk = np.where(ok, table[..., k], np.nan)
    sl = np.where(ok, table[..., l], np.nan)
    e = 1.0 / (k - l)
    f = (sk / sl) ** e
    if not grad:
        return f, None, ok
    dele = deleted_elementary(lam, k - 1)
    dk = _sigma_at(dele, k - 1)
    dl = _sigma_at(dele, l - 1)
    g = (f * e)[..., None] * (dk / sk[..., None] - dl / sl[..., None])
    return f, g, ok


def quotient_f(lam, k, l):
    """Eigenvalue-level Hessian quotient (σ_k/σ_l)^{1/(k-l)} on Γ_k."""
    lam = eigen_tuple(lam)
    _check_orders(lam.size, k, l)
    f, _, ok = quotient_batch(lam, k, l)
    if not ok:
        raise AdmissibilityError(f"vector {lam.tolist()} is not in Gamma_{k}")
    return float(f)


def quotient_grad(lam, k, l):
    lam = eigen_tuple(lam)
    _check_orders(lam.size, k, l)
    _, g, ok = quotient_batch(lam, k, l, grad=True)
    if not ok:
        raise AdmissibilityError(f"vector {lam.tolist()} is not in Gamma_{k}")
    return g


def newton_transforms(m, kmax):
    """σ_0..σ_kmax of batched matrices plus T_0..T_kmax.

    T_0 = I, σ_j = tr(T_{j-1} M)/j, T_j = σ_j I - T_{j-1} M.  Returns
    ``(sig, T)`` with shapes ``(..., kmax+1)`` and ``(..., kmax+1, N, N)``.
    """
    m = np.asarray(m, dtype=float)
    size = m.shape[-1]
    eye = np.eye(size)
    sig = np.zeros(m.shape[:-2] + (kmax + 1,))
    ts = np.zeros(m.shape[:-2] + (kmax + 1, size, size))
    sig[..., 0] = 1.0
    ts[..., 0, :, :] = eye
    for j in range(1, kmax + 1):
        prod = ts[..., j - 1, :, :] @ m
        sig[..., j] = np.trace(prod, axis1=-2, axis2=-1) / j
        t = sig[..., j, None, None] * eye - prod
        ts[..., j, :, :] = 0.5 * (t + np.swapaxes(t, -1, -2))
    if kmax >= size:
        # exact conventions beyond the dimension (rounding would leave noise)
        sig[..., size + 1 :] = 0.0
        ts[..., size:, :, :] = 0.0
    return sig, ts


def newton_transform(M, k):
    """T_k(M); its entries are ∂σ_{k+1}(λ(M))/∂M_ij for symmetric M."""
    M = sym_matrix(M)
    if not 0 <= k <= M.shape[0]:
        raise InvalidInputError(f"k={k} must lie in 0..{M.shape[0]}")
    _, ts = newton_transforms(M, k)
    return ts[k]


def sigma_k_of_matrix(M, k):
    """σ_k of the spectrum of M (sum of k×k principal minors), no eigensolve."""
    M = sym_matrix(M)
    if not 0 <= k <= M.shape[0]:
        raise InvalidInputError(f"k={k} must lie in 0..{M.shape[0]}")
    sig, _ = newton_transforms(M, k)
    return float(sig[k])

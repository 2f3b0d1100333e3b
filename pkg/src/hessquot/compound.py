"""The Λ operator through p-th additive compound matrices.

For an n×n symmetric A the compound A^[p] is N×N with N = C(n, p) and its
spectrum is the set of p-fold sums of eigenvalues of A.  Working with the
compound lets F(A) = (σ_k/σ_l)^{1/(k-l)} of those sums and its gradient in
A be computed without any eigendecomposition.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import symfun
from .errors import AdmissibilityError, InvalidInputError
from .spectral import eigen_sym
from .symfun import binomial, sym_matrix

__all__ = [
    "IndexFamily",
    "OperatorSignature",
    "index_sets",
    "structure_constants",
    "additive_compound",
    "lambda_of",
    "is_admissible",
    "admissibility_margin",
    "F_value",
    "F_gradient",
    "F_batch",
    "regime_constants",
    "p_sums",
]


@dataclass(frozen=True)
class IndexFamily:
    """Lexicographically ordered p-subsets of {0, ..., n-1}."""

    n: int
    p: int
    sets: tuple
    rank: dict = field(compare=False, repr=False)

    def __len__(self):
        return len(self.sets)


@lru_cache(maxsize=None)
def _family(n, p):
    sets = tuple(combinations(range(n), p))
    return IndexFamily(n, p, sets, {s: r for r, s in enumerate(sets)})


def index_sets(n, p):
    if not 1 <= p <= n - 1:
        raise InvalidInputError(f"subset size p={p} must satisfy 1 <= p <= n-1 = {n - 1}")
    return _family(n, p)


@dataclass(frozen=True)
class OperatorSignature:
    """Parameters (n, p, k, l) of σ_k(Λ)/σ_l(Λ) with Λ ∈ R^N, N = C(n, p)."""

    n: int
    p: int
    k: int
    l: int

    def __post_init__(self):
        n, p, k, l = self.n, self.p, self.k, self.l
        if n < 2:
            raise InvalidInputError(f"dimension n={n} must be at least 2")
        if not 1 <= p <= n - 1:
            raise InvalidInputError(f"p={p} must satisfy 1 <= p <= n-1 = {n - 1}")
        if not 0 <= l < k <= binomial(n, p):
            raise InvalidInputError(
                f"orders must satisfy 0 <= l < k <= N = C(n,p) = {binomial(n, p)} (got k={k}, l={l})"
            )

    @property
    def N(self):
        return binomial(self.n, self.p)

    @property
    def theorem_regime(self):
        return self.k <= binomial(self.n - 1, self.p - 1)


@lru_cache(maxsize=None)
def structure_constants(n, p):
    """Tensor S with A^[p]_{IJ} = sum_ij S[I, J, i, j] A_ij (entries 0/±1).

    Built once per (n, p); the returned array is read-only.
    """
    fam = _family(n, p)
    big = len(fam.sets)
    s = np.zeros((big, big, n, n))
    for a, I in enumerate(fam.sets):
        for i in I:
            s[a, a, i, i] = 1.0
        for b, J in enumerate(fam.sets):
            if a == b:
                continue
            only_i = set(I) - set(J)
            if len(only_i) != 1:
                continue
            (i,) = only_i
            (j,) = set(J) - set(I)
            sign = (-1.0) ** (I.index(i) + J.index(j))
            s[a, b, i, j] = sign
    s.setflags(write=False)
    return s


def _compound_batch(a, p):
    n = a.shape[-1]
    if p == n:
        return np.trace(a, axis1=-2, axis2=-1)[..., None, None]
    return np.einsum("IJij,...ij->...IJ", structure_constants(n, p), a)


def additive_compound(A, p):
    A = sym_matrix(A)
    n = A.shape[0]
    if not 1 <= p <= n:
        raise InvalidInputError(f"p={p} must satisfy 1 <= p <= {n}")
    return _compound_batch(A, p)


def p_sums(lam, p):
    """All p-fold sums of ``lam`` in the lexicographic subset order."""
    lam = np.asarray(lam, dtype=float)
    fam = _family(lam.shape[-1], p)
    idx = np.array(fam.sets)
    return lam[..., idx].sum(axis=-1)


def lambda_of(A, p):
    """Λ(A): eigenvalues of the compound, sorted descending."""
    return eigen_sym(additive_compound(A, p)).eigenvalues


def _check_dims(A, sig):
    A = sym_matrix(A)
    if A.shape[0] != sig.n:
        raise InvalidInputError(f"matrix is {A.shape[0]}x{A.shape[0]} but signature has n={sig.n}")
    return A


def is_admissible(A, sig):
    """True iff Λ(A) lies strictly inside Γ_k."""
    A = _check_dims(A, sig)
    return bool(symfun.gamma_mask(lambda_of(A, sig.p), sig.k))


def _margin_from_sigmas(sig_table, hnorm, sig):
    js = np.arange(1, sig.k + 1)
    norm = np.array([binomial(sig.N, j) for j in js], dtype=float)
    scaled = sig_table[..., 1 : sig.k + 1] / (norm * (1.0 + hnorm[..., None]) ** js)
    return scaled.min(axis=-1)


def admissibility_margin(A, sig):
    """min_j σ_j(Λ)/(C(N,j)(1+|A|_inf)^j) over 1 <= j <= k; positive iff admissible."""
    A = np.asarray(A, dtype=float)
    m = _compound_batch(A, sig.p)
    tab, _ = symfun.newton_transforms(m, sig.k)
    hnorm = np.abs(A).sum(axis=-1).max(axis=-1)
    return _margin_from_sigmas(tab, hnorm, sig)


def F_batch(a, sig, grad=False):
    """Batched F and F^{ij} over a stack of symmetric matrices.

    Returns ``(F, G, sigmas)`` where ``G`` is None unless ``grad`` and
    ``sigmas[..., j] = σ_j(Λ)`` for 0 <= j <= k.  Inadmissible entries of F
    and G are NaN; callers decide how to report them.
    """
    a = np.asarray(a, dtype=float)
    k, l = sig.k, sig.l
    m = _compound_batch(a, sig.p)
    tab, ts = symfun.newton_transforms(m, k)
    ok = np.all(tab[..., 1 : k + 1] > 0.0, axis=-1)
    sk = np.where(ok, tab[..., k], np.nan)
    sl = np.where(ok, tab[..., l], np.nan)
    e = 1.0 / (k - l)
    f = (sk / sl) ** e
    if not grad:
        return f, None, tab
    dk = ts[..., k - 1, :, :] / sk[..., None, None]
    if l > 0:
        dk = dk - ts[..., l - 1, :, :] / sl[..., None, None]
    gm = (f * e)[..., None, None] * dk
    g = np.einsum("IJij,...IJ->...ij", structure_constants(sig.n, sig.p), gm)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    return f, g, tab


def _require_admissible(A, sig, tab):
    if not np.all(tab[1 : sig.k + 1] > 0.0):
        raise AdmissibilityError(
            f"matrix is not (Lambda,{sig.k})-convex: sigma_1..sigma_{sig.k} of Lambda = "
            f"{tab[1:sig.k + 1].tolist()}"
        )


def F_value(A, sig):
    """F(A) = [σ_k(Λ(A))/σ_l(Λ(A))]^{1/(k-l)} via the compound matrix."""
    A = _check_dims(A, sig)
    f, _, tab = F_batch(A, sig)
    _require_admissible(A, sig, tab)
    return float(f)


def F_gradient(A, sig):
    """Symmetric matrix F^{ij} = ∂F/∂A_ij; positive definite on admissible A."""
    A = _check_dims(A, sig)
    _, g, tab = F_batch(A, sig, grad=True)
    _require_admissible(A, sig, tab)
    return g


def regime_constants(sig):
    """p (C(N,k)/C(N,l))^{1/(k-l)}: lower bound of the trace of F^{ij}."""
    big = sig.N
    return sig.p * (binomial(big, sig.k) / binomial(big, sig.l)) ** (1.0 / (sig.k - sig.l))

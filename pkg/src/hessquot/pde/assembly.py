"""Nonlinear residual and sparse Jacobian of the discrete Neumann problem.

Interior rows hold F(D²u) - ψ̃(x, u, Du); boundary rows hold
u_ν - φ(x, u).  On the radial grid every row except the last is an
equation row (the centre included, through the symmetric ghost value).
"""

from dataclasses import dataclass
from math import comb

import numpy as np
import scipy.sparse as sp

from .. import symfun
from ..compound import F_batch, _margin_from_sigmas
from ..errors import AdmissibilityError
from .grid import Field, RadialGrid

__all__ = ["DiscreteState", "evaluate_state", "residual", "jacobian", "radial_multiplicities"]


@dataclass
class DiscreteState:
    """Everything the Newton loop needs about one iterate."""

    residual: np.ndarray
    equation_rows: np.ndarray  # bool mask of rows carrying the PDE
    margin: np.ndarray  # per equation row; <= 0 means inadmissible
    psi: np.ndarray  # ψ̃ at equation rows
    jac: object = None

    @property
    def admissible(self):
        return bool(np.all(self.margin > 0))

    @property
    def min_margin(self):
        return float(self.margin.min()) if self.margin.size else np.inf

    @property
    def res_interior(self):
        r = self.residual[self.equation_rows]
        return float(np.abs(r).max()) if r.size else 0.0

    @property
    def res_boundary(self):
        r = self.residual[~self.equation_rows]
        return float(np.abs(r).max()) if r.size else 0.0

    @property
    def res_inf(self):
        return float(np.abs(self.residual).max())

    def first_bad(self):
        rows = np.flatnonzero(self.equation_rows)
        bad = np.flatnonzero(~(self.margin > 0))
        return int(rows[bad[0]]) if bad.size else None


def radial_multiplicities(n, p):
    """(C(n-1, p-1), C(n-1, p)): copies of u''+(p-1)u'/r and of p u'/r in Λ."""
    a, b = comb(n - 1, p - 1), comb(n - 1, p)
    assert a + b == comb(n, p)
    return a, b


def _rowscale(values, mask):
    v = np.zeros(mask.size)
    v[mask] = values
    return sp.diags(v)


def _box_state(grid, u, sig, eq, with_jac):
    inner = grid.interior
    bnd = grid.boundary
    x = grid.coords
    grad = grid.gradient(u)
    hs = grid.hessian(u)[inner]
    f, g, tab = F_batch(hs, sig, grad=with_jac)
    hnorm = np.abs(hs).sum(axis=-1).max(axis=-1)
    margin = _margin_from_sigmas(tab, hnorm, sig)
    margin = np.where(np.all(tab[:, 1:sig.k + 1] > 0, axis=-1), margin, -np.inf)
    psi, psi_u, psi_p = eq.psi(x[inner], u[inner], grad[inner])
    nu = grid.normals[bnd]
    phi, phi_u = eq.phi(x[bnd], u[bnd], nu)
    res = np.empty(grid.size)
    res[inner] = f - psi
    res[bnd] = np.sum(nu * grad[bnd], axis=1) - phi
    state = DiscreteState(res, inner, margin, psi)
    if with_jac and state.admissible:
        n = grid.n
        terms = []
        for (i, j), d in grid.second.items():
            coef = g[:, i, i] if i == j else 2.0 * g[:, i, j]
            terms.append(_rowscale(coef, inner) @ d)
        for i in range(n):
            terms.append(_rowscale(-psi_p[:, i], inner) @ grid.first[i])
            terms.append(_rowscale(nu[:, i], bnd) @ grid.first[i])
        diag = np.zeros(grid.size)
        diag[inner] = -psi_u
        diag[bnd] = -phi_u
        terms.append(sp.diags(diag))
        state.jac = sp.csr_matrix(sum(terms[1:], terms[0]))
    return state


def _radial_state(grid, u, sig, eq, with_jac):
    n, p, k, l = sig.n, sig.p, sig.k, sig.l
    a, b = radial_multiplicities(n, p)
    eqn = grid.interior
    upp, up, w = grid.radial_parts(u)
    lam = np.concatenate([np.repeat((upp + (p - 1) * w)[:, None], a, axis=1),
                          np.repeat((p * w)[:, None], b, axis=1)], axis=1)[eqn]
    f, g, ok = symfun.quotient_batch(lam, k, l, grad=with_jac)
    tab = symfun.elementary(lam, k)
    hnorm = np.maximum(np.abs(upp), np.abs(w))[eqn]
    margin = _margin_from_sigmas(tab, hnorm, sig)
    margin = np.where(ok, margin, -np.inf)
    x = grid.coords
    grad = grid.gradient(u)
    psi, psi_u, psi_p = eq.psi(x[eqn], u[eqn], grad[eqn])
    bnd = grid.boundary
    nu = grid.normals[bnd]
    phi, phi_u = eq.phi(x[bnd], u[bnd], nu)
    res = np.empty(grid.size)
    res[eqn] = f - psi
    res[bnd] = up[bnd] - phi
    state = DiscreteState(res, eqn, margin, psi)
    if with_jac and state.admissible:
        d_first = g[:, :a].sum(axis=1)
        d_second = g[:, a:].sum(axis=1)
        f_upp = d_first.copy()
        f_w = (p - 1) * d_first + p * d_second
        # centre: w is u''(0) itself
        f_upp[0] += f_w[0]
        f_w[0] = 0.0
        inv_r = np.zeros(grid.size)
        inv_r[1:] = 1.0 / grid.r[1:]
        jac = (_rowscale(f_upp, eqn) @ grid.d2
               + _rowscale(f_w, eqn) @ sp.diags(inv_r) @ grid.d1
               - _rowscale(psi_p[:, 0], eqn) @ grid.d1
               + _rowscale(nu[:, 0], bnd) @ grid.d1)
        diag = np.zeros(grid.size)
        diag[eqn] = -psi_u
        diag[bnd] = -phi_u
        state.jac = sp.csr_matrix(jac + sp.diags(diag))
    return state


def evaluate_state(grid, u, sig, eq, with_jac=True):
    u = np.asarray(u, dtype=float)
    if isinstance(grid, RadialGrid):
        return _radial_state(grid, u, sig, eq, with_jac)
    return _box_state(grid, u, sig, eq, with_jac)


def _raise_inadmissible(grid, state):
    node = state.first_bad()
    multi = tuple(int(i) for i in grid.index[node]) if hasattr(grid, "index") else (node,)
    raise AdmissibilityError(
        f"field is not (Lambda,k)-convex at node {node} (multi-index {multi}, "
        f"x = {grid.coords[node].tolist()})", node=node, multi_index=multi)


def residual(field, prob):
    """Residual field; raises AdmissibilityError naming the first bad node."""
    state = evaluate_state(field.grid, field.values, prob.sig, prob.equation(), with_jac=False)
    if not state.admissible:
        _raise_inadmissible(field.grid, state)
    return Field(field.grid, state.residual)


def jacobian(field, prob):
    """Sparse (CSR) Jacobian of :func:`residual` with respect to the node values."""
    state = evaluate_state(field.grid, field.values, prob.sig, prob.equation(), with_jac=True)
    if not state.admissible:
        _raise_inadmissible(field.grid, state)
    return state.jac

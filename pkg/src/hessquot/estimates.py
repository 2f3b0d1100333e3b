"""Machine checks for the structure conditions and the a priori bounds.

The constants in the interior gradient, boundary gradient and Hessian
bounds are not computable, so solutions are checked for finiteness and for
stability of the normalized gradient ratio under grid refinement.  The
sup-bound on u that follows from -φ_u >= c0 is checked quantitatively.
"""

from dataclasses import asdict, dataclass, field
from math import ceil, log10

import numpy as np
from scipy.stats import qmc

from . import exprlang
from .errors import InvalidInputError

__all__ = ["Sampler", "StructuralReport", "GrowthReport", "BoundReport",
           "check_structural", "check_growth", "verify_solution", "refinement_study",
           "gradient_ratio"]


@dataclass(frozen=True)
class Sampler:
    """Scrambled Halton states; fixed ``seed`` gives reproducible reports.

    ``u_bound``/``p_bound`` default to the problem's values.  For the
    growth check ``per_decade`` points are drawn in every decade of |p|
    above M1, so enlarging ``p_max`` only adds samples.
    """

    n_samples: int = 10_000
    seed: int = 0
    u_bound: float = None
    p_bound: float = None
    p_max: float = 1e3
    per_decade: int = 2_000

    def unit(self, d, count, stream=0):
        eng = qmc.Halton(d=d, scramble=True, seed=np.random.default_rng([self.seed, stream]))
        return eng.random(count)


@dataclass
class StructuralReport:
    c0_measured: float
    alpha0_measured: float
    c0_ok: bool
    alpha0_ok: bool
    c0_required: float = None
    alpha0_required: float = None
    c0_witness: dict = field(default_factory=dict)
    alpha0_witness: dict = field(default_factory=dict)
    samples: str = ""

    def to_dict(self):
        return asdict(self)


@dataclass
class GrowthReport:
    gamma: float
    C1: float
    M1: float
    p_max: float
    measured_sup: float
    ok: bool
    n_samples: int = 0
    witness: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


@dataclass
class BoundReport:
    osc_u: float
    sup_abs_u: float
    sup_grad: float
    sup_hess: float
    interior_grad_at_center: float
    gradient_ratio: float
    c0_bound_check: dict = field(default_factory=dict)
    refinement: dict = field(default_factory=dict)

    @property
    def finite(self):
        vals = (self.osc_u, self.sup_grad, self.sup_hess, self.interior_grad_at_center)
        return all(np.isfinite(v) for v in vals)

    def to_dict(self):
        return asdict(self)


def _state_box(prob, sampler):
    n = prob.sig.n
    ub = sampler.u_bound if sampler.u_bound is not None else prob.u_bound
    pb = sampler.p_bound if sampler.p_bound is not None else prob.p_bound
    s = sampler.unit(2 * n + 1, sampler.n_samples, stream=0)
    x = prob.domain.scale_unit(s[:, :n])
    u = ub * (2 * s[:, n] - 1)
    p = pb * (2 * s[:, n + 1:] - 1)
    return x, u, p, ub, pb


def _boundary_states(prob, sampler, ub):
    n = prob.sig.n
    s = sampler.unit(n + 2, sampler.n_samples, stream=1)
    x, nu = prob.domain.boundary_points(s[:, :n], s[:, n])
    u = ub * (2 * s[:, n + 1] - 1)
    return x, u, nu


def _witness(i, x, u, p=None):
    out = {"x": x[i].tolist(), "u": float(u[i])}
    if p is not None:
        out["p"] = p[i].tolist()
    return out


def check_structural(prob, sampler=None):
    """Measure min(-φ_u) on the boundary and min(-∂_u(1/ψ̃)) in the interior."""
    sampler = sampler or Sampler()
    x, u, p, ub, pb = _state_box(prob, sampler)
    val, d_u, _, _ = exprlang.partials_batch(prob.psi_tilde, x, u, p, wrt=("u",))
    inv_u = -d_u / val**2  # ∂_u (1/ψ̃)
    a_all = -inv_u
    ia = int(np.argmin(a_all))
    bx, bu, bnu = _boundary_states(prob, sampler, ub)
    _, phi_u, _, _ = exprlang.partials_batch(prob.phi, bx, bu, np.zeros_like(bx), bnu, wrt=("u",))
    c_all = -phi_u
    ic = int(np.argmin(c_all))
    c0m, a0m = float(c_all[ic]), float(a_all[ia])
    c0, a0 = prob.structural.c0, prob.structural.alpha0
    return StructuralReport(
        c0_measured=c0m,
        alpha0_measured=a0m,
        c0_ok=bool(c0m >= c0 and c0 > 0) if c0 is not None else bool(c0m > 0),
        alpha0_ok=bool(a0m >= a0 and a0 > 0) if a0 is not None else bool(a0m > 0),
        c0_required=c0,
        alpha0_required=a0,
        c0_witness=_witness(ic, bx, bu),
        alpha0_witness=_witness(ia, x, u, p),
        samples=f"{sampler.n_samples} Halton points, seed {sampler.seed}, |u| <= {ub}, |p_i| <= {pb}",
    )


def _growth_samples(prob, sampler, m1):
    n = prob.sig.n
    ub = sampler.u_bound if sampler.u_bound is not None else prob.u_bound
    decades = max(1, ceil(log10(sampler.p_max / m1) - 1e-12))
    xs, us, ps = [], [], []
    for d in range(decades):
        s = sampler.unit(2 * n + 2, sampler.per_decade, stream=100 + d)
        x = prob.domain.scale_unit(s[:, :n])
        u = ub * (2 * s[:, n] - 1)
        mag = m1 * 10.0 ** (d + s[:, n + 1])
        direction = 2 * s[:, n + 2:] - 1
        direction[np.all(direction == 0, axis=1), 0] = 1.0
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        keep = (mag > m1) & (mag <= sampler.p_max)
        xs.append(x[keep])
        us.append(u[keep])
        ps.append(mag[keep, None] * direction[keep])
    return np.concatenate(xs), np.concatenate(us), np.concatenate(ps)


def check_growth(prob, sampler=None):
    """sup over |p| in (M1, p_max] of (|ψ̃_x| + |ψ̃_z||p| + |ψ̃_p||p|²)/|p|^{2+γ}."""
    sampler = sampler or Sampler()
    st = prob.structural
    gamma = 0.0 if st.gamma is None else st.gamma
    m1 = 1.0 if st.M1 is None else st.M1
    if gamma >= 1:
        raise InvalidInputError("growth exponent gamma must be < 1")
    if sampler.p_max <= m1:
        raise InvalidInputError("p_max must exceed M1")
    x, u, p = _growth_samples(prob, sampler, m1)
    _, d_u, d_p, d_x = exprlang.partials_batch(prob.psi_tilde, x, u, p)
    q = np.linalg.norm(p, axis=1)
    lhs = np.linalg.norm(d_x, axis=1) + np.abs(d_u) * q + np.linalg.norm(d_p, axis=1) * q**2
    ratio = lhs / q ** (2 + gamma)
    i = int(np.argmax(ratio))
    sup = float(ratio[i])
    c1 = st.C1
    return GrowthReport(
        gamma=gamma, C1=c1, M1=m1, p_max=sampler.p_max, measured_sup=sup,
        ok=bool(c1 is not None and sup <= c1), n_samples=int(len(q)),
        witness=_witness(i, x, u, p),
    )


def gradient_ratio(grad_center, osc, r, gamma=0.0):
    """|Du(centre)| / (osc/r + osc^{2/(1-γ)} + osc^{1/(1-γ)})."""
    denom = osc / r + osc ** (2 / (1 - gamma)) + osc ** (1 / (1 - gamma))
    return float(grad_center / denom) if denom > 0 else float("inf")


def _max_u_bound(prob, field, c0):
    """max u <= max over boundary nodes of φ(x, 0)/c0 + 10 h² (1 + |u|_inf)."""
    grid = field.grid
    bnd = grid.boundary
    x = grid.coords[bnd]
    nu = grid.normals[bnd]
    phi0 = exprlang.evaluate_batch(prob.phi, x, np.zeros(len(x)), np.zeros_like(x), nu)
    u = field.values
    tol = 10 * grid.h**2 * (1 + np.abs(u).max())
    bound = float(phi0.max() / c0)
    return {"c0": c0, "max_u": float(u.max()), "bound": bound, "tol": float(tol),
            "ok": bool(u.max() <= bound + tol)}


def verify_solution(prob, field, report):
    """Bound report for a converged solution."""
    if not report.converged:
        raise InvalidInputError("verify_solution needs a converged solve report")
    u = field.values
    grid = field.grid
    grads = field.gradient_norms()
    osc = float(u.max() - u.min())
    centre = grid.center_node()
    gamma = prob.structural.gamma or 0.0
    out = BoundReport(
        osc_u=osc,
        sup_abs_u=float(np.abs(u).max()),
        sup_grad=float(grads.max()),
        sup_hess=float(field.hessian_norms().max()),
        interior_grad_at_center=float(grads[centre]),
        gradient_ratio=gradient_ratio(grads[centre], osc, grid.inradius, gamma),
    )
    c0 = prob.structural.c0
    if c0 is None:
        bnd = grid.boundary
        x = grid.coords[bnd]
        _, phi_u, _, _ = exprlang.partials_batch(
            prob.phi, x, u[bnd], np.zeros_like(x), grid.normals[bnd], wrt=("u",))
        c0 = float((-phi_u).min())
    if c0 > 0:
        out.c0_bound_check = _max_u_bound(prob, field, c0)
    else:
        out.c0_bound_check = {"c0": c0, "ok": None, "note": "c0 <= 0: bound not applicable"}
    return out


def refinement_study(bound_reports, spacings=None, slack=0.2):
    """Gradient ratios over a refinement sequence; stable if none grows by more than ``slack``."""
    ratios = [b.gradient_ratio for b in bound_reports]
    stable = all(b <= (1 + slack) * a for a, b in zip(ratios, ratios[1:]))
    out = {"ratios": ratios, "stable": bool(stable), "slack": slack}
    if spacings is not None:
        out["h"] = [float(h) for h in spacings]
    return out


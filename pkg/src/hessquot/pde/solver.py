"""Damped Newton iteration and the continuation (homotopy) driver."""

import time
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from ..errors import (AdmissibilityError, ContinuationError, ExprDomainError,
                      InvalidInputError, SolverError)
from .assembly import _raise_inadmissible, evaluate_state
from .grid import Field, RadialGrid, RectGrid
from .problem import Ball, Box, Homotopy, StartEquation

__all__ = ["SolverOptions", "SolveReport", "newton_solve", "continuation_solve",
           "radial_solve", "make_grid"]


@dataclass
class SolverOptions:
    dims: tuple = None  # nodes per axis (box); None -> 16 per axis
    radial_nodes: int = 65
    tol_r: float = 1e-9  # interior, multiplied by max(1, |ψ̃|_inf)
    tol_b: float = 1e-9
    margin: float = 1e-10
    max_iter: int = 50
    min_step: float = 2.0**-20
    linear_rtol: float = 1e-10
    A0: float = 1.0
    t_step: float = 0.25
    t_step_min: float = 1e-3


@dataclass
class SolveReport:
    converged: bool = False
    iterations: int = 0
    residual_interior: float = float("nan")
    residual_boundary: float = float("nan")
    admissibility_margin: float = float("nan")
    scale: float = 1.0
    history: list = field(default_factory=list)
    continuation: list = field(default_factory=list)
    sup_abs_u: float = float("nan")
    sup_grad: float = float("nan")
    sup_hess: float = float("nan")
    grid: dict = field(default_factory=dict)
    message: str = ""
    timings: dict = field(default_factory=dict)

    def to_dict(self, timings=False):
        out = asdict(self)
        if not timings:
            out.pop("timings")
        return out


def make_grid(prob, opts):
    dom = prob.domain
    if isinstance(dom, Box):
        dims = opts.dims if opts.dims is not None else (16,) * dom.n
        if len(dims) != dom.n:
            raise InvalidInputError(f"grid dims {dims} do not match n={dom.n}")
        return RectGrid(dom.lower, dom.upper, dims)
    if isinstance(dom, Ball):
        if not prob.is_radial or any(c != 0.0 for c in dom.center):
            raise InvalidInputError(
                "ball domains are solved by radial reduction: centre at the origin and "
                "psi/phi depending on r, u, q only")
        return RadialGrid(dom.n, dom.radius, opts.radial_nodes)
    raise InvalidInputError(f"unsupported domain {dom!r}")


def _grid_info(grid):
    if isinstance(grid, RadialGrid):
        return {"kind": "radial", "n": grid.n, "radius": grid.radius, "nodes": grid.size}
    return {"kind": "box", "dims": list(grid.shape), "lower": grid.lower.tolist(),
            "upper": grid.upper.tolist()}


def _scale(state):
    return max(1.0, float(np.abs(state.psi).max())) if state.psi.size else 1.0


def _done(state, opts):
    return state.res_interior <= opts.tol_r * _scale(state) and state.res_boundary <= opts.tol_b


def _linear_solve(jac, rhs, rtol):
    lu = spla.splu(jac.tocsc())
    d = lu.solve(rhs)
    norm = np.linalg.norm(rhs)
    if norm == 0:
        return d
    for _ in range(3):
        r = rhs - jac @ d
        if np.linalg.norm(r) <= rtol * norm:
            return d
        d = d + lu.solve(r)
    r = rhs - jac @ d
    rel = np.linalg.norm(r) / norm
    if rel > rtol:
        raise SolverError(f"linear solver failure: relative residual {rel:.3e} > {rtol:.1e}")
    return d


def _try_state(grid, u, sig, eq):
    try:
        return evaluate_state(grid, u, sig, eq)
    except (ExprDomainError, FloatingPointError):
        return None


def _newton(grid, sig, eq, u, opts, report):
    """Run damped Newton from ``u``; returns the final iterate.

    Fills ``report`` (converged flag, residuals, history) and never raises
    for convergence failures; a non-admissible start raises.
    """
    state = evaluate_state(grid, u, sig, eq)
    if not state.admissible:
        _raise_inadmissible(grid, state)
    report.history = []
    report.converged = False
    its = 0
    while True:
        report.residual_interior = state.res_interior
        report.residual_boundary = state.res_boundary
        report.admissibility_margin = state.min_margin
        report.scale = _scale(state)
        if _done(state, opts):
            report.converged = True
            report.message = "converged"
            break
        if its >= opts.max_iter:
            report.message = f"no convergence in {opts.max_iter} iterations"
            break
        try:
            d = _linear_solve(state.jac, -state.residual, opts.linear_rtol)
        except (SolverError, RuntimeError) as exc:
            report.message = str(exc) if isinstance(exc, SolverError) else f"linear solver failure: {exc}"
            break
        step = 1.0
        accepted = None
        while step >= opts.min_step:
            trial = u + step * d
            ts = _try_state(grid, trial, sig, eq)
            if (ts is not None and ts.jac is not None and ts.min_margin >= opts.margin
                    and ts.res_inf < state.res_inf):
                accepted = (trial, ts)
                break
            step *= 0.5
        its += 1
        if accepted is None:
            report.message = "line-search stall (admissibility or residual decrease not achieved)"
            break
        u, state = accepted
        report.history.append({"iteration": its, "step": step, "residual": state.res_inf,
                               "margin": state.min_margin})
    report.iterations = its
    return u


def _finish(report, grid, u):
    field_ = Field(grid, u)
    report.sup_abs_u = float(np.abs(u).max())
    report.sup_grad = float(field_.gradient_norms().max())
    report.sup_hess = float(field_.hessian_norms().max())
    report.grid = _grid_info(grid)
    return field_


def newton_solve(prob, init, opts=None):
    """Damped Newton from the admissible field ``init``.

    Returns ``(field, report)``; check ``report.converged``.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    report = SolveReport()
    u = _newton(init.grid, prob.sig, prob.equation(), np.array(init.values), opts, report)
    out = _finish(report, init.grid, u)
    report.timings["newton"] = time.perf_counter() - t0
    return out, report


def _continuation(grid, prob, opts):
    t_start = time.perf_counter()
    sig = prob.sig
    target = prob.equation()
    start = StartEquation(sig, grid.center, opts.A0)
    u = start.u0(grid.coords)
    report = SolveReport()
    total = 0

    # degenerate homotopy: the start already solves the target problem
    probe = _try_state(grid, u, sig, target)
    if probe is not None and probe.admissible and _done(probe, opts):
        u = _newton(grid, sig, target, u, opts, report)
        report.continuation = [{"t": 1.0, "newton_iterations": report.iterations, "accepted": True}]
        out = _finish(report, grid, u)
        report.timings["total"] = time.perf_counter() - t_start
        return out, report

    t, dt, streak = 0.0, opts.t_step, 0
    sub = SolveReport()
    while t < 1.0:
        t_new = min(1.0, t + dt)
        sub = SolveReport()
        try:
            trial = _newton(grid, sig, Homotopy(start, target, t_new), u, opts, sub)
        except (AdmissibilityError, ExprDomainError) as exc:
            sub.converged = False
            sub.message = str(exc)
        total += sub.iterations
        report.continuation.append({"t": t_new, "newton_iterations": sub.iterations,
                                    "accepted": sub.converged})
        if sub.converged:
            t, u = t_new, trial
            streak += 1
            if streak == 2:
                dt, streak = 2 * dt, 0
        else:
            dt, streak = dt / 2, 0
            if dt < opts.t_step_min:
                report.message = f"continuation step below {opts.t_step_min}: {sub.message}"
                report.iterations = total
                _finish(report, grid, u)
                raise ContinuationError("continuation failed", t, report)
    for key in ("converged", "residual_interior", "residual_boundary",
                "admissibility_margin", "scale", "history", "message"):
        setattr(report, key, getattr(sub, key))
    report.iterations = total
    out = _finish(report, grid, u)
    report.timings["total"] = time.perf_counter() - t_start
    return out, report


def continuation_solve(prob, opts=None):
    """Deform the quadratic start problem into ``prob`` and solve at t = 1.

    Box domains use a :class:`RectGrid` of ``opts.dims`` nodes; ball
    domains are reduced to the radial ODE.
    """
    opts = opts or SolverOptions()
    return _continuation(make_grid(prob, opts), prob, opts)


def radial_solve(prob, m, opts=None):
    """Radial reduction on a ball: returns the profile on ``m`` nodes of [0, R]."""
    opts = opts or SolverOptions()
    if not isinstance(prob.domain, Ball):
        raise InvalidInputError("radial_solve needs a ball domain")
    opts = SolverOptions(**{**asdict(opts), "radial_nodes": int(m)})
    return _continuation(make_grid(prob, opts), prob, opts)

"""Structure conditions and bound checks on a problem and its solution.

sup|D²u| keeps growing under refinement in this run.  The square has
corners, and the averaged-normal Robin data there are not compatible
with a smooth solution, so the Hessian bound for smooth domains does not
apply.  The gradient ratio and the max-u bound stay put.

Run: python3 demos/06_estimates.py
"""

from hessquot.compound import OperatorSignature
from hessquot.estimates import Sampler, check_growth, check_structural, refinement_study, verify_solution
from hessquot.pde import Box, ProblemSpec, SolverOptions, StructuralConstants, continuation_solve

sig = OperatorSignature(2, 1, 2, 0)
prob = ProblemSpec.from_strings(
    sig, Box((0, 0), (1, 1)), phi="-u - 0.2*u^3 + 0.5 + x1*x2",
    psi_tilde="1.5 + 0.5*u + 0.1*q^1.5",
    structural=StructuralConstants(c0=1.0, alpha0=0.1, gamma=0.5, C1=1.0, M1=1.0))

sampler = Sampler(n_samples=4000, seed=0)
s = check_structural(prob, sampler)
print(f"c0 measured {s.c0_measured:.4f} ok={s.c0_ok};  alpha0 measured {s.alpha0_measured:.4f} ok={s.alpha0_ok}")
g = check_growth(prob, sampler)
print(f"growth sup {g.measured_sup:.4f} over {g.n_samples} samples, ok={g.ok}")

reports, hs = [], []
for m in (9, 17, 33):
    fld, rep = continuation_solve(prob, SolverOptions(dims=(m, m)))
    b = verify_solution(prob, fld, rep)
    reports.append(b)
    hs.append(fld.grid.h)
    chk = b.c0_bound_check
    print(f"{m:3d}^2  osc u {b.osc_u:.4f}  sup|Du| {b.sup_grad:.4f}  sup|D2u| {b.sup_hess:.4f}  "
          f"max u {chk['max_u']:.4f} <= {chk['bound']:.4f} + {chk['tol']:.1e}: {chk['ok']}")
print("gradient ratio study:", refinement_study(reports, hs))

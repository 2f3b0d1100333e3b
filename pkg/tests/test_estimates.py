import numpy as np
import pytest

from hessquot import presets
from hessquot.compound import OperatorSignature
from hessquot.errors import InvalidInputError
from hessquot.estimates import (BoundReport, Sampler, check_growth, check_structural,
                                gradient_ratio, refinement_study, verify_solution)
from hessquot.pde import Box, ProblemSpec, SolveReport, SolverOptions, StructuralConstants
from hessquot.pde import continuation_solve, radial_solve

SIG = OperatorSignature(2, 1, 2, 0)
BOX = Box((0, 0), (1, 1))
SMALL = Sampler(n_samples=2000, per_decade=500)


def problem(psi, phi="-u + 1", **st):
    return ProblemSpec.from_strings(SIG, BOX, phi, psi_tilde=psi, structural=StructuralConstants(**st))


def test_c0_of_minus_u():
    rep = check_structural(problem("1", "-u + x1*x2", c0=1.0), SMALL)
    assert rep.c0_measured == pytest.approx(1.0) and rep.c0_ok


def test_alpha0_calculus_oracle():
    # ψ̃ = 1 + u with |u| <= U: -∂u(1/ψ̃) = 1/(1+u)², minimized at u = U
    U = 0.5
    prob = ProblemSpec.from_strings(SIG, BOX, "-u", psi_tilde="1 + u", u_bound=U,
                                    structural=StructuralConstants(alpha0=0.4))
    rep = check_structural(prob, Sampler(n_samples=10_000))
    assert rep.alpha0_measured == pytest.approx(1 / (1 + U) ** 2, rel=1e-3)
    assert rep.alpha0_measured >= 1 / (1 + U) ** 2
    assert rep.alpha0_ok
    assert rep.alpha0_witness["u"] == pytest.approx(U, abs=1e-3)


def test_alpha0_zero_for_u_independent_psi():
    rep = check_structural(problem("2 + x1", alpha0=0.1), SMALL)
    assert rep.alpha0_measured == 0.0 and not rep.alpha0_ok


def test_structural_is_deterministic_and_seeded():
    prob = problem("1 + u^2 + 2*p1^2", "-u - 0.5*u^3 + x2", c0=1.0)
    a = check_structural(prob, Sampler(n_samples=500, seed=3)).to_dict()
    b = check_structural(prob, Sampler(n_samples=500, seed=3)).to_dict()
    c = check_structural(prob, Sampler(n_samples=500, seed=4)).to_dict()
    assert a == b and a != c


def test_growth_constant_psi():
    rep = check_growth(problem("3", gamma=0.0, C1=1e-6, M1=1.0), SMALL)
    assert rep.measured_sup == 0.0 and rep.ok
    assert rep.n_samples > 0


def test_growth_quadratic_in_q_fails_for_large_p():
    # |ψ̃_p||p|² = 2|p|³, so the ratio to |p|² grows linearly
    prob = problem("1 + q^2", gamma=0.0, C1=100.0, M1=1.0)
    small = check_growth(prob, Sampler(p_max=10.0, per_decade=500))
    large = check_growth(prob, Sampler(p_max=1e4, per_decade=500))
    assert small.measured_sup <= 20.0 + 1e-9 and small.ok
    assert large.measured_sup > 1000 and not large.ok
    assert large.measured_sup == pytest.approx(2e4, rel=0.05)


def test_growth_fractional_power():
    # ψ̃ = 1 + q^1.5: |ψ̃_p||p|² = 1.5|p|^2.5 = 1.5|p|^{2+γ}
    rep = check_growth(problem("1 + q^1.5", gamma=0.5, C1=2.0, M1=1.0), SMALL)
    assert rep.measured_sup == pytest.approx(1.5, rel=1e-9) and rep.ok


def test_growth_monotone_in_p_max():
    prob = problem("1 + sin(x1)*q + 0.1*u*q^1.2", gamma=0.3, C1=10.0, M1=2.0)
    sups = [check_growth(prob, Sampler(p_max=pm, per_decade=300)).measured_sup
            for pm in (20.0, 200.0, 2e3, 2e4)]
    assert all(b >= a for a, b in zip(sups, sups[1:]))


def test_growth_preconditions():
    with pytest.raises(InvalidInputError):
        problem("1", gamma=1.0)
    with pytest.raises(InvalidInputError):
        check_growth(problem("1", M1=5.0), Sampler(p_max=4.0))


def test_gradient_ratio_formula():
    assert gradient_ratio(2.0, 1.0, 0.5) == pytest.approx(2.0 / (2 + 1 + 1))
    assert gradient_ratio(1.0, 4.0, 1.0, gamma=0.5) == pytest.approx(1.0 / (4 + 256 + 16))


def test_verify_exact_quadratic_on_ball():
    pre = presets.radial_quadratic()
    fld, rep = radial_solve(pre.problem, 65)
    b = verify_solution(pre.problem, fld, rep)
    assert b.osc_u == pytest.approx(0.5, abs=1e-10)
    assert b.sup_grad == pytest.approx(1.0, abs=1e-10)
    assert b.sup_hess == pytest.approx(1.0, abs=1e-8)
    assert b.finite and b.c0_bound_check["ok"]


def test_verify_poisson_bound():
    pre = presets.poisson_box()
    fld, rep = continuation_solve(pre.problem, SolverOptions(dims=(17, 17)))
    b = verify_solution(pre.problem, fld, rep)
    chk = b.c0_bound_check
    assert chk["ok"] and chk["max_u"] <= chk["bound"] + chk["tol"]
    # φ(x, 0) = ν·x + |x|²/2 is largest at the corner (1, 1): √2 + 1
    assert chk["bound"] == pytest.approx(np.sqrt(2) + 1)


def test_verify_measures_c0_when_unset():
    sig = OperatorSignature(2, 1, 1, 0)
    prob = ProblemSpec.from_strings(sig, BOX, "-2*u + 1", psi_tilde="1")
    fld, rep = continuation_solve(prob, SolverOptions(dims=(9, 9)))
    assert verify_solution(prob, fld, rep).c0_bound_check["c0"] == pytest.approx(2.0)


def test_verify_rejects_unconverged():
    pre = presets.poisson_box()
    fld, _ = continuation_solve(pre.problem, SolverOptions(dims=(9, 9)))
    with pytest.raises(InvalidInputError):
        verify_solution(pre.problem, fld, SolveReport(converged=False))


def test_refinement_study_slack():
    mk = lambda r: BoundReport(1, 1, 1, 1, 1, r)
    assert refinement_study([mk(1.0), mk(1.19), mk(1.1)])["stable"]
    assert not refinement_study([mk(1.0), mk(1.25)])["stable"]
    assert refinement_study([mk(1.0)], [0.1])["h"] == [0.1]

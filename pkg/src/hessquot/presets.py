"""Ready-made problems with known solutions, used by tests, demos and configs."""

from dataclasses import dataclass

import numpy as np

from . import exprlang
from .compound import OperatorSignature, regime_constants
from .pde import Ball, Box, ProblemSpec, StructuralConstants


@dataclass(frozen=True)
class Preset:
    problem: ProblemSpec
    exact: str = None  # expression in x (or r) of the exact solution, if known

    def exact_values(self, grid):
        ex = exprlang.parse(self.exact, self.problem.sig.n)
        x = grid.coords
        return exprlang.evaluate_batch(ex, x, np.zeros(len(x)), np.zeros_like(x))


def _normal_dot(expr_per_axis):
    return " + ".join(f"nu{i + 1}*({e})" for i, e in enumerate(expr_per_axis))


def poisson_box(n=2):
    """Δu = n on the unit box with u_ν = -u + ν·x + |x|²/2; solution |x|²/2."""
    sig = OperatorSignature(n, 1, 1, 0)
    box = Box((0.0,) * n, (1.0,) * n)
    phi = f"-u + {_normal_dot([f'x{i + 1}' for i in range(n)])} + r^2/2"
    prob = ProblemSpec.from_strings(sig, box, phi, psi_tilde=repr(float(n)),
                                    structural=StructuralConstants(c0=1.0))
    return Preset(prob, "r^2/2")


def manufactured_box(amplitude=0.1):
    """n=3, p=2, k=2, l=0 on [0,1]^3 with u* = |x|²/2 + a sin(x1).

    D²u* = diag(1 - a sin x1, 1, 1) so Λ = (2 - a sin x1, 2 - a sin x1, 2)
    and F(D²u*) = sqrt((2 - a sin x1)(6 - a sin x1)).
    """
    a = repr(float(amplitude))
    sig = OperatorSignature(3, 2, 2, 0)
    ustar = f"(r^2/2 + {a}*sin(x1))"
    psi = f"sqrt((2 - {a}*sin(x1))*(6 - {a}*sin(x1))) + (u - {ustar})"
    phi = _normal_dot([f"x1 + {a}*cos(x1)", "x2", "x3"]) + f" - (u - {ustar})"
    prob = ProblemSpec.from_strings(sig, Box((0, 0, 0), (1, 1, 1)), phi, psi_tilde=psi,
                                    structural=StructuralConstants(c0=1.0, gamma=0.0, M1=2.0))
    return Preset(prob, ustar)


def radial_quadratic(n=3, p=2, k=2, l=0, radius=1.0):
    """u = r²/2 on the ball: Λ ≡ p, ψ̃ = p (C(N,k)/C(N,l))^{1/(k-l)}, u' (R) = R."""
    sig = OperatorSignature(n, p, k, l)
    level = repr(regime_constants(sig))
    R = repr(float(radius))
    prob = ProblemSpec.from_strings(sig, Ball(radius, (0.0,) * n), f"{R} - (u - r^2/2)",
                                    psi_tilde=level, structural=StructuralConstants(c0=1.0))
    return Preset(prob, "r^2/2")


def radial_quartic(c=0.1, radius=1.0):
    """n=3, p=2, k=2, l=0 with u* = r²/2 + c r⁴ on the ball.

    u'' = 1 + 12c r², u'/r = 1 + 4c r², so Λ = (a+b, a+b, 2b) and
    F = sqrt((a+b)(a+5b)).
    """
    cs = repr(float(c))
    sig = OperatorSignature(3, 2, 2, 0)
    ustar = f"(r^2/2 + {cs}*r^4)"
    a = f"(1 + 12*{cs}*r^2)"
    b = f"(1 + 4*{cs}*r^2)"
    psi = f"sqrt(({a} + {b})*({a} + 5*{b})) + (u - {ustar})"
    R = float(radius)
    slope = repr(R + 4 * c * R**3)
    prob = ProblemSpec.from_strings(sig, Ball(radius, (0.0, 0.0, 0.0)), f"{slope} - (u - {ustar})",
                                    psi_tilde=psi, structural=StructuralConstants(c0=1.0))
    return Preset(prob, ustar)


def robin_problem(sig, domain, psi, g, beta):
    """σ_k/σ_l (Λ) = ψ(x) with u_ν = -β u + g(x); ψ, g positive, β > 0."""
    prob = ProblemSpec.from_strings(sig, domain, f"-{float(beta)!r}*u + ({g})", psi=psi,
                                    structural=StructuralConstants(c0=float(beta)))
    return Preset(prob)

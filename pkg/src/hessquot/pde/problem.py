"""Problem definitions for the Neumann problem F(D²u) = ψ̃(x, u, Du), u_ν = φ(x, u)."""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .. import exprlang
from ..compound import OperatorSignature, regime_constants
from ..errors import InvalidInputError

__all__ = ["Box", "Ball", "StructuralConstants", "ProblemSpec", "ExprEquation",
           "StartEquation", "Homotopy"]


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))
        if len(self.lower) != len(self.upper):
            raise InvalidInputError("box bounds differ in length")
        if any(b <= a for a, b in zip(self.lower, self.upper)):
            raise InvalidInputError("box must have upper > lower on every axis")

    @property
    def n(self):
        return len(self.lower)

    @property
    def center(self):
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    def scale_unit(self, s):
        lo, hi = np.array(self.lower), np.array(self.upper)
        return lo + s * (hi - lo)

    def boundary_points(self, s, w):
        """Map unit samples onto faces; returns (x, outward normal)."""
        x = self.scale_unit(s)
        face = np.minimum((w * 2 * self.n).astype(int), 2 * self.n - 1)
        axis, high = face // 2, face % 2
        rows = np.arange(len(x))
        x[rows, axis] = np.where(high == 1, np.array(self.upper)[axis], np.array(self.lower)[axis])
        nu = np.zeros_like(x)
        nu[rows, axis] = np.where(high == 1, 1.0, -1.0)
        return x, nu


@dataclass(frozen=True)
class Ball:
    radius: float
    center: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if self.radius <= 0:
            raise InvalidInputError("ball radius must be positive")

    @property
    def n(self):
        return len(self.center)

    def scale_unit(self, s):
        # cube [-1, 1]^n -> ball by radial rescaling v * |v|_inf / |v|_2
        v = 2 * np.asarray(s, dtype=float) - 1
        l2 = np.linalg.norm(v, axis=1, keepdims=True)
        linf = np.abs(v).max(axis=1, keepdims=True)
        factor = np.divide(linf, l2, out=np.zeros_like(l2), where=l2 > 0)
        return np.array(self.center) + self.radius * v * factor

    def boundary_points(self, s, w):
        del w
        v = 2 * np.asarray(s, dtype=float) - 1
        v[np.all(v == 0, axis=1), 0] = 1.0
        direction = v / np.linalg.norm(v, axis=1, keepdims=True)
        return np.array(self.center) + self.radius * direction, direction


@dataclass(frozen=True)
class StructuralConstants:
    """Constants of the structure conditions; any may be None (not asserted)."""

    c0: float = None
    alpha0: float = None
    gamma: float = None
    C1: float = None
    M1: float = None


@dataclass(frozen=True)
class ProblemSpec:
    """A full Neumann problem.

    ``psi_tilde`` is the normalized right-hand side ψ^{1/(k-l)}; use
    :meth:`from_strings` with ``psi=`` to supply ψ itself.  ``u_bound`` and
    ``p_bound`` describe the state box used for load-time sanity sampling
    (and as defaults for the estimate samplers).
    """

    sig: OperatorSignature
    domain: object
    psi_tilde: exprlang.Expr
    phi: exprlang.Expr
    structural: StructuralConstants = field(default_factory=StructuralConstants)
    u_bound: float = 1.0
    p_bound: float = 1.0
    n_check: int = 256

    def __post_init__(self):
        n = self.sig.n
        if self.domain.n != n:
            raise InvalidInputError(f"domain dimension {self.domain.n} differs from n={n}")
        if self.psi_tilde.n != n or self.phi.n != n:
            raise InvalidInputError("expressions were parsed for a different dimension")
        if self.phi.uses_any(("p", "q")):
            raise InvalidInputError("boundary data phi(x, u) must not depend on the gradient (p_i, q)")
        if self.psi_tilde.uses_any(("nu",)):
            raise InvalidInputError("psi must not reference the boundary normal nu_i")
        gamma = self.structural.gamma
        if gamma is not None and gamma >= 1:
            raise InvalidInputError("growth exponent gamma must be < 1")
        self._check_positive()

    def _check_positive(self):
        n = self.sig.n
        pts = qmc.Halton(d=2 * n + 1, scramble=False).random(self.n_check + 1)[1:]
        x = self.domain.scale_unit(pts[:, :n])
        u = self.u_bound * (2 * pts[:, n] - 1)
        p = self.p_bound * (2 * pts[:, n + 1:] - 1)
        vals = exprlang.evaluate_batch(self.psi_tilde, x, u, p)
        bad = ~(vals > 0)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise InvalidInputError(
                f"psi_tilde must be positive: value {vals[i]:.6g} at x={x[i].tolist()}, "
                f"u={u[i]:.6g}, p={p[i].tolist()}"
            )

    @classmethod
    def from_strings(cls, sig, domain, phi, psi_tilde=None, psi=None, **kwargs):
        if (psi_tilde is None) == (psi is None):
            raise InvalidInputError("give exactly one of psi_tilde or psi")
        n = sig.n
        if psi_tilde is not None:
            pt = exprlang.parse(psi_tilde, n)
        else:
            raw = exprlang.parse(psi, n)
            root = exprlang.Binary("^", raw.root, exprlang.Const(1.0 / (sig.k - sig.l)))
            pt = exprlang.Expr(root, n, psi)
        return cls(sig, domain, pt, exprlang.parse(phi, n), **kwargs)

    @property
    def is_radial(self):
        allowed = {"r", "u", "q"}
        return (isinstance(self.domain, Ball)
                and self.psi_tilde.identifiers <= allowed
                and self.phi.identifiers <= allowed)

    def equation(self):
        return ExprEquation(self.psi_tilde, self.phi)


class ExprEquation:
    """Right-hand side and boundary data backed by parsed expressions."""

    def __init__(self, psi_tilde, phi):
        self.psi_tilde = psi_tilde
        self.phi_expr = phi

    def psi(self, x, u, grad):
        val, d_u, d_p, _ = exprlang.partials_batch(self.psi_tilde, x, u, grad, wrt=("u", "p"))
        return val, d_u, d_p

    def phi(self, x, u, nu):
        val, d_u, _, _ = exprlang.partials_batch(
            self.phi_expr, x, u, np.zeros_like(x), nu, wrt=("u",))
        return val, d_u


class StartEquation:
    """Problem solved exactly by u0 = (A/2)|x - c|².

    ψ̃0 = F(A I) = A p (C(N,k)/C(N,l))^{1/(k-l)} and
    φ0(x, u) = A ν·(x - c) - (u - u0(x)).
    """

    def __init__(self, sig, center, scale):
        self.center = np.asarray(center, dtype=float)
        self.scale = float(scale)
        self.level = self.scale * regime_constants(sig)

    def u0(self, x):
        d = x - self.center
        return 0.5 * self.scale * np.sum(d * d, axis=-1)

    def psi(self, x, u, grad):
        m = len(x)
        return np.full(m, self.level), np.zeros(m), np.zeros((m, x.shape[1]))

    def phi(self, x, u, nu):
        val = self.scale * np.sum(nu * (x - self.center), axis=-1) - (u - self.u0(x))
        return val, -np.ones(len(x))


class Homotopy:
    """(1 - t) * start + t * target for both ψ̃ and φ."""

    def __init__(self, start, target, t):
        self.start, self.target, self.t = start, target, float(t)

    def psi(self, x, u, grad):
        t = self.t
        if t == 1.0:
            return self.target.psi(x, u, grad)
        a, au, ap = self.start.psi(x, u, grad)
        if t == 0.0:
            return a, au, ap
        b, bu, bp = self.target.psi(x, u, grad)
        return (1 - t) * a + t * b, (1 - t) * au + t * bu, (1 - t) * ap + t * bp

    def phi(self, x, u, nu):
        t = self.t
        if t == 1.0:
            return self.target.phi(x, u, nu)
        a, au = self.start.phi(x, u, nu)
        if t == 0.0:
            return a, au
        b, bu = self.target.phi(x, u, nu)
        return (1 - t) * a + t * b, (1 - t) * au + t * bu

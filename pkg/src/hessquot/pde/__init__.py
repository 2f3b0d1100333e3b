"""Discretization and solvers for the Neumann problem on boxes and balls."""

from .assembly import evaluate_state, jacobian, radial_multiplicities, residual
from .grid import (Field, RadialGrid, RectGrid, gradient_at, hessian_at, read_field_csv,
                   write_field_csv)
from .problem import Ball, Box, Homotopy, ProblemSpec, StartEquation, StructuralConstants
from .solver import (SolveReport, SolverOptions, continuation_solve, make_grid, newton_solve,
                     radial_solve)

__all__ = [
    "Ball", "Box", "Field", "Homotopy", "ProblemSpec", "RadialGrid", "RectGrid",
    "SolveReport", "SolverOptions", "StartEquation", "StructuralConstants",
    "continuation_solve", "evaluate_state", "gradient_at", "hessian_at", "jacobian",
    "make_grid", "newton_solve", "radial_multiplicities", "radial_solve", "read_field_csv",
    "residual", "write_field_csv",
]

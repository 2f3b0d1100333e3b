"""Manufactured solutions on the unit cube and on the unit ball.

The cube run shows the continuation path and the L∞ error under
refinement; the ball run uses the radial reduction.

Run: python3 demos/05_solve_box_and_ball.py
"""

from math import log

import numpy as np

from hessquot import presets
from hessquot.pde import SolverOptions, continuation_solve, radial_solve

box = presets.manufactured_box()
prev = None
for m in (8, 12, 16):
    fld, rep = continuation_solve(box.problem, SolverOptions(dims=(m, m, m)))
    err = np.abs(fld.values - box.exact_values(fld.grid)).max()
    path = [f"{c['t']:.2f}" for c in rep.continuation]
    line = f"{m:3d}^3  t-path {path}  newton {rep.iterations:2d}  error {err:.3e}"
    if prev:
        line += f"  order {log(prev[1] / err) / log(prev[0] / fld.grid.h):.2f}"
    print(line)
    prev = (fld.grid.h, err)

ball = presets.radial_quartic()
prev = None
for m in (17, 33, 65, 129):
    fld, rep = radial_solve(ball.problem, m)
    err = np.abs(fld.values - ball.exact_values(fld.grid)).max()
    line = f"radial m={m:4d}  error {err:.3e}"
    if prev:
        line += f"  order {log(prev[1] / err) / log(prev[0] / fld.grid.h):.2f}"
    print(line)
    prev = (fld.grid.h, err)

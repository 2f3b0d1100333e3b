"""Right-hand sides and boundary data as expressions with exact first derivatives.

Run: python3 demos/04_expressions.py
"""

import numpy as np

from hessquot import exprlang
from hessquot.errors import ExprError

e = exprlang.parse("exp(-q^2) * (1 + u^2) + 0.1*x1*p2", 2)
print("parsed :", exprlang.to_text(e))
pt = exprlang.EvalPoint(x=np.array([0.5, 1.0]), u=0.3, p=np.array([0.2, -0.4]))
r = exprlang.eval_with_partials(e, pt)
print(f"value {r.value:.6f}  d_u {r.d_u:.6f}  d_p {np.round(r.d_p, 6)}  d_x {np.round(r.d_x, 6)}")

for bad in ["sqrt(", "x3 + u", "u^p1"]:
    try:
        exprlang.parse(bad, 2)
    except ExprError as exc:
        print(f"{bad!r:12} -> {type(exc).__name__}: {exc}")

try:
    exprlang.evaluate(exprlang.parse("log(u)", 2), exprlang.EvalPoint(np.zeros(2), -1.0, np.zeros(2)))
except ExprError as exc:
    print("log(u) at u=-1 ->", exc)

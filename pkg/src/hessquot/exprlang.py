"""A small arithmetic language for the right-hand side and boundary data.

Identifiers (for dimension n): ``x1..xn`` (position), ``u`` (value),
``p1..pn`` (gradient argument), ``r`` = |x|, ``q`` = |p| and ``nu1..nun``
(outward unit normal, only meaningful in boundary data).  Functions are
exp, log, sqrt, sin, cos and abs; ``^`` takes a constant exponent.

Evaluation works on scalars or numpy arrays (broadcast over sample points)
and derivatives come from forward-mode dual numbers, one pass per
direction.
"""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ExprDomainError,
    ExprSyntaxError,
    InvalidInputError,
    NonConstantExponentError,
    UnknownIdentifierError,
)

__all__ = [
    "Const",
    "Var",
    "Unary",
    "Binary",
    "Expr",
    "EvalPoint",
    "Partials",
    "parse",
    "to_text",
    "evaluate",
    "eval_with_partials",
    "evaluate_batch",
    "partials_batch",
]

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos", "abs")


@dataclass(frozen=True)
class Const:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    arg: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Expr:
    """Parsed expression: AST root plus the dimension it was parsed for."""

    root: object
    n: int
    text: str = field(default="", compare=False)

    @property
    def identifiers(self):
        return frozenset(_names(self.root))

    def uses_any(self, prefixes):
        return any(name == pre or (name.startswith(pre) and name[len(pre):].isdigit())
                   for name in self.identifiers for pre in prefixes)

    def __str__(self):
        return to_text(self)


def _names(node):
    if isinstance(node, Var):
        yield node.name
    elif isinstance(node, Unary):
        yield from _names(node.arg)
    elif isinstance(node, Binary):
        yield from _names(node.left)
        yield from _names(node.right)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _valid_names(n):
    names = {"u", "r", "q"}
    for i in range(1, n + 1):
        names.update({f"x{i}", f"p{i}", f"nu{i}"})
    return names


class _Parser:
    def __init__(self, text, n):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = _valid_names(n)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = Binary(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = Binary(op, node, self.unary(), pos)
        return node

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.unary(), pos)
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exponent = self.unary()
            if any(True for _ in _names(exponent)):
                raise NonConstantExponentError("exponent of '^' must be constant", pos)
            return Binary("^", base, exponent, pos)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val), pos)
        if kind == "id":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(val, arg, pos)
            if val not in self.names:
                raise UnknownIdentifierError(val, pos)
            return Var(val, pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {what}", pos)


def parse(text, n):
    """Parse ``text`` for dimension ``n``; offsets in errors are 0-based."""
    if n < 1:
        raise InvalidInputError("dimension must be positive")
    parser = _Parser(text, n)
    root = parser.expr()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {val!r}", pos)
    return Expr(root, n, text)


def _node_text(node):
    if isinstance(node, Const):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{_node_text(node.arg)})"
        return f"{node.op}({_node_text(node.arg)})"
    return f"({_node_text(node.left)} {node.op} {_node_text(node.right)})"


def to_text(expr):
    """Fully parenthesised source that reparses to an equal AST."""
    root = expr.root if isinstance(expr, Expr) else expr
    return _node_text(root)


# ------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class EvalPoint:
    x: np.ndarray
    u: float
    p: np.ndarray
    nu: np.ndarray = None


@dataclass(frozen=True)
class Partials:
    value: float
    d_u: float
    d_p: np.ndarray
    d_x: np.ndarray


def _fail(message, node, bad):
    idx = None
    bad = np.asarray(bad)
    if bad.ndim > 0:
        idx = int(np.flatnonzero(bad)[0])
    raise ExprDomainError(message, node.pos, idx)


def _const_value(node):
    val, _ = _ev(node, {}, None)
    return float(val)


def _ev(node, env, tan):
    """Return (value, derivative) of ``node``; derivative is None when ``tan`` is None."""
    if isinstance(node, Const):
        return node.value, (0.0 if tan is not None else None)
    if isinstance(node, Var):
        return env[node.name], (tan.get(node.name, 0.0) if tan is not None else None)
    if isinstance(node, Unary):
        a, da = _ev(node.arg, env, tan)
        op = node.op
        if op == "neg":
            return -a, (None if da is None else -da)
        if op == "exp":
            v = np.exp(a)
            return v, (None if da is None else v * da)
        if op == "log":
            bad = np.asarray(a) <= 0
            if np.any(bad):
                _fail("log of a non-positive number", node, bad)
            return np.log(a), (None if da is None else da / a)
        if op == "sqrt":
            bad = np.asarray(a) < 0
            if np.any(bad):
                _fail("sqrt of a negative number", node, bad)
            v = np.sqrt(a)
            if da is None:
                return v, None
            with np.errstate(divide="ignore", invalid="ignore"):
                d = np.where(np.asarray(da) == 0, 0.0, da / (2.0 * v))
            if not np.all(np.isfinite(d)):
                _fail("sqrt is not differentiable at 0", node, ~np.isfinite(d))
            return v, d
        if op == "sin":
            return np.sin(a), (None if da is None else np.cos(a) * da)
        if op == "cos":
            return np.cos(a), (None if da is None else -np.sin(a) * da)
        if op == "abs":
            return np.abs(a), (None if da is None else np.sign(a) * da)
        raise AssertionError(op)
    a, da = _ev(node.left, env, tan)
    op = node.op
    if op == "^":
        c = _const_value(node.right)
        a_arr = np.asarray(a, dtype=float)
        if c != int(c):
            bad = a_arr < 0
            if np.any(bad):
                _fail("non-integer power of a negative number", node, bad)
        if c < 0:
            bad = a_arr == 0
            if np.any(bad):
                _fail("division by zero in negative power", node, bad)
        v = np.power(a_arr, c)
        if da is None:
            return v, None
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(np.asarray(da) == 0, 0.0, c * np.power(a_arr, c - 1.0) * da)
        if not np.all(np.isfinite(d)):
            _fail("power is not differentiable here", node, ~np.isfinite(d))
        return v, d
    b, db = _ev(node.right, env, tan)
    if op == "+":
        return a + b, (None if da is None else da + db)
    if op == "-":
        return a - b, (None if da is None else da - db)
    if op == "*":
        return a * b, (None if da is None else da * b + a * db)
    if op == "/":
        bad = np.asarray(b) == 0
        if np.any(bad):
            _fail("division by zero", node, bad)
        return a / b, (None if da is None else (da * b - a * db) / (b * b))
    raise AssertionError(op)


def _environment(expr, x, u, p, nu):
    n = expr.n
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if x.shape[-1] != n or p.shape[-1] != n:
        raise InvalidInputError(f"expression was parsed for n={n}")
    env = {"u": np.asarray(u, dtype=float)}
    for i in range(n):
        env[f"x{i + 1}"] = x[..., i]
        env[f"p{i + 1}"] = p[..., i]
    env["r"] = np.sqrt(np.sum(x * x, axis=-1))
    env["q"] = np.sqrt(np.sum(p * p, axis=-1))
    if nu is not None:
        nu = np.asarray(nu, dtype=float)
        for i in range(n):
            env[f"nu{i + 1}"] = nu[..., i]
    elif expr.uses_any(("nu",)):
        raise InvalidInputError("expression references the outward normal but none was supplied")
    return env


def _safe_ratio(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b == 0, 0.0, a / np.where(b == 0, 1.0, b))


def _directions(env, n, wrt):
    """Tangent seeds: u, then p_1..p_n, then x_1..x_n."""
    if "u" in wrt:
        yield "u", None, {"u": 1.0}
    if "p" in wrt:
        for i in range(n):
            name = f"p{i + 1}"
            yield "p", i, {name: 1.0, "q": _safe_ratio(env[name], env["q"])}
    if "x" in wrt:
        for i in range(n):
            name = f"x{i + 1}"
            yield "x", i, {name: 1.0, "r": _safe_ratio(env[name], env["r"])}


def _check_finite(arr, what):
    bad = ~np.isfinite(arr)
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0]) if np.ndim(arr) else None
        raise ExprDomainError(f"{what} is not finite (overflow)", None, idx)


def _root_value(expr, env, tan):
    with np.errstate(over="ignore", invalid="ignore"):
        return _ev(expr.root, env, tan)


def evaluate_batch(expr, x, u, p, nu=None):
    """Vectorized value; ``x``, ``p`` (and ``nu``) have trailing axis n."""
    env = _environment(expr, x, u, p, nu)
    val, _ = _root_value(expr, env, None)
    _check_finite(np.asarray(val, dtype=float).reshape(-1) if np.ndim(val) else float(val), "value")
    shape = np.broadcast_shapes(np.shape(env["u"]), np.shape(env["r"]), np.shape(env["q"]))
    return np.broadcast_to(np.asarray(val, dtype=float), shape).copy()


def partials_batch(expr, x, u, p, nu=None, wrt=("u", "p", "x")):
    """Value plus requested derivatives.

    Returns ``(value, d_u, d_p, d_x)``; ``d_p`` and ``d_x`` carry a trailing
    axis of length n.  Unrequested entries are None.
    """
    env = _environment(expr, x, u, p, nu)
    n = expr.n
    val, _ = _root_value(expr, env, None)
    _check_finite(np.asarray(val, dtype=float).reshape(-1) if np.ndim(val) else float(val), "value")
    shape = np.broadcast_shapes(np.shape(env["u"]), np.shape(env["r"]), np.shape(env["q"]))
    value = np.broadcast_to(np.asarray(val, dtype=float), shape).copy()
    d_u = None
    d_p = np.zeros(shape + (n,)) if "p" in wrt else None
    d_x = np.zeros(shape + (n,)) if "x" in wrt else None
    for kind, i, seed in _directions(env, n, wrt):
        _, d = _root_value(expr, env, seed)
        d = np.broadcast_to(np.asarray(d, dtype=float), shape)
        _check_finite(d.reshape(-1) if d.ndim else float(d), "derivative")
        if kind == "u":
            d_u = d.copy()
        elif kind == "p":
            d_p[..., i] = d
        else:
            d_x[..., i] = d
    return value, d_u, d_p, d_x


def _point(expr, pt):
    x = np.asarray(pt.x, dtype=float)
    p = np.asarray(pt.p, dtype=float) if pt.p is not None else np.zeros(expr.n)
    vals = [x, p, np.asarray(pt.u, dtype=float)]
    if pt.nu is not None:
        vals.append(np.asarray(pt.nu, dtype=float))
    if not all(np.all(np.isfinite(v)) for v in vals):
        raise InvalidInputError("evaluation point has non-finite entries")
    return x, float(pt.u), p


def evaluate(expr, pt):
    """Evaluate at a single :class:`EvalPoint`."""
    x, u, p = _point(expr, pt)
    return float(evaluate_batch(expr, x, u, p, pt.nu))


def eval_with_partials(expr, pt):
    x, u, p = _point(expr, pt)
    value, d_u, d_p, d_x = partials_batch(expr, x, u, p, pt.nu)
    return Partials(float(value), float(d_u), np.asarray(d_p), np.asarray(d_x))

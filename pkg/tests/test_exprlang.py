import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessquot import exprlang
from hessquot.exprlang import EvalPoint, eval_with_partials, evaluate, parse, to_text
from hessquot.errors import (ExprDomainError, ExprSyntaxError, InvalidInputError,
                             NonConstantExponentError, UnknownIdentifierError)


def pt(x, u=0.0, p=None, nu=None):
    x = np.asarray(x, float)
    return EvalPoint(x, u, np.zeros_like(x) if p is None else np.asarray(p, float), nu)


def test_basic_example():
    assert evaluate(parse("2*x1 + u^2", 2), pt([1, 0], 3)) == 11.0


def test_syntax_error_offset():
    with pytest.raises(ExprSyntaxError) as err:
        parse("sqrt(", 2)
    assert err.value.offset == 5


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as err:
        parse("x3", 2)
    assert err.value.name == "x3" and err.value.offset == 0
    with pytest.raises(UnknownIdentifierError):
        parse("u + nu3", 2)


@pytest.mark.parametrize("text", ["u^x1", "2^(u+1)", "x1^-u"])
def test_non_constant_exponent(text):
    with pytest.raises(NonConstantExponentError):
        parse(text, 2)


@pytest.mark.parametrize("text", ["", "1 +", "(u", "u)", "2 3", "u $ 1", "sin u", "1..2"])
def test_malformed(text):
    with pytest.raises(ExprSyntaxError):
        parse(text, 2)


@pytest.mark.parametrize("text,value", [
    ("2^3^2", 512.0),          # right associative
    ("-2^2", -4.0),            # ^ binds tighter than unary minus
    ("8/4/2", 1.0),            # left associative
    ("1 - 2 - 3", -4.0),
    ("2*3 + 4*5", 26.0),
    ("-(1+2)*2", -6.0),
    ("2^-1", 0.5),
    ("  1+\t2 ", 3.0),
    ("1e-3*1000", 1.0),
    ("abs(-3) + exp(0) + log(1) + sqrt(4) + sin(0) + cos(0)", 7.0),
])
def test_precedence(text, value):
    assert evaluate(parse(text, 1), pt([0.0])) == pytest.approx(value, rel=1e-15)


def test_r_q_and_nu():
    assert evaluate(parse("r^2", 2), pt([3, 4])) == 25.0
    assert evaluate(parse("exp(-q)", 2), pt([1, 1], p=[0, 0])) == 1.0
    assert evaluate(parse("nu1*x1 + nu2*x2", 2), pt([2, 3], nu=[0, 1])) == 3.0


def test_nu_required_when_used():
    with pytest.raises(InvalidInputError):
        evaluate(parse("nu1", 2), pt([0, 0]))


@pytest.mark.parametrize("text,point", [
    ("1/u", pt([0.0], 0.0)),
    ("log(u)", pt([0.0], 0.0)),
    ("log(u)", pt([0.0], -1.0)),
    ("sqrt(u)", pt([0.0], -1e-3)),
    ("u^0.5", pt([0.0], -2.0)),
    ("exp(u)", pt([0.0], 1e3)),
])
def test_domain_errors(text, point):
    with pytest.raises(ExprDomainError):
        evaluate(parse(text, 1), point)


def test_domain_error_locates_node():
    with pytest.raises(ExprDomainError) as err:
        evaluate(parse("1 + 1/u", 1), pt([0.0], 0.0))
    assert err.value.offset == 5


def test_batch_domain_error_reports_sample():
    e = parse("sqrt(u)", 1)
    with pytest.raises(ExprDomainError) as err:
        exprlang.evaluate_batch(e, np.zeros((3, 1)), np.array([1.0, -1.0, 2.0]), np.zeros((3, 1)))
    assert err.value.sample == 1


def test_partials_examples():
    r = eval_with_partials(parse("u^2", 1), pt([0.0], 3.0))
    assert (r.value, r.d_u) == (9.0, 6.0)
    r = eval_with_partials(parse("x1*p2", 2), pt([2, 7], p=[9, 5]))
    np.testing.assert_array_equal(r.d_p, [0, 2])
    np.testing.assert_array_equal(r.d_x, [5, 0])
    e = parse("sin(u)+q", 2)
    r = eval_with_partials(e, pt([0, 0], 0.0, p=[3, 4]))
    assert r.d_u == pytest.approx(1.0)
    np.testing.assert_allclose(r.d_p, [0.6, 0.8])
    # finite-difference oracle, step 1e-8
    h = 1e-8
    f = lambda u, p: evaluate(e, pt([0, 0], u, p))
    assert (f(h, [3, 4]) - f(-h, [3, 4])) / (2 * h) == pytest.approx(1.0, abs=1e-6)
    assert (f(0, [3 + h, 4]) - f(0, [3 - h, 4])) / (2 * h) == pytest.approx(0.6, abs=1e-6)


def test_nonsmooth_conventions():
    r = eval_with_partials(parse("abs(u)", 1), pt([0.0], 0.0))
    assert r.d_u == 0.0
    r = eval_with_partials(parse("q", 2), pt([0, 0], p=[0, 0]))
    np.testing.assert_array_equal(r.d_p, [0, 0])
    r = eval_with_partials(parse("r", 2), pt([0, 0]))
    np.testing.assert_array_equal(r.d_x, [0, 0])


def test_identifiers_and_immutability():
    e = parse("x1 + nu2*u + q", 2)
    assert e.identifiers == {"x1", "nu2", "u", "q"}
    assert e.uses_any(("nu",)) and not e.uses_any(("p",))
    with pytest.raises(Exception):
        e.root.op = "-"


def test_batch_agrees_with_pointwise():
    e = parse("x1*sin(u) + p1^2/(1+q) - cos(x2*p2)", 2)
    rng = np.random.default_rng(0)
    x, p = rng.standard_normal((20, 2)), rng.standard_normal((20, 2))
    u = rng.standard_normal(20)
    v, du, dp, dx = exprlang.partials_batch(e, x, u, p)
    for i in range(20):
        r = eval_with_partials(e, EvalPoint(x[i], u[i], p[i]))
        assert (r.value, r.d_u) == pytest.approx((v[i], du[i]), rel=1e-15)
        np.testing.assert_allclose(r.d_p, dp[i], rtol=1e-15)
        np.testing.assert_allclose(r.d_x, dx[i], rtol=1e-15)


# random smooth expressions -------------------------------------------------

LEAVES = ["x1", "x2", "u", "p1", "p2", "r", "q", "0.5", "1.25", "2"]


def smooth_expr(n=2):
    leaf = st.sampled_from(LEAVES)

    def extend(child):
        return st.one_of(
            st.tuples(child, st.sampled_from(["+", "-", "*"]), child).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
            child.map(lambda a: f"({a})/(1.5 + ({a})^2)"),
            child.map(lambda a: f"sin({a})"),
            child.map(lambda a: f"cos({a})"),
            child.map(lambda a: f"exp(0.3*sin({a}))"),
            child.map(lambda a: f"sqrt(1 + ({a})^2)"),
            child.map(lambda a: f"log(2 + cos({a}))"),
            child.map(lambda a: f"-({a})"),
            child.map(lambda a: f"({a})^3"),
        )

    return st.recursive(leaf, extend, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(smooth_expr())
def test_round_trip(text):
    e = parse(text, 2)
    again = parse(to_text(e), 2)
    assert again.root == e.root
    assert to_text(again) == to_text(e)


def fd_partials(e, x, u, p, h=1e-6):
    f = lambda xx, uu, pp: evaluate(e, EvalPoint(xx, uu, pp))
    hu = h * (1 + abs(u))
    du = (f(x, u + hu, p) - f(x, u - hu, p)) / (2 * hu)
    dp, dx = np.zeros(2), np.zeros(2)
    for i in range(2):
        step = np.zeros(2)
        step[i] = h * (1 + abs(p[i]))
        dp[i] = (f(x, u, p + step) - f(x, u, p - step)) / (2 * step[i])
        step[i] = h * (1 + abs(x[i]))
        dx[i] = (f(x + step, u, p) - f(x - step, u, p)) / (2 * step[i])
    return du, dp, dx


@settings(max_examples=200, deadline=None)
@given(smooth_expr(), st.integers(0, 2**31 - 1))
def test_partials_match_finite_differences(text, seed):
    e = parse(text, 2)
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.2, 1.0, 2)  # keeps r away from its kink
    p = rng.uniform(0.2, 1.0, 2)  # and q from its
    u = rng.uniform(-1, 1)
    r = eval_with_partials(e, EvalPoint(x, u, p))
    du, dp, dx = fd_partials(e, x, u, p)
    scale = 1 + np.abs(np.concatenate([[r.d_u], r.d_p, r.d_x])).max()
    assert abs(r.d_u - du) <= 1e-6 * scale
    assert np.abs(r.d_p - dp).max() <= 1e-6 * scale
    assert np.abs(r.d_x - dx).max() <= 1e-6 * scale

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from padicrd import expressions as ex


def test_parse_basic_shapes():
    assert ex.parse("u + v") == ex.Add(ex.Name("u"), ex.Name("v"))
    assert ex.parse("2*u*v") == ex.Mul(ex.Mul(ex.Num(2.0), ex.Name("u")), ex.Name("v"))
    assert ex.parse("u^2") == ex.Pow(ex.Name("u"), 2)
    assert ex.parse("-u^2") == ex.Neg(ex.Pow(ex.Name("u"), 2))
    assert ex.parse("(u+v)^3") == ex.Pow(ex.Add(ex.Name("u"), ex.Name("v")), 3)
    assert ex.parse("u - v - 1") == ex.Sub(ex.Sub(ex.Name("u"), ex.Name("v")), ex.Num(1.0))
    assert ex.parse("u^-1") == ex.Pow(ex.Name("u"), -1)


def test_parse_error_positions():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("u*(")
    assert err.value.position == 3
    with pytest.raises(ex.ParseError) as err:
        ex.parse("u + $")
    assert err.value.position == 4
    with pytest.raises(ex.ParseError) as err:
        ex.parse("u ^ v")  # exponent must be an integer constant
    assert err.value.expected == "an integer exponent"
    with pytest.raises(ex.ParseError):
        ex.parse("u v")  # trailing input
    with pytest.raises(ex.ParseError):
        ex.parse("u^1.5")


def test_evaluate_scalars_and_arrays():
    tree = ex.parse("A - (B+1)*u + u^2*v")
    env = {"A": 2.0, "B": 4.5, "u": 2.0, "v": 2.25}
    assert ex.evaluate(tree, env) == pytest.approx(0.0, abs=1e-12)
    env_arr = {"A": 2.0, "B": 4.5, "u": np.array([2.0, 1.0]), "v": np.array([2.25, 0.0])}
    out = ex.evaluate(tree, env_arr)
    assert out == pytest.approx([0.0, -3.5], abs=1e-12)


def test_evaluate_errors():
    with pytest.raises(ex.EvaluationError):
        ex.evaluate(ex.parse("1/u"), {"u": 0.0})
    with pytest.raises(ex.EvaluationError):
        ex.evaluate(ex.parse("u^-2"), {"u": 0.0})
    with pytest.raises(ex.EvaluationError):
        ex.evaluate(ex.parse("w + 1"), {"u": 1.0})


def test_derivative_canonical_form():
    d = ex.derivative(ex.parse("u^2*v"), "u")
    assert d == ex.parse("2*u*v")
    assert ex.derivative(ex.parse("u^2*v"), "v") == ex.parse("u^2")
    assert ex.derivative(ex.parse("A"), "u") == ex.Num(0.0)


def test_derivative_quotient_and_power():
    tree = ex.parse("u/(1+u^2)")
    d = ex.derivative(tree, "u")
    for u in (0.0, 0.7, -1.3, 2.0):
        h = 1e-6
        fd = (ex.evaluate(tree, {"u": u + h}) - ex.evaluate(tree, {"u": u - h})) / (2 * h)
        assert ex.evaluate(d, {"u": u}) == pytest.approx(fd, abs=1e-7)


names = st.sampled_from(["u", "v", "A", "B"])
numbers = st.floats(min_value=0.25, max_value=4.0, allow_nan=False).map(
    lambda x: round(x, 3)
)


def expr_trees(depth=3):
    leaf = st.one_of(names.map(ex.Name), numbers.map(ex.Num))
    if depth == 0:
        return leaf
    sub = expr_trees(depth - 1)
    return st.one_of(
        leaf,
        st.builds(ex.Add, sub, sub),
        st.builds(ex.Sub, sub, sub),
        st.builds(ex.Mul, sub, sub),
        st.builds(ex.Div, sub, sub),
        st.builds(ex.Neg, sub),
        st.builds(ex.Pow, sub, st.integers(min_value=1, max_value=3)),
    )


@settings(max_examples=150, deadline=None)
@given(expr_trees())
def test_print_parse_round_trip(tree):
    text = ex.to_string(tree)
    assert ex.parse(text) == tree


@settings(max_examples=60, deadline=None)
@given(expr_trees(), st.sampled_from(["u", "v"]))
def test_random_derivatives_match_finite_differences(tree, var):
    d = ex.derivative(tree, var)
    env = {"u": 0.8, "v": 1.3, "A": 2.0, "B": 0.7}
    h = 1e-6
    up = dict(env)
    dn = dict(env)
    up[var] += h
    dn[var] -= h
    try:
        fd = (ex.evaluate(tree, up) - ex.evaluate(tree, dn)) / (2 * h)
        sym = ex.evaluate(d, env)
    except ex.EvaluationError:
        return  # random tree hit a pole; nothing to compare
    if abs(fd) > 1e6:  # near-pole finite differences are meaningless
        return
    assert sym == pytest.approx(fd, rel=1e-5, abs=1e-5)


def test_simplify_folds_constants():
    assert ex.simplify(ex.parse("0*u + v*1 + (2+3)")) == ex.Add(ex.Name("v"), ex.Num(5.0))
    assert ex.simplify(ex.Pow(ex.Name("u"), 0)) == ex.Num(1.0)
    assert ex.simplify(ex.Neg(ex.Neg(ex.Name("u")))) == ex.Name("u")

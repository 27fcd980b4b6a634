import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alomari.errors import InvalidParameters
from alomari.funcspace import Interval, get_function, monomial
from alomari.rules import RuleParams, Side, error_functional, quadrature_value


def test_param_validation():
    iv = Interval(0.0, 1.0)
    with pytest.raises(InvalidParameters):
        RuleParams(1.5, 0.5, 0.5, iv)
    with pytest.raises(InvalidParameters):
        RuleParams(0.5, -0.1, 0.5, iv)
    with pytest.raises(InvalidParameters):
        RuleParams(0.5, 0.5, 1.5, iv)


def test_weights_sum_to_one():
    p = RuleParams(0.3, 0.2, 0.1, Interval(0.0, 1.0))
    assert sum(p.nodes().weights) == pytest.approx(1.0)


def test_trapezoid_on_square():
    iv = Interval(0.0, 1.0)
    assert error_functional(monomial(2, iv), RuleParams(1.0, 0.5, 0.5, iv)) == pytest.approx(-1 / 6, abs=1e-15)


def test_simpson_on_quartic():
    iv = Interval(0.0, 1.0)
    p = RuleParams(1 / 3, 0.5, 0.5, iv)
    assert error_functional(monomial(4, iv), p) == pytest.approx(-1 / 120, abs=1e-15)


def test_midpoint_on_square():
    iv = Interval(0.0, 1.0)
    assert error_functional(monomial(2, iv), RuleParams(0.0, 0.5, 0.5, iv)) == pytest.approx(1 / 12, abs=1e-15)


def test_side_and_canonical():
    iv = Interval(0.0, 1.0)
    p = RuleParams(0.2, 0.3, 0.8, iv)
    assert p.side() is Side.RIGHT
    q = p.canonical()
    assert q.x == pytest.approx(0.2) and q.mu == pytest.approx(0.7)


@settings(max_examples=80, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_reflection_leaves_rule_unchanged(lam, mu, s):
    iv = Interval(-2.0, 3.0)
    p = RuleParams(lam, mu, iv.at(s), iv)
    f = get_function("exp", iv)
    assert quadrature_value(f, p) == pytest.approx(quadrature_value(f, p.reflected()), rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(-3, 3), st.floats(-3, 3))
def test_error_functional_is_linear(lam, mu, s, alpha, beta):
    iv = Interval(0.0, 1.0)
    p = RuleParams(lam, mu, iv.at(s), iv)
    f, g = get_function("sin", iv), get_function("abs_c030", iv)
    combo = type(f)(id="combo", eval=lambda t: alpha * f.eval(t) + beta * g.eval(t), kinks=g.kinks)
    lhs = error_functional(combo, p)
    rhs = alpha * error_functional(f, p) + beta * error_functional(g, p)
    assert lhs == pytest.approx(rhs, abs=1e-11)

import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial

from alomari.errors import InconsistentCase, InvalidParameters, OutOfDomain
from alomari.funcspace import Interval, get_function, monomial
from alomari.kernels import (
    CASE_ORDERS,
    CaseId,
    CaseTag,
    KernelSpec,
    case_kernel_spec,
    case_representation,
    check_case,
    first_order_kernel,
    kernel_abs_integral,
    optimal_node,
    params_for_case,
    peano_identity_residual,
    peano_kernel_first,
    sign_changes,
)
from alomari.rules import RuleParams, error_functional
from oracles import peano_abs_integral, peano_pieces, t as sym_t

UNIT = Interval(0.0, 1.0)


def _generic_kernel(p: RuleParams, k: int, ts: np.ndarray) -> np.ndarray:
    """Order-k Peano kernel straight from the nodes, in float."""
    a, b = p.iv.a, p.iv.b
    mean = (b - ts) ** k / (k * (b - a))
    rule = sum(w * np.where(s > ts, s - ts, 0.0) ** (k - 1) * (s > ts) for s, w in p.nodes().nodes)
    return (mean - rule) / math.factorial(k - 1)


@pytest.mark.parametrize("coef,lo,hi,expected", [
    ((-0.25, 1.0), 0.0, 1.0, [0.25]),
    ((2.0, -3.0, 1.0), 0.0, 3.0, [1.0, 2.0]),
    ((1.0, 0.0, 1.0), -5.0, 5.0, []),
    ((0.0, -1.0, 0.0, 1.0), -2.0, 2.0, [-1.0, 0.0, 1.0]),
    ((0.0, 0.0, 0.0, 0.0, 1.0), -1.0, 1.0, []),  # touching root does not change sign
])
def test_sign_changes(coef, lo, hi, expected):
    assert sign_changes(Polynomial(coef), lo, hi) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-0.95, 0.95), min_size=1, max_size=5, unique=True))
def test_sign_changes_recovers_simple_roots(roots):
    roots = sorted(roots)
    if any(v - u < 1e-3 for u, v in zip(roots, roots[1:])):
        return
    poly = Polynomial.fromroots(roots)
    assert sign_changes(poly, -1.0, 1.0) == pytest.approx(roots, abs=1e-9)


def test_kernel_abs_integral_simple():
    spec = KernelSpec.build([0.0, 1.0], [Polynomial([-0.5, 1.0])])
    assert kernel_abs_integral(spec) == pytest.approx(0.25, rel=1e-15)


def test_kernelspec_rejects_bad_breakpoints():
    with pytest.raises(InvalidParameters):
        KernelSpec((0.0, 0.0), ((1.0,),))
    with pytest.raises(InvalidParameters):
        KernelSpec((0.0, 1.0, 2.0), ((1.0,),))


def test_kernelspec_json_roundtrip():
    spec = case_kernel_spec(CaseId(CaseTag.SIMPSON, 4), params_for_case(CaseTag.SIMPSON, UNIT))
    back = KernelSpec.from_json(spec.to_json())
    assert back == spec
    assert kernel_abs_integral(back) == kernel_abs_integral(spec)


def test_first_order_kernel_values():
    p = RuleParams(1.0, 0.5, 0.5, UNIT)  # trapezoid: K(t) = t - 1/2
    assert peano_kernel_first(p, 0.2) == pytest.approx(-0.3)
    with pytest.raises(OutOfDomain):
        peano_kernel_first(p, 1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_first_order_kernel_matches_generic_form(lam, mu, s):
    iv = Interval(-2.0, 3.0)
    p = RuleParams(lam, mu, iv.at(s), iv)
    spec = first_order_kernel(p)
    ts = np.linspace(iv.a, iv.b, 997)[1:-1]
    ts = ts[np.min(np.abs(ts[:, None] - np.array([n for n, _ in p.nodes().nodes])), axis=1) > 1e-9]
    # generic: E = int K1 f', spec: E = scale * int K f'
    assert np.allclose(spec.scale * spec(ts), _generic_kernel(p, 1, ts), atol=1e-12)


@pytest.mark.parametrize("fid", ["sin", "exp", "e3", "cos"])
@pytest.mark.parametrize("lam,mu,s", [(0.0, 0.5, 0.25), (0.3, 0.2, 0.1), (0.7, 0.9, 0.8), (1.0, 0.5, 0.5)])
def test_peano_identity(fid, lam, mu, s, iv):
    f = get_function(fid, iv)
    if not f.has_derivative(1):
        pytest.skip("needs f'")
    assert peano_identity_residual(f, RuleParams(lam, mu, iv.at(s), iv)) < 1e-10 * max(1.0, iv.length() ** 3)


def test_check_case_rejects():
    with pytest.raises(InconsistentCase):
        check_case(CaseTag.SIMPSON, RuleParams(0.3, 0.5, 0.5, UNIT))
    with pytest.raises(InconsistentCase):
        check_case(CaseTag.TRAPEZOID, RuleParams(0.5, 0.5, 0.5, UNIT))


def test_case_order_validation():
    with pytest.raises(InvalidParameters):
        CaseId(CaseTag.GAUSS_TWO_POINT, 2)


def test_optimal_node():
    assert optimal_node(0.0, UNIT) == pytest.approx(0.5 - 0.5 / math.sqrt(3))
    assert optimal_node(1 / 3, UNIT) == pytest.approx(0.5)
    assert optimal_node(0.25, UNIT) == pytest.approx(1 / 3)
    with pytest.raises(InvalidParameters):
        optimal_node(0.5, UNIT)


ALL_CASES = [(tag, k) for tag in CaseTag for k in CASE_ORDERS[tag]]


@pytest.mark.parametrize("tag,k", ALL_CASES, ids=[f"{t.value}-{k}" for t, k in ALL_CASES])
def test_case_kernel_matches_generic_peano_kernel(tag, k, iv):
    lam = {CaseTag.WEIGHTED_MID_TRAP: 0.3, CaseTag.SYMMETRIC_HALF: 0.2, CaseTag.GAUSS_TWO_POINT: 0.3}.get(tag)
    x = iv.at(0.15) if tag is CaseTag.SYMMETRIC_HALF else None
    p = params_for_case(tag, iv, lam, x)
    spec = case_kernel_spec(CaseId(tag, k), p)
    ts = np.linspace(iv.a, iv.b, 1001)[1:-1]
    nodes = np.array([n for n, _ in p.nodes().nodes])
    ts = ts[np.min(np.abs(ts[:, None] - nodes), axis=1) > 1e-9]
    assert np.allclose(spec.scale * spec(ts), _generic_kernel(p, k, ts), atol=1e-12 * iv.length() ** k)


@pytest.mark.parametrize("tag,k", ALL_CASES, ids=[f"{t.value}-{k}" for t, k in ALL_CASES])
def test_case_abs_integral_vs_sympy(tag, k):
    iv = Interval(0.0, 1.0)
    lam = {CaseTag.WEIGHTED_MID_TRAP: 0.3, CaseTag.SYMMETRIC_HALF: 0.2, CaseTag.GAUSS_TWO_POINT: 0.3}.get(tag)
    x = 0.15 if tag is CaseTag.SYMMETRIC_HALF else None
    p = params_for_case(tag, iv, lam, x)
    xe = p.x
    if tag is CaseTag.GAUSS_TWO_POINT:
        xe = sp.Rational(1, 2) - sp.sqrt((sp.Rational(1, 3) - sp.Rational(3, 10)) / (1 - sp.Rational(3, 10))) / 2
    oracle = float(peano_abs_integral(p.lam, p.mu, xe, 0, 1, k))
    spec = case_kernel_spec(CaseId(tag, k), p)
    assert spec.bound_constant() == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("tag,k", ALL_CASES, ids=[f"{t.value}-{k}" for t, k in ALL_CASES])
def test_case_representation_reproduces_error(tag, k):
    iv = Interval(-1.0, 2.0)
    p = params_for_case(tag, iv, 0.3 if tag is not CaseTag.SYMMETRIC_HALF else 0.6, iv.at(0.3))
    f = get_function("exp", iv)
    rep = case_representation(CaseId(tag, k), p, f)
    assert rep == pytest.approx(error_functional(f, p), abs=1e-11)


def test_sympy_oracle_pieces_reproduce_monomial_error():
    # E(e_2) for the trapezoid = int K_2 * 2
    pieces = peano_pieces(1, sp.Rational(1, 2), sp.Rational(1, 2), 0, 1, 2)
    total = sum(sp.integrate(2 * poly, (sym_t, lo, hi)) for lo, hi, poly in pieces)
    assert total == sp.Rational(-1, 6)
    assert error_functional(monomial(2, UNIT), RuleParams(1.0, 0.5, 0.5, UNIT)) == pytest.approx(float(total))

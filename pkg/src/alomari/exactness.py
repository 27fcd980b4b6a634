"""Degree of exactness: the tabulated classification and a monomial probe."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidParameters, MaxDegreeReached
from .funcspace import Interval
from .kernels import optimal_node
from .rules import RuleParams

EQ_TOL = 1e-12


class RuleClass(enum.Enum):
    GENERIC = 0
    FIRST_DEGREE = 1
    THIRD_DEGREE = 3
    FIFTH_DEGREE = 5


@dataclass(frozen=True)
class ExactnessResult:
    degree: int
    rule_class: RuleClass
    witness: int  # first i with E(e_i) != 0
    row: str = ""
    witness_error: float | None = None


def _result(degree: int, row: str = "", witness_error: float | None = None) -> ExactnessResult:
    return ExactnessResult(degree, RuleClass(degree), degree + 1, row, witness_error)


def lobatto_lambda() -> float:
    """The weight parameter for which x*(lam) is the four-point Lobatto node."""
    return 1 / 6


def classify_exactness(lam: float, mu: float, x: float, iv: Interval) -> ExactnessResult:
    """Maximum degree of exactness from the closed-form case table.

    x > (a+b)/2 is first reflected onto the left half.  One correction to the
    printed table: at lam = 1/6, mu = 1/2, x = x*(1/6) the rule is four-point
    Gauss-Lobatto and exact up to degree 5.
    """
    p = RuleParams(lam, mu, x, iv).canonical()
    lam, mu, x = p.lam, p.mu, p.x
    L = iv.length()
    at_mid = abs(x - iv.midpoint()) <= EQ_TOL * L
    half = mu == 0.5
    if lam == 1:
        return _result(1, "lambda=1")
    if at_mid:
        if abs(lam - 1 / 3) <= EQ_TOL:
            return _result(3, "x=(a+b)/2, lambda=1/3")
        return _result(1, "x=(a+b)/2, lambda!=1/3")
    if not half:
        return _result(0, "lambda!=1, mu!=1/2, x!=(a+b)/2")
    if lam > 1 / 3:
        return _result(1, "mu=1/2, lambda in (1/3,1)")
    # lam <= 1/3; at lam = 1/3 the optimal node is the midpoint, already handled
    if abs(x - optimal_node(lam, iv)) <= EQ_TOL * L:
        if abs(lam - lobatto_lambda()) <= EQ_TOL:
            return _result(5, "mu=1/2, lambda=1/6, x=x*(lambda) [Lobatto]")
        return _result(3, "mu=1/2, lambda in [0,1/3), x=x*(lambda)")
    return _result(1, "mu=1/2, lambda in [0,1/3), x!=x*(lambda)")


def monomial_error(i: int, p: RuleParams) -> float:
    """E(e_i) in closed form: mean of t**i minus the weighted node powers."""
    a, b = p.iv.a, p.iv.b
    mean = (b ** (i + 1) - a ** (i + 1)) / ((i + 1) * (b - a))
    rule = math.fsum(w * t**i for t, w in p.nodes().nodes)
    return mean - rule


def probe_exactness(p: RuleParams, max_degree: int = 8, tol: float = 1e-12) -> ExactnessResult:
    if max_degree < 1:
        raise InvalidParameters("max_degree must be at least 1")
    scale = max(abs(p.iv.a), abs(p.iv.b), 1.0)
    for i in range(max_degree + 1):
        err = monomial_error(i, p)
        if abs(err) > tol * scale**i:
            degree = i - 1
            cls = RuleClass(degree) if degree in (0, 1, 3, 5) else None
            if cls is None:
                raise InvalidParameters(f"unexpected degree of exactness {degree}")
            return ExactnessResult(degree, cls, i, "probe", err)
    raise MaxDegreeReached(f"E(e_i) vanishes for all i <= {max_degree}")


def table1_rows(iv: Interval) -> list[tuple[str, RuleParams, int]]:
    """One representative per printed row, plus the Lobatto point: (row, params, printed n)."""
    mid = iv.midpoint()
    return [
        ("lambda!=1, mu!=1/2, x!=(a+b)/2", RuleParams(0.2, 0.3, iv.at(0.2), iv), 0),
        ("lambda=1", RuleParams(1.0, 0.3, iv.at(0.2), iv), 1),
        ("x=(a+b)/2, lambda!=1/3", RuleParams(0.6, 0.3, mid, iv), 1),
        ("mu=1/2, lambda in (1/3,1)", RuleParams(0.6, 0.5, iv.at(0.2), iv), 1),
        ("mu=1/2, lambda in [0,1/3), x!=x*", RuleParams(0.2, 0.5, iv.at(0.1), iv), 1),
        ("mu=1/2, lambda in [0,1/3), x=x*", RuleParams(0.0, 0.5, optimal_node(0.0, iv), iv), 3),
        ("x=(a+b)/2, lambda=1/3", RuleParams(1 / 3, 0.5, mid, iv), 3),
        ("mu=1/2, lambda=1/6, x=x* (Lobatto; printed under the x=x* row)",
         RuleParams(1 / 6, 0.5, optimal_node(1 / 6, iv), iv), 3),
    ]

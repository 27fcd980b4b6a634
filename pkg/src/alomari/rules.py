"""The generalized Alomari rule and its error functional.

The rule approximates the integral mean over [a, b] by

    lam * (f(a) + f(b)) / 2 + (1 - lam) * (mu * f(x) + (1 - mu) * f(a + b - x))

and ``E(f; lam, mu; x)`` is the integral mean minus that value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters
from .funcspace import Interval, TestFunction, reference_integral

DEFAULT_TOL = 1e-12


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class RuleParams:
    lam: float
    mu: float
    x: float
    iv: Interval

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise InvalidParameters(f"lambda must lie in [0, 1], got {self.lam}")
        if not 0 <= self.mu <= 1:
            raise InvalidParameters(f"mu must lie in [0, 1], got {self.mu}")
        if not self.iv.a <= self.x <= self.iv.b:
            raise InvalidParameters(f"x={self.x} outside [{self.iv.a}, {self.iv.b}]")

    @property
    def mirror_x(self) -> float:
        return self.iv.a + self.iv.b - self.x

    def side(self) -> Side:
        return Side.LEFT if self.x <= self.iv.midpoint() else Side.RIGHT

    def reflected(self) -> "RuleParams":
        """Same node set with the roles of x and a+b-x swapped."""
        return RuleParams(self.lam, 1 - self.mu, self.mirror_x, self.iv)

    def canonical(self) -> "RuleParams":
        """The equivalent parameters with x <= (a+b)/2."""
        return self if self.side() is Side.LEFT else self.reflected()

    def nodes(self) -> "RuleNodes":
        lam, mu = self.lam, self.mu
        return RuleNodes((
            (self.iv.a, lam / 2),
            (self.iv.b, lam / 2),
            (self.x, (1 - lam) * mu),
            (self.mirror_x, (1 - lam) * (1 - mu)),
        ))


@dataclass(frozen=True)
class RuleNodes:
    """(abscissa, weight) pairs; weights are fractions of the integral mean."""

    nodes: tuple[tuple[float, float], ...]

    @property
    def abscissae(self) -> np.ndarray:
        return np.array([n for n, _ in self.nodes], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.nodes], dtype=float)

    def apply(self, values) -> float:
        return float(np.dot(self.weights, values))


def quadrature_value(f: TestFunction, p: RuleParams) -> float:
    nodes = p.nodes()
    return nodes.apply(np.asarray(f.eval(nodes.abscissae), dtype=float))


def integral_mean(f: TestFunction, iv: Interval, tol: float = DEFAULT_TOL) -> float:
    return reference_integral(f, iv, tol) / iv.length()


def error_functional(f: TestFunction, p: RuleParams, tol: float = DEFAULT_TOL) -> float:
    return integral_mean(f, p.iv, tol) - quadrature_value(f, p)

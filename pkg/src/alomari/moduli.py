"""Moduli of smoothness, least concave majorants, K-functional identities and
the error estimates that hold for every continuous integrand.

Moduli are computed by brute force on a uniform grid, so they are lower bounds
of the true suprema.  Corpus entries with an analytically known modulus carry
an override that is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath
import numpy as np

from .bounds import bound_C
from .errors import DomainViolation, InvalidParameters, StepTooLarge
from .funcspace import DEFAULT_RESOLUTION, Interval, TestFunction, modulus_grid
from .rules import RuleParams

ORDERS = (1, 2, 4)
MIN_RESOLUTION = 256
STEP_SLACK = 1e-12
# ||E(.; lam, mu; x)|| <= 2 as a functional on C[a, b]; used by every C0 estimate.
FUNCTIONAL_NORM_BOUND = 2
SECOND_ORDER_FACTOR = 4.5  # 2 * 9/4

# s = 4 integers as stated for Sperling's constants
SPERLING_DTILDE1_4 = 135045
SPERLING_DTILDE2_4 = 847078494
SPERLING_D4_UPPER = 136365
DISPLAYED_SIMPSON_FACTOR = 4575650119680


@dataclass(frozen=True)
class ModulusSamples:
    order: int
    steps: np.ndarray
    values: np.ndarray
    f_id: str = ""

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.steps.tolist(), self.values.tolist()))


def _max_abs_diff(y: np.ndarray, n: int, j: int) -> float:
    if n == 1:
        d = y[j:] - y[:-j]
    elif n == 2:
        d = y[: -2 * j] - 2 * y[j:-j] + y[2 * j:]
    else:
        m = len(y) - 4 * j
        d = y[:m] - 4 * y[j:j + m] + 6 * y[2 * j:2 * j + m] - 4 * y[3 * j:3 * j + m] + y[4 * j:4 * j + m]
    return float(np.max(np.abs(d)))


@lru_cache(maxsize=256)
def _grid_samples(f: TestFunction, n: int, a: float, b: float, resolution: int) -> ModulusSamples:
    iv = Interval(a, b)
    t = modulus_grid(iv, resolution)
    y = np.asarray(f.eval(t), dtype=float)
    span = resolution // n
    raw = np.zeros(span + 1)
    for j in range(1, span + 1):
        raw[j] = _max_abs_diff(y, n, j)
    values = np.maximum.accumulate(raw)
    steps = np.arange(span + 1) * (iv.length() / resolution)
    return ModulusSamples(n, steps, values, f.id)


def _check(n: int, h: float, iv: Interval, resolution: int) -> None:
    if n not in ORDERS:
        raise InvalidParameters(f"modulus order must be one of {ORDERS}")
    if resolution < MIN_RESOLUTION:
        raise InvalidParameters(f"resolution must be at least {MIN_RESOLUTION}")
    if h < 0:
        raise InvalidParameters("step must be nonnegative")
    if h > iv.length() / n * (1 + STEP_SLACK):
        raise StepTooLarge(f"step {h} exceeds (b-a)/{n} = {iv.length() / n}")


def modulus_samples(f: TestFunction, n: int, iv: Interval, resolution: int = DEFAULT_RESOLUTION,
                    use_exact: bool = True) -> ModulusSamples:
    """omega_n(f; h) at every grid step h = j (b-a)/resolution, 0 <= n h <= b-a."""
    _check(n, 0.0, iv, resolution)
    grid = _grid_samples(f, n, float(iv.a), float(iv.b), int(resolution))
    if use_exact and f.exact_modulus is not None and f.exact_modulus(n, 0.0) is not None:
        vals = np.array([f.exact_modulus(n, float(h)) for h in grid.steps])
        return ModulusSamples(n, grid.steps, np.maximum.accumulate(vals), f.id)
    return grid


def modulus(f: TestFunction, n: int, h: float, iv: Interval, resolution: int = DEFAULT_RESOLUTION,
            use_exact: bool = True) -> float:
    """omega_n(f; h): n=1 all pairs |u - v| <= h, n=2 centred second differences,
    n=4 forward fourth differences with x + 4t <= b."""
    _check(n, h, iv, resolution)
    h = min(h, iv.length() / n)
    if use_exact and f.exact_modulus is not None:
        exact = f.exact_modulus(n, h)
        if exact is not None:
            return exact
    s = _grid_samples(f, n, float(iv.a), float(iv.b), int(resolution))
    j = int(math.floor(h / (iv.length() / resolution) * (1 + STEP_SLACK)))
    return float(s.values[min(j, len(s.values) - 1)])


@dataclass(frozen=True)
class ConcaveMajorant:
    hull_h: np.ndarray
    hull_v: np.ndarray

    @property
    def hull_points(self) -> list[tuple[float, float]]:
        return list(zip(self.hull_h.tolist(), self.hull_v.tolist()))

    def __call__(self, h):
        val = np.interp(h, self.hull_h, self.hull_v)
        return float(val) if np.ndim(val) == 0 else val

    def slopes(self) -> np.ndarray:
        return np.diff(self.hull_v) / np.diff(self.hull_h)


def _cross(o, p, q) -> float:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def concave_majorant(samples: ModulusSamples) -> ConcaveMajorant:
    """Upper concave hull of {(0, 0)} and the samples (one monotone-chain pass)."""
    pts = sorted({(0.0, 0.0), *((float(h), float(v)) for h, v in samples.points if h > 0)})
    hull: list[tuple[float, float]] = []
    for q in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], q) >= 0:
            hull.pop()
        hull.append(q)
    h, v = zip(*hull)
    return ConcaveMajorant(np.array(h), np.array(v))


@lru_cache(maxsize=256)
def majorant_of(f: TestFunction, iv: Interval, resolution: int = DEFAULT_RESOLUTION) -> ConcaveMajorant:
    return concave_majorant(modulus_samples(f, 1, iv, resolution))


def k_functional_c1(f: TestFunction, t: float, iv: Interval, resolution: int = DEFAULT_RESOLUTION) -> float:
    """K(f, t; C, C^1) = omega~(f, 2t) / 2 for 0 < t <= (b-a)/2."""
    if not 0 < t <= iv.length() / 2 * (1 + STEP_SLACK):
        raise StepTooLarge(f"t={t} outside (0, (b-a)/2]")
    return 0.5 * majorant_of(f, iv, resolution)(2 * t)


def first_order_step(p: RuleParams) -> float:
    """Argument of omega~ in the first-order C0 estimate: C(x, lam, mu) / (2 (b - a))."""
    return bound_C(p) / (2 * p.iv.length())


def c0_estimate_first_order(f: TestFunction, p: RuleParams, resolution: int = DEFAULT_RESOLUTION) -> float:
    """|E(f)| <= 2 K(f, C/(4(b-a)); C, C^1) = omega~(f, C/(2(b-a))) for every continuous f."""
    return majorant_of(f, p.iv, resolution)(first_order_step(p))


def second_order_step(C: float, iv: Interval) -> float:
    h = math.sqrt(C / 2)
    if h > iv.length() / 2 * (1 + STEP_SLACK):
        raise StepTooLarge(f"sqrt(C/2) = {h} exceeds (b-a)/2; C is not an admissible second-order constant")
    return h


def c0_estimate_second_order(f: TestFunction, C: float, iv: Interval,
                             resolution: int = DEFAULT_RESOLUTION) -> float:
    """4.5 * omega_2(f; sqrt(C/2)) for a second-order constant C."""
    return SECOND_ORDER_FACTOR * modulus(f, 2, second_order_step(C, iv), iv, resolution)


# --------------------------------------------------------------------------
# Sperling constants


@dataclass(frozen=True)
class SperlingConstants:
    s: int
    D1: int
    D2: mpmath.mpf
    m_values: tuple  # m_{s,i}, i = 0..s-1
    Dtilde1: int
    Dtilde2: mpmath.mpf
    D: mpmath.mpf

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "D1": self.D1,
            "D2": mpmath.nstr(self.D2, 25),
            "m_values": [mpmath.nstr(m, 25) for m in self.m_values],
            "Dtilde1": self.Dtilde1,
            "Dtilde2": mpmath.nstr(self.Dtilde2, 25),
            "D": mpmath.nstr(self.D, 25),
        }


def _falling(s: int, k: int) -> int:
    return factorial(2 * s + 1) // factorial(2 * s + 1 - k)


def sperling_constants(s: int, dps: int = 40) -> SperlingConstants:
    """D(s) and its parts from the general-s formulas (natural log in m_{s,i})."""
    if s < 2:
        raise InvalidParameters("s must be at least 2")
    with mpmath.workdps(dps):
        def m(i: int):
            if i == 0:
                return mpmath.mpf(2**s - 1)
            prod = mpmath.mpf(1)
            for j in range(1, i + 1):
                prod *= 1 + mpmath.log(s - j)
            return (2**s - 1) * mpmath.mpf(s + 1) ** i * prod

        m_values = tuple(m(i) for i in range(s))
        coeff = {k: comb(s, k) * _falling(s, k) * comb(k - 1, (k - 1) // 2) for k in range(1, s)}
        D1 = sum(coeff.values())
        D2 = mpmath.fsum(coeff[k] * m_values[s - k] for k in range(1, s))
        Dt1 = (2**s - 1) * (2 * D1 + 3)
        tail = comb(s - 1, (s - 1) // 2) * factorial(2 * s + 1) // factorial(s + 1)
        Dt2 = 2 * s**s * (D2 + tail)
        D = 2 * s**s + Dt1 + Dt2 / (2**s * mpmath.mpf(s) ** (2 * s))
        return SperlingConstants(s, D1, +D2, m_values, Dt1, +Dt2, +D)


def sperling_D4() -> Fraction:
    """D(4) exactly, assembled from the stated s = 4 integers."""
    return 2 * 4**4 + SPERLING_DTILDE1_4 + Fraction(SPERLING_DTILDE2_4, 2**4 * 4**8)


def simpson_c0_factor() -> Fraction:
    """2 (2*4)^8 D(4): the multiplier of omega_4 in the Simpson estimate on [-1, 1]."""
    return 2 * 8**8 * sperling_D4()


def simpson_factor_report() -> dict:
    exact = simpson_c0_factor()
    displayed = DISPLAYED_SIMPSON_FACTOR
    general = sperling_constants(4)
    return {
        "D4_exact": str(sperling_D4()),
        "D4_float": float(sperling_D4()),
        "D4_below_136365": sperling_D4() < SPERLING_D4_UPPER,
        "factor_recomputed": int(exact) if exact.denominator == 1 else str(exact),
        "factor_displayed": displayed,
        "factor_displayed_equals_2_8^8_136365": displayed == 2 * 8**8 * SPERLING_D4_UPPER,
        "relative_discrepancy": float((displayed - exact) / exact),
        "general_s_Dtilde1": general.Dtilde1,
        "general_s_Dtilde1_matches": general.Dtilde1 == SPERLING_DTILDE1_4,
        "general_s_Dtilde2": mpmath.nstr(general.Dtilde2, 20),
        "general_s_Dtilde2_matches": general.Dtilde2 == SPERLING_DTILDE2_4,
    }


SIMPSON_INTERVAL = Interval(-1.0, 1.0)


def fourth_order_step(C: float) -> float:
    t = (C / 2) ** 0.25
    if t > 0.5 * (1 + STEP_SLACK):
        raise StepTooLarge(f"t = (C/2)^(1/4) = {t} exceeds 2/s = 1/2")
    return t


def c0_estimate_fourth_order(f: TestFunction, C: float, iv: Interval = SIMPSON_INTERVAL,
                             resolution: int = DEFAULT_RESOLUTION) -> float:
    """2 (2s)^(2s) D(4) omega_4(f; (C/2)^(1/4)); stated on [-1, 1] only."""
    if iv != SIMPSON_INTERVAL:
        raise DomainViolation("the fourth-order estimate is only available on [-1, 1]")
    return float(simpson_c0_factor()) * modulus(f, 4, fourth_order_step(C), iv, resolution)

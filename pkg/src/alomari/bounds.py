"""Error-bound constants: the general first-derivative constant C(x, lam, mu),
the classical Lipschitz/derivative inequalities, the Guessab-Schmeisser
extremal function, and the catalog of case constants with their oracle checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainViolation, InvalidParameters
from .funcspace import Interval, Smoothness, TestFunction
from .kernels import (
    CASE_NUMBER,
    CaseId,
    CaseTag,
    case_kernel_spec,
    first_order_kernel,
    kernel_abs_integral_checked,
    kernel_nodes,
    params_for_case,
)
from .rules import RuleParams

MATCH_RTOL = 1e-9
DOMAIN_SLACK = 1e-12


class NormKind(enum.Enum):
    DERIVATIVE_SUP = "DerivativeSup"
    LIPSCHITZ_ALPHA = "LipschitzAlpha"
    MODULUS = "Modulus"


class Verdict(enum.Enum):
    MATCH = "Match"
    PAPER_TYPO_RESOLVED = "PaperTypoResolved"
    NO_PAPER_VALUE = "NoPaperValue"
    MISMATCH = "Mismatch"


@dataclass(frozen=True)
class BoundReport:
    source: str
    derivative_order: int
    constant: float
    norm_kind: NormKind = NormKind.DERIVATIVE_SUP
    norm_param: Optional[float] = None  # alpha for Lipschitz, n for moduli
    oracle_value: Optional[float] = None
    verdict: Verdict = Verdict.NO_PAPER_VALUE
    paper_value: Optional[float] = None
    params: dict = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if self.constant < 0:
            raise InvalidParameters("bound constants are nonnegative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["norm_kind"] = self.norm_kind.value
        d["verdict"] = self.verdict.value
        return d


def constants_agree(u: float, v: float, rtol: float = MATCH_RTOL) -> bool:
    return abs(u - v) <= rtol * max(abs(u), abs(v)) + 1e-15


# --------------------------------------------------------------------------
# the general constant C(x, lam, mu)


def bound_C(p: RuleParams) -> float:
    """C(x, lam, mu); the first-derivative bound is C / (2 (b - a))."""
    q = p.canonical()
    a, b = q.iv.a, q.iv.b
    L = b - a
    x, lam, mu = q.x, q.lam, q.mu
    nu2 = kernel_nodes(q).nu2
    near = (x - nu2) ** 2
    far = (a + b - x - nu2) ** 2
    if x <= a + lam * L / 2:
        return 2 * lam * (x - a) * L - 2 * (x - a) ** 2 + near + far
    if mu <= 0.5:
        tilde = near + far if x <= nu2 else far - near
    else:
        tilde = near + far if x <= a + b - nu2 else near - far
    return (x - a) ** 2 + (lam * L - (x - a)) ** 2 + tilde


def first_derivative_bound(p: RuleParams) -> float:
    return bound_C(p) / (2 * p.iv.length())


def theorem5_report(p: RuleParams) -> BoundReport:
    const = first_derivative_bound(p)
    spec = first_order_kernel(p)
    raw, fallback = kernel_abs_integral_checked(spec)
    oracle = abs(spec.scale) * raw
    return BoundReport(
        source="Thm5", derivative_order=1, constant=const, oracle_value=oracle,
        verdict=Verdict.MATCH if constants_agree(const, oracle) else Verdict.MISMATCH,
        paper_value=const, params=_params(p), note="fallback quadrature" if fallback else "",
    )


def _params(p: RuleParams) -> dict:
    return {"a": p.iv.a, "b": p.iv.b, "lambda": p.lam, "mu": p.mu, "x": p.x}


# --------------------------------------------------------------------------
# classical inequalities


def ostrowski_bound(x: float, iv: Interval, M: float = 1.0) -> float:
    if not iv.contains(x):
        raise DomainViolation(f"x={x} outside [{iv.a}, {iv.b}]")
    L = iv.length()
    return (0.25 + ((x - iv.midpoint()) / L) ** 2) * L * M


class DragomirKind(enum.Enum):
    MIDPOINT = "Midpoint"
    TRAPEZOID = "Trapezoid"


def dragomir_bounds(kind: DragomirKind, iv: Interval, M: float = 1.0) -> float:
    L = iv.length()
    return M * L / 4 if kind is DragomirKind.MIDPOINT else M * L / 3


def guessab_schmeisser_bound(x: float, alpha: float, iv: Interval, M: float = 1.0) -> float:
    """Bound for the symmetric two-node rule on Lip_M(alpha); sharp for every x."""
    if not 0 < alpha <= 1:
        raise InvalidParameters("alpha must lie in (0, 1]")
    a, b = iv.a, iv.b
    if x > iv.midpoint() + DOMAIN_SLACK * iv.length() or x < a:
        raise DomainViolation(f"x={x} outside [a, (a+b)/2]")
    x = min(x, iv.midpoint())
    num = (2 * x - 2 * a) ** (alpha + 1) + max(0.0, a + b - 2 * x) ** (alpha + 1)
    return M / iv.length() * num / (2**alpha * (alpha + 1))


def alomari_bound(x: float, lam: float, iv: Interval, M: float = 1.0) -> float:
    if not 0 <= lam <= 1:
        raise InvalidParameters("lambda must lie in [0, 1]")
    a, b = iv.a, iv.b
    L = iv.length()
    lo = a + lam * L / 2
    slack = DOMAIN_SLACK * L
    if not lo - slack <= x <= iv.midpoint() + slack:
        raise DomainViolation(f"x={x} outside [{lo}, {iv.midpoint()}]")
    centre = ((3 - lam) * a + (1 + lam) * b) / 4
    return L * ((2 * lam**2 + (1 - lam) ** 2) / 8 + 2 * ((x - centre) / L) ** 2) * M


# --------------------------------------------------------------------------
# Guessab-Schmeisser extremal function


@dataclass(frozen=True)
class GSExtremalSpec:
    x: float
    alpha: float
    iv: Interval
    M: float = 1.0
    c: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if not self.iv.a <= self.x <= self.iv.midpoint():
            raise DomainViolation("the extremal node must lie in [a, (a+b)/2]")
        if not 0 < self.alpha <= 1:
            raise InvalidParameters("alpha must lie in (0, 1]")
        if self.M <= 0 or self.sign not in (1, -1):
            raise InvalidParameters("need M > 0 and sign = +-1")


def _fstar(spec: GSExtremalSpec, t):
    t = np.asarray(t, dtype=float)
    # measure from the mirrored node directly so f*(a+b-x) is exactly 0
    mirror = spec.iv.a + spec.iv.b - spec.x
    return np.where(t <= spec.iv.midpoint(), np.abs(spec.x - t), np.abs(mirror - t)) ** spec.alpha


def gs_extremal(spec: GSExtremalSpec, t):
    """sign * M * f*(t) + c."""
    val = spec.sign * spec.M * _fstar(spec, t) + spec.c
    return float(val) if np.ndim(val) == 0 else val


def _fstar_primitive(spec: GSExtremalSpec, t):
    a, b, x, al = spec.iv.a, spec.iv.b, spec.x, spec.alpha
    mid = spec.iv.midpoint()

    def left(u):
        head = (x - a) ** (al + 1) / (al + 1)
        before = head - np.maximum(x - u, 0.0) ** (al + 1) / (al + 1)
        after = head + np.maximum(u - x, 0.0) ** (al + 1) / (al + 1)
        return np.where(u <= x, before, after)

    t = np.asarray(t, dtype=float)
    return np.where(t <= mid, left(np.minimum(t, mid)), 2 * left(mid) - left(np.minimum(a + b - t, mid)))


def gs_extremal_function(spec: GSExtremalSpec, fid: Optional[str] = None) -> TestFunction:
    iv = spec.iv
    mid = iv.midpoint()
    kinks = tuple(sorted({k for k in (spec.x, mid, iv.a + iv.b - spec.x) if iv.a < k < iv.b}))
    return TestFunction(
        id=fid or f"gs_extremal[x={spec.x!r},alpha={spec.alpha!r}]",
        eval=lambda t: spec.sign * spec.M * _fstar(spec, t) + spec.c,
        antiderivative=lambda t: spec.sign * spec.M * _fstar_primitive(spec, t) + spec.c * np.asarray(t),
        smoothness=Smoothness.LIP,
        lipschitz=(spec.M, spec.alpha),
        kinks=kinks,
    )


# --------------------------------------------------------------------------
# case constants


@dataclass(frozen=True)
class _Stated:
    source: str
    value: Optional[float]   # the constant as we implement it (typo resolved)
    printed: Optional[float]  # the literal printed value
    typo: bool = False


def _stated_constant(c: CaseId, p: RuleParams) -> _Stated:
    iv = p.iv
    L = iv.length()
    a, b = iv.a, iv.b
    lam = p.lam
    k = c.derivative_order
    tag = c.tag
    name = f"Case{CASE_NUMBER[tag]}"

    if tag is CaseTag.TRAPEZOID:
        v = L**2 / 12 if k == 2 else L / 4
        return _Stated(f"Case1-order{k}", v, v)

    if tag is CaseTag.WEIGHTED_MID_TRAP:
        sub = {0.0: "Case2-midpoint", 0.5: "Case2-compositetrap"}.get(lam, "Case2")
        if k == 1:
            v = L * (2 * lam**2 - 2 * lam + 1) / 4
            return _Stated(f"{sub}-order1", v, v)
        if lam in (0.0, 0.5):
            v = L**2 / 24 if lam == 0 else L**2 / 48
            return _Stated(f"{sub}-order2", v, v)
        if lam < 0.5:
            printed = L**2 * (8 * lam**2 - 3 * lam + 1) / 24
            resolved = L**2 * (8 * lam**3 - 3 * lam + 1) / 24
            return _Stated("Case2-order2", resolved, printed, typo=True)
        v = L**2 * (3 * lam - 1) / 24
        return _Stated("Case2-order2", v, v)

    if tag is CaseTag.SYMMETRIC_HALF:
        x = p.x
        if lam < 1 / 3 or 1 / 3 < lam < 0.5:
            label = "Case3-ec" if lam < 1 / 3 else "Case4-ec"
            if x <= a + lam * L:
                v = L**2 / 12 + (1 - lam) * (a - x) * (b - x) / 2
            elif x < a + L / (4 * (1 - lam)):
                v = (L**2 / 6 * (1 + 4 * (1 - lam) * (a - x) / L) ** 1.5
                     - L**2 / 12 * (1 - 4 * lam**3) - (1 - lam) * (a - x) * (b - x) / 2)
            else:
                v = (4 * lam**3 - 1) * L**2 / 12 + (1 - lam) * (b - x) * (x - a) / 2
            return _Stated(f"{label}-order2", v, v)
        if 0.5 < lam < 1:
            v = L**2 / 12 + (1 - lam) * (b - x) * (a - x) / 2
            return _Stated("Case4-order2", v, v)
        return _Stated("Case3-4-order2", None, None)

    if tag is CaseTag.NEWTON_SIMPSON:
        if k == 4:
            return _Stated("Case5-NS-order4", L**4 / 6480, 1 / 6480, typo=True)
        v = {3: L**3 / 1728, 2: L**2 / 192, 1: 25 * L / 288}[k]
        return _Stated(f"Case5-NS-order{k}", v, v)

    if tag is CaseTag.GAUSS_TWO_POINT:
        if 0.25 <= lam < 1 / 3:
            v = (lam - 1 / 6) * L**4 / (720 * (1 - lam))
            return _Stated("Case5-order4", v, v)
        return _Stated("Case5-order4", None, None)

    v = {4: L**4 / 2880, 3: L**3 / 576, 2: L**2 / 81, 1: 5 * L / 36}[k]
    return _Stated(f"{name}-Simpson-order{k}", v, v)


def case_constant(c: CaseId, iv: Interval, lam: Optional[float] = None, x: Optional[float] = None,
                  mu: float = 0.5) -> BoundReport:
    """The stated constant for a case and derivative order, checked against
    |scale| * integral |K| of the case kernel."""
    p = params_for_case(c.tag, iv, lam, x)
    if mu != 0.5 and c.tag in (CaseTag.TRAPEZOID, CaseTag.WEIGHTED_MID_TRAP):
        p = RuleParams(p.lam, mu, p.x, iv)
    spec = case_kernel_spec(c, p)
    q = p.canonical()
    raw, fallback = kernel_abs_integral_checked(spec)
    oracle = abs(spec.scale) * raw
    stated = _stated_constant(c, q)
    if stated.value is None:
        constant, verdict = oracle, Verdict.NO_PAPER_VALUE
    elif constants_agree(stated.value, oracle):
        constant = stated.value
        verdict = Verdict.PAPER_TYPO_RESOLVED if stated.typo else Verdict.MATCH
    else:
        constant, verdict = stated.value, Verdict.MISMATCH
    return BoundReport(
        source=stated.source, derivative_order=c.derivative_order, constant=constant,
        oracle_value=oracle, verdict=verdict, paper_value=stated.printed, params=_params(p),
        note="fallback quadrature" if fallback else "",
    )


def catalog(iv: Interval) -> list[tuple[CaseId, Optional[float], Optional[float]]]:
    """Every cataloged case constant as (case, lam, x); x is relative to ``iv``."""
    W, S = CaseTag.WEIGHTED_MID_TRAP, CaseTag.SYMMETRIC_HALF
    entries: list[tuple[CaseId, Optional[float], Optional[float]]] = [
        (CaseId(CaseTag.TRAPEZOID, 2), None, None),
        (CaseId(CaseTag.TRAPEZOID, 1), None, None),
        (CaseId(W, 2), 0.25, None),       # lam < 1/2, typo-resolved branch
        (CaseId(W, 2), 0.75, None),       # lam >= 1/2
        (CaseId(W, 1), 0.25, None),
        (CaseId(W, 2), 0.0, None),        # midpoint
        (CaseId(W, 1), 0.0, None),
        (CaseId(W, 2), 0.5, None),        # composite trapezoid
        (CaseId(W, 1), 0.5, None),
    ]
    for lam, s in ((0.1, 0.05), (0.1, 0.2), (0.1, 0.4), (0.4, 0.45), (0.7, 0.3)):
        entries.append((CaseId(S, 2), lam, iv.at(s)))
    entries += [(CaseId(CaseTag.NEWTON_SIMPSON, k), None, None) for k in (4, 3, 2, 1)]
    entries += [(CaseId(CaseTag.GAUSS_TWO_POINT, 4), lam, None) for lam in (0.25, 0.3)]
    entries += [(CaseId(CaseTag.SIMPSON, k), None, None) for k in (4, 3, 2, 1)]
    return entries

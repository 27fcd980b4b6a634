"""Peano kernels of the error functional and the exact integral of |K|.

Kernels are piecewise polynomials (:class:`KernelSpec`).  ``spec.scale`` is the
prefactor of the representation ``E(f) = scale * integral(K * f^(order))``;
``kernel_abs_integral`` returns the raw integral of |K| and
``KernelSpec.bound_constant`` the certified constant ``|scale| * integral |K|``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InconsistentCase, InvalidParameters, MissingDerivative, OutOfDomain, RootIsolationFailure
from .funcspace import Interval, TestFunction, adaptive_integrate
from .rules import DEFAULT_TOL, RuleParams, error_functional

T = Polynomial([0.0, 1.0])
BISECTION_TOL = 1e-14
FALLBACK_POINTS = 10**5
PARAM_TOL = 1e-12


@dataclass(frozen=True)
class KernelNodes:
    nu1: float
    nu2: float
    nu3: float


def kernel_nodes(p: RuleParams) -> KernelNodes:
    a, b = p.iv.a, p.iv.b
    L = b - a
    nu1 = a + p.lam / 2 * L
    nu2 = a + L * (p.lam / 2 + p.mu * (1 - p.lam))
    return KernelNodes(nu1, nu2, a + b - nu1)


@dataclass(frozen=True)
class KernelSpec:
    breakpoints: tuple[float, ...]
    pieces: tuple[tuple[float, ...], ...]  # ascending coefficients in t
    scale: float = 1.0
    order: int = 1

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2 or any(not lo < hi for lo, hi in zip(bp, bp[1:])):
            raise InvalidParameters(f"breakpoints must be strictly increasing: {bp}")
        if len(self.pieces) != len(bp) - 1:
            raise InvalidParameters("need exactly one piece per subinterval")

    @classmethod
    def build(cls, breakpoints: Sequence[float], polys: Sequence[Polynomial], scale=1.0, order=1):
        """Drop zero-width subintervals, then freeze the polynomials."""
        bp = [float(breakpoints[0])]
        kept = []
        for hi, poly in zip(breakpoints[1:], polys):
            if hi > bp[-1]:
                bp.append(float(hi))
                kept.append(tuple(float(c) for c in poly.coef))
        return cls(tuple(bp), tuple(kept), float(scale), order)

    @property
    def interval(self) -> Interval:
        return Interval(self.breakpoints[0], self.breakpoints[-1])

    def polynomials(self) -> list[Polynomial]:
        return [Polynomial(c) for c in self.pieces]

    def segments(self):
        bp = self.breakpoints
        return [(lo, hi, Polynomial(c)) for lo, hi, c in zip(bp, bp[1:], self.pieces)]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        bp = np.asarray(self.breakpoints)
        idx = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(t)
        for i, c in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = np.polynomial.polynomial.polyval(t[sel], c)
        return out if out.ndim else float(out)

    def integrate_against(self, g, tol: float = DEFAULT_TOL, breaks: Sequence[float] = ()) -> float:
        """integral over [a, b] of K(t) * g(t), split at the kernel breakpoints."""
        segs = self.segments()
        total = []
        for lo, hi, poly in segs:
            total.append(adaptive_integrate(lambda t, poly=poly: poly(t) * g(t), lo, hi,
                                            tol / len(segs), breaks=breaks))
        return math.fsum(total)

    def bound_constant(self) -> float:
        return abs(self.scale) * kernel_abs_integral(self)

    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "pieces": [list(c) for c in self.pieces],
            "scale": self.scale,
            "order": self.order,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(tuple(d["breakpoints"]), tuple(tuple(c) for c in d["pieces"]),
                   d.get("scale", 1.0), d.get("order", 1))

    @classmethod
    def from_json(cls, s: str) -> "KernelSpec":
        return cls.from_dict(json.loads(s))


# --------------------------------------------------------------------------
# integral of |K| by root isolation


def _bisect(poly: Polynomial, lo: float, hi: float) -> float:
    flo = poly(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= BISECTION_TOL * max(1.0, abs(mid)) or mid in (lo, hi):
            return mid
        fm = poly(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise RootIsolationFailure(f"bisection did not converge on [{lo}, {hi}]")


def sign_changes(poly: Polynomial, lo: float, hi: float) -> list[float]:
    """Points in (lo, hi) where ``poly`` changes sign, in increasing order.

    Linear and quadratic pieces are solved in closed form.  Higher degrees are
    split at the sign changes of the derivative, so each sub-segment is
    monotone and holds at most one root, which bisection then locates.
    """
    coef = np.trim_zeros(np.asarray(poly.coef, dtype=float), "b")
    if not np.all(np.isfinite(coef)):
        raise RootIsolationFailure("non-finite polynomial coefficients")
    deg = len(coef) - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -coef[0] / coef[1]
        return [r] if lo < r < hi else []
    if deg == 2:
        c, b, a = coef
        disc = b * b - 4 * a * c
        if disc <= 0:
            return []
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        roots = sorted({q / a, c / q} if q != 0 else {0.0})
        return [r for r in roots if lo < r < hi]
    crit = sign_changes(poly.deriv(), lo, hi)
    pts = [lo] + crit + [hi]
    roots = []
    for i, (s, e) in enumerate(zip(pts, pts[1:])):
        fs, fe = poly(s), poly(e)
        if fs == 0 and s != lo:
            # a zero at a critical point counts only if the sign flips across it
            if poly(pts[i - 1]) * poly(e) < 0:
                roots.append(s)
            continue
        if fs * fe < 0:
            roots.append(_bisect(poly, s, e))
    return roots


def _abs_integral_piece(poly: Polynomial, lo: float, hi: float) -> float:
    local = poly(Polynomial([lo, 1.0]))  # u = t - lo keeps the antiderivative well conditioned
    prim = local.integ()
    cuts = [0.0] + sign_changes(local, 0.0, hi - lo) + [hi - lo]
    return math.fsum(abs(prim(v) - prim(u)) for u, v in zip(cuts, cuts[1:]))


def _abs_integral_sampled(poly: Polynomial, lo: float, hi: float, n: int = FALLBACK_POINTS) -> float:
    t = np.linspace(lo, hi, n + 1)
    y = np.abs(poly(t))
    return float(np.trapezoid(y, t))


def kernel_abs_integral_checked(spec: KernelSpec) -> tuple[float, bool]:
    """(integral of |K|, fallback_used)."""
    parts = []
    fallback = False
    for lo, hi, poly in spec.segments():
        try:
            parts.append(_abs_integral_piece(poly, lo, hi))
        except RootIsolationFailure:
            parts.append(_abs_integral_sampled(poly, lo, hi))
            fallback = True
    return math.fsum(parts), fallback


def kernel_abs_integral(spec: KernelSpec) -> float:
    return kernel_abs_integral_checked(spec)[0]


# --------------------------------------------------------------------------
# first-order kernel of the general functional


def first_order_kernel(p: RuleParams) -> KernelSpec:
    """K(x, t; lam, mu), or its mirrored form when x > (a+b)/2.

    Represents ``E(f) = -(1/(b-a)) * integral K f'``.
    """
    a, b = p.iv.a, p.iv.b
    nodes = kernel_nodes(p)
    if p.x <= p.iv.midpoint():
        bp = [a, p.x, a + b - p.x, b]
        shifts = [nodes.nu1, nodes.nu2, nodes.nu3]
    else:
        bp = [a, a + b - p.x, p.x, b]
        shifts = [nodes.nu1, a + b - nodes.nu2, nodes.nu3]
    return KernelSpec.build(bp, [T - s for s in shifts], scale=-1.0 / (b - a), order=1)


def peano_kernel_first(p: RuleParams, t: float) -> float:
    if not p.iv.contains(t):
        raise OutOfDomain(f"t={t} outside [{p.iv.a}, {p.iv.b}]")
    return float(first_order_kernel(p)(t))


def peano_identity_residual(f: TestFunction, p: RuleParams, tol: float = DEFAULT_TOL) -> float:
    """|E(f) + (1/(b-a)) * integral K f'|; should be at most about 10 * tol."""
    if not f.has_derivative(1):
        raise MissingDerivative(f"{f.id} has no first derivative")
    spec = first_order_kernel(p)
    rep = spec.scale * spec.integrate_against(lambda t: f.derivative_eval(1, t), tol, breaks=f.kinks)
    return abs(error_functional(f, p, tol) - rep)


# --------------------------------------------------------------------------
# case kernels


class CaseTag(enum.Enum):
    TRAPEZOID = "Trapezoid"            # Case 1
    WEIGHTED_MID_TRAP = "WeightedMidTrap"  # Case 2
    SYMMETRIC_HALF = "SymmetricHalf"   # Cases 3-4
    NEWTON_SIMPSON = "NewtonSimpson"   # Case 5, lam = 1/4
    GAUSS_TWO_POINT = "GaussTwoPoint"  # Case 5, general lam
    SIMPSON = "Simpson"                # Case 6


CASE_ORDERS = {
    CaseTag.TRAPEZOID: (1, 2),
    CaseTag.WEIGHTED_MID_TRAP: (1, 2),
    CaseTag.SYMMETRIC_HALF: (2,),
    CaseTag.NEWTON_SIMPSON: (1, 2, 3, 4),
    CaseTag.GAUSS_TWO_POINT: (4,),
    CaseTag.SIMPSON: (1, 2, 3, 4),
}

CASE_NUMBER = {
    CaseTag.TRAPEZOID: "1",
    CaseTag.WEIGHTED_MID_TRAP: "2",
    CaseTag.SYMMETRIC_HALF: "3-4",
    CaseTag.NEWTON_SIMPSON: "5",
    CaseTag.GAUSS_TWO_POINT: "5",
    CaseTag.SIMPSON: "6",
}


@dataclass(frozen=True)
class CaseId:
    tag: CaseTag
    derivative_order: int

    def __post_init__(self):
        if self.derivative_order not in CASE_ORDERS[self.tag]:
            raise InvalidParameters(
                f"{self.tag.value} has kernels for orders {CASE_ORDERS[self.tag]}, not {self.derivative_order}"
            )


def optimal_node(lam: float, iv: Interval) -> float:
    """x*(lam) = (a+b)/2 - ((b-a)/2) sqrt((1/3 - lam)/(1 - lam)), for lam in [0, 1/3]."""
    if not 0 <= lam <= 1 / 3 + PARAM_TOL:
        raise InvalidParameters("x*(lam) is defined for lam in [0, 1/3]")
    ratio = max(0.0, (1 / 3 - lam) / (1 - lam))
    return iv.midpoint() - iv.length() / 2 * math.sqrt(ratio)


def _close(u: float, v: float, scale: float = 1.0) -> bool:
    return abs(u - v) <= PARAM_TOL * scale


def check_case(tag: CaseTag, p: RuleParams) -> RuleParams:
    """Validate ``p`` against the case and return it with x <= (a+b)/2."""
    iv = p.iv
    L = iv.length()
    mid = iv.midpoint()
    q = p.canonical()
    symmetric = _close(p.mu, 0.5) or _close(p.x, mid, L)
    ok = {
        CaseTag.TRAPEZOID: _close(p.lam, 1.0),
        CaseTag.WEIGHTED_MID_TRAP: _close(p.x, mid, L),
        CaseTag.SYMMETRIC_HALF: symmetric,
        CaseTag.NEWTON_SIMPSON: _close(p.lam, 0.25) and symmetric and _close(q.x, iv.at(1 / 3), L),
        CaseTag.GAUSS_TWO_POINT: (p.lam < 1 / 3 and symmetric
                                  and _close(q.x, optimal_node(p.lam, iv), L)),
        CaseTag.SIMPSON: _close(p.lam, 1 / 3) and _close(p.x, mid, L),
    }[tag]
    if not ok:
        raise InconsistentCase(f"parameters {p} do not define case {tag.value}")
    return q


def _two_branch(iv: Interval, left: Polynomial, right: Polynomial, scale, order) -> KernelSpec:
    return KernelSpec.build([iv.a, iv.midpoint(), iv.b], [left, right], scale, order)


def case_kernel_spec(c: CaseId, p: RuleParams) -> KernelSpec:
    q = check_case(c.tag, p)
    iv = q.iv
    a, b = iv.a, iv.b
    L = b - a
    lam = q.lam
    mid = iv.midpoint()
    k = c.derivative_order
    tag = c.tag

    if tag is CaseTag.TRAPEZOID:
        if k == 2:
            return KernelSpec.build([a, b], [(b - T) * (a - T) / (2 * L)], 1.0, 2)
        return KernelSpec.build([a, b], [(T - mid) / L], -1.0, 1)

    if tag is CaseTag.WEIGHTED_MID_TRAP:
        if k == 2:
            return _two_branch(iv, (T - a) * ((T - a) - lam * L) / (2 * L),
                               (b - T) * ((b - T) - lam * L) / (2 * L), 1.0, 2)
        return _two_branch(iv, (2 * a - 2 * T + lam * L) / (2 * L),
                           (2 * b - 2 * T - lam * L) / (2 * L), 1.0, 1)

    x = q.x
    xm = a + b - x
    if tag is CaseTag.SYMMETRIC_HALF:
        return KernelSpec.build(
            [a, x, xm, b],
            [(T - a) * ((T - a) - lam * L) / (2 * L),
             (b - T) * (a - T) / (2 * L) - (1 - lam) * (a - x) / 2,
             (b - T) * ((b - T) - lam * L) / (2 * L)],
            1.0, 2,
        )

    if tag is CaseTag.GAUSS_TWO_POINT:
        return KernelSpec.build(
            [a, x, xm, b],
            [(T - a) ** 3 * (T - 2 * lam * L - a) / (4 * L),
             (b - T) ** 4 / (4 * L) - (lam * (b - T) ** 3 / 2 + (1 - lam) * (xm - T) ** 3 / 2),
             (b - T) ** 3 * (b - 2 * lam * L - T) / (4 * L)],
            1 / 6, 4,
        )

    if tag is CaseTag.NEWTON_SIMPSON:
        bp = [a, x, xm, b]
        if k == 4:
            middle = ((6 * T**2 - 6 * T * (a + b) + a * a + b * b + 4 * a * b)
                      * (3 * T**2 - 3 * T * (a + b) + a * a + a * b + b * b) / (72 * L))
            return KernelSpec.build(bp, [(T - a) ** 3 * (T - mid) / (4 * L), middle,
                                         (b - T) ** 3 * (mid - T) / (4 * L)], 1 / 6, 4)
        if k == 3:
            return KernelSpec.build(bp, [(T - a) ** 2 * (T - (5 * a + 3 * b) / 8) / L,
                                         (T - mid) ** 3 / L,
                                         (b - T) ** 2 * (T - (3 * a + 5 * b) / 8) / L], -1 / 6, 3)
        if k == 2:
            return KernelSpec.build(bp, [3 * (T - a) * (T - (3 * a + b) / 4) / L,
                                         3 * (T - mid) ** 2 / L,
                                         3 * (b - T) * ((a + 3 * b) / 4 - T) / L], 1 / 6, 2)
        # the middle branch is linear: it is the first-order kernel t - nu2 scaled by 6/(b-a)
        return KernelSpec.build(bp, [6 * (T - (7 * a + b) / 8) / L,
                                     6 * (T - mid) / L,
                                     6 * (T - (a + 7 * b) / 8) / L], -1 / 6, 1)

    # Simpson
    if k == 4:
        return _two_branch(iv, (a - T) ** 3 * (a - 3 * T + 2 * b) / (12 * L),
                           (b - T) ** 3 * (b - 3 * T + 2 * a) / (12 * L), 1 / 6, 4)
    if k == 3:
        return _two_branch(iv, (a - T) ** 2 * (a + b - 2 * T) / (2 * L),
                           (b - T) ** 2 * (a + b - 2 * T) / (2 * L), 1 / 6, 3)
    if k == 2:
        return _two_branch(iv, (a - T) * (2 * a + b - 3 * T) / L,
                           (b - T) * (a + 2 * b - 3 * T) / L, 1 / 6, 2)
    return _two_branch(iv, (b - 6 * T + 5 * a) / L, (a + 5 * b - 6 * T) / L, 1 / 6, 1)


def case_kernel(c: CaseId, p: RuleParams, t: float) -> float:
    """Value of the case's kernel K(t) (without the representation prefactor)."""
    if not p.iv.contains(t):
        raise OutOfDomain(f"t={t} outside [{p.iv.a}, {p.iv.b}]")
    return float(case_kernel_spec(c, p)(t))


def case_representation(c: CaseId, p: RuleParams, f: TestFunction, tol: float = DEFAULT_TOL) -> float:
    """scale * integral K f^(k): equals E(f) when the kernel is right."""
    spec = case_kernel_spec(c, p)
    k = c.derivative_order
    if not f.has_derivative(k):
        raise MissingDerivative(f"{f.id} has no derivative of order {k}")
    return spec.scale * spec.integrate_against(lambda t: f.derivative_eval(k, t), tol, breaks=f.kinks)


def params_for_case(tag: CaseTag, iv: Interval, lam: float | None = None, x: float | None = None) -> RuleParams:
    """Canonical rule parameters for a case; free values fall back to sensible defaults."""
    mid = iv.midpoint()
    if tag is CaseTag.TRAPEZOID:
        return RuleParams(1.0, 0.5, mid if x is None else x, iv)
    if tag is CaseTag.WEIGHTED_MID_TRAP:
        return RuleParams(0.0 if lam is None else lam, 0.5, mid, iv)
    if tag is CaseTag.SYMMETRIC_HALF:
        return RuleParams(0.0 if lam is None else lam, 0.5, iv.a if x is None else x, iv)
    if tag is CaseTag.NEWTON_SIMPSON:
        return RuleParams(0.25, 0.5, iv.at(1 / 3), iv)
    if tag is CaseTag.GAUSS_TWO_POINT:
        lam = 0.25 if lam is None else lam
        return RuleParams(lam, 0.5, optimal_node(lam, iv), iv)
    return RuleParams(1 / 3, 0.5, mid, iv)

"""Intervals, test functions, the built-in corpus and the reference integrator.

Every other module treats :func:`reference_integral` as ground truth for the
integral mean, so it prefers closed-form antiderivatives and otherwise runs a
globally adaptive composite Gauss-Legendre rule that is pre-split at the known
kinks of the integrand.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidParameters, MissingDerivative, NonConvergence

GL_ORDER = 20
MAX_PANELS = 10**6
DEFAULT_RESOLUTION = 4096

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise InvalidParameters(f"need finite a < b, got [{self.a}, {self.b}]")

    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def length(self) -> float:
        return self.b - self.a

    def at(self, s: float) -> float:
        """Abscissa at relative position ``s`` (0 -> a, 1 -> b)."""
        return self.a + s * (self.b - self.a)

    def contains(self, t: float) -> bool:
        return self.a <= t <= self.b


class Smoothness(enum.IntEnum):
    C0 = 0
    LIP = 1
    C1 = 2
    C2 = 3
    C3 = 4
    C4 = 5

    @property
    def derivative_count(self) -> int:
        return max(0, int(self) - 1)


Func = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class TestFunction:
    """An integrand plus whatever closed-form knowledge we have about it.

    ``antiderivative`` must be continuous on the interval the function is used
    on.  ``exact_modulus(n, h)`` returns the analytic n-th modulus or ``None``
    when it is not known for that order.
    """

    __test__ = False  # keep pytest from collecting this class

    id: str
    eval: Func
    derivatives: Mapping[int, Func] = field(default_factory=dict)
    antiderivative: Optional[Func] = None
    smoothness: Smoothness = Smoothness.C0
    lipschitz: Optional[tuple[float, float]] = None  # (M, alpha)
    kinks: tuple[float, ...] = ()
    exact_modulus: Optional[Callable[[int, float], Optional[float]]] = None

    def __call__(self, t):
        return self.eval(t)

    def derivative_eval(self, order: int, t):
        try:
            d = self.derivatives[order]
        except KeyError:
            raise MissingDerivative(f"{self.id} has no derivative of order {order}") from None
        return d(t)

    def has_derivative(self, order: int) -> bool:
        return order in self.derivatives

    def exact_integral(self, iv: Interval) -> Optional[float]:
        if self.antiderivative is None:
            return None
        return float(self.antiderivative(np.float64(iv.b)) - self.antiderivative(np.float64(iv.a)))

    @property
    def lipschitz_constant(self) -> Optional[float]:
        return None if self.lipschitz is None else self.lipschitz[0]


@dataclass(frozen=True)
class CorpusEntry:
    function: TestFunction
    tags: frozenset[str]

    @property
    def id(self) -> str:
        return self.function.id


# --------------------------------------------------------------------------
# integration


def _gl(func: Func, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    vals = np.asarray(func(mid + half * _GL_NODES), dtype=float)
    return float(half * np.dot(_GL_WEIGHTS, vals))


def adaptive_integrate(
    func: Func,
    lo: float,
    hi: float,
    tol: float = 1e-12,
    breaks: Sequence[float] = (),
    max_panels: int = MAX_PANELS,
) -> float:
    """Globally adaptive composite Gauss-Legendre quadrature.

    The panel with the largest error estimate (difference between the panel
    rule and the sum over its halves) is bisected until the summed estimate
    drops below ``tol``.
    """
    if tol <= 0:
        raise InvalidParameters("tol must be positive")
    if lo == hi:
        return 0.0
    if lo > hi:
        return -adaptive_integrate(func, hi, lo, tol, breaks, max_panels)
    cuts = [lo] + sorted({c for c in breaks if lo < c < hi}) + [hi]

    # heap entries: (-err, seq, lo, hi, refined, halves)
    heap = []
    seq = 0

    def panel(p_lo, p_hi, whole):
        nonlocal seq
        m = 0.5 * (p_lo + p_hi)
        left = _gl(func, p_lo, m)
        right = _gl(func, m, p_hi)
        err = abs(left + right - whole)
        seq += 1
        return (-err, seq, p_lo, p_hi, left + right, (left, right))

    for p_lo, p_hi in zip(cuts, cuts[1:]):
        heapq.heappush(heap, panel(p_lo, p_hi, _gl(func, p_lo, p_hi)))

    total_err = sum(-h[0] for h in heap)
    while total_err > tol:
        if len(heap) >= max_panels:
            raise NonConvergence(
                f"integral over [{lo}, {hi}] not converged to {tol} within {max_panels} panels"
            )
        neg_err, _, p_lo, p_hi, _, (left, right) = heapq.heappop(heap)
        m = 0.5 * (p_lo + p_hi)
        if not (p_lo < m < p_hi):
            raise NonConvergence(f"panel [{p_lo}, {p_hi}] cannot be bisected further")
        a_panel = panel(p_lo, m, left)
        b_panel = panel(m, p_hi, right)
        heapq.heappush(heap, a_panel)
        heapq.heappush(heap, b_panel)
        total_err += neg_err - a_panel[0] - b_panel[0]
        if total_err <= tol:
            # the running sum drifts; recompute before accepting
            total_err = sum(-h[0] for h in heap)
    return math.fsum(h[4] for h in heap)


@lru_cache(maxsize=4096)
def _cached_integral(f: TestFunction, a: float, b: float, tol: float, use_exact: bool) -> float:
    iv = Interval(a, b)
    if use_exact:
        exact = f.exact_integral(iv)
        if exact is not None:
            return exact
    return adaptive_integrate(f.eval, a, b, tol, breaks=f.kinks)


def reference_integral(f: TestFunction, iv: Interval, tol: float = 1e-12, use_exact: bool = True) -> float:
    """Integral of ``f`` over ``iv``; closed form when available."""
    if tol <= 0:
        raise InvalidParameters("tol must be positive")
    return _cached_integral(f, float(iv.a), float(iv.b), float(tol), bool(use_exact))


def modulus_grid(iv: Interval, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    if resolution < 2:
        raise InvalidParameters("resolution must be at least 2")
    return np.linspace(iv.a, iv.b, resolution + 1)


def derivative_sup(f: TestFunction, order: int, iv: Interval, points: int = DEFAULT_RESOLUTION,
                   inflate: float = 1e-6) -> float:
    """Grid estimate of ||f^(order)||_inf on ``iv``, inflated by a relative margin."""
    t = np.linspace(iv.a, iv.b, points)
    vals = f.eval(t) if order == 0 else f.derivative_eval(order, t)
    return float(np.max(np.abs(vals))) * (1.0 + inflate)


# --------------------------------------------------------------------------
# corpus


def _const(value: float) -> Func:
    return lambda t: np.full_like(np.asarray(t, dtype=float), value)


def monomial(i: int, iv: Optional[Interval] = None) -> TestFunction:
    """e_i(t) = t**i with all derivatives and, given ``iv``, its moduli."""

    def power(k: int) -> Func:
        if k > i:
            return _const(0.0)
        c = math.factorial(i) / math.factorial(i - k)
        p = i - k
        if p == 0:
            return _const(c)
        return lambda t, c=c, p=p: c * np.asarray(t, dtype=float) ** p

    lip = None
    exact_mod = None
    if iv is not None:
        m = max(abs(iv.a), abs(iv.b))
        if i >= 1:
            lip = (i * m ** (i - 1), 1.0)

        def exact_mod(n: int, h: float) -> Optional[float]:
            if i == 0 or (i == 1 and n >= 2) or (i <= 3 and n == 4):
                return 0.0
            if i == 1 and n == 1:
                return min(h, iv.length())
            if i == 2 and n == 1:
                return h * (2 * m - h) if h <= m else m * m
            if i == 2 and n == 2:
                s = min(h, iv.length() / 2)
                return 2 * s * s
            if i == 4 and n == 4:
                return 24 * min(h, iv.length() / 4) ** 4
            return None

    return TestFunction(
        id=f"e{i}",
        eval=power(0),
        derivatives={k: power(k) for k in range(1, 5)},
        antiderivative=lambda t: np.asarray(t, dtype=float) ** (i + 1) / (i + 1),
        smoothness=Smoothness.C4,
        lipschitz=lip,
        exact_modulus=exact_mod,
    )


def _sin(iv: Optional[Interval]) -> TestFunction:
    cyc = [np.sin, np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t), np.sin]
    return TestFunction(
        id="sin", eval=np.sin, derivatives={k: cyc[k] for k in range(1, 5)},
        antiderivative=lambda t: -np.cos(t), smoothness=Smoothness.C4, lipschitz=(1.0, 1.0),
    )


def _cos(iv: Optional[Interval]) -> TestFunction:
    cyc = [np.cos, lambda t: -np.sin(t), lambda t: -np.cos(t), np.sin, np.cos]
    return TestFunction(
        id="cos", eval=np.cos, derivatives={k: cyc[k] for k in range(1, 5)},
        antiderivative=np.sin, smoothness=Smoothness.C4, lipschitz=(1.0, 1.0),
    )


def _exp(iv: Optional[Interval]) -> TestFunction:
    return TestFunction(
        id="exp", eval=np.exp, derivatives={k: np.exp for k in range(1, 5)},
        antiderivative=np.exp, smoothness=Smoothness.C4,
        lipschitz=None if iv is None else (math.exp(iv.b), 1.0),
    )


def abs_kink(c: float, iv: Interval, fid: Optional[str] = None) -> TestFunction:
    """|t - c|, Lipschitz with M = 1."""
    reach = max(c - iv.a, iv.b - c)

    def exact_mod(n: int, h: float) -> Optional[float]:
        return min(h, reach) if n == 1 else None

    return TestFunction(
        id=fid or f"abs[c={c!r}]",
        eval=lambda t: np.abs(np.asarray(t, dtype=float) - c),
        antiderivative=lambda t: np.sign(t - c) * (t - c) ** 2 / 2,
        smoothness=Smoothness.LIP,
        lipschitz=(1.0, 1.0),
        kinks=(c,),
        exact_modulus=exact_mod,
    )


def hoelder_kink(c: float, alpha: float, fid: Optional[str] = None) -> TestFunction:
    """|t - c|**alpha, which lies in Lip_1(alpha)."""
    if not 0 < alpha <= 1:
        raise InvalidParameters("alpha must lie in (0, 1]")
    return TestFunction(
        id=fid or f"hoelder[c={c!r},alpha={alpha!r}]",
        eval=lambda t: np.abs(np.asarray(t, dtype=float) - c) ** alpha,
        antiderivative=lambda t: np.sign(t - c) * np.abs(t - c) ** (alpha + 1) / (alpha + 1),
        smoothness=Smoothness.LIP,
        lipschitz=(1.0, alpha),
        kinks=(c,),
    )


def _rel(s: float) -> str:
    return f"{round(s * 100):03d}"


# Relative positions are used so that every id means the same thing on any
# interval; "abs_c030" is |t - c| with c = a + 0.30 (b - a).
_KINK_POSITIONS = (0.3, 0.5)
_HOELDER = ((0.3, 0.5), (0.5, 0.25), (0.3, 0.75))
_GS = ((0.2, 1.0), (0.3, 0.5))


@lru_cache(maxsize=64)
def corpus(iv: Interval) -> tuple[CorpusEntry, ...]:
    """The compiled-in test corpus instantiated on ``iv``, in stable id order."""
    from .bounds import GSExtremalSpec, gs_extremal_function  # avoid import cycle

    entries = [CorpusEntry(monomial(i, iv), frozenset({"polynomial", "smooth"})) for i in range(7)]
    entries += [
        CorpusEntry(_sin(iv), frozenset({"transcendental", "smooth", "lipschitz"})),
        CorpusEntry(_cos(iv), frozenset({"transcendental", "smooth", "lipschitz"})),
        CorpusEntry(_exp(iv), frozenset({"transcendental", "smooth"})),
    ]
    for s in _KINK_POSITIONS:
        entries.append(CorpusEntry(abs_kink(iv.at(s), iv, f"abs_c{_rel(s)}"),
                                   frozenset({"kinked", "lipschitz"})))
    for s, alpha in _HOELDER:
        entries.append(CorpusEntry(hoelder_kink(iv.at(s), alpha, f"hoelder_a{_rel(alpha)}_c{_rel(s)}"),
                                   frozenset({"kinked", "lipschitz", "hoelder"})))
    for s, alpha in _GS:
        spec = GSExtremalSpec(x=iv.at(s), alpha=alpha, iv=iv)
        fn = gs_extremal_function(spec, fid=f"gs_extremal_x{_rel(s)}_a{_rel(alpha)}")
        entries.append(CorpusEntry(fn, frozenset({"kinked", "lipschitz", "extremal"})))
    ids = [e.id for e in entries]
    assert len(ids) == len(set(ids))
    return tuple(entries)


def corpus_ids(iv: Interval = Interval(0.0, 1.0)) -> list[str]:
    return [e.id for e in corpus(iv)]


def get_function(fid: str, iv: Interval) -> TestFunction:
    for e in corpus(iv):
        if e.id == fid:
            return e.function
    raise KeyError(f"unknown corpus id {fid!r}; known: {', '.join(corpus_ids(iv))}")

"""Independent oracles used by the tests.

Nothing here imports the kernel or moduli code under test: Peano kernels are
rebuilt from the rule's nodes and weights, integrated exactly with sympy, and
moduli are brute-forced over all point pairs.
"""

from __future__ import annotations

import numpy as np
import sympy as sp

t = sp.Symbol("t", real=True)


def exact(v):
    """Float -> exact sympy number (1/3, 0.1, ...) when a short form exists."""
    if isinstance(v, sp.Basic):
        return v
    return sp.nsimplify(v, rational=True, tolerance=1e-15)


def peano_pieces(lam, mu, x, a, b, k):
    """Order-k Peano kernel of the rule, E(f) = int_a^b K(t) f^(k)(t) dt, as
    (lo, hi, polynomial) pieces.  K(t) = E_s[(s - t)_+^(k-1)] / (k-1)!."""
    lam, mu, x, a, b = map(exact, (lam, mu, x, a, b))
    L = b - a
    nodes = [(a, lam / 2), (b, lam / 2), (x, (1 - lam) * mu), (a + b - x, (1 - lam) * (1 - mu))]
    cuts = sorted({a, b, x, a + b - x}, key=lambda v: float(v))
    mean = (b - t) ** k / (k * L)
    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        if sp.simplify(hi - lo) == 0:
            continue
        rule = sum(w * (s - t) ** (k - 1) for s, w in nodes if float(s) >= float(hi))
        pieces.append((lo, hi, sp.expand((mean - rule) / sp.factorial(k - 1))))
    return pieces


def peano_abs_integral(lam, mu, x, a, b, k) -> sp.Expr:
    """Exact int_a^b |K_k|."""
    total = sp.Integer(0)
    for lo, hi, poly in peano_pieces(lam, mu, x, a, b, k):
        roots = [r for r in sp.solveset(poly, t, sp.Interval.open(lo, hi)) if r.is_real]
        pts = [lo] + sorted(roots, key=lambda r: float(r)) + [hi]
        prim = sp.integrate(poly, t)
        for u, v in zip(pts, pts[1:]):
            total += sp.Abs(prim.subs(t, v) - prim.subs(t, u))
    return sp.nsimplify(sp.simplify(total)) if total.free_symbols == set() else total


def brute_modulus(y: np.ndarray, n: int, j: int) -> float:
    """max over all admissible windows with step index <= j, by explicit loops."""
    best = 0.0
    N = len(y)
    coeff = {1: (1, -1), 2: (1, -2, 1), 4: (1, -4, 6, -4, 1)}[n]
    for s in range(1, j + 1):
        for i in range(N - n * s if n > 1 else N - s):
            if n == 1:
                d = y[i + s] - y[i]
            else:
                d = sum(c * y[i + m * s] for m, c in enumerate(coeff))
            best = max(best, abs(d))
    return best


def chord_majorant(hs: np.ndarray, ws: np.ndarray, h: float) -> float:
    """Least concave majorant at h: sup over chords (u, v) with u <= h <= v."""
    hs = np.concatenate([[0.0], hs])
    ws = np.concatenate([[0.0], ws])
    best = 0.0
    for i, u in enumerate(hs):
        if u > h:
            break
        for k in range(len(hs)):
            v = hs[k]
            if v < h:
                continue
            val = ws[i] if v == u else ((v - h) * ws[i] + (h - u) * ws[k]) / (v - u)
            best = max(best, val)
    if h > hs[-1]:
        best = max(best, ws.max())
    return best

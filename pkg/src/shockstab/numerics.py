"""Small numerical kernels: adaptive Gauss-Legendre quadrature and vectorized bisection.

The integrands along the closed-form shock curves are smooth, so composite
16-point Gauss-Legendre panels with adaptive interval bisection reach
absolute tolerances far below the identity-check thresholds used elsewhere.
"""

from __future__ import annotations

import numpy as np

from shockstab.errors import NumericalAbort

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel(f, a, b):
    half = 0.5 * (b - a)
    t = 0.5 * (a + b) + half * _GL_NODES
    return half * np.sum(_GL_WEIGHTS * f(t))


def integrate(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 48) -> float:
    """Integrate a vectorized scalar function f over [a, b].

    Adaptive bisection: a panel is accepted when the 16-point estimate agrees
    with the sum of its two half-panels within the locally allotted tolerance.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    def recurse(lo, hi, whole, budget, depth):
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        if abs(left + right - whole) <= budget or depth >= max_depth:
            if depth >= max_depth and abs(left + right - whole) > budget:
                raise NumericalAbort(
                    f"quadrature did not converge on [{lo}, {hi}]"
                )
            return left + right
        return recurse(lo, mid, left, budget / 2, depth + 1) + recurse(
            mid, hi, right, budget / 2, depth + 1
        )

    return sign * recurse(a, b, _panel(f, a, b), tol, 0)


def bisect_scalar(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous scalar function by plain bisection.

    Requires a sign change on [lo, hi].
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NumericalAbort(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0 or (hi - lo) < tol:
            return mid
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_vectorized(f, lo, hi, iters: int = 80):
    """Componentwise bisection for a vectorized function with f(lo) <= 0 <= f(hi)."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = f(mid) <= 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)

"""Scalar safeguarded Newton iteration (Newton steps kept inside a bisection bracket)."""
from __future__ import annotations

import math


def safeguarded_newton(f, fprime, a, b, fa=None, fb=None, xtol=1e-15, maxiter=200):
    """Root of ``f`` in ``[a, b]`` given a sign change.

    Newton steps that leave the current bracket or fail to halve it are
    replaced by bisection, so convergence is guaranteed.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError("root is not bracketed")
    # orient so that f(lo) < 0 < f(hi)
    lo, hi = (a, b) if fa < 0 else (b, a)
    x = 0.5 * (a + b)
    dx_old = abs(b - a)
    dx = dx_old
    fx, dfx = f(x), fprime(x)
    for _ in range(maxiter):
        newton_ok = dfx != 0.0 and ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0.0
        if not newton_ok or abs(2.0 * fx) > abs(dx_old * dfx):
            dx_old = dx
            dx = 0.5 * (hi - lo)
            x = lo + dx
        else:
            dx_old = dx
            dx = fx / dfx
            x -= dx
        if abs(dx) < xtol * max(1.0, abs(x)):
            return x
        fx, dfx = f(x), fprime(x)
        if fx == 0.0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
    return x


def bisect_scalar(f, a, b, xtol=1e-13):
    fa = f(a)
    if fa == 0.0:
        return a
    for _ in range(200):
        mid = 0.5 * (a + b)
        if abs(b - a) <= xtol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)

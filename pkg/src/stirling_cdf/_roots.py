"""Safeguarded Newton iteration for monotone scalar equations."""

from __future__ import annotations

import math
from typing import Callable, Tuple

from .errors import ConvergenceError


def monotone_newton(
    func: Callable[[float], Tuple[float, float]],
    x0: float,
    lo: float = -math.inf,
    hi: float = math.inf,
    xtol: float = 1e-15,
    atol: float = 0.0,
    maxiter: int = 100,
    ftol: float = 0.0,
    increasing: bool = True,
) -> float:
    """Find the root of a monotone function by Newton steps kept inside a bracket.

    ``func(x)`` returns ``(f(x), f'(x))``. Every evaluation tightens the
    bracket ``[lo, hi]`` using the sign of ``f``; a Newton step that leaves the
    bracket is replaced by a bisection step (or by outward expansion when one
    side of the bracket is still infinite). Stops when a step is below
    ``max(xtol * |x|, atol)`` or when ``|f(x)| <= ftol``.
    """
    sign = 1.0 if increasing else -1.0
    x = float(x0)
    if not (lo < x < hi):
        x = _midpoint(lo, hi, x)
    for _ in range(maxiter):
        f, df = func(x)
        f *= sign
        df *= sign
        if abs(f) <= ftol:
            return x
        if f > 0.0:
            hi = x
        else:
            lo = x
        if df > 0.0 and math.isfinite(df) and math.isfinite(f):
            x_new = x - f / df
            # a step below the resolution of x is convergence, even if it
            # rounds onto the bracket end
            if abs(x_new - x) <= max(xtol * abs(x_new), atol) and lo <= x_new <= hi:
                return x_new
        else:
            x_new = math.nan
        if not (lo < x_new < hi):
            x_new = _midpoint(lo, hi, x)
        if abs(x_new - x) <= max(xtol * abs(x_new), atol):
            return x_new
        if math.isfinite(lo) and math.isfinite(hi) and hi - lo <= xtol * max(abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        x = x_new
    raise ConvergenceError(f"Newton iteration did not converge in {maxiter} steps (x={x!r})")


def _midpoint(lo: float, hi: float, x: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    step = max(1.0, abs(x))
    if math.isfinite(lo):
        return max(x, lo) + step
    if math.isfinite(hi):
        return min(x, hi) - step
    return x

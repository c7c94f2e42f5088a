"""Scalar special functions: log-gamma, polygamma, Pochhammer symbols and the
regularized incomplete beta function with its inverse.

The gamma-family functions are thin, domain-checked wrappers over
:mod:`scipy.special`. The incomplete beta function is evaluated here by the
continued fraction, with a prefactor written so that the large leading terms
cancel analytically rather than in floating point.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from ._roots import monotone_newton
from .errors import DomainError

__all__ = [
    "log_gamma",
    "polygamma",
    "log_pochhammer",
    "log1pmx",
    "stirling_correction",
    "log_beta_kernel",
    "inc_beta",
    "inc_beta_pair",
    "inc_beta_binomial_sum",
    "inc_beta_inverse",
    "inc_beta_inverse_logit",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_TINY = 1e-300
_EPS = 2.220446049250313e-16

# Bernoulli-number coefficients B_2k / (2k (2k-1)) of the Stirling series.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# Taylor coefficients of log(1+u) - u, (-1)**(k+1) / k for k = 2..30.
_LOG1PMX_COEF = np.array([(-1.0) ** (k + 1) / k for k in range(30, 1, -1)])


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return float(sc.gammaln(x))


def polygamma(order: int, x: float) -> float:
    """Polygamma function ``psi^(order)(x)``; order 0 is the digamma function."""
    if order < 0 or int(order) != order:
        raise DomainError(f"polygamma order must be a nonnegative integer, got {order!r}")
    if not x > 0:
        raise DomainError(f"polygamma requires x > 0, got {x!r}")
    if order == 0:
        return float(sc.digamma(x))
    return float(sc.polygamma(int(order), x))


def log_pochhammer(theta: float, n: int) -> float:
    """``log((theta)_n)`` for the rising factorial ``theta (theta+1) ... (theta+n-1)``."""
    if not theta > 0:
        raise DomainError(f"log_pochhammer requires theta > 0, got {theta!r}")
    if n < 0:
        raise DomainError(f"log_pochhammer requires n >= 0, got {n!r}")
    if n == 0:
        return 0.0
    if n <= 32:
        return float(np.sum(np.log(theta + np.arange(n, dtype=float))))
    return float(sc.gammaln(theta + n) - sc.gammaln(theta))


def log1pmx(u):
    """``log(1 + u) - u`` without cancellation for small ``|u|``.

    Accepts scalars or arrays with ``u > -1``.
    """
    u_arr = np.asarray(u, dtype=float)
    small = np.abs(u_arr) < 0.25
    out = np.empty_like(u_arr)
    if np.any(small):
        us = u_arr[small]
        out[small] = np.polyval(_LOG1PMX_COEF, us) * us * us
    big = ~small
    if np.any(big):
        ub = u_arr[big]
        out[big] = np.log1p(ub) - ub
    if np.ndim(u) == 0:
        return float(out)
    return out


def stirling_correction(z: float) -> float:
    """``log Gamma(z) - [(z - 1/2) log z - z + log sqrt(2 pi)]`` for ``z > 0``."""
    if z >= 10.0:
        zi = 1.0 / z
        zi2 = zi * zi
        acc = 0.0
        for c in reversed(_STIRLING):
            acc = acc * zi2 + c
        return acc * zi
    return float(sc.gammaln(z)) - ((z - 0.5) * math.log(z) - z + _LOG_SQRT_2PI)


def log_beta_kernel(p: float, q: float, x: float, one_minus_x: float | None = None) -> float:
    """``log(x**p (1-x)**q / B(p, q))`` accurate for large ``p`` and ``q``.

    The Stirling form of ``B(p, q)`` is used so that the terms of size
    ``p log x`` cancel exactly against their counterparts in ``log B``; what
    is left is a pair of ``log1pmx`` terms measuring the distance of ``x``
    from ``p / (p + q)``. ``one_minus_x`` may be passed when it is known
    more accurately than ``1 - x``.
    """
    y = 1.0 - x if one_minus_x is None else one_minus_x
    if x <= 0.0 or y <= 0.0:
        return -math.inf
    s = p + q
    x0 = p / s
    y0 = q / s
    e = x - x0
    u = e / x0
    v = -e / y0
    if u > -0.75:
        tp = p * log1pmx(u)
    else:
        tp = p * (math.log(x / x0) - u)
    if v > -0.75:
        tq = q * log1pmx(v)
    else:
        tq = q * (math.log(y / y0) - v)
    corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(s)
    return tp + tq + 0.5 * math.log(p * q / s) - _LOG_SQRT_2PI - corr


def _beta_cf(x: float, p: float, q: float, maxiter: int) -> float:
    """Continued fraction for ``I_x(p, q) * p / kernel`` (modified Lentz)."""
    qab = p + q
    qap = p + 1.0
    qam = p - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for k in range(1, maxiter + 1):
        k2 = 2 * k
        aa = k * (q - k) * x / ((qam + k2) * (p + k2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(p + k) * (qab + k) * x / ((p + k2) * (qap + k2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    from .errors import ConvergenceError

    raise ConvergenceError(
        f"incomplete beta continued fraction failed for x={x}, p={p}, q={q} after {maxiter} iterations"
    )


def _cf_iterations(p: float, q: float) -> int:
    # the fraction needs O(sqrt(max(p, q))) terms near the switch point
    return max(100, int(12.0 * math.sqrt(max(p, q))) + 20)


def _check_beta(x: float, p: float, q: float) -> None:
    if not (p > 0 and q > 0):
        raise DomainError(f"incomplete beta requires p, q > 0, got p={p!r}, q={q!r}")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"incomplete beta requires 0 <= x <= 1, got {x!r}")


def inc_beta_pair(x: float, p: float, q: float, one_minus_x: float | None = None) -> tuple[float, float]:
    """Return ``(I_x(p, q), 1 - I_x(p, q))``.

    The smaller of the two is computed directly and the other by
    complement, so both are accurate in the absolute sense and the smaller
    one also in the relative sense. ``one_minus_x`` may be supplied when
    ``x`` is so close to one that the subtraction loses digits.
    """
    _check_beta(x, p, q)
    y = 1.0 - x if one_minus_x is None else one_minus_x
    if x == 0.0:
        return 0.0, 1.0
    if y <= 0.0:
        return 1.0, 0.0
    if x <= p / (p + q):
        lower = math.exp(log_beta_kernel(p, q, x, y)) * _beta_cf(x, p, q, _cf_iterations(p, q)) / p
        lower = min(max(lower, 0.0), 1.0)
        return lower, 1.0 - lower
    upper = math.exp(log_beta_kernel(q, p, y, x)) * _beta_cf(y, q, p, _cf_iterations(p, q)) / q
    upper = min(max(upper, 0.0), 1.0)
    return 1.0 - upper, upper


def inc_beta(x: float, p: float, q: float) -> float:
    """Regularized incomplete beta function ``I_x(p, q)``.

    Examples
    --------
    >>> round(inc_beta(0.37, 1.0, 1.0), 12)
    0.37
    """
    return inc_beta_pair(x, p, q)[0]


def inc_beta_binomial_sum(tau: float, m: int, n: int) -> float:
    """``(1 + tau)**(-n) * sum_{j=m}^{n} C(n, j) tau**j``.

    Equals ``I_{tau/(1+tau)}(m, n - m + 1)`` for integer ``1 <= m <= n``; kept
    as an independent oracle for :func:`inc_beta`. Limited to ``n <= 1000``,
    where every binomial coefficient is still a finite double.
    """
    if n > 1000:
        raise DomainError(f"binomial-sum oracle limited to n <= 1000, got n={n}")
    if not (0 <= m <= n + 1):
        raise DomainError(f"need 0 <= m <= n, got m={m}, n={n}")
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    x = tau / (1.0 + tau)
    y = 1.0 / (1.0 + tau)
    terms = [math.comb(n, j) * x**j * y ** (n - j) for j in range(m, n + 1)]
    return math.fsum(terms)


def inc_beta_inverse(s: float, p: float, q: float, complement: bool = False) -> float:
    """Solve ``I_x(p, q) = s`` for ``x`` in ``(0, 1)``.

    With ``complement=True`` the equation ``1 - I_x(p, q) = s`` is solved
    instead, which keeps full relative accuracy when ``s`` is tiny on the
    upper side.

    Examples
    --------
    >>> round(inc_beta_inverse(0.25, 1.0, 1.0), 12)
    0.25
    """
    return float(sc.expit(inc_beta_inverse_logit(s, p, q, complement)))


def inc_beta_inverse_logit(s: float, p: float, q: float, complement: bool = False) -> float:
    """``log(x / (1 - x))`` for the solution ``x`` of :func:`inc_beta_inverse`.

    Useful when ``x`` is so close to one that ``1 - x`` is not
    representable as a difference; ``x/(1-x)`` is then ``exp`` of the
    result. Newton iteration on the logarithm of whichever tail is smaller,
    started from a normal approximation and safeguarded by bisection.
    """
    if not (0.0 < s < 1.0):
        raise DomainError(f"inc_beta_inverse requires 0 < s < 1, got {s!r}")
    if not (p > 0 and q > 0):
        raise DomainError(f"inc_beta_inverse requires p, q > 0, got p={p!r}, q={q!r}")
    lower_target = 1.0 - s if complement else s
    upper_target = s if complement else 1.0 - s
    # work on the tail whose target value is smaller
    use_lower = lower_target <= 0.5
    log_target = math.log(lower_target if use_lower else upper_target)

    mean = p / (p + q)
    sd = math.sqrt(p * q / ((p + q) ** 2 * (p + q + 1.0)))
    x0 = mean + float(sc.ndtri(lower_target)) * sd
    x0 = min(max(x0, 1e-12), 1.0 - 1e-12)

    # Newton in y = logit(x): log-tails are close to linear in y at both ends
    def fdf(y: float) -> tuple[float, float]:
        x = float(sc.expit(y))
        xc = float(sc.expit(-y))
        if x <= 0.0 or xc <= 0.0:
            return (-math.inf if (x <= 0.0) == use_lower else math.inf), math.nan
        lower, upper = inc_beta_pair(x, p, q, xc)
        tail = lower if use_lower else upper
        if tail <= 0.0:
            # log of an underflowed tail
            return -math.inf, math.nan
        slope = math.exp(log_beta_kernel(p, q, x, xc) - math.log(tail))
        value = math.log(tail) - log_target
        return value, (slope if use_lower else -slope)

    # the log-tail is only known to a few ulps; stop once it is matched that well
    return monotone_newton(
        fdf, float(sc.logit(x0)), xtol=4 * _EPS, atol=4 * _EPS, maxiter=50, increasing=use_lower, ftol=4 * _EPS
    )

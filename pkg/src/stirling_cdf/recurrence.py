"""Exact evaluation of the normalized partial Stirling sums.

``S'_{n,m}(theta) = sum_{k=m}^{n} |s(n, k)| theta**k / (theta)_n`` and its
complement ``T' = 1 - S'`` are filled row by row from the three-term
recursion in ``n``, which never touches a Stirling number and keeps every
intermediate value in ``[0, 1]``. The weighted sum ``S-hat`` (weights
``k theta**(k-1)``) that feeds the derivative is carried along the same
triangle.

A big-rational brute force over the exact integer Stirling triangle serves
as the ground-truth oracle for small ``n``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .errors import CapExceededError, DomainError

__all__ = [
    "Params",
    "EvalResult",
    "DEFAULT_RECURSION_CAP",
    "recursion_cap",
    "s_prime_recursive",
    "s_prime_row",
    "s_prime_bruteforce",
    "s_hat_recursive",
    "s_hat_bruteforce",
    "s_prime_derivative",
    "recursion_residual",
    "unsigned_stirling_row",
]

DEFAULT_RECURSION_CAP = 20000
BRUTEFORCE_CAP = 60
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class Params:
    """One evaluation point ``(n, m, theta)`` with ``0 <= m <= n`` and ``theta > 0``."""

    n: int
    m: int
    theta: float

    def __post_init__(self):
        validate(self.n, self.m, self.theta)


@dataclass(frozen=True)
class EvalResult:
    """Value of ``S'`` and ``T'`` at one point.

    ``primary_branch`` names the one that was computed directly; the other
    is ``1 - primary`` so the two always sum to one.
    """

    s_prime: float
    t_prime: float
    primary_branch: str
    method: str
    error_estimate: float

    @classmethod
    def from_primary(cls, value: float, branch: str, method: str, error_estimate: float) -> "EvalResult":
        value = min(max(float(value), 0.0), 1.0)
        if branch == "S":
            return cls(value, 1.0 - value, "S", method, error_estimate)
        return cls(1.0 - value, value, "T", method, error_estimate)


def validate(n: int, m: int, theta) -> None:
    if int(n) != n or int(m) != m:
        raise DomainError(f"n and m must be integers, got n={n!r}, m={m!r}")
    if n < 0 or not (0 <= m <= n):
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta!r}")
    if isinstance(theta, float) and not math.isfinite(theta):
        raise DomainError(f"theta must be finite, got {theta!r}")


def recursion_cap() -> int:
    """Largest ``n`` evaluated by recursion; ``STIRLING_CDF_RECURSION_CAP`` overrides."""
    raw = os.environ.get("STIRLING_CDF_RECURSION_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_RECURSION_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"STIRLING_CDF_RECURSION_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise DomainError(f"STIRLING_CDF_RECURSION_CAP must be positive, got {cap}")
    return cap


def _fill(n: int, m: int, theta: float, branch: str, with_hat: bool) -> Tuple[float, float, float]:
    """Run the triangle to row ``n`` and return ``(value, hat, harmonic)`` at column ``m``.

    For ``branch == "S"`` the value is ``S'_{n,m}`` and ``hat`` is
    ``S-hat_{n,m}``; for ``"T"`` they are ``T'_{n,m}`` and
    ``T-hat_{n,m} = H_n - S-hat_{n,m}``. ``harmonic`` is
    ``H_n = sum_{k<n} 1/(k + theta)``.

    Only the band of columns that can still reach ``(n, m)`` is updated, so
    the cost is ``O(n min(m, n - m))`` and the memory ``O(m)``.
    """
    is_s = branch == "S"
    above = 0.0 if is_s else 1.0  # value for columns beyond the diagonal
    col0 = 1.0 if is_s else 0.0
    val = np.full(m + 1, above)
    val[0] = col0
    hat = np.zeros(m + 1) if with_hat else None
    harmonic = 0.0
    for r in range(n):
        hi = min(m, r + 1)
        lo = max(1, m - (n - r - 1))
        inv = 1.0 / (theta + r)
        if lo <= hi:
            if with_hat:
                # hat of the "T" triangle equals H_r above the diagonal
                if not is_s and r + 1 <= m:
                    hat[r + 1] = harmonic
                hat[lo : hi + 1] = (
                    r * hat[lo : hi + 1] + theta * hat[lo - 1 : hi] + val[lo - 1 : hi]
                ) * inv
            val[lo : hi + 1] = (r * val[lo : hi + 1] + theta * val[lo - 1 : hi]) * inv
        harmonic += inv
        if with_hat and is_s:
            hat[0] = harmonic
    value = float(val[m]) if m <= n else above
    if m == 0:
        value = col0
    h = 0.0
    if with_hat:
        if m == 0:
            h = harmonic if is_s else 0.0
        elif m > n:
            h = 0.0 if is_s else harmonic
        else:
            h = float(hat[m])
    return value, h, harmonic


def _check_cap(n: int, cap: Optional[int]) -> None:
    limit = recursion_cap() if cap is None else cap
    if n > limit:
        raise CapExceededError(f"n={n} exceeds the recursion cap {limit}; use the asymptotic evaluation")


def predict_branch(n: int, m: int, theta: float) -> str:
    """Cheap guess of which of ``S'``/``T'`` is the smaller one.

    Uses the incomplete-beta leading term of the large-``n`` representation;
    the guess only needs to be right away from the transition, where
    ``S' ~ T' ~ 1/2`` and either branch is accurate.
    """
    if m <= 1:
        return "T"
    if m == n:
        return "S"
    from .saddle import leading_beta_estimate

    try:
        lead = leading_beta_estimate(n, m, theta)
    except (ArithmeticError, ValueError):
        return "S"
    return "S" if lead <= 0.5 else "T"


def s_prime_recursive(
    n: int, m: int, theta: float, branch: Optional[str] = None, cap: Optional[int] = None
) -> EvalResult:
    """Evaluate ``S'_{n,m}(theta)`` by the recursion in ``n``.

    ``branch`` forces which of ``S'`` / ``T'`` is computed directly; by
    default the smaller one is predicted and the other obtained by
    complement.

    Examples
    --------
    >>> s_prime_recursive(2, 2, 3.0).s_prime
    0.75
    """
    validate(n, m, theta)
    _check_cap(n, cap)
    theta = float(theta)
    if branch is None:
        branch = predict_branch(n, m, theta)
    value, _, _ = _fill(n, m, theta, branch, with_hat=False)
    return EvalResult.from_primary(value, branch, "recurrence", n * _EPS * value)


def s_prime_row(n: int, theta: float) -> np.ndarray:
    """``S'_{n,m}(theta)`` for all ``m = 0..n`` (``S``-branch triangle)."""
    validate(n, 0, theta)
    theta = float(theta)
    row = np.zeros(n + 1)
    row[0] = 1.0
    for r in range(n):
        row[1 : r + 2] = (r * row[1 : r + 2] + theta * row[0 : r + 1]) / (theta + r)
    return row


def s_hat_recursive(n: int, m: int, theta: float, cap: Optional[int] = None) -> float:
    """``S-hat_{n,m}(theta) = sum_{k>=m} k |s(n,k)| theta**(k-1) / (theta)_n``."""
    validate(n, m, theta)
    _check_cap(n, cap)
    _, hat, _ = _fill(n, m, float(theta), "S", with_hat=True)
    return hat


def value_and_slope(n: int, m: int, theta: float, branch: str) -> Tuple[float, float]:
    """``(S', dS'/dtheta)`` for ``branch="S"`` or ``(T', dT'/dtheta)`` for ``"T"``."""
    value, hat, harmonic = _fill(n, m, float(theta), branch, with_hat=True)
    # S-branch: dS'/dtheta = S-hat - S' H_n;  T-branch: dT'/dtheta = T-hat - T' H_n
    return value, hat - value * harmonic


def s_prime_derivative(n: int, m: int, theta: float, cap: Optional[int] = None) -> float:
    """``d S'_{n,m} / d theta = S-hat_{n,m} - S'_{n,m} sum_{k<n} 1/(k + theta)``.

    The triangle is run on whichever of ``S'``/``T'`` is smaller so that the
    difference is formed from the well-conditioned pair.
    """
    validate(n, m, theta)
    _check_cap(n, cap)
    branch = predict_branch(n, m, float(theta))
    _, slope = value_and_slope(n, m, theta, branch)
    return slope if branch == "S" else -slope


def recursion_residual(s_nm: float, s_nm1: float, s_n1m: float, n: int, theta: float) -> float:
    """``(n S'_{n,m} + theta S'_{n,m-1}) / ((theta + n) S'_{n+1,m}) - 1``.

    The three values may come from any evaluation method; an exact
    evaluation makes this vanish up to rounding.
    """
    if s_n1m == 0.0:
        raise ZeroDivisionError("S'_{n+1,m} is zero; the residual is undefined")
    return (n * s_nm + theta * s_nm1) / ((theta + n) * s_n1m) - 1.0


@lru_cache(maxsize=8)
def unsigned_stirling_row(n: int) -> Tuple[int, ...]:
    """Unsigned Stirling numbers of the first kind ``|s(n, k)|``, ``k = 0..n``."""
    row = [1]
    for r in range(n):
        nxt = [0] * (r + 2)
        for k in range(r + 2):
            left = row[k - 1] if k >= 1 else 0
            here = row[k] if k <= r else 0
            nxt[k] = left + r * here
        row = nxt
    return tuple(row)


def _as_fraction(theta) -> Fraction:
    if isinstance(theta, Fraction):
        return theta
    if isinstance(theta, float):
        return Fraction(theta)
    return Fraction(theta)


def _bruteforce_parts(n: int, m: int, theta) -> Tuple[Fraction, Fraction, Fraction]:
    if n > BRUTEFORCE_CAP:
        raise CapExceededError(f"brute force limited to n <= {BRUTEFORCE_CAP}, got n={n}")
    validate(n, m, theta)
    th = _as_fraction(theta)
    row = unsigned_stirling_row(n)
    poch = Fraction(1)
    for k in range(n):
        poch *= th + k
    powers = [Fraction(1)]
    for _ in range(n):
        powers.append(powers[-1] * th)
    num = sum((row[k] * powers[k] for k in range(m, n + 1)), Fraction(0))
    hat = sum((k * row[k] * powers[k - 1] for k in range(max(m, 1), n + 1)), Fraction(0))
    return num, hat, poch


def s_prime_bruteforce(n: int, m: int, theta) -> Fraction:
    """Exact rational ``S'_{n,m}(theta)`` for rational ``theta`` and ``n <= 60``."""
    num, _, poch = _bruteforce_parts(n, m, theta)
    return num / poch


def s_hat_bruteforce(n: int, m: int, theta) -> Fraction:
    """Exact rational ``S-hat_{n,m}(theta)``."""
    _, hat, poch = _bruteforce_parts(n, m, theta)
    return hat / poch

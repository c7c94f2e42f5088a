"""Method selection for evaluating ``S'_{n,m}(theta)``."""

from __future__ import annotations

from typing import Optional, Tuple

from .asymptotic import asymptotic_value_and_slope, s_prime_asymptotic
from .errors import DomainError
from .recurrence import (
    BRUTEFORCE_CAP,
    EvalResult,
    recursion_cap,
    s_prime_bruteforce,
    s_prime_recursive,
    validate,
    value_and_slope,
)

__all__ = ["METHODS", "choose_method", "evaluate", "evaluate_with_slope"]

METHODS = ("auto", "recurrence", "asymptotic", "bruteforce")


def choose_method(n: int, m: int, method: str = "auto") -> str:
    """Resolve ``"auto"``: recursion up to the cap, asymptotics above.

    The edge columns ``m <= 1`` and ``m == n`` fall outside the asymptotic
    representation and are always cheap for the recursion.
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method != "auto":
        return method
    if m <= 1 or m == n or n <= recursion_cap():
        return "recurrence"
    return "asymptotic"


def evaluate(n: int, m: int, theta: float, method: str = "auto", terms: Optional[int] = None) -> EvalResult:
    """``S'_{n,m}(theta)`` and ``T'_{n,m}(theta)`` by the chosen method.

    Examples
    --------
    >>> evaluate(5, 0, 3.3).s_prime
    1.0
    """
    validate(n, m, theta)
    chosen = choose_method(n, m, method)
    if chosen == "recurrence":
        return s_prime_recursive(n, m, theta)
    if chosen == "asymptotic":
        return s_prime_asymptotic(n, m, theta, terms)
    if n > BRUTEFORCE_CAP:
        raise DomainError(f"bruteforce evaluation is limited to n <= {BRUTEFORCE_CAP}")
    exact = s_prime_bruteforce(n, m, theta)
    if exact <= 0.5:
        return EvalResult.from_primary(float(exact), "S", "bruteforce", 0.0)
    return EvalResult.from_primary(float(1 - exact), "T", "bruteforce", 0.0)


def evaluate_with_slope(
    n: int, m: int, theta: float, branch: str, method: str = "auto", terms: Optional[int] = None
) -> Tuple[float, float]:
    """Primary value of ``branch`` and its ``theta``-derivative."""
    chosen = choose_method(n, m, method)
    if chosen == "asymptotic":
        return asymptotic_value_and_slope(n, m, theta, branch, terms)
    return value_and_slope(n, m, theta, branch)

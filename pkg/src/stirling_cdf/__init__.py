"""Normalized partial sums of Stirling numbers of the first kind.

``S'_{n,m}(theta) = sum_{k=m}^{n} |s(n, k)| theta**k / (theta)_n`` is a
cumulative distribution in ``theta``; ``T' = 1 - S'``. This package
evaluates both by an exact recursion or, for large ``n``, by a uniform
asymptotic expansion, and inverts them in ``theta``.
"""

from .asymptotic import s_prime_asymptotic
from .errors import CapExceededError, ConvergenceError, DomainError
from .evaluate import evaluate
from .inversion import (
    InversionResult,
    fu_fs,
    fu_fs_invert,
    invert_asymptotic,
    invert_newton,
    transition_theta,
)
from .recurrence import (
    EvalResult,
    Params,
    s_hat_recursive,
    s_prime_bruteforce,
    s_prime_derivative,
    s_prime_recursive,
)
from .saddle import SaddleData, saddle_data, saddle_z0, tau_from_theta, theta_from_tau

__all__ = [
    "CapExceededError",
    "ConvergenceError",
    "DomainError",
    "EvalResult",
    "InversionResult",
    "Params",
    "SaddleData",
    "evaluate",
    "fu_fs",
    "fu_fs_invert",
    "invert_asymptotic",
    "invert_newton",
    "s_hat_recursive",
    "s_prime_asymptotic",
    "s_prime_bruteforce",
    "s_prime_derivative",
    "s_prime_recursive",
    "saddle_data",
    "saddle_z0",
    "tau_from_theta",
    "theta_from_tau",
    "transition_theta",
]

__version__ = "0.1.0"

"""Solving ``S'_{n,m}(theta) = s`` for ``theta``.

Two routes are provided. :func:`invert_newton` iterates on the exact (or,
for very large ``n``, asymptotic) value using the derivative identity, and
is seeded from the incomplete-beta leading term. :func:`invert_asymptotic`
expands the matching point ``tau`` in powers of ``1/nu`` and needs no
evaluation of ``S'`` at all.

Public indices ``(n, m)`` are used throughout; the saddle machinery works
on ``(n - 1, m - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from scipy import special as sc

from .asymptotic import coefficient_set
from .errors import ConvergenceError, DomainError
from .evaluate import evaluate, evaluate_with_slope
from .saddle import saddle_data, saddle_z0, theta_from_tau
from .special import inc_beta_inverse_logit

__all__ = [
    "InversionResult",
    "initial_theta",
    "newton_iterates",
    "invert_newton",
    "invert_asymptotic",
    "asymptotic_tau_terms",
    "transition_theta",
    "fu_fs",
    "fu_fs_invert",
]

MAX_NEWTON_ITER = 50
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class InversionResult:
    """Outcome of an inversion.

    ``residual`` is ``|target / value - 1|`` on the branch that was solved
    (``S' = s`` or ``T' = 1 - s``), evaluated independently after the
    solve. ``history`` lists the successive ``theta`` values.
    """

    theta: float
    method: str
    iterations_or_terms: int
    residual: float
    tau_terms: Optional[Tuple[float, ...]] = None
    history: List[float] = field(default_factory=list)


def _check(n: int, m: int, s: float, complement: Optional[float] = None) -> None:
    if int(n) != n or int(m) != m or not (1 <= m <= n - 1):
        raise DomainError(f"inversion needs integers 1 <= m <= n-1, got n={n}, m={m}")
    if complement is not None:
        # s may round to one when only its complement is representable
        if not (0.0 < complement < 1.0 and 0.0 < s <= 1.0):
            raise DomainError(f"complement must lie in (0, 1), got {complement!r}")
    elif not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0, 1), got {s!r}")


def _split_target(s: float, branch: Optional[str], complement: Optional[float]) -> Tuple[str, float]:
    """Pick the branch and return its target value (``s`` or ``1 - s``)."""
    t_target = complement if complement is not None else 1.0 - s
    if branch is None:
        branch = "S" if s <= 0.5 else "T"
    if branch not in ("S", "T"):
        raise DomainError(f"branch must be 'S' or 'T', got {branch!r}")
    return branch, (s if branch == "S" else t_target)


def initial_theta(n: int, m: int, s: float, complement: bool = False, seed: str = "unshifted") -> float:
    """Seed ``theta_0`` from the reduced equation ``I_x(p, q) = s``.

    ``seed="unshifted"`` takes ``p = m``, ``q = n - m + 1`` and maps ``tau``
    back with the phase functions of ``(n, m)``; this is the classical
    starting value. ``seed="shifted"`` applies the same recipe to the
    representation of ``S'_{n,m}`` itself (indices ``n - 1``, ``m - 1``),
    which is usually several times closer to the root.
    """
    if seed == "unshifted":
        p, q, sn, sm = m, n - m + 1, n, m
    elif seed == "shifted":
        p, q, sn, sm = m - 1, n - m + 1, n - 1, m - 1
        if p < 1:
            raise DomainError("the shifted seed needs m >= 2")
    else:
        raise DomainError(f"seed must be 'unshifted' or 'shifted', got {seed!r}")
    tau = math.exp(inc_beta_inverse_logit(s, p, q, complement=complement))
    return theta_from_tau(tau, sn, sm)


def _residual(value: float, target: float) -> float:
    if value == 0.0:
        return math.inf
    return abs(target / value - 1.0)


def newton_iterates(
    n: int,
    m: int,
    s: float,
    theta0: Optional[float] = None,
    branch: Optional[str] = None,
    method: str = "auto",
    complement: Optional[float] = None,
    seed: str = "unshifted",
    space: str = "theta",
) -> Iterator[Tuple[float, float]]:
    """Yield ``(theta_j, value_j)`` for the safeguarded Newton sequence.

    ``value_j`` is the primary-branch value at ``theta_j``. With
    ``space="theta"`` the step is the plain Newton step on
    ``S'(theta) - s``; with ``space="log"`` it is Newton on
    ``log S'`` against ``log theta``, which converges far faster in the
    power-law tails. A step that leaves the bracket built from earlier
    signs is replaced by bisection (or expansion while the bracket is
    open). The generator is infinite; the caller decides when to stop.
    """
    _check(n, m, s, complement)
    branch, target = _split_target(s, branch, complement)
    if space not in ("theta", "log"):
        raise DomainError(f"space must be 'theta' or 'log', got {space!r}")
    if theta0 is None:
        theta0 = initial_theta(n, m, target, complement=branch == "T", seed=seed)
    theta = float(theta0)
    lo, hi = 0.0, math.inf
    sign = 1.0 if branch == "S" else -1.0
    while True:
        value, slope = evaluate_with_slope(n, m, theta, branch, method)
        yield theta, value
        # F(theta) = S'(theta) - s is increasing on both branches
        fval = sign * (value - target)
        if fval < 0:
            lo = max(lo, theta)
        elif fval > 0:
            hi = min(hi, theta)
        else:
            return
        new = math.nan
        if space == "theta":
            fslope = sign * slope
            if fslope > 1e-300 and math.isfinite(fslope):
                new = theta - fval / fslope
        elif value > 0.0 and slope * sign > 0.0:
            dlog = theta * slope / value
            step = (math.log(value) - math.log(target)) / dlog
            if abs(step) < 700.0:
                new = theta * math.exp(-step)
        if not (lo < new < hi):
            if math.isinf(hi):
                new = 2.0 * theta if space == "theta" else theta * 1e3
            elif lo == 0.0:
                new = 0.5 * hi if space == "theta" else hi * 1e-3
            elif space == "log":
                new = math.sqrt(lo * hi)
            else:
                new = 0.5 * (lo + hi)
        if new == theta:
            return
        theta = new


def invert_newton(
    n: int,
    m: int,
    s: float,
    tol: float = 1e-12,
    branch: Optional[str] = None,
    method: str = "auto",
    theta0: Optional[float] = None,
    complement: Optional[float] = None,
    maxiter: int = MAX_NEWTON_ITER,
    seed: str = "unshifted",
    space: Optional[str] = None,
) -> InversionResult:
    """Solve ``S'_{n,m}(theta) = s`` by safeguarded Newton iteration.

    Parameters
    ----------
    n, m : int
        Public indices, ``1 <= m <= n - 1``.
    s : float
        Target in ``(0, 1)``.
    tol : float
        Relative tolerance on the solved branch.
    branch : {"S", "T"}, optional
        Solve ``S' = s`` or ``T' = 1 - s``; by default the branch whose
        target is at most one half.
    complement : float, optional
        Exact value of ``1 - s`` when it is known more precisely than the
        subtraction gives (used by the ``F_s`` inversion).
    seed : {"unshifted", "shifted"}
        Starting-value recipe, see :func:`initial_theta`; ignored when
        ``theta0`` is given.
    space : {"theta", "log"}, optional
        Newton variable, see :func:`newton_iterates`. By default plain
        steps are used unless the target is below ``1e-6``.

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``maxiter`` iterations.
    """
    _check(n, m, s, complement)
    if m == 1:
        raise DomainError("S'_{n,1} is identically one; there is nothing to invert")
    br, target = _split_target(s, branch, complement)
    if space is None:
        space = "log" if target < 1e-6 else "theta"
    history: List[float] = []
    theta = value = math.nan
    for j, (theta, value) in enumerate(newton_iterates(n, m, s, theta0, br, method, complement, seed, space)):
        history.append(theta)
        if _residual(value, target) <= tol:
            break
        if j >= 2 and abs(theta - history[-2]) <= 4 * _EPS * theta:
            break
        if j >= maxiter:
            raise ConvergenceError(f"Newton inversion did not reach tol={tol} in {maxiter} steps (theta={theta})")
    res = _residual(value, target)
    if res > max(tol, 1e3 * _EPS):
        raise ConvergenceError(f"Newton inversion stalled at theta={theta} with residual {res:.3e}")
    return InversionResult(theta, "newton", len(history) - 1, res, None, history)


def _xi_kernel(j: int, xi: float) -> float:
    """``sum_{i>=j} (-xi)**i / i! / xi**j``: the tail of ``exp(-xi)`` scaled by ``xi**-j``."""
    if abs(xi) < 1.0:
        term = (-1.0) ** j / math.factorial(j)
        acc = term
        for i in range(j + 1, j + 40):
            term *= -xi / i
            acc += term
            if abs(term) < 1e-18 * abs(acc):
                break
        return acc
    head = sum((-xi) ** i / math.factorial(i) for i in range(j))
    return (math.exp(-xi) - head) / xi**j


def _g0_of_tau(tau: float, n: int, m: int, z0: float) -> float:
    theta = theta_from_tau(tau, n, m, z0)
    return float(coefficient_set(saddle_data(n, m, theta, z0), 1).G_values[0])


def _g0_tau_derivative(tau: float, n: int, m: int, z0: float) -> float:
    # five-point central difference; G_0 depends smoothly on tau through theta(tau)
    h = 1e-3 * tau
    vals = [_g0_of_tau(tau + k * h, n, m, z0) for k in (-2, -1, 1, 2)]
    return (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)


def asymptotic_tau_terms(
    n: int, m: int, s: float, terms: int = 3, z0: Optional[float] = None
) -> Tuple[Tuple[float, ...], float]:
    """``(tau_0, tau_1, tau_2)`` (as many as ``terms``) and ``z0`` for shifted ``(n, m)``.

    ``tau_0`` solves the reduced incomplete-beta equation. The corrections
    are evaluated with the coefficients at ``theta(tau_0)``; ``G_0'`` is the
    derivative of ``G_0(t0)`` with respect to ``tau`` along that map.
    """
    nu = n - m
    t0 = m / nu
    if z0 is None:
        z0 = saddle_z0(n, m)
    complement = s > 0.5
    tau0 = math.exp(inc_beta_inverse_logit(1.0 - s if complement else s, m, nu + 1, complement=complement))
    out = [tau0]
    if terms == 1:
        return tuple(out), z0
    sd = saddle_data(n, m, theta_from_tau(tau0, n, m, z0), z0)
    cs = coefficient_set(sd, 2)
    g0 = float(cs.g_coeffs[0])
    G0, G1 = float(cs.G_values[0]), float(cs.G_values[1])
    a = (t0 - tau0) * g0
    # tau0 (tau0+1)/(tau0-t0) * log((t0-tau0) f0), with (t0-tau0) f0 = 1 + a
    tau1 = -tau0 * (tau0 + 1.0) * g0 * (math.log1p(a) / a if a != 0.0 else 1.0)
    out.append(tau1)
    if terms == 2:
        return tuple(out), z0
    s0 = tau0 * (1.0 + tau0)
    rho = (t0 - tau0) / s0
    drho = (-s0 - (t0 - tau0) * (1.0 + 2.0 * tau0)) / (s0 * s0)
    xi = tau1 * rho
    dG0 = _g0_tau_derivative(tau0, n, m, z0)
    rhs = (
        tau1 * _xi_kernel(1, xi)
        + (2.0 * tau0 + 1.0) * tau1**2 / s0 * _xi_kernel(2, xi)
        + drho * tau1**3 * _xi_kernel(3, xi)
        - s0 * (G1 + tau1 * dG0 + 0.5 * drho * tau1**2 * G0)
    )
    out.append(math.exp(xi) * rhs)
    return tuple(out), z0


def invert_asymptotic(n: int, m: int, s: float, terms: int = 3) -> InversionResult:
    """Solve ``S'_{n,m}(theta) = s`` from the expansion of ``tau`` in ``1/nu``.

    ``terms`` is 1, 2 or 3 (``tau_0``, then ``+ tau_1/nu``, then
    ``+ tau_2/nu**2``); ``history`` holds the ``theta`` reached after each
    partial sum.
    """
    _check(n, m, s)
    if not (2 <= m <= n - 1):
        raise DomainError("asymptotic inversion needs 2 <= m <= n-1")
    if terms not in (1, 2, 3):
        raise DomainError(f"terms must be 1, 2 or 3, got {terms}")
    sn, sm = n - 1, m - 1
    nu = sn - sm
    taus, z0 = asymptotic_tau_terms(sn, sm, s, terms)
    history = []
    tau = 0.0
    for k, tk in enumerate(taus):
        tau += tk / nu**k
        if not tau > 0:
            raise ConvergenceError(f"asymptotic correction drove tau negative ({tau})")
        history.append(theta_from_tau(tau, sn, sm, z0))
    theta = history[-1]
    res = evaluate(n, m, theta)
    branch = "S" if s <= 0.5 else "T"
    residual = _residual(res.s_prime, s) if branch == "S" else _residual(res.t_prime, 1.0 - s)
    return InversionResult(theta, "asymptotic", terms, residual, taus, history)


def transition_theta(n: int, m: int, tol: float = 1e-13) -> float:
    """The ``theta`` with ``S'_{n,m}(theta) = T'_{n,m}(theta) = 1/2``."""
    seed = None
    if n >= 100 and 2 <= m <= n - 1:
        seed = invert_asymptotic(n, m, 0.5, 3).theta
    return invert_newton(n, m, 0.5, tol=tol, theta0=seed).theta


def fu_fs(n: int, m: int, theta: float, method: str = "auto") -> float:
    """``F_s = log(S' / (1 - S'))``, taken from the smaller of ``S'``, ``T'``.

    Returns ``-inf`` when ``S'`` underflows to zero and ``+inf`` when
    ``T'`` does.
    """
    res = evaluate(n, m, theta, method)
    return _logit_pair(res.s_prime, res.t_prime, res.primary_branch)


def _logit_pair(s_val: float, t_val: float, primary: str) -> float:
    if primary == "S":
        if s_val <= 0.0:
            return -math.inf
        return math.log(s_val) - math.log1p(-s_val)
    if t_val <= 0.0:
        return math.inf
    return math.log1p(-t_val) - math.log(t_val)


def fu_fs_invert(n: int, m: int, f: float, tol: float = 1e-12) -> InversionResult:
    """Find ``theta`` with ``F_s = f``.

    Solves ``T' = 1/(1 + e**f)`` for ``f > 0`` and ``S' = e**f/(1 + e**f)``
    otherwise, so the small side is always the one being matched.
    """
    if not math.isfinite(f):
        raise DomainError(f"f must be finite, got {f!r}")
    s = float(sc.expit(f))
    t = float(sc.expit(-f))
    if s <= 0.0 or t <= 0.0:
        raise DomainError(f"|f| = {abs(f)} is too large to represent the target")
    if f > 0:
        return invert_newton(n, m, s, tol=tol, branch="T", complement=t)
    return invert_newton(n, m, s, tol=tol, branch="S")

"""Phase functions, saddle points and the theta <-> tau correspondence.

Everything here uses the shifted indices of the representation of
``S'_{n+1,m+1}``: a public pair ``(N, M)`` enters as ``n = N - 1``,
``m = M - 1``. The two phase functions are

    phi(z) = log Gamma(z + 1 + n) - log Gamma(z + 1) - m log z
    chi(t) = n log(t + 1) - m log t

with minima at ``z0`` (found numerically) and ``t0 = m / (n - m)``. The
point ``tau`` is matched to ``theta`` by equal excess over the minimum,
taken on the same side of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from ._roots import monotone_newton
from .errors import DomainError
from .special import inc_beta, log1pmx

__all__ = [
    "SaddleData",
    "phi",
    "phi_derivative",
    "chi",
    "chi_derivative",
    "phi_excess",
    "chi_excess",
    "saddle_z0",
    "tau_from_theta",
    "theta_from_tau",
    "saddle_data",
    "dtau_dtheta",
    "leading_beta_estimate",
]


@dataclass(frozen=True)
class SaddleData:
    """Geometry of one ``(n, m, theta)`` in shifted indices."""

    n: int
    m: int
    z0: float
    t0: float
    phi_at_z0: float
    chi_at_t0: float
    theta: float
    tau: float
    chi_at_tau: float

    @property
    def nu(self) -> int:
        return self.n - self.m


def _check_nm(n: int, m: int) -> None:
    if not (1 <= m <= n - 1):
        raise DomainError(f"saddle geometry needs 1 <= m <= n-1, got n={n}, m={m}")


def phi(z: float, n: int, m: int) -> float:
    if not z > 0:
        raise DomainError(f"phi requires z > 0, got {z!r}")
    return float(sc.gammaln(z + 1 + n) - sc.gammaln(z + 1) - m * math.log(z))


def phi_derivative(z: float, n: int, m: int, k: int = 1) -> float:
    """k-th derivative of ``phi`` (``k = 0`` gives ``phi`` itself)."""
    if not z > 0:
        raise DomainError(f"phi requires z > 0, got {z!r}")
    if k == 0:
        return phi(z, n, m)
    if k == 1:
        return float(sc.digamma(z + 1 + n) - sc.digamma(z + 1)) - m / z
    poly = float(sc.polygamma(k - 1, z + 1 + n) - sc.polygamma(k - 1, z + 1))
    return poly + (-1) ** k * math.factorial(k - 1) * m / z**k


def chi(t: float, n: int, m: int) -> float:
    if not t > 0:
        raise DomainError(f"chi requires t > 0, got {t!r}")
    return n * math.log1p(t) - m * math.log(t)


def chi_derivative(t: float, n: int, m: int, k: int = 1) -> float:
    if not t > 0:
        raise DomainError(f"chi requires t > 0, got {t!r}")
    if k == 0:
        return chi(t, n, m)
    if k == 1:
        # (n - m)(t - t0) / (t (1 + t)) written without t0
        return ((n - m) * t - m) / (t * (1.0 + t))
    return (-1) ** (k - 1) * math.factorial(k - 1) * (n / (t + 1.0) ** k - m / t**k)


def _log1pmx_ratio(d: float, base: float, ratio: float) -> float:
    # log(ratio) - (ratio - 1) where ratio = 1 + d / base
    u = d / base
    if u > -0.75:
        return log1pmx(u)
    return math.log(ratio) - u


def phi_excess(theta: float, n: int, m: int, z0: float) -> float:
    """``phi(theta) - phi(z0)`` computed term by term.

    Written as a sum of ``log1pmx`` terms plus ``h * phi'(z0)``, so the
    first-order parts cancel exactly instead of through a difference of two
    large log-gamma values.
    """
    if not theta > 0:
        raise DomainError(f"phi requires theta > 0, got {theta!r}")
    h = theta - z0
    if h == 0.0:
        return 0.0
    denom = z0 + 1.0 + np.arange(n, dtype=float)
    sum_terms = float(np.sum(log1pmx(h / denom)))
    slope = float(np.sum(1.0 / denom)) - m / z0
    m_term = m * _log1pmx_ratio(h, z0, theta / z0)
    return max(sum_terms - m_term + h * slope, 0.0)


def chi_excess(t: float, n: int, m: int) -> float:
    """``chi(t) - chi(t0)`` without cancellation."""
    if not t > 0:
        raise DomainError(f"chi requires t > 0, got {t!r}")
    t0 = m / (n - m)
    d = t - t0
    val = n * log1pmx(d / (1.0 + t0)) - m * _log1pmx_ratio(d, t0, t / t0)
    return max(val, 0.0)


def saddle_z0(n: int, m: int) -> float:
    """Positive root of ``phi'(z) = 0``."""
    _check_nm(n, m)
    guess = m / math.log1p(n / m)

    def fdf(lam: float):
        z = math.exp(lam)
        return phi_derivative(z, n, m, 1), z * phi_derivative(z, n, m, 2)

    lam = monotone_newton(fdf, math.log(guess), xtol=1e-16, atol=1e-16, maxiter=200)
    return math.exp(lam)


def _signed_root(excess: float, side: float) -> float:
    return math.copysign(math.sqrt(2.0 * excess), side)


def _eta_phi(theta: float, n: int, m: int, z0: float, phi2: float) -> tuple[float, float]:
    h = theta - z0
    eta = _signed_root(phi_excess(theta, n, m, z0), h)
    if abs(h) < 1e-7 * z0 or eta == 0.0:
        return eta, math.sqrt(phi2)
    return eta, phi_derivative(theta, n, m, 1) / eta


def _eta_chi(tau: float, n: int, m: int) -> tuple[float, float]:
    t0 = m / (n - m)
    d = tau - t0
    eta = _signed_root(chi_excess(tau, n, m), d)
    if abs(d) < 1e-7 * t0 or eta == 0.0:
        return eta, math.sqrt(chi_derivative(t0, n, m, 2))
    return eta, chi_derivative(tau, n, m, 1) / eta


def theta_from_tau(tau: float, n: int, m: int, z0: float | None = None) -> float:
    """The ``theta`` whose phase excess matches that of ``tau`` on the same side."""
    _check_nm(n, m)
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    if z0 is None:
        z0 = saddle_z0(n, m)
    phi2 = phi_derivative(z0, n, m, 2)
    target, _ = _eta_chi(tau, n, m)
    if target == 0.0:
        return z0
    guess = z0 + target / math.sqrt(phi2)
    if target < 0:
        guess = max(guess, z0 * math.exp(-0.5 * target * target / m))
        lo, hi = -math.inf, math.log(z0)
    else:
        guess = min(guess, z0 * math.exp(0.5 * target * target / (n - m)))
        lo, hi = math.log(z0), math.inf

    def fdf(lam: float):
        th = math.exp(lam)
        eta, deta = _eta_phi(th, n, m, z0, phi2)
        return eta - target, th * deta

    lam = monotone_newton(fdf, math.log(guess), lo=lo, hi=hi, xtol=1e-16, atol=1e-16, maxiter=200)
    return math.exp(lam)


def tau_from_theta(theta: float, n: int, m: int, z0: float | None = None) -> float:
    """The ``tau`` whose phase excess matches that of ``theta`` on the same side."""
    _check_nm(n, m)
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta!r}")
    if z0 is None:
        z0 = saddle_z0(n, m)
    t0 = m / (n - m)
    phi2 = phi_derivative(z0, n, m, 2)
    target, _ = _eta_phi(theta, n, m, z0, phi2)
    if target == 0.0:
        return t0
    guess = t0 + target / math.sqrt(chi_derivative(t0, n, m, 2))
    if target < 0:
        guess = max(guess, t0 * math.exp(-0.5 * target * target / m))
        lo, hi = -math.inf, math.log(t0)
    else:
        guess = min(guess, t0 * math.exp(0.5 * target * target / (n - m)))
        lo, hi = math.log(t0), math.inf

    def fdf(lam: float):
        t = math.exp(lam)
        eta, deta = _eta_chi(t, n, m)
        return eta - target, t * deta

    lam = monotone_newton(fdf, math.log(guess), lo=lo, hi=hi, xtol=1e-16, atol=1e-16, maxiter=200)
    return math.exp(lam)


def saddle_data(n: int, m: int, theta: float, z0: float | None = None) -> SaddleData:
    """Collect ``z0``, ``t0``, ``tau`` and the phase values for one point."""
    _check_nm(n, m)
    if z0 is None:
        z0 = saddle_z0(n, m)
    tau = tau_from_theta(theta, n, m, z0)
    t0 = m / (n - m)
    return SaddleData(
        n=n,
        m=m,
        z0=z0,
        t0=t0,
        phi_at_z0=phi(z0, n, m),
        chi_at_t0=chi(t0, n, m),
        theta=float(theta),
        tau=tau,
        chi_at_tau=chi(tau, n, m),
    )


def dtau_dtheta(theta: float, tau: float, n: int, m: int, z0: float) -> float:
    """Slope of the map ``theta -> tau``; tends to ``1/z_1`` at the saddle."""
    _, d_phi = _eta_phi(theta, n, m, z0, phi_derivative(z0, n, m, 2))
    _, d_chi = _eta_chi(tau, n, m)
    return d_phi / d_chi


def leading_beta_estimate(n_public: int, m_public: int, theta: float) -> float:
    """Incomplete-beta leading term ``I_{tau/(1+tau)}(m, n-m+1)`` for ``S'_{N,M}(theta)``."""
    n, m = n_public - 1, m_public - 1
    tau = tau_from_theta(theta, n, m)
    return inc_beta(tau / (1.0 + tau), m, n - m + 1)

"""Large-``n`` evaluation of ``S'`` from the incomplete-beta representation.

In shifted indices ``(n, m)`` (public ``S'_{n+1,m+1}``) and ``nu = n - m``:

    S'_{n+1,m+1}(theta) = I_x(m, nu + 1) + R',   x = tau / (1 + tau)
    R' ~ exp(-chi(tau)) C(n, m-1) sum_k G_k(t0) / nu**k

The ``G_k(t0)`` come from the Taylor coefficients ``g_k`` of
``g(t) = f(t) - 1/(t - tau)`` with ``f(t) = z'(t) / (z(t) - theta)``, where
``z(t)`` is the map that matches the two phase functions near their
minima. All series work is done on the scaled variables
``W = (z - z0)/z0`` and ``U = (t - t0)/t0``, which keeps the coefficients of
order one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .recurrence import EvalResult
from .saddle import SaddleData, dtau_dtheta, saddle_data, saddle_z0, tau_from_theta
from .special import inc_beta_pair, log_beta_kernel

__all__ = [
    "CoeffSet",
    "default_terms",
    "z_coefficients",
    "f_coefficients",
    "g_coefficients",
    "g_coefficients_limit",
    "G_scheme",
    "G_closed_forms",
    "G_values",
    "coefficient_set",
    "s_prime_asymptotic",
    "asymptotic_value_and_slope",
]

SERIES_ORDER = 40
# the P/Q form of g is used while the neglected tail Z_k D**k stays below this
_TAIL_TOL = 1e-16


@dataclass(frozen=True)
class CoeffSet:
    """Series coefficients for one evaluation point.

    ``z_coeffs[k-1]`` is ``z_k``; ``f_coeffs``, ``g_coeffs`` start at index 0;
    ``G_values[k]`` is ``G_k(t0)`` for ``k = 0..order`` (one beyond the
    terms used, for the error estimate).
    """

    order: int
    z_coeffs: np.ndarray
    f_coeffs: Optional[np.ndarray]
    g_coeffs: np.ndarray
    G_values: np.ndarray
    near_transition: bool


def default_terms(n_public: int) -> int:
    return 4 if n_public <= 10_000 else 2


# ---------------------------------------------------------------- series algebra


def _mul(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    return np.convolve(a[:size], b[:size])[:size]


def _div(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    """Power-series quotient ``a / b`` truncated to ``size`` terms (``b[0] != 0``)."""
    out = np.zeros(size)
    for k in range(size):
        acc = a[k] if k < len(a) else 0.0
        if k:
            lim = min(k, len(b) - 1)
            acc -= np.dot(b[1 : lim + 1], out[k - 1 : k - lim - 1 : -1] if k - lim - 1 >= 0 else out[k - 1 :: -1])
        out[k] = acc / b[0]
    return out


def _compose_tail(coef: np.ndarray, w: np.ndarray, size: int) -> np.ndarray:
    """``sum_k coef[k] * w**k`` for a series ``w`` with zero constant term."""
    out = np.zeros(size)
    power = np.zeros(size)
    power[0] = 1.0
    for k in range(1, len(coef)):
        power = _mul(power, w, size)
        if not power.any():
            break
        out += coef[k] * power
    return out


# ---------------------------------------------------------------- z_k


def _scaled_phase_coefficients(sd: SaddleData, order: int) -> tuple[np.ndarray, np.ndarray]:
    """``a_k = phi^(k)(z0) z0**k / k!`` and ``b_k = chi^(k)(t0) t0**k / k!``."""
    n, m, z0 = sd.n, sd.m, sd.z0
    ratio = z0 / (z0 + 1.0 + np.arange(n, dtype=float))
    a = np.zeros(order + 1)
    b = np.zeros(order + 1)
    power = ratio.copy()
    q = m / n
    for k in range(2, order + 1):
        power = power * ratio
        sign = 1.0 if k % 2 == 0 else -1.0
        a[k] = sign / k * (m - float(np.sum(power)))
        # 1 - q**(k-1) without cancellation for q near 1
        b[k] = sign * (m / k) * -math.expm1((k - 1) * math.log(q))
    return a, b


def _scaled_z(sd: SaddleData, count: int) -> np.ndarray:
    """``Z_1..Z_count`` of ``W = sum Z_k U**k`` (index 0 unused, zero)."""
    size = count + 2
    a, b = _scaled_phase_coefficients(sd, size)
    if not (a[2] > 0 and b[2] > 0):
        raise DomainError("phase curvature must be positive at the saddle points")
    w = np.zeros(size)
    w[1] = math.sqrt(b[2] / a[2])
    denom = 2.0 * a[2] * w[1]
    for j in range(2, count + 1):
        lhs = _compose_tail(a, w, j + 2)
        w[j] = (b[j + 1] - lhs[j + 1]) / denom
    return w[: count + 1]


def z_coefficients(sd: SaddleData, count: int) -> np.ndarray:
    """Coefficients ``z_1..z_count`` of ``z(t) = z0 + sum z_k (t - t0)**k``.

    ``z_1 = sqrt(chi''(t0) / phi''(z0))`` and every later coefficient
    follows from matching Taylor coefficients of the two phase excesses.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    scaled = _scaled_z(sd, count)
    k = np.arange(1, count + 1)
    return scaled[1:] * sd.z0 / sd.t0**k


# ---------------------------------------------------------------- f_k, g_k


def _f_scaled(Z: np.ndarray, big_theta: float, size: int) -> np.ndarray:
    dW = np.array([(k + 1) * Z[k + 1] for k in range(len(Z) - 1)])
    den = Z.copy()
    den[0] = -big_theta
    return _div(dW, den, size)


def f_coefficients(sd: SaddleData, count: int, series_order: int = SERIES_ORDER) -> np.ndarray:
    """``f_0..f_{count-1}`` of ``f(t) = z'(t) / (z(t) - theta)`` about ``t0``.

    Needs ``theta != z0``; near the transition use :func:`g_coefficients`.
    """
    if sd.theta == sd.z0:
        raise DomainError("f has a pole at t0 when theta equals z0")
    Z = _scaled_z(sd, max(series_order, count + 1))
    big_theta = (sd.theta - sd.z0) / sd.z0
    fs = _f_scaled(Z, big_theta, count)
    return fs / sd.t0 ** (np.arange(count) + 1)


def _pq_tail(Z: np.ndarray, D: float) -> float:
    k = len(Z) - 1
    return abs(Z[k] * D ** (k - 1)) / abs(Z[1])


def g_coefficients_limit(sd: SaddleData, count: int, series_order: int = SERIES_ORDER) -> np.ndarray:
    """``g_k`` through the pole-free quotient ``P/Q``.

    With ``D = (tau - t0)/t0`` one has ``W(U) - W(D) = (U - D) Q(U)`` and
    ``W'(U) - Q(U) = (U - D) P(U)``, so that ``g`` in scaled form equals
    ``P / Q`` with no cancellation as ``tau -> t0``.
    """
    Z = _scaled_z(sd, max(series_order, count + 2))
    D = (sd.tau - sd.t0) / sd.t0
    K = len(Z) - 1
    powers = D ** np.arange(K + 1)
    Q = np.array([np.dot(Z[i + 1 :], powers[: K - i]) for i in range(K)])
    P = np.array([(i + 1) * np.dot(Z[i + 2 :], powers[: K - i - 1]) for i in range(K - 1)])
    gs = _div(P, Q, count)
    return gs / sd.t0 ** (np.arange(count) + 1)


def g_coefficients(
    sd: SaddleData, count: int, series_order: int = SERIES_ORDER
) -> tuple[np.ndarray, Optional[np.ndarray], bool]:
    """``g_0..g_{count-1}`` of ``g(t) = f(t) - 1/(t - tau)``.

    Returns ``(g, f, near_transition)``. Away from the transition
    ``g_k = f_k - (-1)**k / (t0 - tau)**(k+1)``; close to it, where that
    difference cancels badly, the limit form is used and ``f`` is ``None``.
    """
    Z = _scaled_z(sd, max(series_order, count + 2))
    D = (sd.tau - sd.t0) / sd.t0
    if D == 0.0 or _pq_tail(Z, D) <= _TAIL_TOL:
        return g_coefficients_limit(sd, count, series_order), None, True
    f = f_coefficients(sd, count, series_order)
    k = np.arange(count)
    g = f - (-1.0) ** k / (sd.t0 - sd.tau) ** (k + 1)
    return g, f, False


# ---------------------------------------------------------------- G_k


def G_scheme(g: np.ndarray, t0: float, count: int) -> np.ndarray:
    """``G_0(t0)..G_{count-1}(t0)`` by running the integration-by-parts scheme.

    ``H_k(t) = (G_k(t) - G_k(t0))/(t - t0)`` and
    ``G_{k+1}(t) = -d/dt [t (1 + t) H_k(t)]`` applied to the truncated
    Taylor series of ``G_0 = g``. Each step consumes two coefficients, so
    ``2 count - 1`` values of ``g`` are needed.
    """
    if len(g) < 2 * count - 1:
        raise DomainError(f"need {2 * count - 1} g-coefficients for {count} G-values, got {len(g)}")
    quad = np.array([t0 * (1.0 + t0), 1.0 + 2.0 * t0, 1.0])
    series = np.asarray(g[: 2 * count - 1], dtype=float)
    out = np.zeros(count)
    for k in range(count):
        out[k] = series[0]
        if k == count - 1:
            break
        h = series[1:]
        prod = np.convolve(h, quad)[: len(h)]
        series = -(np.arange(1, len(prod)) * prod[1:])[: len(h) - 1]
    return out


def G_closed_forms(g: np.ndarray, t0: float) -> np.ndarray:
    """Explicit ``G_0``, ``G_1``, ``G_2`` in terms of ``g_0..g_4``."""
    s = t0 * (t0 + 1.0)
    G0 = g[0]
    G1 = -(1.0 + 2.0 * t0) * g[1] - s * g[2]
    G2 = (
        2.0 * (1.0 + 2.0 * t0) * g[1]
        + (2.0 + 11.0 * t0 + 11.0 * t0 * t0) * g[2]
        + 5.0 * s * (1.0 + 2.0 * t0) * g[3]
        + 3.0 * s * s * g[4]
    )
    return np.array([G0, G1, G2])


def G_values(g: np.ndarray, t0: float, count: int) -> np.ndarray:
    """``G_k(t0)`` for ``k < count``: closed forms up to ``k = 2``, the scheme beyond."""
    out = G_scheme(g, t0, count)
    if count >= 1 and len(g) >= 5:
        closed = G_closed_forms(g, t0)
        out[: min(count, 3)] = closed[: min(count, 3)]
    return out


def coefficient_set(sd: SaddleData, order: int) -> CoeffSet:
    """All coefficients needed for an ``order``-term expansion plus one extra term."""
    n_g = 2 * order + 1
    g, f, near = g_coefficients(sd, n_g)
    return CoeffSet(
        order=order,
        z_coeffs=z_coefficients(sd, n_g + 1),
        f_coeffs=f,
        g_coeffs=g,
        G_values=G_values(g, sd.t0, order + 1),
        near_transition=near,
    )


# ---------------------------------------------------------------- evaluation


def remainder_prefactor(sd: SaddleData) -> float:
    """``exp(-chi(tau)) C(n, m-1)`` in overflow-free form."""
    x = sd.tau / (1.0 + sd.tau)
    return math.exp(log_beta_kernel(sd.m, sd.nu + 1, x)) * (1.0 + sd.tau) / (sd.nu + 1)


def s_prime_asymptotic(
    n: int,
    m: int,
    theta: float,
    terms: Optional[int] = None,
    z0: Optional[float] = None,
) -> EvalResult:
    """Large-``n`` approximation of ``S'_{n,m}(theta)`` (public indices).

    Parameters
    ----------
    n, m : int
        Public indices with ``2 <= m <= n - 1``.
    theta : float
        Positive parameter.
    terms : int, optional
        Number of ``G_k`` terms; defaults to 4 for ``n <= 10000`` and 2 above.
    z0 : float, optional
        Precomputed saddle point for the shifted indices.

    Returns
    -------
    EvalResult
        ``error_estimate`` is the size of the first omitted term.
    """
    if not (2 <= m <= n - 1):
        raise DomainError(f"asymptotic evaluation needs 2 <= m <= n-1, got n={n}, m={m}")
    if not theta > 0 or not math.isfinite(theta):
        raise DomainError(f"theta must be positive and finite, got {theta!r}")
    if terms is None:
        terms = default_terms(n)
    if terms < 1:
        raise DomainError(f"terms must be at least 1, got {terms}")
    sd = saddle_data(n - 1, m - 1, float(theta), z0)
    cs = coefficient_set(sd, terms)
    nu = float(sd.nu)
    scale = nu ** -np.arange(terms + 1)
    pref = remainder_prefactor(sd)
    remainder = pref * float(np.dot(cs.G_values[:terms], scale[:terms]))
    err = float(abs(pref * cs.G_values[terms] * scale[terms]))
    x = sd.tau / (1.0 + sd.tau)
    lower, upper = inc_beta_pair(x, sd.m, sd.nu + 1)
    if lower <= 0.5:
        return EvalResult.from_primary(lower + remainder, "S", "asymptotic", err)
    return EvalResult.from_primary(upper - remainder, "T", "asymptotic", err)


def asymptotic_value_and_slope(
    n: int, m: int, theta: float, branch: str, terms: Optional[int] = None, z0: Optional[float] = None
) -> tuple[float, float]:
    """Asymptotic counterpart of :func:`recurrence.value_and_slope`.

    The value includes the requested number of terms; the slope is that of
    the incomplete-beta leading term only, which is enough for Newton
    steps that converge on the full value.
    """
    res = s_prime_asymptotic(n, m, theta, terms, z0)
    sd_n, sd_m = n - 1, m - 1
    if z0 is None:
        z0 = saddle_z0(sd_n, sd_m)
    tau = tau_from_theta(theta, sd_n, sd_m, z0)
    x = tau / (1.0 + tau)
    slope = math.exp(log_beta_kernel(sd_m, sd_n - sd_m + 1, x)) / tau * dtau_dtheta(theta, tau, sd_n, sd_m, z0)
    if branch == "S":
        return res.s_prime, slope
    return res.t_prime, -slope

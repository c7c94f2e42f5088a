"""Reproduction harness: stored reference rows and the grids behind them.

Each ``*_rows`` function recomputes a block of reference numbers and
returns plain dictionaries so that the CLI can print them in any format
and tests can compare them against the stored reference values.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from itertools import islice
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .asymptotic import s_prime_asymptotic
from .evaluate import evaluate
from .inversion import invert_asymptotic, newton_iterates
from .recurrence import recursion_residual, s_prime_row
from .saddle import chi, phi, saddle_z0, theta_from_tau
from .special import inc_beta_inverse

__all__ = [
    "NEWTON_REFERENCE",
    "ASYMPTOTIC_REFERENCE",
    "RESIDUAL_BLOCKS",
    "SPOT_VALUES",
    "EXAMPLE_REFERENCE",
    "example_pipeline",
    "newton_rows",
    "asymptotic_rows",
    "residual_cell",
    "residual_grid",
    "sweep_m",
    "sweep_theta",
]

# (n, m, s, theta0, delta0, theta2, delta2, theta4, delta4); public indices.
# The first seed is recorded elsewhere as 0.02, which contradicts its own
# delta0 = 0.82; the unshifted seed recipe gives 1.02 and that is stored.
NEWTON_REFERENCE = [
    (25, 10, 1e-4, 1.02, 0.82, 0.812, 0.20, 0.78467, 0.17e-3),
    (25, 10, 0.25, 4.55, 0.36, 3.786, 0.46e-7, 3.78618, 0.0),
    (25, 10, 0.50, 6.13, 0.23, 5.163, 0.46e-3, 5.16527, 0.1e-14),
    (25, 10, 0.75, 8.21, 0.12, 6.970, 0.26e-2, 6.98945, 0.98e-10),
    (50, 25, 1e-4, 6.20, 0.64, 5.70, 0.46e-1, 5.67813, 0.4e-6),
    (50, 25, 0.25, 16.06, 0.24, 14.941, 0.91e-5, 14.9416, 0.1e-14),
    (50, 25, 0.50, 19.70, 0.15, 18.373, 0.18e-4, 18.3727, 0.14e-14),
    (50, 25, 0.75, 24.14, 0.08, 22.563, 0.19e-3, 22.5663, 0.1e-14),
]

# (n, m, s, theta0, delta0, theta1, delta1, theta2, delta2); public indices.
ASYMPTOTIC_REFERENCE = [
    (250, 200, 1e-4, 255.3, 0.36e-2, 255.339, 0.24e-4, 255.33835, 0.13e-4),
    (250, 200, 0.25, 408.2, 0.11e-2, 408.103, 0.35e-5, 408.10264, 0.66e-7),
    (250, 200, 0.50, 455.0, 0.66e-3, 454.911, 0.21e-5, 454.91098, 0.18e-6),
    (250, 200, 0.75, 508.2, 0.34e-3, 508.124, 0.11e-5, 508.12328, 0.76e-8),
    (1000, 500, 1e-4, 307.4, 0.73e-2, 307.383, 0.58e-5, 307.38266, 0.32e-8),
    (1000, 500, 0.25, 378.6, 0.23e-2, 378.570, 0.19e-5, 378.56980, 0.10e-8),
    (1000, 500, 0.50, 396.4, 0.15e-2, 396.387, 0.11e-5, 396.39298, 0.20e-3),
    (1000, 500, 0.75, 415.1, 0.77e-3, 415.025, 0.62e-6, 415.02539, 0.20e-9),
]

# n, m values, rho values, number of terms
RESIDUAL_BLOCKS = {
    "small": (1000, (150, 300, 450, 600, 750, 900), (0.7, 0.8, 0.9, 1.0), 4),
    "large": (100000, (15000, 30000, 45000, 60000, 75000, 90000), (0.97, 0.98, 0.99, 1.0), 2),
}

# n, m, rho, S'  with theta = rho * z0 of the shifted indices
SPOT_VALUES = [
    (100000, 75000, 0.97, 0.300778124649e-4),
    (100000, 75000, 1.00, 0.501722781430),
]

EXAMPLE_REFERENCE = {
    "z0": 39.1327,
    "phi_z0": 259.198,
    "chi_t0": 68.6165,
    "x": 0.4899330675,
    "tau0": 0.960527,
    "chi_tau0": 68.6215,
    "theta": (38.29722, 38.2492993, 38.248908191),
    "s_prime": (0.50233, 0.5000190, 0.500000125),
    "residual": (0.0047, 0.38e-4, 0.25e-6),
    "tau1": -0.055873923,
    "tau": 0.959409535,
}


def example_pipeline(n: int = 100, m: int = 50, s: float = 0.5) -> Dict[str, object]:
    """Every intermediate quantity of the asymptotic inversion for one case."""
    sn, sm = n - 1, m - 1
    z0 = saddle_z0(sn, sm)
    t0 = sm / (sn - sm)
    x = inc_beta_inverse(s, sm, sn - sm + 1)
    res = invert_asymptotic(n, m, s, terms=3)
    taus = res.tau_terms
    nu = sn - sm
    s_values = [evaluate(n, m, th).s_prime for th in res.history]
    return {
        "n": n,
        "m": m,
        "s": s,
        "z0": z0,
        "t0": t0,
        "phi_z0": phi(z0, sn, sm),
        "chi_t0": chi(t0, sn, sm),
        "x": x,
        "tau0": taus[0],
        "chi_tau0": chi(taus[0], sn, sm),
        "tau1": taus[1],
        "tau2": taus[2],
        "tau": taus[0] + taus[1] / nu,
        "theta": list(res.history),
        "s_prime": s_values,
        "residual": [abs(s / v - 1.0) for v in s_values],
    }


def newton_rows(reference: Sequence[tuple] = NEWTON_REFERENCE, iterations: int = 4) -> List[dict]:
    """Newton iterates ``theta_0..theta_iterations`` with ``delta_j = |s/S' - 1|``."""
    rows = []
    for n, m, s, *_ in reference:
        thetas, deltas = [], []
        for theta, _ in islice(newton_iterates(n, m, s), iterations + 1):
            thetas.append(theta)
            deltas.append(abs(s / evaluate(n, m, theta).s_prime - 1.0))
        rows.append({"n": n, "m": m, "s": s, "theta": thetas, "delta": deltas})
    return rows


def asymptotic_rows(reference: Sequence[tuple] = ASYMPTOTIC_REFERENCE) -> List[dict]:
    """``theta_j`` from ``j + 1`` terms of the ``tau`` expansion, with ``delta_j``."""
    rows = []
    for n, m, s, *_ in reference:
        res = invert_asymptotic(n, m, s, terms=3)
        deltas = [abs(s / evaluate(n, m, th).s_prime - 1.0) for th in res.history]
        rows.append({"n": n, "m": m, "s": s, "theta": list(res.history), "delta": deltas, "tau": list(res.tau_terms)})
    return rows


def residual_cell(n: int, m: int, rho: float, terms: Optional[int] = None) -> dict:
    """Recursion residual of three asymptotic values at ``theta = rho z0``."""
    z0 = saddle_z0(n - 1, m - 1)
    theta = rho * z0

    def value(nn: int, mm: int) -> float:
        return s_prime_asymptotic(nn, mm, theta, terms).s_prime

    r = recursion_residual(value(n, m), value(n, m - 1), value(n + 1, m), n, theta)
    return {"n": n, "m": m, "rho": rho, "theta": theta, "residual": r}


def _cell_args(args):
    return residual_cell(*args)


def residual_grid(
    n: int, ms: Iterable[int], rhos: Iterable[float], terms: Optional[int] = None, jobs: int = 1
) -> List[dict]:
    """Residual cells ordered by ``rho`` then ``m``; ``jobs > 1`` uses worker processes."""
    tasks = [(n, m, rho, terms) for rho in rhos for m in ms]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell_args, tasks))
    return [residual_cell(*t) for t in tasks]


def sweep_m(n: int, theta: float) -> List[dict]:
    """``S'_{n,m}(theta)`` for every ``m``, from one pass of the triangle."""
    row = s_prime_row(n, theta)
    return [{"n": n, "m": m, "theta": theta, "s_prime": float(v)} for m, v in enumerate(row)]


def sweep_theta(n: int, m: int, theta_min: float, theta_max: float, points: int = 50) -> List[dict]:
    """``S'_{n,m}`` on a logarithmic grid of ``theta``."""
    if not (0 < theta_min < theta_max) or points < 2:
        raise ValueError("need 0 < theta_min < theta_max and at least two points")
    grid = np.geomspace(theta_min, theta_max, points)
    out = []
    for th in grid:
        res = evaluate(n, m, float(th))
        out.append({"n": n, "m": m, "theta": float(th), "s_prime": res.s_prime, "t_prime": res.t_prime})
    return out


def relative_gap(value: float, reference: float) -> float:
    return math.inf if reference == 0 else abs(value / reference - 1.0)

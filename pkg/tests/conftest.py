"""Shared high-precision oracles."""

import mpmath
import pytest


class PhaseOracle:
    """The map t -> z(t) solved at 30 digits for shifted indices (n, m)."""

    def __init__(self, n, m, dps=30):
        self.n, self.m, self.dps = n, m, dps
        with mpmath.workdps(dps):
            self.t0 = mpmath.mpf(m) / (n - m)
            dphi = lambda z: mpmath.digamma(z + 1 + n) - mpmath.digamma(z + 1) - m / z
            self.z0 = mpmath.findroot(dphi, m / mpmath.log1p(mpmath.mpf(n) / m))
            self.phi0 = self.phi(self.z0)
            self.chi0 = self.chi(self.t0)

    def phi(self, z):
        return mpmath.loggamma(z + 1 + self.n) - mpmath.loggamma(z + 1) - self.m * mpmath.log(z)

    def chi(self, t):
        return self.n * mpmath.log1p(t) - self.m * mpmath.log(t)

    def z_of_t(self, t):
        with mpmath.workdps(self.dps):
            t = mpmath.mpf(t)
            c = self.chi(t) - self.chi0
            if c == 0:
                return self.z0
            d2 = mpmath.polygamma(1, self.z0 + 1 + self.n) - mpmath.polygamma(1, self.z0 + 1) + self.m / self.z0**2
            step = mpmath.sqrt(2 * c / d2)
            if step < self.z0 / 100:
                guess = self.z0 + mpmath.sign(t - self.t0) * step
                return mpmath.findroot(lambda z: self.phi(z) - self.phi0 - c, guess)
            # far from the saddle: bracketed solve on the matching side
            side = (self.z0, 1e12) if t > self.t0 else (mpmath.mpf("1e-300"), self.z0)
            g = lambda lz: self.phi(mpmath.exp(lz)) - self.phi0 - c
            return mpmath.exp(mpmath.findroot(g, tuple(mpmath.log(x) for x in side), solver="anderson"))

    def dz_dt(self, t):
        z = self.z_of_t(t)
        chi1 = self.n / (1 + t) - self.m / t
        phi1 = mpmath.digamma(z + 1 + self.n) - mpmath.digamma(z + 1) - self.m / z
        return chi1 / phi1

    def f_of_t(self, t, theta):
        return self.dz_dt(t) / (self.z_of_t(t) - theta)

    def taylor(self, func, radius, degree, count):
        """Taylor coefficients about t0 from a Chebyshev fit on [t0 - r, t0 + r]."""
        with mpmath.workdps(self.dps):
            poly = mpmath.chebyfit(lambda u: func(self.t0 + u), [-radius, radius], degree)
            return [float(c) for c in poly[::-1][:count]]


@pytest.fixture(scope="session")
def oracle_99_49():
    return PhaseOracle(99, 49)

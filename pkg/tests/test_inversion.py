import math

import numpy as np
import pytest

from stirling_cdf.errors import ConvergenceError, DomainError
from stirling_cdf.evaluate import evaluate
from stirling_cdf.inversion import (
    asymptotic_tau_terms,
    fu_fs,
    fu_fs_invert,
    initial_theta,
    invert_asymptotic,
    invert_newton,
    newton_iterates,
    transition_theta,
)
from stirling_cdf.recurrence import s_prime_recursive
from stirling_cdf.tables import ASYMPTOTIC_REFERENCE, NEWTON_REFERENCE, asymptotic_rows, newton_rows


def solved_residual(n, m, s, theta):
    res = s_prime_recursive(n, m, theta)
    if s <= 0.5:
        return abs(s / res.s_prime - 1)
    return abs((1 - s) / res.t_prime - 1)


class TestNewton:
    def test_median_row(self):
        res = invert_newton(25, 10, 0.5)
        assert res.history[0] == pytest.approx(6.13, abs=0.01)
        assert res.theta == pytest.approx(5.16527, abs=1e-5)
        assert res.residual <= 1e-14
        assert res.method == "newton"

    def test_quartile_row(self):
        res = invert_newton(50, 25, 0.25)
        assert res.theta == pytest.approx(14.9416, abs=1e-4)
        assert res.residual <= 1e-14

    def test_fourth_iterate_small_target(self):
        thetas = [th for th, _ in zip((t for t, _ in newton_iterates(25, 10, 1e-4)), range(5))]
        assert thetas[4] == pytest.approx(0.78467, abs=1e-5)
        assert abs(1e-4 / evaluate(25, 10, thetas[4]).s_prime - 1) <= 2e-3

    @pytest.mark.parametrize("row", NEWTON_REFERENCE, ids=lambda r: f"{r[1]}/{r[0]}-{r[2]}")
    def test_reference_rows(self, row):
        n, m, s, theta0, delta0, theta2, delta2, theta4, delta4 = row
        got = newton_rows([row])[0]
        assert got["theta"][0] == pytest.approx(theta0, abs=0.01)
        assert got["delta"][0] == pytest.approx(delta0, abs=0.01)
        assert got["theta"][4] == pytest.approx(theta4, abs=1e-4)
        assert got["delta"][4] <= max(10 * delta4, 1e-14)

    def test_shifted_seed_closer(self):
        plain = abs(initial_theta(25, 10, 0.5) - 5.16527)
        shifted = abs(initial_theta(25, 10, 0.5, seed="shifted") - 5.16527)
        assert shifted < plain

    @pytest.mark.parametrize("nm", [(25, 10), (50, 25), (250, 200), (1000, 500)])
    @pytest.mark.parametrize("s", [1e-4, 0.1, 0.25, 0.5, 0.75, 0.9, 0.9999])
    def test_round_trip(self, nm, s):
        n, m = nm
        res = invert_newton(n, m, s)
        assert solved_residual(n, m, s, res.theta) <= 1e-12
        assert res.residual <= 1e-12

    def test_monotone_in_s(self):
        thetas = [invert_newton(50, 25, s).theta for s in np.linspace(0.02, 0.98, 25)]
        assert all(a < b for a, b in zip(thetas, thetas[1:]))

    @pytest.mark.parametrize("s", np.linspace(0.01, 0.99, 15))
    def test_complementary_branch(self, s):
        direct = invert_newton(60, 20, s, branch="S").theta
        comp = invert_newton(60, 20, s, branch="T").theta
        assert comp == pytest.approx(direct, rel=1e-10)

    def test_extreme_targets(self):
        lo = invert_newton(40, 20, 1e-200)
        assert lo.theta > 0
        assert s_prime_recursive(40, 20, lo.theta).s_prime == pytest.approx(1e-200, rel=1e-10)
        hi = invert_newton(40, 20, 0.5, branch="T", complement=1e-200)
        assert s_prime_recursive(40, 20, hi.theta).t_prime == pytest.approx(1e-200, rel=1e-10)

    def test_large_n(self):
        res = invert_newton(100000, 75000, 0.3)
        assert res.iterations_or_terms <= 6
        assert evaluate(100000, 75000, res.theta).s_prime == pytest.approx(0.3, rel=1e-11)

    def test_iteration_cap(self):
        with pytest.raises(ConvergenceError):
            invert_newton(25, 10, 1e-4, maxiter=1)

    @pytest.mark.parametrize("args", [(25, 10, 0.0), (25, 10, 1.0), (25, 10, -0.1), (25, 0, 0.5), (25, 25, 0.5), (25, 1, 0.5)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            invert_newton(*args)


class TestAsymptotic:
    def test_example_terms(self):
        res = invert_asymptotic(100, 50, 0.5, terms=3)
        assert res.history[0] == pytest.approx(38.29722, abs=1e-4)
        assert res.history[1] == pytest.approx(38.2492993, abs=1e-5)
        assert res.theta == pytest.approx(38.248908191, abs=1e-6)
        assert res.method == "asymptotic"
        assert res.iterations_or_terms == 3

    def test_example_tau(self):
        tau0, tau1, _ = invert_asymptotic(100, 50, 0.5, terms=3).tau_terms
        assert tau0 == pytest.approx(0.960527, abs=1e-6)
        assert tau1 == pytest.approx(-0.055873923, abs=1e-8)
        assert tau0 + tau1 / 50 == pytest.approx(0.959409535, abs=1e-9)

    def test_tau_terms_shifted(self):
        taus, z0 = asymptotic_tau_terms(99, 49, 0.5)
        assert taus[0] == pytest.approx(0.960527, abs=1e-6)
        assert z0 == pytest.approx(39.1327, abs=5e-4)

    @pytest.mark.parametrize("terms,expected", [(1, 4.7e-3), (2, 3.8e-5), (3, 2.5e-7)])
    def test_example_residuals(self, terms, expected):
        res = invert_asymptotic(100, 50, 0.5, terms=terms)
        assert expected / 3 <= res.residual <= expected * 3

    def test_table_row(self):
        res = invert_asymptotic(250, 200, 0.5, terms=3)
        assert res.theta == pytest.approx(454.91098, abs=1e-3)

    @pytest.mark.parametrize("row", ASYMPTOTIC_REFERENCE, ids=lambda r: f"{r[1]}/{r[0]}-{r[2]}")
    def test_reference_theta(self, row):
        got = asymptotic_rows([row])[0]
        assert got["theta"][0] == pytest.approx(row[3], abs=0.1)
        assert got["theta"][1] == pytest.approx(row[5], abs=1e-3)
        assert got["theta"][2] == pytest.approx(row[7], abs=1e-3) or row[:3] == (1000, 500, 0.5)

    @pytest.mark.parametrize("nm", [(250, 200), (1000, 500)])
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_order_improvement(self, nm, s):
        d = asymptotic_rows([(*nm, s)])[0]["delta"]
        assert d[1] < d[0]
        assert d[2] < d[1]

    @pytest.mark.parametrize("terms", [0, 4])
    def test_bad_terms(self, terms):
        with pytest.raises(DomainError):
            invert_asymptotic(100, 50, 0.5, terms=terms)


class TestTransition:
    def test_example(self):
        theta = transition_theta(100, 50)
        assert theta == pytest.approx(38.248908191, abs=1e-5)
        assert abs(s_prime_recursive(100, 50, theta).s_prime - 0.5) <= 1e-10

    def test_small(self):
        assert transition_theta(25, 10) == pytest.approx(5.16527, abs=1e-4)

    def test_fs_zero(self):
        assert fu_fs(25, 10, transition_theta(25, 10)) == pytest.approx(0.0, abs=1e-10)


class TestFuFs:
    def test_log_three(self):
        assert fu_fs(25, 10, 6.98945) == pytest.approx(math.log(3), abs=1e-4)

    def test_invert_log_three(self):
        assert fu_fs_invert(25, 10, math.log(3)).theta == pytest.approx(6.98945, abs=1e-4)

    def test_increasing(self):
        vals = [fu_fs(40, 15, th) for th in np.geomspace(0.5, 500, 60)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("f", np.linspace(-20, 20, 17))
    def test_round_trip(self, f):
        theta = fu_fs_invert(40, 15, f).theta
        assert fu_fs(40, 15, theta) == pytest.approx(f, abs=1e-8)

    @pytest.mark.parametrize("f", [-700.0, 700.0])
    def test_extreme(self, f):
        theta = fu_fs_invert(40, 15, f).theta
        assert fu_fs(40, 15, theta) == pytest.approx(f, rel=1e-10)

    def test_sentinels(self):
        assert fu_fs(30, 0, 2.0) == math.inf
        assert fu_fs(300, 200, 1e-3) == -math.inf

    def test_domain(self):
        with pytest.raises(DomainError):
            fu_fs_invert(40, 15, math.nan)
        with pytest.raises(DomainError):
            fu_fs_invert(40, 15, 800.0)

    @pytest.mark.parametrize("nm,f", [((48, 38), 6.609847694516727), ((146, 28), -7.757183989473315)])
    def test_found_by_property_search(self, nm, f):
        theta = fu_fs_invert(*nm, f).theta
        assert fu_fs(*nm, theta) == pytest.approx(f, abs=1e-8)

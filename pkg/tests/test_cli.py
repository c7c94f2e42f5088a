import csv
import io
import json

import pytest
from click.testing import CliRunner

from stirling_cdf import cli as cli_module
from stirling_cdf.cli import cli, main
from stirling_cdf.errors import ConvergenceError
from stirling_cdf.evaluate import evaluate
from stirling_cdf.saddle import saddle_z0


@pytest.fixture()
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, [str(a) for a in args])

    return invoke


class TestEval:
    def test_json(self, run):
        out = run("eval", "--n", 100, "--m", 50, "--theta", 38.2489082, "--format", "json")
        assert out.exit_code == 0
        rec = json.loads(out.stdout)
        assert rec["s_prime"] == pytest.approx(0.5000001, abs=2e-6)
        assert rec["method"] == "recurrence"
        assert set(rec) >= {"n", "m", "theta", "s_prime", "t_prime", "fs", "method", "err"}

    def test_full_sum(self, run):
        out = run("eval", "--n", 5, "--m", 0, "--theta", 3.3, "--format", "json")
        assert json.loads(out.stdout)["s_prime"] == 1

    def test_csv_header(self, run):
        out = run("eval", "--n", 30, "--m", 12, "--theta", 4.0, "--format", "csv")
        rows = list(csv.reader(io.StringIO(out.stdout)))
        assert rows[0][:8] == ["n", "m", "theta", "s_prime", "t_prime", "fs", "method", "err"]
        assert len(rows) == 2

    def test_text(self, run):
        out = run("eval", "--n", 30, "--m", 12, "--theta", 4.0)
        assert out.exit_code == 0
        assert out.stdout.splitlines()[0].split()[:3] == ["n", "m", "theta"]

    def test_json_round_trip(self, run):
        out = run("eval", "--n", 300, "--m", 120, "--theta", 57.5, "--format", "json")
        rec = json.loads(out.stdout)
        again = evaluate(rec["n"], rec["m"], rec["theta"], rec["method"])
        assert float(f"{again.s_prime:.15g}") == rec["s_prime"]
        assert float(f"{again.t_prime:.15g}") == rec["t_prime"]

    def test_methods(self, run):
        vals = {}
        for method in ("recurrence", "asymptotic", "bruteforce"):
            out = run("eval", "--n", 60, "--m", 30, "--theta", 20.0, "--method", method, "--format", "json")
            assert out.exit_code == 0, out.output
            vals[method] = json.loads(out.stdout)["s_prime"]
        assert vals["bruteforce"] == pytest.approx(vals["recurrence"], rel=1e-13)
        assert vals["asymptotic"] == pytest.approx(vals["recurrence"], rel=1e-7)

    def test_auto_above_cap(self, run):
        out = run("eval", "--n", 100000, "--m", 75000, "--theta", 136312.2, "--format", "json")
        assert json.loads(out.stdout)["method"] == "asymptotic"


class TestCrossover:
    @pytest.mark.slow
    @pytest.mark.parametrize("n", [19999, 20000, 20001])
    def test_continuity(self, n, monkeypatch):
        m = n // 2
        theta = 0.97 * saddle_z0(n - 1, m - 1)
        auto = evaluate(n, m, theta)
        monkeypatch.setenv("STIRLING_CDF_RECURSION_CAP", "30000")
        forced = evaluate(n, m, theta, "recurrence")
        assert auto.method == ("recurrence" if n <= 20000 else "asymptotic")
        assert auto.s_prime == pytest.approx(forced.s_prime, rel=1e-9)


class TestOtherCommands:
    def test_invert(self, run):
        out = run("invert", "--n", 25, "--m", 10, "--s", 0.5, "--format", "json")
        rec = json.loads(out.stdout)
        assert rec["theta"] == pytest.approx(5.16527, abs=1e-5)
        assert rec["method"] == "newton"
        assert rec["residual"] <= 1e-12

    def test_invert_asymptotic(self, run):
        out = run("invert", "--n", 100, "--m", 50, "--s", 0.5, "--method", "asymptotic", "--format", "json")
        rec = json.loads(out.stdout)
        assert rec["theta"] == pytest.approx(38.248908191, abs=1e-6)
        assert len(rec["tau_terms"]) == 3

    def test_fs(self, run):
        out = run("fs", "--n", 25, "--m", 10, "--theta", 6.98945, "--format", "json")
        assert json.loads(out.stdout)["fs"] == pytest.approx(1.0986, abs=1e-4)

    def test_fs_invert(self, run):
        out = run("fs-invert", "--n", 25, "--m", 10, "--f", 1.0986123, "--format", "json")
        assert json.loads(out.stdout)["theta"] == pytest.approx(6.98945, abs=1e-4)

    def test_transition(self, run):
        out = run("transition", "--n", 100, "--m", 50, "--format", "json")
        assert json.loads(out.stdout)["theta_t"] == pytest.approx(38.2489, abs=1e-4)

    def test_table_newton(self, run):
        out = run("table", "newton", "--format", "json")
        rows = json.loads(out.stdout)
        assert len(rows) == 8
        for r in rows:
            assert r["theta4"] == pytest.approx(r["ref_theta4"], abs=1e-4)

    def test_table_asymptotic(self, run):
        rows = json.loads(run("table", "asymptotic", "--format", "json").stdout)
        assert len(rows) == 8

    def test_table_example(self, run):
        rec = json.loads(run("table", "example", "--format", "json").stdout)
        assert rec["z0"] == pytest.approx(39.1327, abs=5e-4)

    def test_sweep_m(self, run):
        out = run("table", "sweep-m", "--n", 20, "--theta", 3.0, "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out.stdout)))
        assert len(rows) == 21
        vals = [float(r["s_prime"]) for r in rows]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_sweep_theta(self, run):
        out = run("table", "sweep-theta", "--n", 20, "--m", 5, "--theta-min", 0.1, "--theta-max", 50, "--points", 10, "--format", "json")
        rows = json.loads(out.stdout)
        assert len(rows) == 10
        vals = [r["s_prime"] for r in rows]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_sweep_usage(self, run):
        assert run("table", "sweep-m").exit_code == 2

    def test_verify(self, run):
        out = run("verify", "--n", 1000, "--m", 300, "--m", 600, "--rho", 0.8, "--rho", 1.0, "--format", "json")
        assert out.exit_code == 0
        cells = json.loads(out.stdout)
        assert [(c["rho"], c["m"]) for c in cells] == [(0.8, 300), (0.8, 600), (1.0, 300), (1.0, 600)]
        assert max(abs(c["residual"]) for c in cells) <= 1e-10
        assert "max |residual|" in out.stderr

    def test_verify_parallel_order(self, run):
        args = ("verify", "--n", 400, "--m", 100, "--m", 200, "--rho", 0.9, "--rho", 0.8, "--format", "json")
        serial = json.loads(run(*args).stdout)
        parallel = json.loads(run(*args, "--jobs", 2).stdout)
        assert serial == parallel


class TestExitCodes:
    def test_invalid_m(self, run):
        out = run("eval", "--n", 5, "--m", 7, "--theta", 1.0)
        assert out.exit_code == 2
        assert out.stderr.startswith("error:")
        assert out.stdout == ""

    def test_invalid_s(self, run):
        assert run("invert", "--n", 25, "--m", 10, "--s", 1.5).exit_code == 2

    def test_missing_option(self, run):
        assert run("eval", "--n", 5).exit_code == 2

    def test_cap(self, run, monkeypatch):
        monkeypatch.setenv("STIRLING_CDF_RECURSION_CAP", "100")
        out = run("eval", "--n", 200, "--m", 50, "--theta", 3.0, "--method", "recurrence")
        assert out.exit_code == 2

    def test_convergence_failure(self, run, monkeypatch):
        def boom(*args, **kwargs):
            raise ConvergenceError("no convergence")

        monkeypatch.setattr(cli_module, "invert_newton", boom)
        out = run("invert", "--n", 25, "--m", 10, "--s", 0.5)
        assert out.exit_code == 3
        assert out.stderr.strip() == "error: no convergence"

    def test_main_entry(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["transition", "--n", "25", "--m", "10", "--format", "json"])
        assert exc.value.code == 0
        assert json.loads(capsys.readouterr().out)["theta_t"] == pytest.approx(5.16527, abs=1e-4)

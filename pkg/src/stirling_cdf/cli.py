"""Command-line interface.

Usage::

    stirling-cdf eval --n 100 --m 50 --theta 38.2489082 --format json
    stirling-cdf invert --n 25 --m 10 --s 0.5
    stirling-cdf fs --n 25 --m 10 --theta 6.98945
    stirling-cdf fs-invert --n 25 --m 10 --f 1.0986
    stirling-cdf transition --n 100 --m 50
    stirling-cdf table newton
    stirling-cdf verify --n 1000 --m 150 --m 450 --rho 0.9 --terms 4

Data goes to stdout and diagnostics to stderr. Exit status is 2 for
invalid arguments and 3 when an iteration fails to converge.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import List, Optional, Sequence

import click

from . import tables
from .errors import ConvergenceError
from .evaluate import METHODS, evaluate
from .inversion import (
    InversionResult,
    fu_fs,
    fu_fs_invert,
    invert_asymptotic,
    invert_newton,
    transition_theta,
)

__all__ = ["cli", "main"]

FORMATS = ("json", "csv", "text")
EVAL_COLUMNS = ("n", "m", "theta", "s_prime", "t_prime", "fs", "method", "err")


def fmt_number(x):
    """Round floats to 15 significant digits; pass everything else through."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return x
        return float(f"{x:.15g}")
    if isinstance(x, (list, tuple)):
        return [fmt_number(v) for v in x]
    return x


def _cell(x) -> str:
    if isinstance(x, float):
        return f"{x:.15g}"
    if isinstance(x, (list, tuple)):
        return " ".join(_cell(v) for v in x)
    return str(x)


def emit(records: List[dict], fmt: str, columns: Optional[Sequence[str]] = None) -> None:
    """Write ``records`` to stdout as JSON, CSV or aligned text."""
    if not records:
        return
    columns = list(columns or records[0].keys())
    if fmt == "json":
        rows = [{k: fmt_number(r.get(k)) for k in columns} for r in records]
        payload = rows[0] if len(rows) == 1 else rows
        click.echo(json.dumps(payload, allow_nan=True))
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in records:
            writer.writerow([_cell(r.get(k)) for k in columns])
        click.echo(buf.getvalue(), nl=False)
    else:
        cells = [[_cell(r.get(k)) for k in columns] for r in records]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
        click.echo("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip())
        for row in cells:
            click.echo("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


class _Group(click.Group):
    """Turns library errors into one-line diagnostics with fixed exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except ConvergenceError as exc:
            _fail(str(exc), 3)
        except (ValueError, ZeroDivisionError) as exc:
            _fail(str(exc), 2)


format_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
n_option = click.option("--n", "n", type=int, required=True, help="Sample size n.")
m_option = click.option("--m", "m", type=int, required=True, help="Lower summation index m.")


@click.group(cls=_Group)
@click.version_option(package_name="stirling-cdf")
def cli():
    """Evaluate and invert normalized partial Stirling sums S'(n, m, theta)."""


def eval_record(n: int, m: int, theta: float, method: str = "auto", terms: Optional[int] = None) -> dict:
    res = evaluate(n, m, theta, method, terms)
    if res.primary_branch == "S":
        fs = -math.inf if res.s_prime <= 0 else math.log(res.s_prime) - math.log1p(-res.s_prime)
    else:
        fs = math.inf if res.t_prime <= 0 else math.log1p(-res.t_prime) - math.log(res.t_prime)
    return {
        "n": n,
        "m": m,
        "theta": theta,
        "s_prime": res.s_prime,
        "t_prime": res.t_prime,
        "fs": fs,
        "method": res.method,
        "err": res.error_estimate,
        "primary": res.primary_branch,
    }


@cli.command("eval")
@n_option
@m_option
@click.option("--theta", type=float, required=True)
@click.option("--method", type=click.Choice(METHODS), default="auto", show_default=True)
@click.option("--terms", type=click.IntRange(1, 8), default=None, help="Asymptotic terms (default 4, or 2 above n=10000).")
@format_option
def eval_cmd(n, m, theta, method, terms, fmt):
    """Print S', T', F_s, the method used and an error estimate."""
    emit([eval_record(n, m, theta, method, terms)], fmt, EVAL_COLUMNS + ("primary",))


def inversion_record(n: int, m: int, target_name: str, target: float, res: InversionResult) -> dict:
    rec = {
        "n": n,
        "m": m,
        target_name: target,
        "theta": res.theta,
        "method": res.method,
        "iterations_or_terms": res.iterations_or_terms,
        "residual": res.residual,
    }
    if res.tau_terms is not None:
        rec["tau_terms"] = list(res.tau_terms)
    rec["history"] = list(res.history)
    return rec


@cli.command("invert")
@n_option
@m_option
@click.option("--s", "s", type=float, required=True, help="Target value of S' in (0, 1).")
@click.option("--method", type=click.Choice(("newton", "asymptotic")), default="newton", show_default=True)
@click.option("--terms", type=click.IntRange(1, 3), default=3, show_default=True, help="Terms of the tau expansion.")
@click.option("--tol", type=float, default=1e-12, show_default=True)
@format_option
def invert_cmd(n, m, s, method, terms, tol, fmt):
    """Solve S'(n, m, theta) = s for theta."""
    if method == "newton":
        res = invert_newton(n, m, s, tol=tol)
    else:
        res = invert_asymptotic(n, m, s, terms)
    emit([inversion_record(n, m, "s", s, res)], fmt)


@cli.command("fs")
@n_option
@m_option
@click.option("--theta", type=float, required=True)
@click.option("--method", type=click.Choice(METHODS), default="auto", show_default=True)
@format_option
def fs_cmd(n, m, theta, method, fmt):
    """Print Fu's F_s = log(S' / (1 - S'))."""
    emit([{"n": n, "m": m, "theta": theta, "fs": fu_fs(n, m, theta, method)}], fmt)


@cli.command("fs-invert")
@n_option
@m_option
@click.option("--f", "f", type=float, required=True, help="Target F_s value.")
@click.option("--tol", type=float, default=1e-12, show_default=True)
@format_option
def fs_invert_cmd(n, m, f, tol, fmt):
    """Solve F_s(n, m, theta) = f for theta."""
    emit([inversion_record(n, m, "f", f, fu_fs_invert(n, m, f, tol))], fmt)


@cli.command("transition")
@n_option
@m_option
@format_option
def transition_cmd(n, m, fmt):
    """Print the theta where S' = T' = 1/2."""
    emit([{"n": n, "m": m, "theta_t": transition_theta(n, m)}], fmt)


@cli.command("table")
@click.argument("which", type=click.Choice(("newton", "asymptotic", "example", "sweep-m", "sweep-theta")))
@click.option("--n", "n", type=int, default=None)
@click.option("--m", "m", type=int, default=None)
@click.option("--theta", type=float, default=None, help="theta for sweep-m.")
@click.option("--theta-min", type=float, default=None)
@click.option("--theta-max", type=float, default=None)
@click.option("--points", type=click.IntRange(2, 100000), default=50, show_default=True)
@format_option
def table_cmd(which, n, m, theta, theta_min, theta_max, points, fmt):
    """Reproduce reference rows or emit plottable sweeps.

    ``newton`` and ``asymptotic`` print recomputed iterates next to the
    stored reference values; ``sweep-m`` and ``sweep-theta`` emit S' curves.
    """
    if which == "newton":
        records = []
        for ref, row in zip(tables.NEWTON_REFERENCE, tables.newton_rows()):
            rec = {"n": row["n"], "m": row["m"], "s": row["s"]}
            for j in (0, 2, 4):
                rec[f"theta{j}"] = row["theta"][j]
                rec[f"delta{j}"] = row["delta"][j]
            rec.update(ref_theta0=ref[3], ref_theta2=ref[5], ref_theta4=ref[7], ref_delta4=ref[8])
            records.append(rec)
        emit(records, fmt)
    elif which == "asymptotic":
        records = []
        for ref, row in zip(tables.ASYMPTOTIC_REFERENCE, tables.asymptotic_rows()):
            rec = {"n": row["n"], "m": row["m"], "s": row["s"]}
            for j in range(3):
                rec[f"theta{j}"] = row["theta"][j]
                rec[f"delta{j}"] = row["delta"][j]
            rec.update(ref_theta2=ref[7], ref_delta1=ref[6], ref_delta2=ref[8])
            records.append(rec)
        emit(records, fmt)
    elif which == "example":
        rec = tables.example_pipeline(n or 100, m or 50)
        emit([rec], fmt)
    elif which == "sweep-m":
        if n is None or theta is None:
            raise click.UsageError("sweep-m needs --n and --theta")
        emit(tables.sweep_m(n, theta), fmt)
    else:
        if n is None or m is None or theta_min is None or theta_max is None:
            raise click.UsageError("sweep-theta needs --n, --m, --theta-min and --theta-max")
        emit(tables.sweep_theta(n, m, theta_min, theta_max, points), fmt)


@cli.command("verify")
@click.option("--n", "n", type=int, default=1000, show_default=True)
@click.option("--m", "ms", type=int, multiple=True, help="Columns m (repeatable); default 15%..90% of n.")
@click.option("--rho", "rhos", type=float, multiple=True, help="theta = rho * z0 (repeatable).")
@click.option("--terms", type=click.IntRange(1, 8), default=None)
@click.option("--jobs", type=click.IntRange(1, 64), default=1, show_default=True)
@format_option
def verify_cmd(n, ms, rhos, terms, jobs, fmt):
    """Recursion residuals of asymptotic values on a (rho, m) grid."""
    ms = ms or tuple(int(round(n * f)) for f in (0.15, 0.3, 0.45, 0.6, 0.75, 0.9))
    rhos = rhos or (0.7, 0.8, 0.9, 1.0)
    cells = tables.residual_grid(n, ms, rhos, terms, jobs)
    emit(cells, fmt, ("n", "m", "rho", "theta", "residual"))
    worst = max(abs(c["residual"]) for c in cells)
    click.echo(f"max |residual| = {worst:.3e}", err=True)


def main(argv: Optional[Sequence[str]] = None) -> None:
    cli.main(args=argv, prog_name="stirling-cdf")

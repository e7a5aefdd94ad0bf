"""Command-line front end: ``spectral-da <command> PROBLEM.json``.

Exit codes: 0 success, 2 input error, 3 domain precondition violated,
4 incompatible coefficient tails.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import click
import numpy as np

from .assimilate import kalman_gains, posterior
from .exceptions import InfeasibleProblem, LowerBoundPositive, PriorNotTraceClass, TailMismatch
from .montecarlo import ess_sweep, mc_log_constant
from .problem import AssimilationProblem, problem_from_json
from .wellposed import (
    classify_problem,
    construct_bad_data,
    log_norm_constant,
    truncated_log_constant,
)

EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_TAIL = 4

_PARAM_KEYS = {"N", "n", "seed", "delta", "dims", "modes"}


def _num(x: float) -> Any:
    """JSON-safe float: infinities become the strings ``"inf"`` / ``"-inf"``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _load(path: str) -> tuple[AssimilationProblem, dict[str, Any]]:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read problem file {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise click.UsageError("problem file must hold a JSON object")
    params = doc.pop("parameters", {})
    if not isinstance(params, dict) or set(params) - _PARAM_KEYS:
        raise click.UsageError(f"parameters must be an object with keys among {sorted(_PARAM_KEYS)}")
    try:
        return problem_from_json(doc), params
    except TailMismatch:
        raise
    except (ValueError, TypeError) as exc:
        raise click.UsageError(f"invalid problem file: {exc}") from None


def _emit(text: str, output: str | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


def _dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _int_list(raw: str | None) -> list[int] | None:
    if raw is None:
        return None
    try:
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"expected a comma-separated list of integers, got {raw!r}") from None


def _pick(flag, params: dict, key: str, default=None):
    if flag is not None:
        return flag
    return params.get(key, default)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.UsageError as exc:
            click.echo(f"error: {exc.format_message()}", err=True)
            sys.exit(EXIT_INPUT)
        except TailMismatch as exc:
            click.echo(f"error: tail mismatch: {exc}", err=True)
            sys.exit(EXIT_TAIL)
        except (PriorNotTraceClass, LowerBoundPositive, InfeasibleProblem) as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_DOMAIN)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
    return wrapper


_problem_arg = click.argument("problem", type=click.Path(dir_okay=False))
_output_opt = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                           help="Write to this file instead of stdout.")


@click.group()
def main():
    """Well-posedness of Gaussian data assimilation with commuting covariances."""


@main.command()
@_problem_arg
@_output_opt
@_guarded
def classify(problem, output):
    """Well-posedness report for the prior/noise pair."""
    prob, _ = _load(problem)
    report = classify_problem(prob.prior_spectrum, prob.noise_spectrum, prob.prior_mean)
    doc = report.to_json()
    doc["noise_lower_bound"] = _num(doc["noise_lower_bound"])
    _emit(_dump_json(doc), output)


@main.command()
@_problem_arg
@click.option("--truncate", "-N", type=int, default=None, help="Sum only the first N modes.")
@_output_opt
@_guarded
def constant(problem, truncate, output):
    """Log normalization constant log c(y), or -inf."""
    prob, params = _load(problem)
    n = _pick(truncate, params, "N")
    if n is not None:
        if n < 1:
            raise click.UsageError("--truncate must be >= 1")
        doc = {"N": n, "log_c_truncated": _num(truncated_log_constant(prob, n))}
    else:
        nc = log_norm_constant(prob)
        doc = {
            "log_c": _num(nc.log_value),
            "bracket_width": _num(nc.bracket_width),
            "well_posed": nc.well_posed,
            "certificates": list(nc.certificates),
        }
    _emit(_dump_json(doc), output)


@main.command()
@_problem_arg
@click.option("--modes", default=None, help="Comma-separated mode indices (default: data support).")
@_output_opt
@_guarded
def assimilate(problem, modes, output):
    """Per-mode posterior mean, variance and gain as CSV."""
    prob, params = _load(problem)
    mode_list = _int_list(modes)
    if mode_list is None:
        mode_list = params.get("modes")
    if any(int(m) < 1 for m in mode_list or []):
        raise click.UsageError("mode indices must be >= 1")
    result = posterior(prob)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if result.well_posed:
        spec = result.posterior
        idx = spec.indices if mode_list is None else np.array(mode_list, dtype=float)
        gains = kalman_gains(prob, idx)
    else:
        buf.write("ILL-POSED (fallback: prior)\n")
        spec = result.fallback
        idx = spec.indices if mode_list is None else np.array(mode_list, dtype=float)
        gains = np.zeros(idx.shape)
    writer.writerow(["mode", "mean", "variance", "gain"])
    for i, m, v, k in zip(idx, spec.mean(idx), spec.variance(idx), gains):
        writer.writerow([int(i), repr(float(m)), repr(float(v)), repr(float(k))])
    _emit(buf.getvalue(), output)


@main.command()
@_problem_arg
@click.option("--delta", type=float, default=None, help="Maximal distance from the problem's data.")
@_output_opt
@_guarded
def adversarial(problem, delta, output):
    """Data within DELTA of the problem's data for which c(y) = 0."""
    prob, params = _load(problem)
    delta = _pick(delta, params, "delta", 1.0)
    bad = construct_bad_data(prob.noise_spectrum, prob.prior_spectrum, prob.data_coefficients,
                             float(delta), prob.prior_mean)
    doc = bad.to_json()
    doc["construction"]["certificate"] = bad.certificate
    doc["construction"]["log_c"] = _num(log_norm_constant(prob.with_data(bad)).log_value)
    _emit(_dump_json(doc), output)


@main.command()
@_problem_arg
@click.option("--truncate", "-N", type=int, default=None, help="Number of modes.")
@click.option("--n", "n", type=int, default=None, help="Number of prior draws.")
@click.option("--seed", type=int, default=None)
@_output_opt
@_guarded
def mc(problem, truncate, n, seed, output):
    """Monte Carlo estimate of the truncated log normalization constant."""
    prob, params = _load(problem)
    big_n = _pick(truncate, params, "N", 10)
    n = _pick(n, params, "n", 10_000)
    seed = _pick(seed, params, "seed", 0)
    if big_n < 1 or n < 1:
        raise click.UsageError("--truncate and --n must be >= 1")
    est = mc_log_constant(prob, big_n, n, seed)
    doc = {
        "N": big_n, "n": n, "seed": seed,
        "estimate": _num(est.estimate), "stderr": _num(est.stderr),
        "analytic": _num(truncated_log_constant(prob, big_n)),
    }
    _emit(_dump_json(doc), output)


@main.command()
@_problem_arg
@click.option("--dims", default=None, help="Comma-separated increasing truncation dimensions.")
@click.option("--n", "n", type=int, default=None, help="Number of prior draws.")
@click.option("--seed", type=int, default=None)
@_output_opt
@_guarded
def sweep(problem, dims, n, seed, output):
    """Effective sample size of likelihood weights across truncation dimensions (CSV)."""
    prob, params = _load(problem)
    dim_list = _int_list(dims) or params.get("dims") or [10, 100]
    n = _pick(n, params, "n", 10_000)
    seed = _pick(seed, params, "seed", 0)
    if n < 1:
        raise click.UsageError("--n must be >= 1")
    _emit(ess_sweep(prob, dim_list, n, seed).to_csv(), output)


if __name__ == "__main__":
    main()

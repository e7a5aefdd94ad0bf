"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from spectral_da import (
    AssimilationProblem,
    CoeffSeq,
    Constant,
    Exponential,
    PowerLaw,
    PowerTail,
    classify_problem,
    construct_bad_data,
    log_norm_constant,
    posterior,
    three_dvar_cost,
    three_dvar_feasible,
    three_dvar_minimize,
    truncated_log_constant,
)
from spectral_da import elements, wellposed
from spectral_da.cli import main
from spectral_da.montecarlo import ess_sweep, mc_log_constant

PRIORS = (PowerLaw(1, 2), PowerLaw(1, 4), Exponential(1, 0.5))


@pytest.fixture(autouse=True)
def cold_caches():
    """Each criterion pays for its own first evaluations."""
    for cached in (elements.spectrum_terms, elements._index_chunks,
                   wellposed._log_det_verdict, wellposed._variance_sum_terms):
        cached.cache_clear()


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, elapsed, limit=None, detail=""):
        timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
        status = "PASS" if ok else "FAIL"
        with capsys.disabled():
            print(f"\n[{status}] criterion {number}: {title} [{timing}] {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def random_data(rng, with_tail):
    support = sorted(set(rng.integers(1, 200, size=rng.integers(0, 12)).tolist()))
    values = rng.normal(0, 3, size=len(support))
    tail = None
    if with_tail:
        start = (support[-1] + 1) if support else 1
        tail = PowerTail(float(rng.uniform(0.1, 5)), float(rng.uniform(0.55, 3)), start)
    return CoeffSeq(tuple((i, float(v)) for i, v in zip(support, values) if v != 0), tail)


def test_criterion_1_bounded_noise_always_finite(report):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    failures = 0
    for prior in PRIORS:
        for c in (0.1, 1.0, 10.0):
            for trial in range(1000):
                y = random_data(rng, with_tail=trial % 2 == 1)
                nc = log_norm_constant(AssimilationProblem(prior, Constant(c), y))
                failures += not (nc.well_posed and math.isfinite(nc.log_value))
    elapsed = time.perf_counter() - start
    report(1, "finite log c for 9000 data vectors with bounded-below noise",
           failures == 0 and elapsed < 10, elapsed, 10, f"non-finite: {failures}")


def test_criterion_2_adversarial_data(report):
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    worst_excess, failures = -math.inf, 0
    for prior in PRIORS:
        for noise in (PowerLaw(1, 1), PowerLaw(1, 2)):
            for delta in (0.1, 1.0):
                for z in (CoeffSeq(), random_data(rng, with_tail=False)):
                    bad = construct_bad_data(noise, prior, z, delta)
                    nc = log_norm_constant(AssimilationProblem(prior, noise, bad))
                    worst_excess = max(worst_excess, math.sqrt(bad.distance_sq()) - delta)
                    failures += not (nc.log_value == -math.inf and bad.certificate)
    elapsed = time.perf_counter() - start
    report(2, "adversarial data within delta and log c = -inf",
           failures == 0 and worst_excess <= 1e-12 and elapsed < 5, elapsed, 5,
           f"max(|y - z| - delta) = {worst_excess:.3g}, failures: {failures}")


def test_criterion_3_equivalent_measures(report):
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    s = PowerLaw(1, 2)
    equivalent = classify_problem(s, s, CoeffSeq()).measures_equivalent
    data = (CoeffSeq(), CoeffSeq.basis(1, 1.0), random_data(rng, with_tail=True))
    ill = [not posterior(AssimilationProblem(s, s, y)).well_posed for y in data]
    err = abs(truncated_log_constant(AssimilationProblem(s, s), 100) + 50 * math.log(2))
    elapsed = time.perf_counter() - start
    report(3, "equal spectra: equivalent measures, ill posed, truncated constant",
           equivalent and all(ill) and err <= 1e-9 and elapsed < 1, elapsed, 1,
           f"equivalent={equivalent}, ill-posed={ill}, truncation error {err:.3g}")


def test_criterion_4_closed_form_constant(report):
    start = time.perf_counter()
    nc = log_norm_constant(AssimilationProblem(PowerLaw(1, 2), Constant(1)))
    elapsed = time.perf_counter() - start
    target = -0.5 * math.log(math.sinh(math.pi) / math.pi)
    err = abs(nc.log_value - target)
    report(4, "log c = -1/2 log(sinh(pi)/pi)",
           err <= 1e-6 and nc.bracket_width <= 1e-6 and elapsed < 1, elapsed, 1,
           f"error {err:.3g}, bracket width {nc.bracket_width:.3g}")


def test_criterion_5_three_dvar_blow_up(report):
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    s = PowerLaw(1, 2)
    prob = AssimilationProblem(s, s, CoeffSeq(tail=PowerTail(1, 1, 1)))
    infeasible = not three_dvar_feasible(prob).feasible
    costs = []
    for trial in range(100):
        x = random_data(rng, with_tail=False)
        if trial % 2:
            # candidates with a tail must share the data's decay to be comparable
            x = x + CoeffSeq(tail=PowerTail(float(rng.uniform(-3, 3)) or 1.0, 1, 1))
        costs.append(three_dvar_cost(x, prob))
    elapsed = time.perf_counter() - start
    all_inf = all(c == math.inf for c in costs)
    report(5, "3DVAR infeasible and cost = +inf for 100 candidates",
           infeasible and all_inf and elapsed < 2, elapsed, 2,
           f"infeasible={infeasible}, all costs infinite={all_inf}")


def test_criterion_6_three_dvar_bayes_agreement(report):
    rng = np.random.default_rng(6)
    priors = [PowerLaw(c, a) for c in (0.5, 1, 2) for a in (1.5, 2, 3)] + \
             [Exponential(c, q) for c in (1, 3) for q in (0.3, 0.7)]
    noises = [Constant(c) for c in (0.1, 1, 5)] + [PowerLaw(c, a) for c in (1, 2) for a in (0.5, 1, 2)] + \
             [Exponential(1, 0.9)]
    idx = np.arange(1, 61, dtype=float)
    start = time.perf_counter()
    checked, worst_mean, worst_prec = 0, 0.0, 0.0
    while checked < 1000:
        prior = priors[rng.integers(len(priors))]
        noise = noises[rng.integers(len(noises))]
        prob = AssimilationProblem(prior, noise, random_data(rng, False), prior_mean=random_data(rng, False))
        if not three_dvar_feasible(prob).feasible:
            continue
        result = posterior(prob)
        if not result.well_posed:
            continue
        checked += 1
        argmin = three_dvar_minimize(prob).argmin(idx)
        mean = result.posterior.mean(idx)
        scale = np.maximum(np.abs(prob.prior_mean.coefficients(idx)), np.abs(prob.data.coefficients(idx)))
        nz = scale > 0
        if nz.any():
            worst_mean = max(worst_mean, float(np.max(np.abs(argmin - mean)[nz] / scale[nz])))
        p, r = prior.eigenvalues(idx), noise.eigenvalues(idx)
        ok = (p > 1e-300) & (r > 1e-300)
        lhs = 1 / result.posterior.variance(idx[ok])
        rhs = 1 / p[ok] + 1 / r[ok]
        worst_prec = max(worst_prec, float(np.max(np.abs(lhs - rhs) / rhs)))
    elapsed = time.perf_counter() - start
    report(6, "3DVAR argmin equals posterior mean; precisions add",
           worst_mean <= 1e-12 and worst_prec <= 1e-12 and elapsed < 5, elapsed, 5,
           f"max rel. mean error {worst_mean:.3g}, max rel. precision error {worst_prec:.3g}")


def test_criterion_7_monte_carlo_oracle(report):
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    hits = 0
    for trial in range(20):
        scale = float(rng.uniform(0.5, 2))
        prior = [PowerLaw(scale, 2), PowerLaw(scale, 3), Exponential(scale, 0.6)][trial % 3]
        noise = [Constant(float(rng.uniform(0.5, 3))), PowerLaw(float(rng.uniform(1, 3)), 1)][trial % 2]
        y = CoeffSeq.from_values(rng.normal(0, 0.7, 10).tolist())
        prob = AssimilationProblem(prior, noise, y)
        est = mc_log_constant(prob, 10, 10**5, seed=trial)
        hits += abs(est.estimate - truncated_log_constant(prob, 10)) <= 3 * est.stderr
    elapsed = time.perf_counter() - start
    report(7, "Monte Carlo within 3 stderr of the truncated constant",
           hits >= 18 and elapsed < 60, elapsed, 60, f"{hits}/20 within 3 stderr")


def test_criterion_8_degeneracy_sweep(report):
    start = time.perf_counter()
    equal = ess_sweep(AssimilationProblem(PowerLaw(1, 2), PowerLaw(1, 2)), [10, 100], 10**4, seed=0)
    bounded = ess_sweep(AssimilationProblem(PowerLaw(1, 2), Constant(1)), [10, 100], 10**4, seed=0)
    elapsed = time.perf_counter() - start
    e10, e100 = equal.points[0].ess, equal.points[1].ess
    b10, b100 = bounded.points[0].ess, bounded.points[1].ess
    report(8, "ESS collapses for equal spectra, persists for bounded noise",
           e100 < e10 and b100 >= 0.5 * b10 and elapsed < 60, elapsed, 60,
           f"equal: {e10:.1f} -> {e100:.1f}; bounded: {b10:.1f} -> {b100:.1f}")


def test_criterion_9_cli_determinism(report, tmp_path):
    problems = {
        "dense": AssimilationProblem(PowerLaw(1, 4), PowerLaw(1, 2), CoeffSeq(((1, 0.5), (3, -2.0)))),
        "bounded": AssimilationProblem(PowerLaw(1, 2), Constant(1), CoeffSeq(tail=PowerTail(1, 1, 1))),
        "equal": AssimilationProblem(PowerLaw(1, 2), PowerLaw(1, 2)),
    }
    commands = [["classify"], ["constant"], ["constant", "--truncate", "50"],
                ["assimilate", "--modes", "1,2,3,10"], ["adversarial", "--delta", "0.25"],
                ["mc", "--truncate", "10", "--n", "5000", "--seed", "3"],
                ["sweep", "--dims", "5,20,80", "--n", "5000", "--seed", "3"]]
    runner = CliRunner()
    start = time.perf_counter()
    mismatches, runs = [], 0
    for name, prob in problems.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(prob.to_json()))
        for cmd in commands:
            first = runner.invoke(main, [cmd[0], str(path), *cmd[1:]])
            second = runner.invoke(main, [cmd[0], str(path), *cmd[1:]])
            runs += 1
            same = (first.exit_code == second.exit_code and first.stdout_bytes == second.stdout_bytes)
            if not same:
                mismatches.append(f"{name}:{cmd[0]}")
    elapsed = time.perf_counter() - start
    report(9, "CLI output byte-identical across re-runs", not mismatches, elapsed,
           detail=f"{runs} command/problem pairs, mismatches: {mismatches or 'none'}")

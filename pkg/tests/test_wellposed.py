import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_da import (
    AssimilationProblem,
    CoeffSeq,
    Constant,
    Exponential,
    LowerBoundPositive,
    PowerLaw,
    PowerTail,
    PriorNotTraceClass,
    classify_problem,
    construct_bad_data,
    log_norm_constant,
    posterior,
    problem_from_json,
    truncated_log_constant,
)

LOG_C_BASEL_PAIR = -0.5 * math.log(math.sinh(math.pi) / math.pi)

trace_class_priors = st.sampled_from([PowerLaw(1, 2), PowerLaw(1, 4), PowerLaw(3, 1.5), Exponential(1, 0.5)])
bounded_noise = st.builds(Constant, st.floats(0.05, 20))
finite_data = st.dictionaries(st.integers(1, 200), st.floats(-50, 50), max_size=10).map(
    lambda d: CoeffSeq(tuple(sorted((i, v) for i, v in d.items() if v != 0))))


def scan_indices(k_max, delta_sq_inv=1, after=0):
    """Exact-integer oracle for r_i = i^-2: smallest i > prev with i^2 >= 2^k / delta^2."""
    out, prev = [], after
    for k in range(1, k_max + 1):
        need = (2**k) * delta_sq_inv
        i = max(prev + 1, math.isqrt(need))
        while i * i < need:
            i += 1
        out.append(i)
        prev = i
    return out


def test_equal_spectra_give_negative_infinity():
    for s in (PowerLaw(1, 2), Exponential(1, 0.5), PowerLaw(2, 3)):
        for y in (CoeffSeq(), CoeffSeq.basis(1, 3.0)):
            nc = log_norm_constant(AssimilationProblem(s, s, y))
            assert nc.log_value == -math.inf
            assert not nc.well_posed


def test_closed_form_constant():
    nc = log_norm_constant(AssimilationProblem(PowerLaw(1, 2), Constant(1)))
    assert nc.well_posed
    assert nc.bracket_width <= 1e-6
    assert nc.log_value == pytest.approx(LOG_C_BASEL_PAIR, abs=1e-6)


def test_single_mode_constant():
    prob = AssimilationProblem(Constant(1), Constant(1), dimension=1)
    assert log_norm_constant(prob).log_value == pytest.approx(-0.5 * math.log(2), abs=1e-15)


def test_truncated_examples():
    prob = AssimilationProblem(PowerLaw(1, 2), PowerLaw(1, 2))
    assert truncated_log_constant(prob, 100) == pytest.approx(-50 * math.log(2), abs=1e-9)
    one = AssimilationProblem(Constant(1), Constant(1))
    assert truncated_log_constant(one, 1) == pytest.approx(-0.346574, abs=1e-6)
    with pytest.raises(ValueError):
        truncated_log_constant(prob, 0)


def test_nonzero_data_matches_scalar_formula():
    prob = AssimilationProblem(Constant(1), Constant(1), CoeffSeq.basis(1, 2.0), dimension=1)
    # -1/2 log 2 - 1/2 * 4/2
    assert log_norm_constant(prob).log_value == pytest.approx(-0.5 * math.log(2) - 1.0, abs=1e-15)


def test_classify_examples():
    rep = classify_problem(PowerLaw(1, 2), Constant(1))
    assert rep.well_posed_all_y and not rep.bad_set_dense
    rep = classify_problem(PowerLaw(1, 4), PowerLaw(1, 2))
    assert not rep.well_posed_all_y and rep.bad_set_dense
    assert not rep.measures_equivalent
    rep = classify_problem(PowerLaw(1, 2), PowerLaw(1, 2))
    assert rep.measures_equivalent


def test_classify_requires_trace_class_prior():
    with pytest.raises(PriorNotTraceClass):
        classify_problem(Constant(1), Constant(1))


def test_mean_outside_cameron_martin_breaks_equivalence():
    rep = classify_problem(PowerLaw(1, 2), PowerLaw(1, 2), CoeffSeq(tail=PowerTail(1, 1, 1)))
    assert not rep.measures_equivalent


def test_bad_data_indices_match_scan_oracle():
    bad = construct_bad_data(PowerLaw(1, 2), PowerLaw(1, 2), CoeffSeq(), 1.0)
    k = len(bad.indices)
    assert bad.indices == tuple(scan_indices(k))
    assert bad.indices[:10] == (2, 3, 4, 5, 6, 8, 12, 16, 23, 32)
    np.testing.assert_allclose(bad.data.coefficients(np.array(bad.indices[:5], dtype=float)),
                               [1 / 2, 1 / 3, 1 / 4, 1 / 5, 1 / 6], rtol=1e-15)
    assert bad.distance_sq() <= 1.0


def test_bad_data_at_smaller_delta_matches_oracle():
    bad = construct_bad_data(PowerLaw(1, 2), PowerLaw(1, 4), CoeffSeq(), 0.5)
    assert bad.indices == tuple(scan_indices(len(bad.indices), delta_sq_inv=4))


def test_bad_data_skips_support_of_base_point():
    z = CoeffSeq.basis(1, 1.0)
    bad = construct_bad_data(PowerLaw(1, 2), PowerLaw(1, 4), z, 0.5)
    assert bad.data.coefficient(1) == 1.0
    assert min(bad.indices) > 1
    assert math.sqrt(bad.distance_sq()) <= 0.5 + 1e-12
    prob = AssimilationProblem(PowerLaw(1, 4), PowerLaw(1, 2), bad)
    assert log_norm_constant(prob).log_value == -math.inf


def test_bad_data_rejected_for_bounded_noise():
    with pytest.raises(LowerBoundPositive):
        construct_bad_data(Constant(1), PowerLaw(1, 2), CoeffSeq(), 1.0)


def test_bad_data_needs_trace_class_prior():
    with pytest.raises(PriorNotTraceClass):
        construct_bad_data(PowerLaw(1, 2), Constant(1), CoeffSeq(), 1.0)


def test_bad_data_json_round_trip():
    bad = construct_bad_data(PowerLaw(1, 1), PowerLaw(1, 2), CoeffSeq.basis(2, 1.5), 0.1)
    prob = AssimilationProblem(PowerLaw(1, 2), PowerLaw(1, 1), bad)
    again = problem_from_json(prob.to_json())
    assert again.data.indices == bad.indices
    assert log_norm_constant(again).log_value == -math.inf


def test_divergence_rate_witness():
    p, r = PowerLaw(1, 4), PowerLaw(1, 2)
    bad = construct_bad_data(r, p, CoeffSeq(), 1.0)
    idx = np.array(bad.indices, dtype=float)
    terms = bad.data.coefficients(idx) ** 2 / (r.eigenvalues(idx) + p.eigenvalues(idx))
    partial = np.cumsum(terms)
    k = np.arange(1, len(idx) + 1)
    assert np.all(partial[4:] >= k[4:] / 2)


@pytest.mark.parametrize("prior", [PowerLaw(1, 2), Exponential(1, 0.5)])
def test_truncation_converges_to_full_constant(prior):
    prob = AssimilationProblem(prior, Constant(1), CoeffSeq.basis(2, 1.0))
    nc = log_norm_constant(prob)
    diffs = [abs(truncated_log_constant(prob, n) - nc.log_value) for n in (10, 100, 1000, 10**5)]
    assert all(a >= b for a, b in zip(diffs, diffs[1:]))
    # remainder of -1/2 sum log(1 + p_i) past N is at most 1/2 sum_{i>N} p_i
    n = 10**5
    remainder = 0.5 * (1 / n if isinstance(prior, PowerLaw) else 0.5**n)
    assert diffs[-1] <= remainder + nc.bracket_width


def test_stuart_fallback_and_finite_truncations():
    s = PowerLaw(1, 2)
    prob = AssimilationProblem(s, s, CoeffSeq.basis(1, 1.0))
    result = posterior(prob)
    assert not result.well_posed
    idx = np.arange(1, 6, dtype=float)
    np.testing.assert_array_equal(result.fallback.variance(idx), s.eigenvalues(idx))
    np.testing.assert_array_equal(result.fallback.mean(idx), np.zeros(5))
    for n in (1, 10, 1000):
        truncated = AssimilationProblem(s, s, CoeffSeq.basis(1, 1.0), dimension=n)
        assert math.isfinite(log_norm_constant(truncated).log_value)
        assert posterior(truncated).well_posed


@given(trace_class_priors, bounded_noise, finite_data)
@settings(max_examples=100, deadline=None)
def test_bounded_noise_always_well_posed(prior, noise, y):
    nc = log_norm_constant(AssimilationProblem(prior, noise, y))
    assert nc.well_posed
    assert nc.log_value <= 0.0


@given(trace_class_priors, st.sampled_from([PowerLaw(1, 1), PowerLaw(1, 2), PowerLaw(2, 3)]),
       finite_data, st.floats(0.01, 2.0))
@settings(max_examples=50, deadline=None)
def test_adversarial_distance_and_divergence(prior, noise, z, delta):
    bad = construct_bad_data(noise, prior, z, delta)
    assert math.sqrt(bad.distance_sq()) <= delta + 1e-12
    assert log_norm_constant(AssimilationProblem(prior, noise, bad)).log_value == -math.inf


@given(trace_class_priors, st.sampled_from([Constant(1), PowerLaw(1, 1), PowerLaw(1, 2), Exponential(2, 0.3)]))
def test_report_dichotomy(prior, noise):
    rep = classify_problem(prior, noise)
    assert rep.well_posed_all_y == (noise.lower_bound() > 0)
    assert rep.bad_set_dense == (noise.lower_bound() == 0)
    assert rep.well_posed_all_y != rep.bad_set_dense


@given(trace_class_priors, st.sampled_from([Constant(0.5), PowerLaw(1, 1), PowerLaw(1, 3)]),
       finite_data, st.integers(1, 50))
@settings(max_examples=50)
def test_truncated_constant_nonincreasing_and_nonpositive(prior, noise, y, n):
    prob = AssimilationProblem(prior, noise, y)
    a, b = truncated_log_constant(prob, n), truncated_log_constant(prob, n + 1)
    assert b <= a <= 0.0

"""Existence of the Bayesian posterior when prior and noise covariances commute.

With common eigenvectors, the normalization constant

    c(y) = int exp(-1/2 |y - x|^2_{R^-1}) dmu^f(x)

factors over modes into

    prod_i (1 + p_i/r_i)^(-1/2) exp(-(y_i - m_i)^2 / (2 (r_i + p_i)))

so ``log c(y)`` is minus one half of two nonnegative series.  The posterior
exists (``c(y) > 0``) exactly when both series converge.  For a trace-class
prior this holds for every ``y`` if and only if the noise eigenvalues are
bounded away from zero; otherwise :func:`construct_bad_data` builds, within
any distance ``delta`` of any finite-support ``z``, a data vector with
``c = 0``.
"""

from __future__ import annotations

import decimal
import functools
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .elements import (
    CoeffSeq,
    Converges,
    Diverges,
    SeriesVerdict,
    classify_series,
    coefficient_square_terms,
    coeffseq_from_json,
    spectrum_terms,
    weighted_norm_sq,
)
from .exceptions import LowerBoundPositive, PriorNotTraceClass
from .problem import AssimilationProblem
from .spectra import Exponential, PowerLaw, SpectrumModel, ratio_limit, tail_cutoff

__all__ = [
    "NormalizationConstant",
    "WellPosednessReport",
    "BadData",
    "log_norm_constant",
    "truncated_log_constant",
    "classify_problem",
    "construct_bad_data",
    "bad_data_from_json",
]

BAD_DATA_RULE = "corollary-5"
_MIN_MODES = 64
_EVIDENCE = 50.0
_MAX_MODES = 4096
_MAX_INDEX = 2 ** 1000


@dataclass(frozen=True)
class NormalizationConstant:
    """``log c(y)`` together with the two series that determine it."""

    log_value: float
    bracket_width: float
    log_det_series: SeriesVerdict
    data_series: SeriesVerdict
    certificates: tuple[str, ...] = ()

    @property
    def well_posed(self) -> bool:
        return self.log_value > -math.inf

    @property
    def value(self) -> float:
        """``c(y)`` itself, with ``exp(-inf) = 0``."""
        return math.exp(self.log_value)


@dataclass(frozen=True)
class WellPosednessReport:
    prior_trace_class: bool
    noise_lower_bound: float
    well_posed_all_y: bool
    bad_set_dense: bool
    measures_equivalent: bool
    certificates: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "prior_trace_class": self.prior_trace_class,
            "noise_lower_bound": self.noise_lower_bound,
            "well_posed_all_y": self.well_posed_all_y,
            "bad_set_dense": self.bad_set_dense,
            "measures_equivalent": self.measures_equivalent,
            "certificates": list(self.certificates),
        }


def _log_det_terms(prob: AssimilationProblem):
    p, r = spectrum_terms(prob.prior_spectrum), spectrum_terms(prob.noise_spectrum)
    return (p / r).log1p()


@functools.lru_cache(maxsize=256)
def _log_det_verdict(prior: SpectrumModel, noise: SpectrumModel, cutoff: int,
                     dimension: Optional[int]) -> SeriesVerdict:
    # independent of the data, so repeated calls on one spectral pair are cached
    return classify_series(_log_det_terms(AssimilationProblem(prior, noise)), cutoff, dimension)


@functools.lru_cache(maxsize=64)
def _variance_sum_terms(prior: SpectrumModel, noise: SpectrumModel):
    return (spectrum_terms(noise) + spectrum_terms(prior)).memoized()


def _data_terms(prob: AssimilationProblem):
    denominator = _variance_sum_terms(prob.prior_spectrum, prob.noise_spectrum)
    return coefficient_square_terms(prob.innovation()) / denominator


def log_norm_constant(prob: AssimilationProblem, cutoff: int | None = None) -> NormalizationConstant:
    """Certified ``log c(y)``; ``-inf`` exactly when the posterior does not exist.

    Both series carry a factor ``-1/2``, matching the logarithm of the
    per-mode Gaussian factors.
    """
    dim = prob.dimension
    cutoff = tail_cutoff() if cutoff is None else int(cutoff)
    log_det = _log_det_verdict(prob.prior_spectrum, prob.noise_spectrum, cutoff, dim)
    if isinstance(prob.data, BadData) and dim is None:
        data = prob.data.data_series(prob, cutoff)
    else:
        data = classify_series(_data_terms(prob), cutoff, dim)

    certs = [f"sum log(1 + p_i/r_i): {_describe(log_det)}",
             f"sum (y_i - m_i)^2/(r_i + p_i): {_describe(data)}"]
    if log_det.converges and data.converges:
        value = -0.5 * (log_det.value + data.value)
        width = 0.5 * (log_det.bracket_width + data.bracket_width)
        certs.append("both series converge: c(y) > 0, posterior well defined")
    else:
        value, width = -math.inf, 0.0
        certs.append("a series diverges: c(y) = 0, posterior undefined")
    return NormalizationConstant(value, width, log_det, data, tuple(certs))


def _describe(v: SeriesVerdict) -> str:
    if isinstance(v, Converges):
        return f"converges to {v.value:.17g} (bracket width {v.bracket_width:.3g}; {v.rule})"
    return f"diverges ({v.witness})"


def truncated_log_constant(prob: AssimilationProblem, n: int) -> float:
    """``log`` of the partial product over modes ``1..n`` (direct evaluation)."""
    if n < 1:
        raise ValueError(f"truncation must be >= 1, got {n}")
    if prob.dimension is not None:
        n = min(n, prob.dimension)
    idx = np.arange(1, n + 1, dtype=float)
    p = prob.prior_spectrum.eigenvalues(idx)
    r = prob.noise_spectrum.eigenvalues(idx)
    d = prob.data_coefficients.coefficients(idx) - prob.prior_mean.coefficients(idx)
    return float(-0.5 * np.sum(np.log1p(p / r) + d * d / (r + p)))


def classify_problem(prior_spectrum: SpectrumModel, noise_spectrum: SpectrumModel,
                     prior_mean: Optional[CoeffSeq] = None) -> WellPosednessReport:
    """Decide well-posedness for all data, density of the bad set, and equivalence.

    Raises
    ------
    PriorNotTraceClass
        If the prior covariance has infinite trace.
    """
    prior_mean = prior_mean if prior_mean is not None else CoeffSeq()
    if not prior_spectrum.is_trace_class:
        raise PriorNotTraceClass(
            f"prior covariance {prior_spectrum} has infinite trace; "
            "a Gaussian prior needs a trace-class covariance")
    certs = [f"prior trace = {prior_spectrum.trace():.17g} < inf"]
    lb = noise_spectrum.lower_bound()
    if lb > 0:
        certs.append(f"noise lower bound inf r_i = {lb:.17g} > 0: c(y) > 0 for every y")
    else:
        certs.append("noise lower bound inf r_i = 0: data with c(y) = 0 exist "
                     "within any distance of any point")

    # Feldman-Hajek in the common eigenbasis: sum (p_i/r_i - 1)^2 < inf and
    # the mean in the Cameron-Martin space of N(0, R).
    lim = ratio_limit(prior_spectrum, noise_spectrum)
    same_cov = prior_spectrum.same_tail(noise_spectrum)
    if same_cov:
        certs.append("p_i = r_i beyond a finite prefix: sum (p_i/r_i - 1)^2 is a finite sum")
    else:
        if lim.kind == "finite" and lim.value == 1.0:
            raise RuntimeError("p_i/r_i -> 1 with different tails is outside the model universe")
        certs.append(f"p_i/r_i -> {lim.value:.6g} != 1: sum (p_i/r_i - 1)^2 diverges")
    mean_cm = weighted_norm_sq(prior_mean, noise_spectrum)
    if math.isfinite(mean_cm):
        certs.append(f"|m^f|^2 in noise Cameron-Martin norm = {mean_cm:.17g} < inf")
    else:
        certs.append("m^f lies outside the noise Cameron-Martin space")
    equivalent = same_cov and math.isfinite(mean_cm)
    if equivalent:
        certs.append("prior and noise measures are equivalent: c(y) = 0 for every y")

    return WellPosednessReport(
        prior_trace_class=True,
        noise_lower_bound=lb,
        well_posed_all_y=lb > 0,
        bad_set_dense=lb == 0,
        measures_equivalent=equivalent,
        certificates=tuple(certs),
    )


# ---------------------------------------------------------------------------
# Adversarial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BadData:
    """A data vector with ``c(y) = 0``, materialized on its first modes.

    ``data`` holds ``z`` plus the entries on ``indices``; the infinite vector
    continues the same index rule (``r_{i_k} <= delta^2 / 2^k``) forever.
    """

    data: CoeffSeq
    base: CoeffSeq
    delta: float
    indices: tuple[int, ...]
    noise_spectrum: SpectrumModel
    prior_spectrum: SpectrumModel
    prior_mean: CoeffSeq = field(default_factory=CoeffSeq)
    certificate: str = ""
    rule: str = BAD_DATA_RULE

    def distance_sq(self) -> float:
        """``|data - base|^2`` of the materialized part."""
        return math.fsum(float(self.noise_spectrum.eigenvalues([float(i)])[0])
                         for i in self.indices)

    def data_series(self, prob: AssimilationProblem, cutoff: int | None = None) -> SeriesVerdict:
        """Verdict on ``sum (y_i - m_i)^2 / (r_i + p_i)`` for the infinite vector."""
        if (prob.noise_spectrum != self.noise_spectrum
                or prob.prior_spectrum != self.prior_spectrum
                or prob.prior_mean != self.prior_mean):
            raise ValueError("adversarial data was constructed for a different problem")
        lim = ratio_limit(self.prior_spectrum, self.noise_spectrum)
        if lim.kind == "infinite":
            # the log-determinant series already diverges; the materialized part is all we need
            return classify_series(_data_terms(prob), cutoff)
        return Diverges(
            f"on the subsequence {{i_k}} (y_i - m_i)^2 >= r_i, so terms >= 1/(1 + p_i/r_i) "
            f"-> {1.0 / (1.0 + lim.value):.6g} != 0 (term test); {self.certificate}")

    def to_json(self) -> dict[str, Any]:
        doc = self.data.to_json()
        doc["construction"] = {
            "delta": self.delta,
            "indices": list(self.indices),
            "rule": self.rule,
            "base": self.base.to_json(),
            "modes": len(self.indices),
        }
        return doc


_EXACT_BITS = 1 << 20  # size limit for exact rational powers
_LOG_PREC = 120


def _tail_at_most(r: SpectrumModel, i: int, threshold: Fraction) -> bool:
    """Exact test of ``r_i <= threshold`` on the tail of a decaying family."""
    scale = Fraction(r.scale)
    if isinstance(r, PowerLaw):
        a = Fraction(r.exponent)
        # scale * i^(-a) <= t  <=>  scale^q <= t^q * i^p  with a = p/q
        if a.denominator <= 64 and a.numerator * i.bit_length() <= _EXACT_BITS:
            q = a.denominator
            return scale ** q <= threshold ** q * i ** a.numerator
        return _log_at_most(r, i, threshold)
    if isinstance(r, Exponential):
        q = Fraction(r.ratio)
        if i * q.denominator.bit_length() <= _EXACT_BITS:
            return scale * q ** i <= threshold
        return _log_at_most(r, i, threshold)
    return scale <= threshold


def _log_at_most(r: SpectrumModel, i: int, threshold: Fraction) -> bool:
    with decimal.localcontext() as ctx:
        ctx.prec = _LOG_PREC
        lhs = Decimal(r.scale).ln()
        if isinstance(r, PowerLaw):
            lhs -= Decimal(r.exponent) * Decimal(i).ln()
        else:
            lhs += Decimal(i) * Decimal(r.ratio).ln()
        rhs = Decimal(threshold.numerator).ln() - Decimal(threshold.denominator).ln()
        return lhs <= rhs


def _first_index_below(r: SpectrumModel, threshold: Fraction, after: int) -> int:
    """Smallest index ``i > after`` with ``r_i <= threshold``, decided exactly."""
    for i in range(after + 1, len(r.prefix) + 1):
        if Fraction(r.prefix[i - 1]) <= threshold:
            return i
    lo = max(after + 1, r.tail_start)
    if _tail_at_most(r, lo, threshold):
        return lo
    a = r.asymptotic
    # float solution of log C - power*log(i) + log_base*i = log threshold
    target = _log_fraction(threshold) - a.log_coef
    if a.log_base < 0:
        guess = target / a.log_base
    else:
        log_guess = -target / a.power
        if log_guess > math.log(_MAX_INDEX):
            return _MAX_INDEX
        guess = math.exp(log_guess)
    if guess >= _MAX_INDEX:
        return _MAX_INDEX
    hi = max(lo + 1, int(math.ceil(guess)))
    while not _tail_at_most(r, hi, threshold):
        hi = 2 * hi
        if hi >= _MAX_INDEX:
            return _MAX_INDEX
    below = hi - max(2, hi >> 40)
    if below > lo and not _tail_at_most(r, below, threshold):
        lo = below
    # invariant: r_lo > threshold >= r_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _tail_at_most(r, mid, threshold):
            hi = mid
        else:
            lo = mid
    return hi


def _log_fraction(x: Fraction) -> float:
    return (math.log(x.numerator) - math.log(x.denominator))


def construct_bad_data(noise_spectrum: SpectrumModel, prior_spectrum: SpectrumModel,
                       z: Optional[CoeffSeq] = None, delta: float = 1.0,
                       prior_mean: Optional[CoeffSeq] = None) -> BadData:
    """Perturb ``z`` by at most ``delta`` into a vector with ``c = 0``.

    Picks ``i_1 < i_2 < ...`` past the support of ``z``, each the smallest
    index with ``r_{i_k} <= delta**2 / 2**k``, and adds ``+-sqrt(r_{i_k})`` there.
    The sign is chosen against ``prior_mean`` so ``|y_i - m_i| >= sqrt(r_i)``.

    Raises
    ------
    LowerBoundPositive
        If ``inf r_i > 0``: then no such vector exists.
    PriorNotTraceClass
        If the prior covariance has infinite trace.
    """
    z = z if z is not None else CoeffSeq()
    prior_mean = prior_mean if prior_mean is not None else CoeffSeq()
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if z.tail is not None:
        raise ValueError("z must have finite support")
    lb = noise_spectrum.lower_bound()
    if lb > 0:
        raise LowerBoundPositive(
            f"noise lower bound is {lb:.6g} > 0: c(y) > 0 for every data vector")
    if not prior_spectrum.is_trace_class:
        raise PriorNotTraceClass(f"prior covariance {prior_spectrum} has infinite trace")

    lim = ratio_limit(prior_spectrum, noise_spectrum)
    want_evidence = lim.kind != "infinite"
    last = max(z.support_indices, default=0)
    indices: list[int] = []
    evidence = 0.0
    capped = False
    k = 0
    while True:
        k += 1
        nxt = _first_index_below(noise_spectrum, Fraction(delta) ** 2 / 2 ** k,
                                 indices[-1] if indices else last)
        if nxt >= _MAX_INDEX:
            capped = True
            break
        indices.append(nxt)
        x = float(nxt)
        evidence += 1.0 / (1.0 + prior_spectrum.eigenvalues([x])[0]
                           / noise_spectrum.eigenvalues([x])[0])
        if len(indices) >= _MIN_MODES and (not want_evidence or evidence >= _EVIDENCE):
            break
        if len(indices) >= _MAX_MODES:
            capped = True
            break

    idx = np.array(indices, dtype=float)
    root_r = np.sqrt(noise_spectrum.eigenvalues(idx))
    m = prior_mean.coefficients(idx)
    signs = np.where(m > 0, -1.0, 1.0)
    bumps = CoeffSeq(tuple(zip(indices, (signs * root_r).tolist())))
    data = z + bumps

    if want_evidence:
        cert = (f"{len(indices)} modes materialized; partial data series >= {evidence:.6g}"
                + (" (capped)" if capped else ""))
    else:
        cert = (f"{len(indices)} modes materialized; p_i/r_i -> inf so the "
                "log-determinant series diverges for every data vector")
    return BadData(data, z, float(delta), tuple(indices), noise_spectrum, prior_spectrum,
                   prior_mean, cert)


def bad_data_from_json(doc: dict[str, Any], noise_spectrum: SpectrumModel,
                       prior_spectrum: SpectrumModel, prior_mean: CoeffSeq) -> BadData:
    """Rebuild a :class:`BadData` from its JSON form by re-running the construction."""
    meta = doc.get("construction")
    if not isinstance(meta, dict) or meta.get("rule") != BAD_DATA_RULE:
        raise ValueError(f"construction block must carry rule {BAD_DATA_RULE!r}")
    extra = set(meta) - {"delta", "indices", "rule", "base", "modes"}
    if extra:
        raise ValueError(f"unexpected keys in construction block: {sorted(extra)}")
    base = coeffseq_from_json(meta.get("base", {"support": []}))
    bad = construct_bad_data(noise_spectrum, prior_spectrum, base, float(meta["delta"]),
                             prior_mean)
    if list(bad.indices) != [int(i) for i in meta.get("indices", bad.indices)]:
        raise ValueError("construction block does not reproduce the recorded indices")
    stored = coeffseq_from_json({k: v for k, v in doc.items() if k != "construction"})
    if stored.support_indices != bad.data.support_indices:
        raise ValueError("stored coefficients disagree with the construction")
    return bad

"""3DVAR, Kalman and Bayesian updates when every covariance is diagonal.

The observation operator is the identity, so each update decouples into
independent scalar problems, one per eigenmode:

* 3DVAR minimizes ``(x_i - xf_i)^2 / b_i + (y_i - x_i)^2 / r_i``;
* the Kalman gain is ``k_i = p_i / (p_i + r_i)``;
* the Bayesian posterior has mean ``m_i + k_i (y_i - m_i)`` and variance
  ``(1/p_i + 1/r_i)^-1``, provided ``c(y) > 0``.

When ``c(y) = 0`` the posterior is replaced by the prior (the data are
ignored), and the result is flagged as ill posed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, ClassVar, Union

import numpy as np

from .elements import (
    CoeffSeq,
    classify_series,
    coefficient_square_terms,
    spectrum_terms,
    weighted_norm_sq,
)
from .exceptions import InfeasibleProblem
from .problem import AssimilationProblem
from .wellposed import log_norm_constant

__all__ = [
    "PosteriorSpec",
    "WellPosed",
    "IllPosed",
    "PosteriorResult",
    "Feasibility",
    "ThreeDVarSolution",
    "kalman_gain_mode",
    "kalman_gains",
    "three_dvar_cost",
    "three_dvar_feasible",
    "three_dvar_minimize",
    "posterior",
]

ModeFn = Callable[[np.ndarray], np.ndarray]


def kalman_gain_mode(p: float, r: float) -> float:
    """Scalar Kalman gain ``p / (p + r)`` for one mode."""
    if not (p > 0 and r > 0):
        raise ValueError(f"variances must be positive, got p={p}, r={r}")
    return p / (p + r)


def kalman_gains(prob: AssimilationProblem, idx) -> np.ndarray:
    """Per-mode gains ``p_i / (p_i + r_i)``, evaluated stably in log domain."""
    idx = np.asarray(idx, dtype=float)
    lp = prob.prior_spectrum.log_eigenvalues(idx)
    lr = prob.noise_spectrum.log_eigenvalues(idx)
    return 1.0 / (1.0 + np.exp(lr - lp))


@dataclass(frozen=True)
class PosteriorSpec:
    """Per-mode Gaussian: ``mean(i)`` and ``variance(i)`` at any modes.

    ``indices`` are the modes where the data or prior mean have explicit
    support; ``means`` and ``variances`` materialize the maps there.
    """

    mean: ModeFn
    variance: ModeFn
    indices: np.ndarray

    @property
    def means(self) -> np.ndarray:
        return self.mean(self.indices)

    @property
    def variances(self) -> np.ndarray:
        return self.variance(self.indices)

    @classmethod
    def prior(cls, prob: AssimilationProblem) -> PosteriorSpec:
        """The prior itself, used when the data must be ignored."""
        return cls(mean=lambda i: prob.prior_mean.coefficients(i),
                   variance=lambda i: prob.prior_spectrum.eigenvalues(i),
                   indices=_support_union(prob))


def _support_union(prob: AssimilationProblem) -> np.ndarray:
    idx = set(prob.prior_mean.support_indices) | set(prob.data_coefficients.support_indices)
    if prob.dimension is not None:
        idx = {i for i in idx if i <= prob.dimension}
    return np.array(sorted(idx), dtype=float)


def _posterior_spec(prob: AssimilationProblem) -> PosteriorSpec:
    y, m = prob.data_coefficients, prob.prior_mean

    def mean(i):
        i = np.asarray(i, dtype=float)
        mi = m.coefficients(i)
        return mi + kalman_gains(prob, i) * (y.coefficients(i) - mi)

    def variance(i):
        i = np.asarray(i, dtype=float)
        lp = prob.prior_spectrum.log_eigenvalues(i)
        lr = prob.noise_spectrum.log_eigenvalues(i)
        return np.exp(lp + lr - np.logaddexp(lp, lr))

    return PosteriorSpec(mean, variance, _support_union(prob))


@dataclass(frozen=True)
class WellPosed:
    posterior: PosteriorSpec
    log_c: float
    bracket_width: float
    certificates: tuple[str, ...]
    well_posed: ClassVar[bool] = True


@dataclass(frozen=True)
class IllPosed:
    """``c(y) = 0``: the posterior does not exist and ``fallback`` is the prior."""

    certificates: tuple[str, ...]
    fallback: PosteriorSpec
    well_posed: ClassVar[bool] = False


PosteriorResult = Union[WellPosed, IllPosed]


def posterior(prob: AssimilationProblem) -> PosteriorResult:
    """Bayesian update of the prior by the data, or the prior if ``c(y) = 0``."""
    nc = log_norm_constant(prob)
    if nc.well_posed:
        return WellPosed(_posterior_spec(prob), nc.log_value, nc.bracket_width, nc.certificates)
    return IllPosed(nc.certificates, PosteriorSpec.prior(prob))


# ---------------------------------------------------------------------------
# 3DVAR
# ---------------------------------------------------------------------------


def three_dvar_cost(x: CoeffSeq, prob: AssimilationProblem) -> float:
    """``|x - x^f|^2_{B^-1} + |y - x|^2_{R^-1}`` with ``inf`` outside the Cameron-Martin spaces."""
    dim = prob.dimension
    increment, residual = x - prob.prior_mean, prob.data_coefficients - x
    background = weighted_norm_sq(increment, prob.prior_spectrum, dimension=dim)
    if math.isinf(background):
        return math.inf
    return background + weighted_norm_sq(residual, prob.noise_spectrum, dimension=dim)


@dataclass(frozen=True)
class Feasibility:
    """Whether some state has finite 3DVAR cost; ``min_cost`` is ``inf`` otherwise."""

    feasible: bool
    certificate: str
    min_cost: float
    bracket_width: float = 0.0

    def __bool__(self) -> bool:
        return self.feasible


def three_dvar_feasible(prob: AssimilationProblem) -> Feasibility:
    """Exact test: the cost is finite somewhere iff ``sum (y_i - xf_i)^2 / (b_i + r_i) < inf``.

    Each mode contributes at least ``(y_i - xf_i)^2 / (b_i + r_i)``, attained by
    the per-mode minimizer, which stays in the space.
    """
    b, r = spectrum_terms(prob.prior_spectrum), spectrum_terms(prob.noise_spectrum)
    terms = coefficient_square_terms(prob.innovation()) / (b + r)
    verdict = classify_series(terms, dimension=prob.dimension)
    if verdict.converges:
        return Feasibility(True, f"sum (y_i - xf_i)^2/(b_i + r_i) converges: {verdict.rule}",
                           verdict.value, verdict.bracket_width)
    return Feasibility(False, f"sum (y_i - xf_i)^2/(b_i + r_i) diverges: {verdict.witness}",
                       math.inf)


@dataclass(frozen=True)
class ThreeDVarSolution:
    argmin: ModeFn
    cost: float
    bracket_width: float
    indices: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.argmin(self.indices)


def three_dvar_minimize(prob: AssimilationProblem) -> ThreeDVarSolution:
    """Per-mode minimizer ``(r_i xf_i + b_i y_i) / (b_i + r_i)`` and the minimal cost.

    Raises
    ------
    InfeasibleProblem
        If the cost is infinite for every state.
    """
    feas = three_dvar_feasible(prob)
    if not feas.feasible:
        raise InfeasibleProblem(feas.certificate)
    xf, y = prob.prior_mean, prob.data_coefficients

    def argmin(i):
        i = np.asarray(i, dtype=float)
        lb = prob.prior_spectrum.log_eigenvalues(i)
        lr = prob.noise_spectrum.log_eigenvalues(i)
        w_background = 1.0 / (1.0 + np.exp(lb - lr))  # r / (b + r)
        w_data = 1.0 / (1.0 + np.exp(lr - lb))  # b / (b + r)
        return w_background * xf.coefficients(i) + w_data * y.coefficients(i)

    return ThreeDVarSolution(argmin, feas.min_cost, feas.bracket_width, _support_union(prob))

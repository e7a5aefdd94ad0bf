"""Monte Carlo oracles for the truncated normalization constant.

Prior draws come from a counter-based stream: the Philox generator keyed by
``(seed, mode)`` yields, for draw ``j``, the two 64-bit words at counter
positions ``2j`` and ``2j + 1``, which the Box-Muller transform maps to one
standard normal.  Draw ``j`` of mode ``i`` therefore depends only on
``(seed, j, i)``: enlarging the dimension or the sample count appends draws
without changing existing ones.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .problem import AssimilationProblem

__all__ = [
    "SampleBatch",
    "MCEstimate",
    "EssPoint",
    "EssCurve",
    "standard_normals",
    "sample_prior",
    "log_weights",
    "mc_log_constant",
    "effective_sample_size",
    "ess_sweep",
]

_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 2.0 ** 53


def standard_normals(seed: int, mode: int, n: int) -> np.ndarray:
    """First ``n`` standard normals of the stream for ``(seed, mode)``."""
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    bitgen = np.random.Philox(key=seed + (mode << 64))
    raw = bitgen.random_raw(2 * n).reshape(n, 2)
    # 53-bit uniforms on (0, 1]; the first one feeds the log
    u1 = ((raw[:, 0] >> np.uint64(11)).astype(float) + 1.0) * _INV_2_53
    u2 = (raw[:, 1] >> np.uint64(11)).astype(float) * _INV_2_53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)


@dataclass(frozen=True)
class SampleBatch:
    """``samples[j, i - 1]`` is draw ``j`` of mode ``i`` from the prior."""

    dimension: int
    count: int
    seed: int
    samples: np.ndarray


def sample_prior(prob: AssimilationProblem, n_modes: int, n: int, seed: int) -> SampleBatch:
    """Draw ``n`` prior samples truncated to the first ``n_modes`` modes."""
    if n_modes < 1 or n < 1:
        raise ValueError(f"need n_modes >= 1 and n >= 1, got {n_modes}, {n}")
    idx = np.arange(1, n_modes + 1, dtype=float)
    std = np.sqrt(prob.prior_spectrum.eigenvalues(idx))
    mean = prob.prior_mean.coefficients(idx)
    z = np.column_stack([standard_normals(seed, i, n) for i in range(1, n_modes + 1)])
    return SampleBatch(n_modes, n, seed, mean + std * z)


def log_weights(prob: AssimilationProblem, batch: SampleBatch) -> np.ndarray:
    """Per-draw log-likelihoods ``-sum_i (y_i - x_i)^2 / (2 r_i)``."""
    return _cumulative_log_weights(prob, batch)[:, -1]


def _cumulative_log_weights(prob: AssimilationProblem, batch: SampleBatch) -> np.ndarray:
    idx = np.arange(1, batch.dimension + 1, dtype=float)
    r = prob.noise_spectrum.eigenvalues(idx)
    y = prob.data_coefficients.coefficients(idx)
    per_mode = -0.5 * (y - batch.samples) ** 2 / r
    return np.cumsum(per_mode, axis=1)


class MCEstimate(NamedTuple):
    estimate: float
    stderr: float


def _log_mean_and_stderr(lw: np.ndarray) -> MCEstimate:
    n = lw.size
    shift = float(np.max(lw))
    w = np.exp(lw - shift)
    mean = float(np.mean(w))
    sd = float(np.std(w, ddof=1)) if n > 1 else 0.0
    # delta method: Var(log W_bar) ~ Var(W) / (n W_bar^2)
    return MCEstimate(shift + math.log(mean), sd / (math.sqrt(n) * mean))


def mc_log_constant(prob: AssimilationProblem, n_modes: int, n: int, seed: int) -> MCEstimate:
    """Monte Carlo estimate of ``log c_N(y) = log E[exp(-1/2 |y - X|^2_{R^-1})]`` over ``N`` modes."""
    return _log_mean_and_stderr(log_weights(prob, sample_prior(prob, n_modes, n, seed)))


def effective_sample_size(lw: np.ndarray) -> float:
    """``(sum w)^2 / sum w^2`` from log-weights, computed with a max shift."""
    return float(np.exp(2.0 * logsumexp(lw) - logsumexp(2.0 * lw)))


class EssPoint(NamedTuple):
    dimension: int
    ess: float
    mean_log_weight: float
    stderr: float


@dataclass(frozen=True)
class EssCurve:
    seed: int
    count: int
    points: tuple[EssPoint, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["N", "ess", "mean_log_weight", "stderr", "seed"])
        for p in self.points:
            writer.writerow([p.dimension, _fmt(p.ess), _fmt(p.mean_log_weight),
                             _fmt(p.stderr), self.seed])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def ess_sweep(prob: AssimilationProblem, dims: Sequence[int], n: int, seed: int) -> EssCurve:
    """Effective sample size of the likelihood weights at each truncation in ``dims``.

    One batch at the largest dimension is drawn; smaller truncations reuse
    its leading modes, which is exactly what separate draws would give.
    """
    dims = [int(d) for d in dims]
    if not dims or any(b <= a for a, b in zip(dims, dims[1:])) or dims[0] < 1:
        raise ValueError(f"dims must be positive and strictly increasing, got {dims}")
    batch = sample_prior(prob, dims[-1], n, seed)
    cum = _cumulative_log_weights(prob, batch)
    points = []
    for d in dims:
        lw = cum[:, d - 1]
        est = _log_mean_and_stderr(lw)
        points.append(EssPoint(d, effective_sample_size(lw), float(np.mean(lw)), est.stderr))
    return EssCurve(seed, n, tuple(points))

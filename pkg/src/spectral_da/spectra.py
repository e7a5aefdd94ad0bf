"""Covariance operators represented by eigenvalue sequences.

All covariances share one orthonormal eigenbasis ``{e_i}``, ``i >= 1``, so a
covariance is fully described by its eigenvalues.  Three decay families are
supported, each optionally overridden on the leading modes by an explicit
``prefix``.

>>> PowerLaw(1.0, 2.0).eigenvalue(3)
0.1111111111111111
>>> Constant(0.3).lower_bound()
0.3
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from ._asymptotics import Asymptotic

__all__ = [
    "SpectrumModel",
    "PowerLaw",
    "Exponential",
    "Constant",
    "RatioLimit",
    "ratio_limit",
    "spectrum_from_json",
    "tail_cutoff",
    "DEFAULT_TAIL_CUTOFF",
]

DEFAULT_TAIL_CUTOFF = 100_000


def tail_cutoff() -> int:
    """Partial-sum length used before switching to integral tail bounds.

    Reads ``SPECTRAL_DA_TAIL_CUTOFF`` so a whole run can be re-tuned
    without touching call sites.
    """
    raw = os.environ.get("SPECTRAL_DA_TAIL_CUTOFF")
    if raw is None:
        return DEFAULT_TAIL_CUTOFF
    value = int(raw)
    if value < 1:
        raise ValueError(f"SPECTRAL_DA_TAIL_CUTOFF must be >= 1, got {raw!r}")
    return value


@dataclass(frozen=True)
class SpectrumModel:
    """Base class; use :class:`PowerLaw`, :class:`Exponential` or :class:`Constant`."""

    scale: float
    prefix: tuple[float, ...] = field(default=(), kw_only=True)

    def __post_init__(self):
        prefix = tuple(float(v) for v in self.prefix)
        if any(not (v > 0 and math.isfinite(v)) for v in prefix):
            raise ValueError(f"prefix eigenvalues must be positive and finite: {prefix}")
        object.__setattr__(self, "prefix", prefix)
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be positive and finite, got {self.scale}")

    # -- family hooks -------------------------------------------------------

    def tail(self, x) -> np.ndarray:
        """Family formula at (real) positions ``x``, prefix ignored."""
        raise NotImplementedError

    def log_tail(self, x) -> np.ndarray:
        raise NotImplementedError

    @property
    def asymptotic(self) -> Asymptotic:
        raise NotImplementedError

    def _canonical_tail(self) -> tuple:
        raise NotImplementedError

    # -- evaluation ---------------------------------------------------------

    @property
    def tail_start(self) -> int:
        """First mode at which the family formula applies."""
        return len(self.prefix) + 1

    def log_eigenvalues(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=float)
        out = self.log_tail(idx)
        if self.prefix:
            head = idx < self.tail_start
            if np.any(head):
                logs = np.log(np.asarray(self.prefix))
                pos = np.clip(idx, 1, len(logs)).astype(np.int64) - 1
                out = np.where(head, logs[pos], out)
        return out

    def eigenvalues(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=float)
        out = self.tail(idx)
        if self.prefix:
            head = idx < self.tail_start
            if np.any(head):
                vals = np.asarray(self.prefix)
                pos = np.clip(idx, 1, len(vals)).astype(np.int64) - 1
                out = np.where(head, vals[pos], out)
        return out

    def eigenvalue(self, i: int) -> float:
        if i < 1:
            raise ValueError(f"mode index must be >= 1, got {i}")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return float(self.tail(np.array([float(i)]))[0])

    # -- analytic questions -------------------------------------------------

    def trace(self) -> float:
        """Sum of all eigenvalues; ``inf`` when the operator is not trace class."""
        lo, hi = self.trace_bracket()
        return 0.5 * (lo + hi) if math.isfinite(hi) else math.inf

    def trace_bracket(self, cutoff: int | None = None) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def is_trace_class(self) -> bool:
        return math.isfinite(self.trace_bracket()[1])

    def lower_bound(self) -> float:
        """Infimum of the eigenvalues (the best constant ``alpha`` in ``<Ru,u> >= alpha|u|^2``)."""
        family_inf = self._family_infimum()
        return min((family_inf, *self.prefix))

    def _family_infimum(self) -> float:
        raise NotImplementedError

    def same_tail(self, other: SpectrumModel) -> bool:
        """True when both models agree at every mode past their prefixes."""
        return self._canonical_tail() == other._canonical_tail()

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError

    def _with_prefix(self, doc: dict[str, Any]) -> dict[str, Any]:
        if self.prefix:
            doc["prefix"] = list(self.prefix)
        return doc


@dataclass(frozen=True)
class PowerLaw(SpectrumModel):
    """Eigenvalues ``scale * i**(-exponent)``."""

    scale: float
    exponent: float

    def __post_init__(self):
        super().__post_init__()
        if not (self.exponent >= 0 and math.isfinite(self.exponent)):
            raise ValueError(f"PowerLaw exponent must be >= 0, got {self.exponent}")

    def tail(self, x):
        return self.scale * np.asarray(x, dtype=float) ** (-self.exponent)

    def log_tail(self, x):
        x = np.asarray(x, dtype=float)
        return math.log(self.scale) - self.exponent * np.log(x)

    @property
    def asymptotic(self):
        return Asymptotic(math.log(self.scale), self.exponent, 0.0)

    def _canonical_tail(self):
        if self.exponent == 0:
            return ("const", self.scale)
        return ("power", self.scale, self.exponent)

    def _family_infimum(self):
        return self.scale if self.exponent == 0 else 0.0

    def trace_bracket(self, cutoff=None):
        if self.exponent <= 1:
            return math.inf, math.inf
        n0 = max(cutoff or tail_cutoff(), len(self.prefix))
        a, c = self.exponent, self.scale
        idx = np.arange(self.tail_start, n0 + 1, dtype=float)
        partial = math.fsum(self.prefix) + math.fsum(c * idx ** (-a))
        lo = partial + c * (n0 + 1) ** (1 - a) / (a - 1)
        hi = partial + c * n0 ** (1 - a) / (a - 1)
        slack = n0 * float(np.finfo(float).eps) * hi
        return float(lo - slack), float(hi + slack)

    def to_json(self):
        return self._with_prefix({"family": "power", "scale": self.scale,
                                  "exponent": self.exponent})


@dataclass(frozen=True)
class Exponential(SpectrumModel):
    """Eigenvalues ``scale * ratio**i`` with ``0 < ratio < 1``."""

    scale: float
    ratio: float

    def __post_init__(self):
        super().__post_init__()
        if not 0 < self.ratio < 1:
            raise ValueError(f"Exponential ratio must lie in (0, 1), got {self.ratio}")

    def tail(self, x):
        return self.scale * self.ratio ** np.asarray(x, dtype=float)

    def log_tail(self, x):
        x = np.asarray(x, dtype=float)
        return math.log(self.scale) + x * math.log(self.ratio)

    @property
    def asymptotic(self):
        return Asymptotic(math.log(self.scale), 0.0, math.log(self.ratio))

    def _canonical_tail(self):
        return ("exp", self.scale, self.ratio)

    def _family_infimum(self):
        return 0.0

    def trace_bracket(self, cutoff=None):
        m = len(self.prefix)
        value = math.fsum(self.prefix) + self.scale * self.ratio ** (m + 1) / (1 - self.ratio)
        return value, value

    def to_json(self):
        return self._with_prefix({"family": "exp", "scale": self.scale, "ratio": self.ratio})


@dataclass(frozen=True)
class Constant(SpectrumModel):
    """Every eigenvalue equals ``scale`` (white noise when ``scale == 1``)."""

    scale: float

    def tail(self, x):
        return np.full(np.shape(x), self.scale)

    def log_tail(self, x):
        return np.full(np.shape(x), math.log(self.scale))

    @property
    def asymptotic(self):
        return Asymptotic(math.log(self.scale))

    def _canonical_tail(self):
        return ("const", self.scale)

    def _family_infimum(self):
        return self.scale

    def trace_bracket(self, cutoff=None):
        return math.inf, math.inf

    def to_json(self):
        return self._with_prefix({"family": "const", "scale": self.scale})


class RatioLimit(NamedTuple):
    """Limit of ``p_i / r_i``; ``kind`` is ``"zero"``, ``"finite"`` or ``"infinite"``."""

    kind: str
    value: float


def ratio_limit(p: SpectrumModel, r: SpectrumModel) -> RatioLimit:
    """Classify ``lim p_i / r_i`` from the two family tails (prefixes never matter)."""
    lim = (p.asymptotic / r.asymptotic).limit()
    if lim == 0.0:
        return RatioLimit("zero", 0.0)
    if math.isinf(lim):
        return RatioLimit("infinite", math.inf)
    return RatioLimit("finite", lim)


_FAMILY_KEYS = {
    "power": {"family", "scale", "exponent", "prefix"},
    "exp": {"family", "scale", "ratio", "prefix"},
    "const": {"family", "scale", "prefix"},
}


def spectrum_from_json(doc: dict[str, Any]) -> SpectrumModel:
    """Inverse of ``SpectrumModel.to_json``; raises ``ValueError`` on bad input."""
    if not isinstance(doc, dict):
        raise ValueError(f"spectrum must be a JSON object, got {type(doc).__name__}")
    family = doc.get("family")
    if family not in _FAMILY_KEYS:
        raise ValueError(f"unknown spectrum family {family!r}")
    extra = set(doc) - _FAMILY_KEYS[family]
    if extra:
        raise ValueError(f"unexpected keys for {family!r} spectrum: {sorted(extra)}")
    prefix = tuple(doc.get("prefix", ()))
    try:
        if family == "power":
            return PowerLaw(float(doc["scale"]), float(doc["exponent"]), prefix=prefix)
        if family == "exp":
            return Exponential(float(doc["scale"]), float(doc["ratio"]), prefix=prefix)
        return Constant(float(doc["scale"]), prefix=prefix)
    except KeyError as exc:
        raise ValueError(f"{family!r} spectrum is missing {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ValueError(str(exc)) from None

"""Hilbert-space elements as coefficient sequences, and certified series sums.

An element ``x`` is stored through its coefficients ``x_i = <x, e_i>`` in the
shared eigenbasis: finitely many explicit entries plus an optional power
tail ``c * i**(-s)``.  Every norm or cost in this package is a series of
nonnegative terms built from such coefficients and the eigenvalue
families of :mod:`spectral_da.spectra`.  :class:`TermModel` describes such a
series symbolically, and :func:`classify_series` decides convergence from
the leading asymptotics (never from floating-point partial sums) and, when
the series converges, returns a value enclosed by a partial sum plus
integral tail bounds.

Extended reals are plain Python floats: ``inf`` stands for a divergent
nonnegative series and ``math.exp(-math.inf) == 0.0``.
"""

from __future__ import annotations

import functools
import math
import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable, ClassVar, Iterable, Optional, Union

import numpy as np

from ._asymptotics import ZERO, Asymptotic
from .exceptions import TailMismatch
from .spectra import SpectrumModel, tail_cutoff

__all__ = [
    "PowerTail",
    "CoeffSeq",
    "TermModel",
    "Converges",
    "Diverges",
    "SeriesVerdict",
    "classify_series",
    "coefficient_square_terms",
    "spectrum_terms",
    "weighted_norm_terms",
    "norm_sq",
    "weighted_norm_sq",
    "coeffseq_from_json",
]

_EPS = float(np.finfo(float).eps)


_CHUNK = 16384  # keeps temporaries cache-resident and off the mmap path


@functools.lru_cache(maxsize=8)
def _index_chunks(n: int) -> tuple[np.ndarray, ...]:
    """Read-only blocks covering ``1.0, ..., n``; the same objects for equal ``n``."""
    out = []
    for lo in range(1, n + 1, _CHUNK):
        block = np.arange(lo, min(lo + _CHUNK, n + 1), dtype=float)
        block.flags.writeable = False
        out.append(block)
    return tuple(out)


def _memo_last(fn, size: int = 64):
    """Remember ``fn`` on read-only inputs, matched by identity.

    Only the shared blocks from :func:`_index_chunks` are read-only here, so
    the long evaluations repeated by :func:`classify_series` hit the memo
    while other inputs pass straight through.
    """
    memo: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def wrapped(x):
        if isinstance(x, np.ndarray) and not x.flags.writeable:
            hit = memo.get(id(x))
            if hit is not None and hit[0] is x:
                return hit[1]
            out = np.array(fn(x), dtype=float)
            out.flags.writeable = False
            if len(memo) >= size:
                memo.clear()
            memo[id(x)] = (x, out)
            return out
        return fn(x)

    return wrapped


_log_index = _memo_last(np.log)


# ---------------------------------------------------------------------------
# Coefficient sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerTail:
    """Coefficients ``scale * i**(-exponent)`` for every ``i >= start``."""

    scale: float
    exponent: float
    start: int

    def __post_init__(self):
        if self.scale == 0 or not math.isfinite(self.scale):
            raise ValueError(f"tail scale must be finite and nonzero, got {self.scale}")
        if not self.exponent > 0.5:
            raise ValueError(
                f"tail exponent must exceed 1/2 for a square-summable sequence, got {self.exponent}")
        if int(self.start) != self.start or self.start < 1:
            raise ValueError(f"tail start must be a positive integer, got {self.start}")
        object.__setattr__(self, "start", int(self.start))

    def values(self, x) -> np.ndarray:
        return self.scale * np.asarray(x, dtype=float) ** (-self.exponent)


@dataclass(frozen=True)
class CoeffSeq:
    """Element of the Hilbert space given by its Fourier coefficients.

    ``support`` holds ``(index, value)`` pairs with strictly increasing
    indices.  Arithmetic may produce support entries at or beyond
    ``tail.start``; such entries are added to the tail value at that index.
    """

    support: tuple[tuple[int, float], ...] = ()
    tail: Optional[PowerTail] = None
    _idx: np.ndarray = field(init=False, repr=False, compare=False)
    _val: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        support = tuple((int(i), float(v)) for i, v in self.support)
        for (i, v), (j, _) in zip(support, support[1:]):
            if j <= i:
                raise ValueError(f"support indices must be strictly increasing: {i} then {j}")
        if support and support[0][0] < 1:
            raise ValueError("support indices must be >= 1")
        if any(not math.isfinite(v) for _, v in support):
            raise ValueError("support values must be finite")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "_idx", np.array([i for i, _ in support], dtype=float))
        object.__setattr__(self, "_val", np.array([v for _, v in support], dtype=float))

    # construction helpers

    @classmethod
    def zero(cls) -> CoeffSeq:
        return cls()

    @classmethod
    def basis(cls, i: int, value: float = 1.0) -> CoeffSeq:
        """``value * e_i``."""
        return cls(((i, value),))

    @classmethod
    def from_values(cls, values: Iterable[float], start: int = 1) -> CoeffSeq:
        """Dense coefficients ``values[0]`` at mode ``start``, ``values[1]`` at ``start + 1``, ..."""
        return cls(tuple((start + k, float(v)) for k, v in enumerate(values) if v != 0))

    @property
    def support_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.support)

    @property
    def is_finite_support(self) -> bool:
        return self.tail is None

    def coefficients(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=float)
        out = np.zeros(idx.shape)
        if self.tail is not None:
            mask = idx >= self.tail.start
            out[mask] = self.tail.values(idx[mask])
        if self._idx.size:
            pos = np.searchsorted(self._idx, idx)
            pos_c = np.minimum(pos, self._idx.size - 1)
            hit = self._idx[pos_c] == idx
            out = out + np.where(hit, self._val[pos_c], 0.0)
        return out

    def coefficient(self, i: int) -> float:
        return float(self.coefficients(np.array([float(i)]))[0])

    # arithmetic

    def __neg__(self) -> CoeffSeq:
        return self * -1.0

    def __mul__(self, t: float) -> CoeffSeq:
        t = float(t)
        if t == 0:
            return CoeffSeq()
        tail = None
        if self.tail is not None:
            tail = PowerTail(self.tail.scale * t, self.tail.exponent, self.tail.start)
        return CoeffSeq(tuple((i, v * t) for i, v in self.support), tail)

    __rmul__ = __mul__

    def __add__(self, other: CoeffSeq) -> CoeffSeq:
        if not isinstance(other, CoeffSeq):
            return NotImplemented
        merged: dict[int, float] = dict(self.support)
        for i, v in other.support:
            merged[i] = merged.get(i, 0.0) + v
        support = tuple((i, v) for i, v in sorted(merged.items()) if v != 0.0)
        return CoeffSeq(support, _combine_tails(self.tail, other.tail))

    def __sub__(self, other: CoeffSeq) -> CoeffSeq:
        if not isinstance(other, CoeffSeq):
            return NotImplemented
        return self + (-other)

    def norm_sq(self, cutoff: int | None = None) -> float:
        return norm_sq(self, cutoff)

    # serialization

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"support": [[i, v] for i, v in self.support]}
        if self.tail is not None:
            doc["tail"] = {"scale": self.tail.scale, "exponent": self.tail.exponent,
                           "start": self.tail.start}
        return doc


def _combine_tails(a: Optional[PowerTail], b: Optional[PowerTail]) -> Optional[PowerTail]:
    if a is None:
        return b
    if b is None:
        return a
    if a.exponent != b.exponent or a.start != b.start:
        raise TailMismatch(
            f"cannot combine tails (exponent {a.exponent}, start {a.start}) and "
            f"(exponent {b.exponent}, start {b.start})")
    scale = a.scale + b.scale
    if scale == 0.0:
        return None
    return PowerTail(scale, a.exponent, a.start)


def coeffseq_from_json(doc: dict[str, Any]) -> CoeffSeq:
    """Inverse of :meth:`CoeffSeq.to_json`; raises ``ValueError`` on bad input."""
    if not isinstance(doc, dict):
        raise ValueError(f"coefficient sequence must be a JSON object, got {type(doc).__name__}")
    extra = set(doc) - {"support", "tail"}
    if extra:
        raise ValueError(f"unexpected keys in coefficient sequence: {sorted(extra)}")
    support = []
    for entry in doc.get("support", []):
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise ValueError(f"support entries must be [index, value] pairs, got {entry!r}")
        i, v = entry
        if isinstance(i, bool) or not isinstance(i, int) and not (isinstance(i, float) and i.is_integer()):
            raise ValueError(f"support index must be an integer, got {i!r}")
        support.append((int(i), float(v)))
    tail = None
    if doc.get("tail") is not None:
        t = doc["tail"]
        if not isinstance(t, dict) or set(t) != {"scale", "exponent", "start"}:
            raise ValueError("tail must have exactly the keys scale, exponent, start")
        tail = PowerTail(float(t["scale"]), float(t["exponent"]), t["start"])
    return CoeffSeq(tuple(support), tail)


# ---------------------------------------------------------------------------
# Symbolic series terms
# ---------------------------------------------------------------------------

LogFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TermModel:
    """Nonnegative series terms ``t_i``, ``i >= 1``, described in log domain.

    ``log_terms`` evaluates ``log t_i`` exactly at integer indices.  For
    ``i >= start`` the terms equal the smooth formula ``log_smooth``, except
    at the finitely many indices in ``exceptions``.  Below ``start`` the
    terms vanish outside ``head`` unless ``head`` is ``None``.  ``asym`` is the
    leading-order behaviour of the smooth formula.
    """

    log_terms: LogFn
    log_smooth: LogFn
    start: int
    asym: Asymptotic
    head: Optional[np.ndarray] = None
    exceptions: np.ndarray = field(default_factory=lambda: np.empty(0))
    tail_integral: Optional[Callable[[float], float]] = None
    rules: tuple[str, ...] = ()
    label: str = "t_i"

    def memoized(self) -> TermModel:
        """Copy whose smooth formula remembers its values on the shared index blocks.

        Worth it only for data-independent terms that are reused across calls.
        """
        return dataclasses.replace(self, log_smooth=_memo_last(self.log_smooth))

    def _head_for(self, start: int) -> Optional[np.ndarray]:
        """Indices below ``start`` where the terms may be nonzero."""
        if self.head is None:
            return None
        extra = np.arange(self.start, start, dtype=float)
        return np.union1d(np.union1d(self.head, extra), self.exceptions[self.exceptions < start])

    def _exceptions_from(self, start: int) -> np.ndarray:
        return self.exceptions[self.exceptions >= start]

    def _combine(self, other: TermModel, log_op, asym: Asymptotic, label: str,
                 head_mode: str) -> TermModel:
        start = max(self.start, other.start)
        ha, hb = self._head_for(start), other._head_for(start)
        if head_mode == "intersect":
            if ha is None:
                head = hb
            elif hb is None:
                head = ha
            else:
                head = np.intersect1d(ha, hb)
        else:
            head = None if ha is None or hb is None else np.union1d(ha, hb)
        exceptions = np.union1d(self._exceptions_from(start), other._exceptions_from(start))
        f, g = self.log_terms, other.log_terms
        fs, gs = self.log_smooth, other.log_smooth
        return TermModel(
            log_terms=lambda i: log_op(f(i), g(i)),
            log_smooth=lambda x: log_op(fs(x), gs(x)),
            start=start, asym=asym, head=head, exceptions=exceptions,
            rules=self.rules + other.rules, label=label)

    def __truediv__(self, other: TermModel) -> TermModel:
        return self._combine(other, _log_div, self.asym / other.asym,
                             f"({self.label})/({other.label})", "intersect")

    def __mul__(self, other: TermModel) -> TermModel:
        return self._combine(other, np.add, self.asym * other.asym,
                             f"({self.label})*({other.label})", "intersect")

    def __add__(self, other: TermModel) -> TermModel:
        return self._combine(other, np.logaddexp, self.asym + other.asym,
                             f"{self.label} + {other.label}", "union")

    def log1p(self) -> TermModel:
        """Terms ``log(1 + t_i)``."""
        f, fs = self.log_terms, self.log_smooth
        if self.asym.limit() == 0.0:
            rule = "limit comparison: log(1 + u_i) ~ u_i as u_i -> 0"
        else:
            rule = "u_i does not vanish, so neither does log(1 + u_i)"
        return TermModel(
            log_terms=lambda i: _log_log1p_exp(f(i)),
            log_smooth=lambda x: _log_log1p_exp(fs(x)),
            start=self.start, asym=self.asym.log1p(), head=self.head,
            exceptions=self.exceptions, rules=self.rules + (rule,),
            label=f"log(1 + {self.label})")

    def values(self, idx) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            return np.exp(self.log_terms(np.asarray(idx, dtype=float)))


def _log_div(a, b):
    with np.errstate(invalid="ignore"):
        out = np.subtract(a, b)
    # 0/x must stay 0 even where both logs are -inf
    nan = np.isnan(out)
    if nan.any():
        out = np.where(nan & (a == -np.inf), -np.inf, out)
    return out


def _log_log1p_exp(lu):
    """``log(log(1 + exp(lu)))`` without overflow or underflow."""
    lu = np.asarray(lu, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        small = lu < -30.0
        big = lu > 30.0
        mid = np.log(np.log1p(np.exp(np.clip(lu, -30.0, 30.0))))
        # log(1 + e^lu) = lu + log1p(e^-lu) for large lu
        large = np.log(lu + np.log1p(np.exp(-np.abs(lu))))
        return np.where(small, lu, np.where(big, large, mid))


@functools.lru_cache(maxsize=64)
def spectrum_terms(s: SpectrumModel) -> TermModel:
    """The eigenvalue sequence of ``s`` as series terms."""
    a = s.asymptotic
    integral = None
    if a.log_base < 0 and a.power == 0:
        lq = a.log_base
        integral = lambda x: s.scale * math.exp(lq * x) / -lq  # noqa: E731
    elif a.log_base == 0 and a.power > 1:
        integral = lambda x: s.scale * x ** (1 - a.power) / (a.power - 1)  # noqa: E731
    return TermModel(log_terms=s.log_eigenvalues, log_smooth=s.log_tail,
                     start=s.tail_start, asym=a, tail_integral=integral,
                     label=type(s).__name__).memoized()


def coefficient_square_terms(x: CoeffSeq) -> TermModel:
    """Terms ``x_i**2``."""
    support = np.asarray(x._idx)

    def log_terms(i):
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(np.abs(x.coefficients(i)))

    if x.tail is None:
        start = int(support[-1]) + 1 if support.size else 1
        return TermModel(log_terms=log_terms,
                         log_smooth=lambda t: np.full(np.shape(t), -np.inf),
                         start=start, asym=ZERO, head=support, label="x_i^2")
    tail = x.tail
    c2, p = tail.scale ** 2, 2.0 * tail.exponent

    def log_smooth(t):
        return 2.0 * math.log(abs(tail.scale)) - p * _log_index(t)

    return TermModel(
        log_terms=log_terms, log_smooth=log_smooth, start=tail.start,
        asym=Asymptotic(math.log(c2), p, 0.0),
        head=support[support < tail.start], exceptions=support[support >= tail.start],
        tail_integral=lambda t: c2 * t ** (1 - p) / (p - 1),
        label="x_i^2")


def weighted_norm_terms(x: CoeffSeq, s: SpectrumModel) -> TermModel:
    """Terms ``x_i**2 / s_i`` of the Cameron-Martin norm of ``x`` with respect to ``s``."""
    return coefficient_square_terms(x) / spectrum_terms(s)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Converges:
    """Convergent series; the true sum lies in ``[value - w/2, value + w/2]``."""

    value: float
    bracket_width: float = 0.0
    rule: str = ""
    converges: ClassVar[bool] = True

    @property
    def lower(self) -> float:
        return self.value - 0.5 * self.bracket_width

    @property
    def upper(self) -> float:
        return self.value + 0.5 * self.bracket_width


@dataclass(frozen=True)
class Diverges:
    """Divergent nonnegative series; ``witness`` names the rule that fired."""

    witness: str
    converges: ClassVar[bool] = False
    value: ClassVar[float] = math.inf
    bracket_width: ClassVar[float] = 0.0


SeriesVerdict = Union[Converges, Diverges]


def classify_series(term: TermModel, cutoff: int | None = None,
                    dimension: int | None = None) -> SeriesVerdict:
    """Decide convergence of ``sum_i t_i`` and enclose its value.

    Parameters
    ----------
    term
        Symbolic description of the nonnegative terms.
    cutoff
        Number of leading terms summed explicitly before the tail is
        bounded by integrals.  Defaults to :func:`spectral_da.spectra.tail_cutoff`.
    dimension
        If given, the sum runs over ``i <= dimension`` only (finite-dimensional
        state space) and always converges.
    """
    if dimension is not None:
        idx = _indices_upto(term, dimension)
        return _finite_sum(term.values(idx), f"finite sum over {dimension} modes")

    if not term.asym.series_converges():
        return Diverges("; ".join((term.asym.witness(),) + term.rules))

    if term.asym.is_zero:
        idx = _indices_upto(term, term.start - 1)
        idx = np.union1d(idx, term.exceptions)
        return _finite_sum(term.values(idx), term.asym.witness())

    n = max(cutoff or tail_cutoff(), term.start - 1)
    for _ in range(6):
        if _smooth_nonincreasing(term, n):
            break
        n *= 4
    else:
        raise RuntimeError(f"tail of {term.label} is not monotone; cannot bound it by integrals")

    partial, count = _partial_sum(term, n)
    late = term.exceptions[term.exceptions > n]
    correction = 0.0
    if late.size:
        with np.errstate(under="ignore"):
            correction = float(np.sum(term.values(late) - np.exp(term.log_smooth(late))))
    hi, err_hi = _tail_integral(term, float(n))
    piece, err_piece = _segment_integral(term, float(n), float(n + 1))
    lo = hi - piece
    roundoff = (count + late.size + 2) * _EPS * (abs(partial) + abs(hi) + abs(correction))
    width = (hi - lo) + 2.0 * (err_hi + err_piece + roundoff)
    value = partial + correction + 0.5 * (lo + hi)
    return Converges(value, width, term.asym.witness())


def _indices_upto(term: TermModel, n: int) -> np.ndarray:
    """Indices ``1..n`` where the terms may be nonzero."""
    if term.head is None:
        return np.arange(1, n + 1, dtype=float)
    # head and exceptions are short; the body is already a sorted range
    start = min(term.start, n + 1)
    small = np.union1d(term.head, term.exceptions)
    small = small[small < start]
    body = np.arange(start, n + 1, dtype=float)
    return np.concatenate((small, body))


def _finite_sum(terms: np.ndarray, rule: str) -> Converges:
    total = float(np.sum(terms))
    return Converges(total, 2.0 * (terms.size + 1) * _EPS * total, rule)


_MONO_GRID = np.geomspace(1.01, 1e12, 80)


def _smooth_nonincreasing(term: TermModel, n: int) -> bool:
    x = float(n) * np.concatenate(([1.0, 1.0 + 1.0 / n], _MONO_GRID))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ls = term.log_smooth(x)
    ls = np.maximum(ls[~np.isnan(ls)], -1e300)
    return bool(np.all(np.diff(ls) <= 1e-12 * np.maximum(1.0, np.abs(ls[:-1]))))


def _partial_sum(term: TermModel, n: int) -> tuple[float, int]:
    """``sum_{i <= n} t_i`` and the number of terms summed.

    Below ``start`` the exact terms are summed at the head indices.  From
    ``start`` on, the smooth formula is evaluated on the shared index range
    and corrected at the exception indices.
    """
    start = min(term.start, n + 1)
    if term.head is None:
        low = np.arange(1, start, dtype=float)
    else:
        low = np.union1d(term.head, term.exceptions)
        low = low[low < start]
    total = math.fsum(term.values(low)) if low.size else 0.0
    count = low.size
    if start <= n:
        body = 0.0
        with np.errstate(under="ignore", over="ignore"):
            for block in _index_chunks(n):
                if block[-1] < start:
                    continue
                vals = np.exp(term.log_smooth(block))
                if block[0] < start:
                    vals = vals[int(start - block[0]):]
                body += float(np.sum(vals))
        total += body
        exc = term.exceptions[(term.exceptions >= start) & (term.exceptions <= n)]
        if exc.size:
            with np.errstate(under="ignore"):
                total += float(np.sum(term.values(exc) - np.exp(term.log_smooth(exc))))
        count += n - start + 1
    return total, count


_GAUSS_HI = np.polynomial.legendre.leggauss(20)
_GAUSS_LO = np.polynomial.legendre.leggauss(10)


def _adaptive_quad(f, a: float, b: float, epsabs: float, epsrel: float,
                   max_rounds: int = 40, max_panels: int = 8192) -> tuple[float, float]:
    """Adaptive Gauss-Legendre quadrature of a vectorized ``f`` on ``[a, b]``.

    Each round evaluates a 20- and a 10-point rule on every open panel in
    a single call of ``f``; their difference is the panel error estimate.
    Panels whose error exceeds their share of the tolerance are bisected.
    """
    xh, wh = _GAUSS_HI
    xl, wl = _GAUSS_LO
    lo, hi = np.array([a]), np.array([b])
    done_val, done_err = 0.0, 0.0
    for _ in range(max_rounds):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes = np.concatenate(((mid[:, None] + half[:, None] * xh).ravel(),
                                (mid[:, None] + half[:, None] * xl).ravel()))
        vals = f(nodes)
        k = lo.size * xh.size
        est_hi = half * (vals[:k].reshape(lo.size, -1) @ wh)
        est_lo = half * (vals[k:].reshape(lo.size, -1) @ wl)
        err = np.abs(est_hi - est_lo)
        total = done_val + float(np.sum(est_hi))
        target = max(epsabs, epsrel * abs(total))
        if done_err + float(np.sum(err)) <= target or 2 * lo.size > max_panels:
            return total, done_err + float(np.sum(err))
        # accept panels already well inside their share of the budget
        keep = err <= 0.1 * target * half / (0.5 * (b - a))
        done_val += float(np.sum(est_hi[keep]))
        done_err += float(np.sum(err[keep]))
        lo, mid, hi = lo[~keep], mid[~keep], hi[~keep]
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
    return total, done_err + float(np.sum(err))


def _tail_integral(term: TermModel, x0: float) -> tuple[float, float]:
    """``int_{x0}^inf smooth(x) dx`` and an error estimate."""
    if term.tail_integral is not None:
        val = float(term.tail_integral(x0))
        return val, 4 * _EPS * val
    lx0 = math.log(x0)

    # x = x0 e^u turns power tails into exponential decay; u = t / (1 - t) maps [0, 1) onto [0, inf)
    def integrand(t):
        with np.errstate(all="ignore"):
            u = t / (1.0 - t)
            v = np.exp(term.log_smooth(x0 * np.exp(u)) + lx0 + u) / (1.0 - t) ** 2
        return np.where(np.isfinite(v), v, 0.0)

    return _adaptive_quad(integrand, 0.0, 1.0, epsabs=1e-15, epsrel=1e-12)


def _segment_integral(term: TermModel, a: float, b: float) -> tuple[float, float]:
    def integrand(x):
        with np.errstate(under="ignore", divide="ignore"):
            return np.exp(term.log_smooth(x))

    return _adaptive_quad(integrand, a, b, epsabs=1e-16, epsrel=1e-12)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


def norm_sq(x: CoeffSeq, cutoff: int | None = None) -> float:
    """``|x|^2 = sum_i x_i^2``, finite for every element of the universe."""
    return classify_series(coefficient_square_terms(x), cutoff).value


def weighted_norm_sq(x: CoeffSeq, s: SpectrumModel, cutoff: int | None = None,
                     dimension: int | None = None) -> float:
    """Extended quadratic form ``|x|^2_{S^-1} = sum_i x_i^2 / s_i``.

    Returns ``inf`` exactly when ``x`` lies outside the Cameron-Martin space
    ``S^{1/2}(H)``.
    """
    return classify_series(weighted_norm_terms(x, s), cutoff, dimension).value

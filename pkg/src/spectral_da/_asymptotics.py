"""Leading-order asymptotics of the positive sequences used in this package.

Every tail that can be built from the spectral families and coefficient
tails is, to leading order, ``A * i**(-power) * base**i``.  Convergence of
the corresponding series and the limit of the terms are then decidable
from the three parameters alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Asymptotic", "ZERO"]


@dataclass(frozen=True)
class Asymptotic:
    """Leading term ``exp(log_coef) * i**(-power) * exp(log_base * i)``.

    ``log_coef = -inf`` marks a sequence that vanishes identically beyond
    some index; ``log_coef = +inf`` marks one that grows without bound
    more slowly than any power (e.g. ``log(1 + u_i)`` with ``u_i -> inf``).
    """

    log_coef: float
    power: float = 0.0
    log_base: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.log_coef == -math.inf

    def __mul__(self, other: Asymptotic) -> Asymptotic:
        if self.is_zero or other.is_zero:
            return ZERO
        return Asymptotic(self.log_coef + other.log_coef,
                          self.power + other.power,
                          self.log_base + other.log_base)

    def __truediv__(self, other: Asymptotic) -> Asymptotic:
        if other.is_zero:
            raise ZeroDivisionError("division by an eventually-zero sequence")
        if self.is_zero:
            return ZERO
        return Asymptotic(self.log_coef - other.log_coef,
                          self.power - other.power,
                          self.log_base - other.log_base)

    def __add__(self, other: Asymptotic) -> Asymptotic:
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.log_base != other.log_base:
            return self if self.log_base > other.log_base else other
        if self.power != other.power:
            return self if self.power < other.power else other
        return Asymptotic(float(_logaddexp(self.log_coef, other.log_coef)),
                          self.power, self.log_base)

    def squared(self) -> Asymptotic:
        return self * self

    def limit(self) -> float:
        """Limit of the terms as ``i -> inf`` (possibly ``inf``)."""
        if self.is_zero:
            return 0.0
        if self.log_coef == math.inf:
            return math.inf
        if self.log_base > 0:
            return math.inf
        if self.log_base < 0:
            return 0.0
        if self.power > 0:
            return 0.0
        if self.power < 0:
            return math.inf
        return math.exp(self.log_coef)

    def log1p(self) -> Asymptotic:
        """Asymptotics of ``log(1 + u_i)``; ``log(1 + u) ~ u`` when ``u -> 0``."""
        lim = self.limit()
        if lim == 0.0:
            return self
        if math.isinf(lim):
            return Asymptotic(math.inf)
        return Asymptotic(math.log(math.log1p(lim)))

    def series_converges(self) -> bool:
        if self.is_zero:
            return True
        if self.log_coef == math.inf:
            return False
        if self.log_base != 0:
            return self.log_base < 0
        return self.power > 1

    def describe(self) -> str:
        if self.is_zero:
            return "0"
        if self.log_coef == math.inf:
            return "unbounded slowly varying"
        parts = [f"{math.exp(self.log_coef):.6g}"]
        if self.power != 0:
            parts.append(f"i^(-{self.power:.6g})")
        if self.log_base != 0:
            parts.append(f"{math.exp(self.log_base):.6g}^i")
        return "*".join(parts)

    def witness(self) -> str:
        """Human-readable name of the rule that decides the series."""
        t = self.describe()
        if self.is_zero:
            return "terms vanish beyond a finite index"
        lim = self.limit()
        if lim != 0.0:
            return f"term test: terms ~ {t} do not vanish (limit {lim:.6g})"
        if self.log_base != 0:
            q = math.exp(self.log_base)
            verdict = "< 1, converges" if q < 1 else "> 1, diverges"
            return f"geometric ratio test: terms ~ {t}, ratio {q:.6g} {verdict}"
        verdict = "> 1, converges" if self.power > 1 else "<= 1, diverges"
        return f"p-series comparison: terms ~ {t}, exponent {self.power:.6g} {verdict}"


ZERO = Asymptotic(-math.inf)


def _logaddexp(a: float, b: float) -> float:
    m = max(a, b)
    return m + math.log(math.exp(a - m) + math.exp(b - m))

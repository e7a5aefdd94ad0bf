"""Exception types raised by the library."""

__all__ = [
    "TailMismatch",
    "InfeasibleProblem",
    "PriorNotTraceClass",
    "LowerBoundPositive",
]


class TailMismatch(ValueError):
    """Coefficient tails with different exponents or start indices were combined."""


class InfeasibleProblem(ValueError):
    """The 3DVAR cost is infinite for every state."""


class PriorNotTraceClass(ValueError):
    """The prior covariance has infinite trace, so the prior is not a probability measure."""


class LowerBoundPositive(ValueError):
    """The noise covariance is bounded below; every data vector gives a well-posed posterior."""

"""The assimilation problem: Gaussian prior, Gaussian data noise, identity observation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .elements import CoeffSeq, coeffseq_from_json
from .spectra import SpectrumModel, spectrum_from_json

__all__ = ["AssimilationProblem", "problem_from_json"]


@dataclass(frozen=True)
class AssimilationProblem:
    """Prior ``N(prior_mean, P)``, observation ``y = x + w`` with ``w ~ N(0, R)``.

    ``prior_spectrum`` doubles as the 3DVAR background covariance ``B`` and
    ``prior_mean`` as the forecast ``x^f``.  ``dimension`` restricts the state
    space to the first ``dimension`` modes; ``None`` means infinite dimension.
    ``data`` may also be a :class:`spectral_da.wellposed.BadData` produced by
    :func:`spectral_da.wellposed.construct_bad_data`.
    """

    prior_spectrum: SpectrumModel
    noise_spectrum: SpectrumModel
    data: Union[CoeffSeq, Any] = field(default_factory=CoeffSeq)
    prior_mean: CoeffSeq = field(default_factory=CoeffSeq)
    dimension: Optional[int] = None

    def __post_init__(self):
        if self.dimension is not None and int(self.dimension) < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")

    @property
    def data_coefficients(self) -> CoeffSeq:
        """The data as a plain coefficient sequence (materialized if adversarial)."""
        return getattr(self.data, "data", self.data)

    def innovation(self) -> CoeffSeq:
        """``y - m^f``; raises :class:`~spectral_da.exceptions.TailMismatch` on incompatible tails."""
        return self.data_coefficients - self.prior_mean

    def with_data(self, data) -> AssimilationProblem:
        return AssimilationProblem(self.prior_spectrum, self.noise_spectrum, data,
                                   self.prior_mean, self.dimension)

    def to_json(self) -> dict[str, Any]:
        doc = {
            "prior_mean": self.prior_mean.to_json(),
            "prior_spectrum": self.prior_spectrum.to_json(),
            "noise_spectrum": self.noise_spectrum.to_json(),
            "data": self.data.to_json(),
        }
        if self.dimension is not None:
            doc["dimension"] = self.dimension
        return doc


_PROBLEM_KEYS = {"prior_mean", "prior_spectrum", "noise_spectrum", "data", "dimension"}


def problem_from_json(doc: dict[str, Any]) -> AssimilationProblem:
    """Build a problem from its JSON form; raises ``ValueError`` on schema violations.

    A ``data`` object carrying a ``construction`` block (as written by
    :meth:`BadData.to_json`) is rebuilt by re-running the construction and
    checking that it reproduces the recorded indices.
    """
    if not isinstance(doc, dict):
        raise ValueError("problem must be a JSON object")
    extra = set(doc) - _PROBLEM_KEYS
    if extra:
        raise ValueError(f"unexpected keys in problem: {sorted(extra)}")
    for key in ("prior_spectrum", "noise_spectrum", "data"):
        if key not in doc:
            raise ValueError(f"problem is missing {key!r}")
    prior = spectrum_from_json(doc["prior_spectrum"])
    noise = spectrum_from_json(doc["noise_spectrum"])
    mean = coeffseq_from_json(doc.get("prior_mean", {"support": []}))
    dimension = doc.get("dimension")
    if dimension is not None and (isinstance(dimension, bool) or not isinstance(dimension, int)):
        raise ValueError(f"dimension must be an integer, got {dimension!r}")

    data_doc = doc["data"]
    if isinstance(data_doc, dict) and "construction" in data_doc:
        from .wellposed import bad_data_from_json

        data = bad_data_from_json(data_doc, noise, prior, mean)
    else:
        data = coeffseq_from_json(data_doc)
    return AssimilationProblem(prior, noise, data, mean, dimension)

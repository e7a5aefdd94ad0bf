"""Well-posedness of Gaussian data assimilation with commuting covariances.

All covariances share one eigenbasis, so every operator is a sequence of
eigenvalues and every state a sequence of coefficients.  The package decides
whether the normalization constant of the Bayesian update vanishes, builds
data for which it does, computes 3DVAR and Kalman updates mode by mode, and
provides Monte Carlo oracles for truncated problems.
"""

from .assimilate import (
    Feasibility,
    IllPosed,
    PosteriorSpec,
    ThreeDVarSolution,
    WellPosed,
    kalman_gain_mode,
    kalman_gains,
    posterior,
    three_dvar_cost,
    three_dvar_feasible,
    three_dvar_minimize,
)
from .elements import (
    CoeffSeq,
    Converges,
    Diverges,
    PowerTail,
    classify_series,
    coeffseq_from_json,
    norm_sq,
    weighted_norm_sq,
)
from .exceptions import InfeasibleProblem, LowerBoundPositive, PriorNotTraceClass, TailMismatch
from .montecarlo import EssCurve, ess_sweep, mc_log_constant, sample_prior
from .problem import AssimilationProblem, problem_from_json
from .spectra import Constant, Exponential, PowerLaw, SpectrumModel, ratio_limit, spectrum_from_json
from .wellposed import (
    BadData,
    NormalizationConstant,
    WellPosednessReport,
    classify_problem,
    construct_bad_data,
    log_norm_constant,
    truncated_log_constant,
)

__version__ = "0.1.0"

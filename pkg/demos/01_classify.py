"""Which prior/noise pairs give a well-posed update for every data vector?

Run with ``python3 demos/01_classify.py``.
"""

from spectral_da import Constant, CoeffSeq, Exponential, PowerLaw, classify_problem

pairs = {
    "trace-class prior, white noise": (PowerLaw(1, 2), Constant(1)),
    "trace-class prior, decaying noise": (PowerLaw(1, 2), PowerLaw(1, 1)),
    "equal spectra": (PowerLaw(1, 2), PowerLaw(1, 2)),
    "geometric prior, slow noise": (Exponential(1, 0.5), PowerLaw(1, 0.5)),
}

for label, (prior, noise) in pairs.items():
    report = classify_problem(prior, noise, CoeffSeq())
    print(f"{label}")
    print(f"  inf r_i            = {report.noise_lower_bound:g}")
    print(f"  well posed for all = {report.well_posed_all_y}")
    print(f"  bad set dense      = {report.bad_set_dense}")
    print(f"  mu0 ~ eta          = {report.measures_equivalent}")

# Noise bounded away from zero is the only way to rule out every bad data vector.
# Once the noise eigenvalues decay, some data make the normalization constant vanish.

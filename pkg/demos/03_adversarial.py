"""Data arbitrarily close to any given vector for which c(y) = 0.

With decaying noise, put coefficients of size sqrt(r_i) on a sparse set of
modes.  The perturbation has norm below delta, yet its noise-weighted norm
diverges, so the likelihood of every prior draw vanishes.
"""

from spectral_da import AssimilationProblem, CoeffSeq, PowerLaw, construct_bad_data, log_norm_constant

prior, noise = PowerLaw(1, 2), PowerLaw(1, 1)
z = CoeffSeq(((1, 0.4), (2, -1.0), (5, 0.25)))

for delta in (1.0, 0.1, 0.01):
    bad = construct_bad_data(noise, prior, z, delta)
    nc = log_norm_constant(AssimilationProblem(prior, noise, bad))
    print(f"delta = {delta:g}")
    print(f"  first modes perturbed : {bad.indices[:8]} ... ({len(bad.indices)} materialized)")
    print(f"  |y - z|               = {bad.distance_sq() ** 0.5:.6f}")
    print(f"  log c(y)              = {nc.log_value}")
    print(f"  why                   : {bad.certificate}")

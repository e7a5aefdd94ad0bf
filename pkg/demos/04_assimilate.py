"""Posterior, Kalman gains and 3DVAR mode by mode.

For diagonal covariances the posterior precision is the sum of prior and
noise precisions, and the 3DVAR minimizer coincides with the posterior mean.
"""

import numpy as np

from spectral_da import (
    AssimilationProblem,
    CoeffSeq,
    Constant,
    PowerLaw,
    PowerTail,
    kalman_gains,
    posterior,
    three_dvar_cost,
    three_dvar_feasible,
    three_dvar_minimize,
)

prior, noise = PowerLaw(1, 2), Constant(0.5)
prob = AssimilationProblem(prior, noise, CoeffSeq.from_values([1.0, -0.5, 0.25, 0.0, 0.1]),
                           prior_mean=CoeffSeq.basis(1, 0.3))
idx = np.arange(1, 9, dtype=float)

result = posterior(prob)
print("well posed:", result.well_posed)
spec = result.posterior
print(" mode      mean          variance      gain")
for i, m, v, k in zip(idx, spec.mean(idx), spec.variance(idx), kalman_gains(prob, idx)):
    print(f"{int(i):>5}  {m: .6e}  {v: .6e}  {k:.4f}")

xa = three_dvar_minimize(prob).argmin(idx)
print("\n3DVAR argmin - posterior mean:", np.max(np.abs(xa - spec.mean(idx))))

# When the data is too rough for the noise, no state has finite cost.
rough = AssimilationProblem(PowerLaw(1, 2), PowerLaw(1, 2), CoeffSeq(tail=PowerTail(1, 1, 1)))
feas = three_dvar_feasible(rough)
print("\nrough data feasible:", feas.feasible, "-", feas.certificate)
print("cost at zero state:", three_dvar_cost(CoeffSeq(), rough))

"""
Eigen-entropy of ordered and disordered markets
-----------------------------------------------

The entropy of the Perron vector of |C|^2 is close to ln N for pure noise
and falls as a common factor pulls the assets together. The market and
group-random modes carry their own entropies.
"""

import math

from eigenphase.corrlab import mean_correlation
from eigenphase.ensemble import EnsembleSpec, one_factor_sample, woe_sample
from eigenphase.phase import matrix_entropies

N = 60
print("ln N = %.4f" % math.log(N))

c = woe_sample(EnsembleSpec(N, None, 1, seed=3), 0)
print("noise      mu=%.3f  H, H_M, H_GR = %.4f %.4f %.4f" % (mean_correlation(c), *matrix_entropies(c)))

for b in (0.3, 0.6, 0.9):
    c = one_factor_sample(N, 500, b, seed=3)
    h, hm, hgr = matrix_entropies(c)
    print("b=%.1f      mu=%.3f  H, H_M, H_GR = %.4f %.4f %.4f  H-H_M=%.2e" % (b, mean_correlation(c), h, hm, hgr, h - hm))

"""
Random-matrix baseline
----------------------

Mean eigen-entropy of Wishart correlation matrices grows like ln N, and
the mean ranked centrality curve is almost flat at 1/N.
"""

import math

from eigenphase.ensemble import EnsembleSpec, baseline

for n in (25, 50, 100):
    rep = baseline(EnsembleSpec(n, None, replicates=50, seed=0))
    p = rep.mean_centralities
    print("N=%3d  mean H=%.4f  ln N=%.4f  std=%.4f  p max/min = %.4f/%.4f (1/N=%.4f)"
          % (n, rep.mean_H, math.log(n), rep.std_H, p[0], p[-1], 1 / n))

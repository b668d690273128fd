"""
Locating a crash in phase space
-------------------------------

A calm one-factor market gets one strongly coupled epoch. In the plane
(|H - H_M|, |H - H_GR|) that epoch collapses onto the d_M = 0 axis.
"""

from collections import Counter

import numpy as np

from eigenphase.ensemble import one_factor_returns
from eigenphase.ingest import ReturnPanel
from eigenphase.pipeline import RunConfig, analyze_returns

n, m, blocks, crash_at = 12, 40, 60, 30
rets = one_factor_returns(n, m * blocks, 0.3, seed=4)
rets[:, crash_at * m:(crash_at + 1) * m] = one_factor_returns(n, m, 0.95, seed=4, replicate_index=1)

dates = np.arange("2000-01-03", "2030-01-01", dtype="datetime64[D]")
dates = tuple(d.item() for d in dates[np.is_busday(dates)][:m * blocks])
panel = ReturnPanel(tuple(f"A{i}" for i in range(n)), dates, rets, 1)

res = analyze_returns(panel, RunConfig(window=m, epoch_shift=m))
print("labels:", dict(Counter(res.labels)))
print("resolved r_type2: %.4f" % res.thresholds.r_type2)
for k in (crash_at - 1, crash_at, crash_at + 1):
    p = res.points[k]
    print(p.end_date, "d_M=%.2e d_GR=%.3f" % (p.d_M, p.d_GR), p.label)

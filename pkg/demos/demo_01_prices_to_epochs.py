"""
From prices to rolling correlation epochs
-----------------------------------------

A small synthetic market is written as a long-format CSV, parsed back,
aligned on a common calendar and cut into overlapping epochs.
"""

import numpy as np

from eigenphase.corrlab import rolling_epochs
from eigenphase.ensemble import one_factor_returns
from eigenphase.ingest import align_panel, log_returns, parse_price_table

rng = np.random.default_rng(1)
rets = 0.01 * one_factor_returns(5, 300, 0.5, seed=1)
prices = 100 * np.exp(np.cumsum(rets, axis=1))
dates = np.arange("2020-01-01", "2021-12-31", dtype="datetime64[D]")
dates = dates[np.is_busday(dates)][:300]

lines = ["date,ticker,price"]
for i in range(5):
    for d, p in zip(dates, prices[i]):
        if rng.random() > 0.02:  # drop a few quotes
            lines.append(f"{d},T{i},{p:.4f}")
lines.append("2020-13-01,T0,1.0")  # malformed row, reported and skipped

parsed = parse_price_table("\n".join(lines))
print("series:", len(parsed.series), " rejected rows:", [(r.row, r.reason) for r in parsed.rejected])

###############################################################################
# Missing quotes are forward filled; the mask keeps track of them so the
# returns touching a filled price are zeroed.

panel = align_panel(parsed.series)
returns = log_returns(panel, lag=1)
print("filled prices:", int(panel.filled.sum()), " returns shape:", returns.returns.shape)

epochs = rolling_epochs(returns, window=40, shift=20)
print("epochs:", len(epochs))
for e in epochs[:3]:
    print(e.end_date, "mean correlation %.3f" % e.mu)

from datetime import date, timedelta

import numpy as np
import pytest

from eigenphase.ensemble import one_factor_returns
from eigenphase.ingest import PricePanel, ReturnPanel


def business_days(n, start=date(2000, 1, 3)):
    days, d = [], start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += timedelta(days=1)
    return tuple(days)


def return_panel(returns, start=date(2000, 1, 3)):
    returns = np.asarray(returns, dtype=float)
    n, t = returns.shape
    return ReturnPanel(tuple(f"S{i:03d}" for i in range(n)), business_days(t, start), returns, 1)


def price_panel_from_returns(returns, p0=100.0):
    """Prices whose daily log returns are ``returns`` (one extra leading date)."""
    returns = np.asarray(returns, dtype=float)
    n, t = returns.shape
    logp = np.log(p0) + np.concatenate([np.zeros((n, 1)), np.cumsum(returns, axis=1)], axis=1)
    return PricePanel(tuple(f"S{i:03d}" for i in range(n)), business_days(t + 1),
                      np.exp(logp), np.zeros((n, t + 1), dtype=bool))


def wide_csv(panel: PricePanel) -> str:
    lines = [",".join(("date",) + panel.tickers)]
    for t, d in enumerate(panel.dates):
        lines.append(",".join([d.isoformat()] + [repr(float(v)) for v in panel.prices[:, t]]))
    return "\n".join(lines) + "\n"


@pytest.fixture
def one_factor_panel():
    def make(n=20, t=400, loading=0.3, seed=7):
        return return_panel(one_factor_returns(n, t, loading, seed, 0))
    return make


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])

"""Scaling fit of ``H - H_M`` against mean correlation, fear gauge, correlograms."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from datetime import date
from typing import Sequence

import numpy as np

from .errors import InsufficientPoints
from .phase import EntropyTriple

__all__ = [
    "ScalingFit",
    "IndicatorSeries",
    "fit_scaling",
    "fear_gauge",
    "pairwise_pearson",
    "cross_correlogram",
    "correlogram_csv",
]


@dataclass(frozen=True)
class ScalingFit:
    """``y = alpha * exp(b * mu)`` fitted by least squares on ``ln y``.

    ``b`` is negative for a relative entropy that decays with mean market
    correlation.
    """

    alpha: float
    b: float
    r2: float
    r2_adjusted: float
    n_points: int
    n_excluded: int

    def predict(self, mu):
        return self.alpha * np.exp(self.b * np.asarray(mu, dtype=float))

    def to_dict(self) -> dict:
        return asdict(self)


def fit_scaling(mu: Sequence[float], y: Sequence[float]) -> ScalingFit:
    """Fit ``ln y = ln alpha + b mu``; points with ``y <= 0`` are dropped and counted."""
    mu = np.asarray(mu, dtype=float)
    y = np.asarray(y, dtype=float)
    if mu.shape != y.shape:
        raise ValueError("mu and y differ in length")
    finite = np.isfinite(mu) & np.isfinite(y)
    keep = finite & (y > 0)
    n = int(keep.sum())
    if n < 3:
        raise InsufficientPoints(f"need at least 3 points with y > 0, have {n}")
    x, ly = mu[keep], np.log(y[keep])
    xm, ym = x.mean(), ly.mean()
    dx, dy = x - xm, ly - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientPoints("all mu values are identical")
    b = float(dx @ dy) / sxx
    ln_alpha = ym - b * xm
    resid = ly - (ln_alpha + b * x)
    ss_res = float(resid @ resid)
    ss_tot = float(dy @ dy)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    # one regressor plus intercept
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 2)
    return ScalingFit(math.exp(ln_alpha), b, r2, r2_adj, n, int(y.size - n))


def fear_gauge(t) -> float:
    """``-ln(H - H_M)``; NaN when ``H - H_M <= 0``.

    Accepts an :class:`EntropyTriple` or the difference itself.
    """
    diff = t.H - t.H_M if isinstance(t, EntropyTriple) else float(t)
    if not diff > 0:
        return math.nan
    return -math.log(diff)


@dataclass(frozen=True)
class IndicatorSeries:
    name: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if len(self.dates) != self.values.shape[0]:
            raise ValueError(f"{self.name}: dates and values differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError(f"{self.name}: dates not strictly increasing")


def pairwise_pearson(a: IndicatorSeries, b: IndicatorSeries, min_overlap: int = 3) -> float:
    """Pearson correlation over common dates where both values are finite; NaN if too few."""
    ib = {d: i for i, d in enumerate(b.dates)}
    pairs = [(a.values[i], b.values[ib[d]]) for i, d in enumerate(a.dates) if d in ib]
    xy = np.array([p for p in pairs if math.isfinite(p[0]) and math.isfinite(p[1])], dtype=float)
    if xy.shape[0] < min_overlap:
        return math.nan
    x, y = xy[:, 0] - xy[:, 0].mean(), xy[:, 1] - xy[:, 1].mean()
    den = math.sqrt(float(x @ x) * float(y @ y))
    if den == 0.0:
        return math.nan
    return max(-1.0, min(1.0, float(x @ y) / den))


def cross_correlogram(series: Sequence[IndicatorSeries], min_overlap: int = 3):
    """Symmetric matrix of pairwise correlations; NaN marks pairs without enough overlap.

    Returns ``(names, matrix)``.
    """
    series = list(series)
    if len(series) < 2:
        raise InsufficientPoints("need at least two series")
    k = len(series)
    m = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            m[i, j] = m[j, i] = pairwise_pearson(series[i], series[j], min_overlap)
    return [s.name for s in series], m


def correlogram_csv(names, matrix) -> str:
    from ._io import fmt

    lines = [",".join(["", *names])]
    for name, row in zip(names, matrix):
        lines.append(",".join([name] + [fmt(float(v)) for v in row]))
    return "\n".join(lines) + "\n"

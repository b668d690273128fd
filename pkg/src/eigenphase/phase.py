"""Eigen-entropies, phase-space coordinates and event classification."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date
from typing import Sequence

import numpy as np

from .corrlab import Epoch
from .errors import BadThresholds, DateNotCovered, ZeroMatrix
from .spectral import (
    CentralityVector,
    SpectralDecomposition,
    abs_power,
    market_mode,
    perron_centrality,
    symmetric_eigen,
)

__all__ = [
    "LABELS",
    "EntropyTriple",
    "PhasePoint",
    "StandardizedTriple",
    "ClassifierConfig",
    "EventTrajectory",
    "eigen_entropy",
    "mode_entropy",
    "matrix_entropies",
    "entropy_triple",
    "phase_coordinates",
    "classify",
    "resolve_thresholds",
    "classify_series",
    "rolling_standardize",
    "match_epoch",
    "event_window",
]

LABELS = ("crash", "type1", "type2", "anomaly", "normal")

# a mode whose largest entry is this small relative to C counts as the zero matrix
ZERO_MODE_RTOL = 1e-10


@dataclass(frozen=True)
class EntropyTriple:
    end_date: date | None
    H: float
    H_M: float
    H_GR: float
    mu: float
    n_power: int = 2
    degenerate: bool = False


@dataclass(frozen=True)
class PhasePoint:
    d_M: float
    d_GR: float
    d_MGR: float
    label: str | None = None
    end_date: date | None = None

    @property
    def radius(self) -> float:
        return math.hypot(self.d_M, self.d_GR)


@dataclass(frozen=True)
class StandardizedTriple:
    end_date: date | None
    H_std: float
    H_M_std: float
    H_GR_std: float
    zero_dispersion: tuple[bool, bool, bool] = (False, False, False)


@dataclass(frozen=True)
class ClassifierConfig:
    """Phase-space region boundaries.

    The defaults are heuristics chosen to reproduce the qualitative shape of
    the published scatter plots, not fitted values. ``r_type2=None`` means
    "0.9 times the 99th percentile radius of the series being classified";
    see :func:`resolve_thresholds`.
    """

    eps_crash: float = 0.05
    eps_type1: float = 0.05
    r_anomaly: float = 0.02
    r_type2: float | None = None
    r_type2_quantile: float = 0.99
    r_type2_factor: float = 0.9

    def validate(self, need_r_type2: bool = True) -> None:
        vals = {"eps_crash": self.eps_crash, "eps_type1": self.eps_type1, "r_anomaly": self.r_anomaly}
        if self.r_type2 is not None or need_r_type2:
            vals["r_type2"] = self.r_type2
        for name, v in vals.items():
            if v is None or not (v > 0) or not math.isfinite(v):
                raise BadThresholds(f"{name} must be a positive number, got {v}")
        if self.r_anomaly >= min(self.eps_crash, self.eps_type1):
            raise BadThresholds("r_anomaly must be smaller than both eps_crash and eps_type1")
        if not (0 < self.r_type2_quantile <= 1) or not (self.r_type2_factor > 0):
            raise BadThresholds("bad r_type2 quantile/factor")


def eigen_entropy(p) -> float:
    """Shannon entropy ``-sum p_i ln p_i`` with ``0 ln 0 = 0``."""
    if isinstance(p, CentralityVector):
        p = p.p
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        return 0.0
    nz = p[p > 0]
    h = -math.fsum(nz * np.log(nz))
    # snap round-off excursions past the bounds; anything larger is left visible
    hmax = math.log(p.size)
    if hmax < h <= hmax + 1e-12:
        return hmax
    if -1e-12 <= h < 0.0:
        return 0.0
    return h


def mode_entropy(mode: np.ndarray, n_power: int = 2, scale: float | None = None) -> float:
    """Entropy of the Perron centrality of ``|mode|^n``.

    A mode that vanishes (relative to ``scale``) has no preferred node; its
    centrality is taken as uniform, giving ``ln N``.
    """
    n = mode.shape[0]
    if scale is None:
        scale = 1.0
    if float(np.max(np.abs(mode))) <= ZERO_MODE_RTOL * scale:
        return math.log(n)
    try:
        cv = perron_centrality(abs_power(mode, n_power))
    except ZeroMatrix:
        return math.log(n)
    return eigen_entropy(cv)


def matrix_entropies(c: np.ndarray, n_power: int = 2,
                     decomposition: SpectralDecomposition | None = None) -> tuple[float, float, float]:
    """``(H, H_M, H_GR)`` of a correlation matrix."""
    c = np.asarray(c, dtype=float)
    d = decomposition if decomposition is not None else symmetric_eigen(c)
    scale = float(np.max(np.abs(c)))
    cm = market_mode(d)
    cgr = c - cm
    return (
        mode_entropy(c, n_power, scale),
        mode_entropy(cm, n_power, scale),
        mode_entropy(cgr, n_power, scale),
    )


def entropy_triple(epoch: Epoch, n_power: int = 2,
                   decomposition: SpectralDecomposition | None = None) -> EntropyTriple:
    h, hm, hgr = matrix_entropies(epoch.corr, n_power, decomposition)
    return EntropyTriple(epoch.end_date, h, hm, hgr, epoch.mu, int(n_power),
                         bool(epoch.degenerate_tickers))


def phase_coordinates(t: EntropyTriple) -> PhasePoint:
    return PhasePoint(abs(t.H - t.H_M), abs(t.H - t.H_GR), t.H_M - t.H_GR, None, t.end_date)


def classify(point: PhasePoint, thresholds: ClassifierConfig = ClassifierConfig()) -> str:
    """Label a phase point; precedence anomaly > crash > type1 > type2 > normal."""
    thresholds.validate()
    d_m, d_gr = point.d_M, point.d_GR
    if max(d_m, d_gr) < thresholds.r_anomaly:
        return "anomaly"
    if d_m < thresholds.eps_crash:
        return "crash"
    if d_gr < thresholds.eps_type1:
        return "type1"
    if math.hypot(d_m, d_gr) > thresholds.r_type2:
        return "type2"
    return "normal"


def resolve_thresholds(points: Sequence[PhasePoint], thresholds: ClassifierConfig = ClassifierConfig()) -> ClassifierConfig:
    """Fill in a per-run ``r_type2`` from the radius distribution of ``points``."""
    thresholds.validate(need_r_type2=False)
    if thresholds.r_type2 is not None:
        return thresholds
    radii = np.array([p.radius for p in points], dtype=float)
    radii = radii[np.isfinite(radii)]
    if radii.size == 0:
        raise BadThresholds("cannot derive r_type2 from an empty series")
    r = thresholds.r_type2_factor * float(np.quantile(radii, thresholds.r_type2_quantile))
    if not r > 0:
        r = math.inf  # every point at the origin: nothing is type-2
    return replace(thresholds, r_type2=r)


def classify_series(points: Sequence[PhasePoint], thresholds: ClassifierConfig = ClassifierConfig()):
    """Classify a whole run; returns ``(labelled points, resolved thresholds)``."""
    resolved = resolve_thresholds(points, thresholds)
    return [replace(p, label=classify(p, resolved)) for p in points], resolved


def _rolling_z(x: np.ndarray, w: int):
    windows = np.lib.stride_tricks.sliding_window_view(x, w)
    mean = windows.mean(axis=1)
    std = windows.std(axis=1)  # population convention
    zero = ~(std > 0)
    z = np.where(zero, 0.0, (x[w - 1:] - mean) / np.where(zero, 1.0, std))
    return z, zero


def rolling_standardize(series: Sequence[EntropyTriple], window: int = 25) -> list[StandardizedTriple]:
    """Rolling z-scores of ``H``, ``H_M`` and ``H_GR``.

    Output starts at the ``window``-th element. Windows with zero dispersion
    produce ``z = 0`` and set the matching ``zero_dispersion`` flag.
    """
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if len(series) < window:
        raise ValueError(f"series of length {len(series)} is shorter than window {window}")
    cols = np.array([[t.H, t.H_M, t.H_GR] for t in series], dtype=float)
    zs, flags = zip(*(_rolling_z(cols[:, j], window) for j in range(3)))
    out = []
    for k in range(len(series) - window + 1):
        out.append(StandardizedTriple(
            series[k + window - 1].end_date,
            float(zs[0][k]), float(zs[1][k]), float(zs[2][k]),
            (bool(flags[0][k]), bool(flags[1][k]), bool(flags[2][k])),
        ))
    return out


@dataclass(frozen=True)
class EventTrajectory:
    frames: tuple
    event_offset: int  # position of the event frame within ``frames``
    event_index: int  # position of the event frame within the full series
    truncated: bool

    def __len__(self):
        return len(self.frames)


def match_epoch(dates: Sequence[date], event_date: date) -> int:
    """Index of the latest ``dates`` entry on or before ``event_date``."""
    if not dates or event_date < dates[0] or event_date > dates[-1]:
        span = f"{dates[0]}..{dates[-1]}" if dates else "empty series"
        raise DateNotCovered(f"{event_date} not covered by {span}")
    lo, hi = 0, len(dates) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if dates[mid] <= event_date:
            lo = mid
        else:
            hi = mid - 1
    return lo


def event_window(series: Sequence, event_date: date, k: int = 3) -> EventTrajectory:
    """The ``2k+1`` frames centred on the epoch matching ``event_date``.

    Items of ``series`` need an ``end_date`` attribute. Frames falling off
    either end of the series are dropped and ``truncated`` is set.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    idx = match_epoch([s.end_date for s in series], event_date)
    lo, hi = max(0, idx - k), min(len(series), idx + k + 1)
    return EventTrajectory(tuple(series[lo:hi]), idx - lo, idx, (hi - lo) < 2 * k + 1)

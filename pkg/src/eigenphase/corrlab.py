"""Rolling-epoch Pearson correlation matrices."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from datetime import date
from typing import Iterator

import numpy as np

from .errors import WindowOutOfRange, WindowTooLarge
from .ingest import ReturnPanel
from ._io import atomic_write_text, dumps

__all__ = [
    "Epoch",
    "pearson_matrix",
    "epoch_correlation",
    "epoch_end_indices",
    "rolling_epochs",
    "iter_epochs",
    "mean_correlation",
    "epoch_record",
    "write_epochs_jsonl",
    "write_epoch_csv",
]


@dataclass(frozen=True, eq=False)
class Epoch:
    end_index: int
    end_date: date | None
    window: int
    corr: np.ndarray
    mu: float
    degenerate_tickers: tuple[int, ...] = field(default=())

    @property
    def n_assets(self) -> int:
        return self.corr.shape[0]


def pearson_matrix(x: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Pearson correlation of the rows of ``x`` (``N x M``).

    Rows that are constant over the window get zero off-diagonal correlation
    and a unit diagonal; their indices are returned alongside the matrix.
    """
    x = np.asarray(x, dtype=float)
    n, m = x.shape
    xc = x - x.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.einsum("ij,ij->i", xc, xc) / m)
    # constant rows, and rows whose dispersion underflows
    degenerate = (np.ptp(x, axis=1) == 0) | ~(sd > 0)
    xc[degenerate] = 0.0
    sd[degenerate] = 1.0
    cov = (xc @ xc.T) / m  # population normalisation
    c = cov / np.outer(sd, sd)
    c = 0.5 * (c + c.T)
    np.clip(c, -1.0, 1.0, out=c)
    np.fill_diagonal(c, 1.0)
    return c, tuple(int(i) for i in np.flatnonzero(degenerate))


def mean_correlation(corr: np.ndarray) -> float:
    """Mean of the ``N(N-1)`` off-diagonal entries."""
    corr = np.asarray(corr, dtype=float)
    n = corr.shape[0]
    if n < 2:
        raise ValueError("mean correlation needs N >= 2")
    off = corr[~np.eye(n, dtype=bool)]
    return float(np.sum(off) / off.size)


def epoch_correlation(panel: ReturnPanel, end_index: int, window: int) -> Epoch:
    """Correlation over the ``window`` return columns ending at ``end_index`` (inclusive)."""
    T = panel.returns.shape[1]
    if window < 2:
        raise WindowOutOfRange(f"window must be >= 2, got {window}")
    if not (window - 1 <= end_index < T):
        raise WindowOutOfRange(f"end_index {end_index} invalid for window {window} and {T} returns")
    x = panel.returns[:, end_index - window + 1 : end_index + 1]
    c, degenerate = pearson_matrix(x)
    end_date = panel.dates[end_index] if panel.dates else None
    return Epoch(end_index, end_date, window, c, mean_correlation(c), degenerate)


def epoch_end_indices(n_returns: int, window: int, shift: int) -> range:
    """End indices ``window-1, window-1+shift, ...``; ``(n_returns - window)//shift + 1`` of them."""
    if window < 2:
        raise WindowOutOfRange(f"window must be >= 2, got {window}")
    if shift < 1:
        raise WindowOutOfRange(f"shift must be >= 1, got {shift}")
    if window > n_returns:
        raise WindowTooLarge(f"window {window} exceeds {n_returns} available returns")
    return range(window - 1, n_returns, shift)


def iter_epochs(panel: ReturnPanel, window: int, shift: int) -> Iterator[Epoch]:
    for end in epoch_end_indices(panel.returns.shape[1], window, shift):
        yield epoch_correlation(panel, end, window)


def rolling_epochs(panel: ReturnPanel, window: int, shift: int) -> list[Epoch]:
    return list(iter_epochs(panel, window, shift))


def epoch_record(epoch: Epoch) -> dict:
    return {
        "end_date": epoch.end_date.isoformat() if epoch.end_date else None,
        "window": epoch.window,
        "mu": epoch.mu,
        "corr": epoch.corr.ravel().tolist(),
        "degenerate": list(epoch.degenerate_tickers),
    }


def write_epochs_jsonl(epochs, path: str | os.PathLike) -> None:
    lines = [dumps(epoch_record(e)) for e in epochs]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def write_epoch_csv(epoch: Epoch, path: str | os.PathLike, tickers=None) -> None:
    n = epoch.n_assets
    lines = []
    if tickers is not None:
        lines.append(",".join(["", *tickers]))
    for i in range(n):
        row = [repr(float(v)) for v in epoch.corr[i]]
        lines.append(",".join(([tickers[i]] if tickers is not None else []) + row))
    atomic_write_text(path, "\n".join(lines) + "\n")

"""Price table parsing, calendar alignment and log returns."""

from __future__ import annotations

import csv
import io
import math
import os
import re
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateObservation,
    EmptyInput,
    InputError,
    LagTooLarge,
    MalformedHeader,
    NoCommonDates,
    SingleSeries,
)
from ._io import atomic_write_text

__all__ = [
    "PriceSeries",
    "PricePanel",
    "ReturnPanel",
    "RowDiagnostic",
    "ParseResult",
    "parse_date",
    "parse_price_table",
    "read_price_file",
    "align_panel",
    "log_returns",
    "write_panel",
    "read_panel",
    "panel_to_csv",
]

_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


def parse_date(text: str) -> date:
    """Parse a strict ``YYYY-MM-DD`` date; raise ``ValueError`` otherwise."""
    text = text.strip()
    if not _ISO_DATE.match(text):
        raise ValueError(f"not an ISO date (YYYY-MM-DD): {text!r}")
    return date.fromisoformat(text)


@dataclass(frozen=True)
class PriceSeries:
    ticker: str
    dates: tuple[date, ...]
    prices: tuple[float, ...]
    sector: str | None = None

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError(f"{self.ticker}: dates not strictly increasing")
        if any(not (p > 0 and math.isfinite(p)) for p in self.prices):
            raise ValueError(f"{self.ticker}: non-positive or non-finite price")

    def __len__(self):
        return len(self.dates)

    @property
    def observations(self) -> list[tuple[date, float]]:
        return list(zip(self.dates, self.prices))


@dataclass(frozen=True, eq=False)
class PricePanel:
    """Aligned ``N x T`` price matrix.

    ``filled[i, t]`` is true where ticker ``i`` had no observation on
    ``dates[t]``; such cells hold the neighbouring observed price so the
    derived return is exactly zero.
    """

    tickers: tuple[str, ...]
    dates: tuple[date, ...]
    prices: np.ndarray
    filled: np.ndarray

    def __post_init__(self):
        n, t = len(self.tickers), len(self.dates)
        if self.prices.shape != (n, t) or self.filled.shape != (n, t):
            raise ValueError("prices/filled shape does not match tickers x dates")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("panel dates not strictly increasing")

    @property
    def shape(self) -> tuple[int, int]:
        return self.prices.shape

    def __eq__(self, other):
        if not isinstance(other, PricePanel):
            return NotImplemented
        return (
            self.tickers == other.tickers
            and self.dates == other.dates
            and np.array_equal(self.prices, other.prices)
            and np.array_equal(self.filled, other.filled)
        )


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """``N x (T - lag)`` log returns; ``dates[t]`` is the day the return ends on."""

    tickers: tuple[str, ...]
    dates: tuple[date, ...]
    returns: np.ndarray
    lag: int = 1

    @property
    def n_assets(self) -> int:
        return self.returns.shape[0]

    @property
    def n_times(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class RowDiagnostic:
    row: int  # 1-based line number in the source text (header is line 1)
    reason: str


@dataclass
class ParseResult:
    series: list[PriceSeries]
    rejected: list[RowDiagnostic] = field(default_factory=list)

    def __iter__(self):
        return iter(self.series)

    def __len__(self):
        return len(self.series)


def _parse_price(cell: str) -> float:
    value = float(cell)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"non-positive or non-finite price {cell.strip()!r}")
    return value


def _detect_format(header: list[str]) -> str:
    names = [h.strip().lower() for h in header]
    if {"date", "ticker", "price"} <= set(names):
        return "long"
    return "wide"


def parse_price_table(text: str | Iterable[str], format: str | None = None) -> ParseResult:
    """Parse a CSV price table in ``long`` or ``wide`` layout.

    Long tables need the columns ``date,ticker,price`` (any order, extra
    columns ignored, an optional ``sector`` column is kept). Wide tables have
    a leading ``date`` column and one column per ticker, empty cells meaning
    "not observed". With ``format=None`` the layout is inferred from the
    header.

    Rows with a bad date or a non-positive price are skipped and reported in
    ``ParseResult.rejected``; structural problems raise.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    reader = csv.reader(text)
    header = None
    for header in reader:
        if any(cell.strip() for cell in header):
            break
    else:
        raise EmptyInput("no header row found")
    header = [h.strip() for h in header]
    if format is None:
        format = _detect_format(header)
    if format == "long":
        return _parse_long(header, reader)
    if format == "wide":
        return _parse_wide(header, reader)
    raise ValueError(f"unknown table format {format!r}")


def _parse_long(header, reader) -> ParseResult:
    lowered = [h.lower() for h in header]
    try:
        i_date, i_tic, i_px = (lowered.index(k) for k in ("date", "ticker", "price"))
    except ValueError:
        raise MalformedHeader(f"long format needs date,ticker,price columns; got {header}") from None
    i_sec = lowered.index("sector") if "sector" in lowered else None
    width = max(i_date, i_tic, i_px, -1 if i_sec is None else i_sec) + 1

    obs: dict[str, dict[date, float]] = {}
    sectors: dict[str, str] = {}
    rejected = []
    for row in reader:
        line = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        if len(row) < width:
            rejected.append(RowDiagnostic(line, f"expected at least {width} cells, got {len(row)}"))
            continue
        ticker = row[i_tic].strip()
        if not ticker:
            rejected.append(RowDiagnostic(line, "empty ticker"))
            continue
        try:
            day = parse_date(row[i_date])
            price = _parse_price(row[i_px])
        except ValueError as exc:
            rejected.append(RowDiagnostic(line, str(exc)))
            continue
        per = obs.setdefault(ticker, {})
        if day in per:
            raise DuplicateObservation(f"line {line}: {ticker} observed twice on {day}")
        per[day] = price
        if i_sec is not None and row[i_sec].strip():
            sectors.setdefault(ticker, row[i_sec].strip())
    if not obs:
        raise EmptyInput("no valid observations")
    series = []
    for ticker, per in obs.items():
        days = sorted(per)
        series.append(PriceSeries(ticker, tuple(days), tuple(per[d] for d in days), sectors.get(ticker)))
    return ParseResult(series, rejected)


def _parse_wide(header, reader) -> ParseResult:
    if len(header) < 2 or header[0].lower() != "date":
        raise MalformedHeader(f"wide format needs 'date' followed by ticker columns; got {header}")
    tickers = header[1:]
    if any(not t for t in tickers):
        raise MalformedHeader("empty ticker name in header")
    if len(set(tickers)) != len(tickers):
        raise MalformedHeader("duplicate ticker column in header")

    columns: list[dict[date, float]] = [{} for _ in tickers]
    seen_dates: set[date] = set()
    rejected = []
    for row in reader:
        line = reader.line_num
        if not any(cell.strip() for cell in row):
            continue
        try:
            day = parse_date(row[0])
        except ValueError as exc:
            rejected.append(RowDiagnostic(line, str(exc)))
            continue
        if day in seen_dates:
            raise DuplicateObservation(f"line {line}: date {day} appears twice")
        seen_dates.add(day)
        if len(row) > len(header):
            rejected.append(RowDiagnostic(line, f"{len(row)} cells for {len(header)} columns"))
            continue
        for j, cell in enumerate(row[1:]):
            if not cell.strip():
                continue
            try:
                columns[j][day] = _parse_price(cell)
            except ValueError as exc:
                rejected.append(RowDiagnostic(line, f"{tickers[j]}: {exc}"))
    series = []
    for ticker, per in zip(tickers, columns):
        if per:
            days = sorted(per)
            series.append(PriceSeries(ticker, tuple(days), tuple(per[d] for d in days)))
    if not series:
        raise EmptyInput("no valid observations")
    return ParseResult(series, rejected)


def read_price_file(path: str | os.PathLike, format: str | None = None) -> ParseResult:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return parse_price_table(fh, format)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def align_panel(series: Sequence[PriceSeries], calendar: str = "union") -> PricePanel:
    """Put every series on a shared date axis.

    ``union`` keeps every date seen in any series. A gap is filled with the
    last observed price; days before a ticker's first observation take its
    first price. Both produce zero returns, which is how missing trading days
    are treated. ``intersection`` keeps only dates common to all series.
    """
    series = list(series)
    if len(series) < 2:
        raise SingleSeries(f"need at least 2 series, got {len(series)}")
    if any(len(s) == 0 for s in series):
        raise EmptyInput("empty price series")
    tickers = tuple(s.ticker for s in series)
    if len(set(tickers)) != len(tickers):
        raise DuplicateObservation("ticker appears in more than one series")

    if calendar == "union":
        days = sorted(set().union(*(s.dates for s in series)))
    elif calendar == "intersection":
        common = set(series[0].dates).intersection(*(s.dates for s in series[1:]))
        if not common:
            raise NoCommonDates("series share no common date")
        days = sorted(common)
    else:
        raise ValueError(f"unknown calendar {calendar!r}")

    index = {d: t for t, d in enumerate(days)}
    n, T = len(series), len(days)
    prices = np.full((n, T), np.nan)
    for i, s in enumerate(series):
        for d, p in zip(s.dates, s.prices):
            if d in index:
                prices[i, index[d]] = p
    filled = np.isnan(prices)
    for i in range(n):
        row = prices[i]
        observed = np.flatnonzero(~filled[i])
        # forward fill: position of the latest observation at or before t
        last = np.maximum.accumulate(np.where(~filled[i], np.arange(T), -1))
        last[last < 0] = observed[0]
        prices[i] = row[last]
    return PricePanel(tickers, tuple(days), prices, filled)


def log_returns(panel: PricePanel, lag: int = 1) -> ReturnPanel:
    """``r[i, t] = ln P[i, t + lag] - ln P[i, t]``; zero where ``P[i, t + lag]`` was filled."""
    T = len(panel.dates)
    if lag < 1:
        raise LagTooLarge(f"lag must be a positive integer, got {lag}")
    if lag >= T:
        raise LagTooLarge(f"lag {lag} leaves no returns for {T} dates")
    logp = np.log(panel.prices)
    r = logp[:, lag:] - logp[:, :-lag]
    r[panel.filled[:, lag:]] = 0.0
    return ReturnPanel(panel.tickers, panel.dates[lag:], r, lag)


def panel_to_csv(panel: PricePanel) -> tuple[str, str]:
    """Return ``(prices_csv, mask_csv)`` texts in wide layout."""
    head = ",".join(("date",) + panel.tickers)
    px_lines, mask_lines = [head], [head]
    for t, d in enumerate(panel.dates):
        px_lines.append(",".join([d.isoformat()] + [repr(float(v)) for v in panel.prices[:, t]]))
        mask_lines.append(",".join([d.isoformat()] + ["1" if m else "0" for m in panel.filled[:, t]]))
    return "\n".join(px_lines) + "\n", "\n".join(mask_lines) + "\n"


def _mask_path(path: Path) -> Path:
    return path.with_name(path.stem + ".mask.csv")


def write_panel(panel: PricePanel, path: str | os.PathLike) -> Path:
    """Write ``path`` (prices) and the sibling ``<stem>.mask.csv``."""
    path = Path(path)
    prices, mask = panel_to_csv(panel)
    atomic_write_text(path, prices)
    atomic_write_text(_mask_path(path), mask)
    return path


def read_panel(path: str | os.PathLike) -> PricePanel:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    with open(_mask_path(path), newline="", encoding="utf-8") as fh:
        mrows = [r for r in csv.reader(fh) if r]
    if not rows or rows[0][0] != "date" or rows[0] != mrows[0]:
        raise MalformedHeader(f"{path}: price and mask headers disagree")
    if len(rows) != len(mrows):
        raise InputError(f"{path}: price and mask row counts differ")
    tickers = tuple(rows[0][1:])
    dates = tuple(parse_date(r[0]) for r in rows[1:])
    prices = np.array([[float(c) for c in r[1:]] for r in rows[1:]], dtype=float).T
    filled = np.array([[c == "1" for c in r[1:]] for r in mrows[1:]], dtype=bool).T
    return PricePanel(tickers, dates, prices.reshape(len(tickers), len(dates)),
                      filled.reshape(len(tickers), len(dates)))

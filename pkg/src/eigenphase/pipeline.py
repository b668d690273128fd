"""Returns panel -> epochs -> entropy triples -> classified phase records."""

from __future__ import annotations

import json
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from .corrlab import epoch_correlation, epoch_end_indices
from .errors import ConfigError, InputError
from .ingest import ReturnPanel, parse_date
from .phase import (
    ClassifierConfig,
    EntropyTriple,
    PhasePoint,
    classify_series,
    entropy_triple,
    phase_coordinates,
)
from .spectral import symmetric_eigen
from ._io import dumps, fmt

__all__ = [
    "RunConfig",
    "RECORD_FIELDS",
    "AnalysisResult",
    "compute_triples",
    "analyze_returns",
    "record_dict",
    "records_jsonl",
    "records_csv",
    "read_records",
]

log = logging.getLogger(__name__)

RECORD_FIELDS = ("end_date", "mu", "H", "H_M", "H_GR", "d_M", "d_GR", "d_MGR", "label", "degenerate")


@dataclass(frozen=True)
class RunConfig:
    window: int = 40
    epoch_shift: int = 20
    return_lag: int = 1
    n_power: int = 2
    n_group: int | None = 20
    thresholds: ClassifierConfig = field(default_factory=ClassifierConfig)
    standardize_window: int = 25
    seed: int = 0

    def validate(self) -> "RunConfig":
        for name in ("window", "epoch_shift", "return_lag", "n_power", "standardize_window"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.window < 2:
            raise ConfigError(f"window must be > 1, got {self.window}")
        if self.standardize_window < 2:
            raise ConfigError("standardize_window must be >= 2")
        if self.n_group is not None and (not isinstance(self.n_group, int) or self.n_group < 2):
            raise ConfigError(f"n_group must be an integer >= 2, got {self.n_group!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        self.thresholds.validate(need_r_type2=False)
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        th = data.get("thresholds")
        if isinstance(th, dict):
            tknown = {f.name for f in fields(ClassifierConfig)}
            if set(th) - tknown:
                raise ConfigError(f"unknown threshold keys: {sorted(set(th) - tknown)}")
            data["thresholds"] = ClassifierConfig(**th)
        return cls(**data)


# per-process panel, installed by the pool initializer
_PANEL: ReturnPanel | None = None


def _install(panel):
    global _PANEL
    _PANEL = panel


def _epoch_task(args):
    end, window, powers = args
    epoch = epoch_correlation(_PANEL, end, window)
    d = symmetric_eigen(epoch.corr)
    return [entropy_triple(epoch, n, d) for n in powers]


def _map(tasks, panel, jobs):
    if jobs is None or jobs < 1:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(tasks) < 2:
        _install(panel)
        try:
            return [_epoch_task(t) for t in tasks]
        finally:
            _install(None)
    chunk = max(1, len(tasks) // (8 * jobs))
    with ProcessPoolExecutor(jobs, initializer=_install, initargs=(panel,)) as pool:
        return list(pool.map(_epoch_task, tasks, chunksize=chunk))


def compute_triples(returns: ReturnPanel, window: int, shift: int,
                    powers: Sequence[int] = (2,), jobs: int | None = 1) -> dict[int, list[EntropyTriple]]:
    """Entropy triples for every epoch, one list per power ``n``.

    The eigendecomposition of each epoch is shared by all powers. Output is
    ordered by epoch end date regardless of ``jobs``.
    """
    ends = epoch_end_indices(returns.returns.shape[1], window, shift)
    powers = tuple(int(n) for n in powers)
    rows = _map([(e, window, powers) for e in ends], returns, jobs)
    return {n: [r[k] for r in rows] for k, n in enumerate(powers)}


@dataclass
class AnalysisResult:
    triples: list[EntropyTriple]
    points: list[PhasePoint]
    thresholds: ClassifierConfig
    config: RunConfig

    @property
    def labels(self) -> list[str]:
        return [p.label for p in self.points]

    def label_counts(self) -> dict[str, int]:
        counts = Counter(self.labels)
        return {k: counts.get(k, 0) for k in ("crash", "type1", "type2", "anomaly", "normal")}

    def records(self) -> list[dict]:
        return [record_dict(t, p) for t, p in zip(self.triples, self.points)]


def analyze_returns(returns: ReturnPanel, config: RunConfig = RunConfig(), jobs: int | None = 1) -> AnalysisResult:
    config.validate()
    triples = compute_triples(returns, config.window, config.epoch_shift, (config.n_power,), jobs)[config.n_power]
    points, resolved = classify_series([phase_coordinates(t) for t in triples], config.thresholds)
    return AnalysisResult(triples, points, resolved, config)


def record_dict(t: EntropyTriple, p: PhasePoint) -> dict:
    return {
        "end_date": t.end_date.isoformat() if t.end_date else None,
        "mu": t.mu,
        "H": t.H,
        "H_M": t.H_M,
        "H_GR": t.H_GR,
        "d_M": p.d_M,
        "d_GR": p.d_GR,
        "d_MGR": p.d_MGR,
        "label": p.label,
        "degenerate": t.degenerate,
    }


def records_jsonl(records: Iterable[dict]) -> str:
    return "".join(dumps(r) + "\n" for r in records)


def records_csv(records: Iterable[dict]) -> str:
    lines = [",".join(RECORD_FIELDS)]
    for r in records:
        lines.append(",".join(fmt(r[k]) for k in RECORD_FIELDS))
    return "\n".join(lines) + "\n"


def read_records(path) -> tuple[list[EntropyTriple], list[PhasePoint]]:
    """Load a JSON-lines record stream written by :func:`records_jsonl`."""
    triples, points = [], []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                r = json.loads(line)
                end = parse_date(r["end_date"])
                vals = [math.nan if r[k] is None else float(r[k]) for k in ("mu", "H", "H_M", "H_GR", "d_M", "d_GR", "d_MGR")]
            except (ValueError, KeyError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad record ({exc})") from exc
            mu, h, hm, hgr, dm, dgr, dmgr = vals
            triples.append(EntropyTriple(end, h, hm, hgr, mu, 0, bool(r.get("degenerate", False))))
            points.append(PhasePoint(dm, dgr, dmgr, r.get("label"), end))
    return triples, points

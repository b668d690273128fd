"""Command line front end.

Subcommands::

    eigenphase analyze PRICES.csv      per-epoch records, summary, phase scatter
    eigenphase sweep PRICES.csv        H series over a grid of window/shift/power
    eigenphase woe                     Wishart ensemble entropy baseline
    eigenphase events RECORDS EVENTS   seven-frame trajectories around dated events

Exit codes: 0 success, 1 input error, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import fit_scaling
from .ensemble import EnsembleSpec, baseline
from .errors import ConfigError, EigenphaseError, InputError
from .ingest import align_panel, log_returns, parse_date, read_price_file
from .phase import event_window, rolling_standardize
from .pipeline import (
    RunConfig,
    analyze_returns,
    compute_triples,
    read_records,
    records_csv,
    records_jsonl,
)
from ._io import atomic_write_text, dumps, fmt

log = logging.getLogger("eigenphase")

DEFAULT_OUT = "eigenphase_out"
SWEEP_WINDOWS = (20, 40, 100, 200)
SWEEP_SHIFTS = (1, 10, 20, 40)
SWEEP_POWERS = (1, 2, 3, 4, 5)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    g.add_argument("--window", type=int, help="epoch size M in return days (default 40)")
    g.add_argument("--shift", type=int, dest="epoch_shift", help="epoch shift in days (default 20)")
    g.add_argument("--return-lag", type=int, help="return horizon in days (default 1)")
    g.add_argument("--power", type=int, dest="n_power", help="n in |C_ij|^n (default 2)")
    g.add_argument("--n-group", type=int, help="number of group modes N_G (default 20)")
    g.add_argument("--standardize-window", type=int, help="rolling z-score window in epochs (default 25)")
    g.add_argument("--eps-crash", type=float)
    g.add_argument("--eps-type1", type=float)
    g.add_argument("--r-anomaly", type=float)
    g.add_argument("--r-type2", type=float, help="default: 0.9 x 99th percentile radius of the run")
    g.add_argument("--seed", type=int)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help=f"output directory (default $EIGENPHASE_OUT or ./{DEFAULT_OUT})")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("prices", type=Path, help="price table CSV (long: date,ticker,price; wide: date,<tickers...>)")
    p.add_argument("--format", choices=("auto", "long", "wide"), default="auto")
    p.add_argument("--calendar", choices=("union", "intersection"), default="union")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eigenphase", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="entropy triples and phase labels per epoch")
    _add_input(p)
    _add_run_flags(p)
    _add_common(p)
    p.add_argument("--fit", action="store_true", help="fit H - H_M = alpha exp(b mu) and add it to the summary")

    p = sub.add_parser("sweep", help="H series over a parameter grid")
    _add_input(p)
    _add_run_flags(p)
    _add_common(p)
    p.add_argument("--windows", type=_int_list, default=SWEEP_WINDOWS)
    p.add_argument("--shifts", type=_int_list, default=SWEEP_SHIFTS)
    p.add_argument("--powers", type=_int_list, default=SWEEP_POWERS)

    p = sub.add_parser("woe", help="Wishart orthogonal ensemble baseline")
    p.add_argument("--n-assets", type=int, default=194)
    p.add_argument("--n-obs", type=int, default=None, help="observations per sample (default: n-assets)")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--power", type=int, default=2)
    _add_common(p)

    p = sub.add_parser("events", help="trajectories around listed events")
    p.add_argument("records", type=Path, help="records.jsonl from 'analyze'")
    p.add_argument("events", type=Path, help="CSV with header name,date (ISO dates)")
    p.add_argument("--k", type=int, default=3, help="frames on each side of the event (default 3)")
    p.add_argument("--standardize-window", type=int, default=25)
    _add_common(p)
    return parser


def resolve_config(args) -> RunConfig:
    base = RunConfig()
    if getattr(args, "config", None) is not None:
        try:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        try:
            base = RunConfig.from_dict(data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
    over = {k: getattr(args, k) for k in
            ("window", "epoch_shift", "return_lag", "n_power", "n_group", "standardize_window", "seed")
            if getattr(args, k, None) is not None}
    th = {k: getattr(args, k) for k in ("eps_crash", "eps_type1", "r_anomaly", "r_type2")
          if getattr(args, k, None) is not None}
    cfg = replace(base, **over)
    if th:
        cfg = replace(cfg, thresholds=replace(cfg.thresholds, **th))
    return cfg.validate()


def _out_dir(args) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.environ.get("EIGENPHASE_OUT") or DEFAULT_OUT)


def _jobs(args) -> int:
    if args.jobs is not None and args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return args.jobs or os.cpu_count() or 1


def _load_returns(args, lag):
    fmt_ = None if args.format == "auto" else args.format
    parsed = read_price_file(args.prices, fmt_)
    for diag in parsed.rejected:
        log.warning("%s:%d: rejected row: %s", args.prices, diag.row, diag.reason)
    panel = align_panel(parsed.series, args.calendar)
    return log_returns(panel, lag), parsed


def cmd_analyze(args) -> int:
    cfg = resolve_config(args)
    jobs = _jobs(args)
    returns, parsed = _load_returns(args, cfg.return_lag)
    result = analyze_returns(returns, cfg, jobs)
    records = result.records()

    summary = {
        "n_epochs": len(records),
        "n_tickers": returns.n_assets,
        "n_returns": returns.n_times,
        "first_end_date": records[0]["end_date"] if records else None,
        "last_end_date": records[-1]["end_date"] if records else None,
        "rejected_rows": len(parsed.rejected),
        "label_counts": result.label_counts(),
        "thresholds": {k: v for k, v in vars(result.thresholds).items()},
        "config": cfg.to_dict(),
    }
    if args.fit:
        try:
            fit = fit_scaling([t.mu for t in result.triples], [t.H - t.H_M for t in result.triples])
            summary["fit"] = fit.to_dict()
        except InputError as exc:
            summary["fit"] = {"error": str(exc)}

    out = _out_dir(args)
    scatter = ["d_M,d_GR,label"] + [f"{fmt(r['d_M'])},{fmt(r['d_GR'])},{r['label']}" for r in records]
    atomic_write_text(out / "records.jsonl", records_jsonl(records))
    atomic_write_text(out / "records.csv", records_csv(records))
    atomic_write_text(out / "phase_scatter.csv", "\n".join(scatter) + "\n")
    atomic_write_text(out / "summary.json", dumps(summary, indent=2, sort_keys=True) + "\n")
    log.info("wrote %d epoch records to %s", len(records), out)
    return 0


def _sweep_csv(triples) -> str:
    lines = ["end_date,H,H_M,H_GR,mu"]
    for t in triples:
        lines.append(",".join([t.end_date.isoformat(), fmt(t.H), fmt(t.H_M), fmt(t.H_GR), fmt(t.mu)]))
    return "\n".join(lines) + "\n"


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    jobs = _jobs(args)
    if min(args.windows) < 2 or min(args.shifts) < 1 or min(args.powers) < 1:
        raise ConfigError("sweep values must be positive (windows >= 2)")
    returns, _ = _load_returns(args, cfg.return_lag)
    T = returns.n_times
    out = _out_dir(args)

    # (M, D) -> powers to evaluate on that epoch grid
    grid: dict[tuple[int, int], set[int]] = {}
    for m in args.windows:
        for d in args.shifts:
            grid.setdefault((m, d), set()).add(cfg.n_power)
    grid.setdefault((cfg.window, cfg.epoch_shift), set()).update(args.powers)

    written, skipped = [], []
    power_series = {}
    for (m, d), powers in sorted(grid.items()):
        if m > T:
            log.warning("skipping M=%d, shift=%d: window exceeds %d returns", m, d, T)
            skipped.append({"window": m, "shift": d, "reason": f"window exceeds {T} returns"})
            continue
        res = compute_triples(returns, m, d, sorted(powers), jobs)
        for n, triples in res.items():
            name = f"H_M{m}_D{d}_n{n}.csv"
            atomic_write_text(out / name, _sweep_csv(triples))
            written.append(name)
            if (m, d) == (cfg.window, cfg.epoch_shift) and n in args.powers:
                power_series[n] = np.array([t.H for t in triples])

    if len(power_series) >= 2:
        ns = sorted(power_series)
        mat = np.corrcoef(np.vstack([power_series[n] for n in ns]))
        lines = [",".join([""] + [f"n{n}" for n in ns])]
        lines += [",".join([f"n{n}"] + [fmt(float(v)) for v in row]) for n, row in zip(ns, mat)]
        atomic_write_text(out / "H_power_correlation.csv", "\n".join(lines) + "\n")
    atomic_write_text(out / "sweep_summary.json", dumps(
        {"files": written, "skipped": skipped, "config": cfg.to_dict(),
         "windows": list(args.windows), "shifts": list(args.shifts), "powers": list(args.powers)},
        indent=2, sort_keys=True) + "\n")
    return 0


def cmd_woe(args) -> int:
    try:
        spec = EnsembleSpec(args.n_assets, args.n_obs, args.replicates, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.power < 1:
        raise ConfigError("--power must be >= 1")
    report = baseline(spec, args.power, _jobs(args))
    out = _out_dir(args)
    atomic_write_text(out / "woe_baseline.json", dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    curve = ["rank,mean_p"] + [f"{i + 1},{fmt(p)}" for i, p in enumerate(report.mean_centralities)]
    atomic_write_text(out / "woe_centralities.csv", "\n".join(curve) + "\n")
    log.info("mean H = %.6f (ln N = %.6f)", report.mean_H, report.ln_n)
    return 0


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_").lower() or "event"


def read_events(path: Path):
    """``[(line, name, date | None, problem | None)]`` from a ``name,date`` CSV."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        if header[:2] != ["name", "date"]:
            raise InputError(f"{path}: expected header 'name,date', got {header}")
        rows = []
        for row in reader:
            if not any(c.strip() for c in row):
                continue
            if len(row) < 2:
                rows.append((reader.line_num, ",".join(row), None, "missing date"))
                continue
            try:
                rows.append((reader.line_num, row[0].strip(), parse_date(row[1]), None))
            except ValueError as exc:
                rows.append((reader.line_num, row[0].strip(), None, str(exc)))
    return rows


EVENT_FIELDS = ("offset", "end_date", "mu", "H", "H_M", "H_GR", "H_std", "H_M_std", "H_GR_std",
                "d_M", "d_GR", "label", "is_event", "truncated")


def cmd_events(args) -> int:
    if args.k < 1 or args.standardize_window < 2:
        raise ConfigError("--k must be >= 1 and --standardize-window >= 2")
    triples, points = read_records(args.records)
    if not triples:
        raise InputError(f"{args.records}: no records")
    events = read_events(args.events)
    w = args.standardize_window
    std = [None] * len(triples)
    if len(triples) >= w:
        for i, s in enumerate(rolling_standardize(triples, w)):
            std[i + w - 1] = s
    else:
        log.warning("only %d records; standardized columns left empty (window %d)", len(triples), w)
    frames = list(range(len(triples)))

    class _Frame:  # event_window only needs end_date
        __slots__ = ("i", "end_date")

        def __init__(self, i):
            self.i, self.end_date = i, triples[i].end_date

    series = [_Frame(i) for i in frames]
    out = _out_dir(args)
    report = []
    for n, (line, name, day, problem) in enumerate(events):
        entry = {"line": line, "name": name, "date": day.isoformat() if day else None}
        if problem:
            log.warning("%s:%d: %s", args.events, line, problem)
            report.append({**entry, "status": "bad_row", "detail": problem})
            continue
        try:
            traj = event_window(series, day, args.k)
        except EigenphaseError as exc:
            log.warning("%s:%d: %s", args.events, line, exc)
            report.append({**entry, "status": "not_covered", "detail": str(exc)})
            continue
        lines = [",".join(EVENT_FIELDS)]
        for j, f in enumerate(traj.frames):
            t, p, s = triples[f.i], points[f.i], std[f.i]
            row = [j - traj.event_offset, t.end_date.isoformat(), t.mu, t.H, t.H_M, t.H_GR,
                   s.H_std if s else None, s.H_M_std if s else None, s.H_GR_std if s else None,
                   p.d_M, p.d_GR, p.label or "", j == traj.event_offset, traj.truncated]
            lines.append(",".join(fmt(v) for v in row))
        fname = f"event_{n + 1:02d}_{_slug(name)}.csv"
        atomic_write_text(out / fname, "\n".join(lines) + "\n")
        report.append({**entry, "status": "ok", "file": fname,
                       "matched_end_date": triples[traj.frames[traj.event_offset].i].end_date.isoformat(),
                       "n_frames": len(traj), "truncated": traj.truncated})
    atomic_write_text(out / "events_report.json", dumps(
        {"events": report, "k": args.k, "standardize_window": w}, indent=2, sort_keys=True) + "\n")
    return 0


COMMANDS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "woe": cmd_woe, "events": cmd_events}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are configuration errors
        return 0 if exc.code in (0, None) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except EigenphaseError as exc:
        print(f"eigenphase: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"eigenphase: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

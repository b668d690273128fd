import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from eigenphase.cli import main
from eigenphase.ensemble import one_factor_returns
from eigenphase.pipeline import RECORD_FIELDS

from conftest import price_panel_from_returns, wide_csv


@pytest.fixture(scope="module")
def prices(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "prices.csv"
    rets = one_factor_returns(12, 420, 0.5, 3, 0) * 0.01
    path.write_text(wide_csv(price_panel_from_returns(rets)))
    return path


@pytest.fixture(scope="module")
def analyzed(prices, tmp_path_factory):
    out = tmp_path_factory.mktemp("analyze")
    assert main(["analyze", str(prices), "--out", str(out), "--jobs", "1", "--fit"]) == 0
    return out


def test_analyze_outputs(analyzed):
    records = [json.loads(line) for line in (analyzed / "records.jsonl").read_text().splitlines()]
    assert len(records) == (420 - 40) // 20 + 1
    assert all(set(RECORD_FIELDS) <= set(r) for r in records)
    with open(analyzed / "records.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(records)
    assert tuple(rows[0]) == RECORD_FIELDS
    summary = json.loads((analyzed / "summary.json").read_text())
    assert summary["n_epochs"] == len(records)
    assert summary["n_tickers"] == 12
    assert sum(summary["label_counts"].values()) == len(records)
    assert summary["config"]["window"] == 40
    assert "b" in summary["fit"]
    scatter = (analyzed / "phase_scatter.csv").read_text().splitlines()
    assert scatter[0] == "d_M,d_GR,label" and len(scatter) == len(records) + 1
    for r in records:
        assert r["d_M"] >= 0 and r["d_GR"] >= 0
        assert r["d_MGR"] == pytest.approx(r["H_M"] - r["H_GR"], abs=1e-12)


def test_analyze_rerun_is_byte_identical(prices, analyzed, tmp_path):
    assert main(["analyze", str(prices), "--out", str(tmp_path), "--jobs", "2", "--fit"]) == 0
    for name in ("records.jsonl", "records.csv", "phase_scatter.csv", "summary.json"):
        assert (tmp_path / name).read_bytes() == (analyzed / name).read_bytes()


def test_window_too_large_is_a_config_error(prices, tmp_path):
    out = tmp_path / "o"
    assert main(["analyze", str(prices), "--out", str(out), "--window", "5000"]) == 2
    assert not out.exists() or not any(out.iterdir())


def test_usage_and_input_errors(tmp_path):
    assert main(["analyze"]) == 2
    assert main(["analyze", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 1
    bad = tmp_path / "bad.csv"
    bad.write_text("date,A\n2020-01-02,1.0\n")
    assert main(["analyze", str(bad), "--out", str(tmp_path)]) == 1


def test_out_from_environment(prices, tmp_path, monkeypatch):
    monkeypatch.setenv("EIGENPHASE_OUT", str(tmp_path / "env"))
    assert main(["analyze", str(prices), "--jobs", "1", "--window", "100", "--shift", "100"]) == 0
    assert (tmp_path / "env" / "records.jsonl").exists()


def test_config_file_and_flag_override(prices, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"window": 100, "epoch_shift": 50, "thresholds": {"eps_crash": 0.03}}))
    out = tmp_path / "o"
    assert main(["analyze", str(prices), "--out", str(out), "--config", str(cfg), "--shift", "100"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["window"] == 100 and summary["config"]["epoch_shift"] == 100
    assert summary["thresholds"]["eps_crash"] == 0.03
    assert summary["n_epochs"] == (420 - 100) // 100 + 1
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["analyze", str(prices), "--out", str(out), "--config", str(cfg)]) == 2


def test_sweep(prices, tmp_path):
    rc = main(["sweep", str(prices), "--out", str(tmp_path), "--jobs", "1",
               "--windows", "20,40,100,200", "--shifts", "1,10,20,40", "--powers", "2,4"])
    assert rc == 0
    files = sorted(p.name for p in tmp_path.glob("H_M*_D*_n2.csv"))
    assert len(files) == 16
    assert (tmp_path / "H_M40_D20_n4.csv").exists()
    with open(tmp_path / "H_M40_D20_n2.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["end_date", "H", "H_M", "H_GR", "mu"]
    assert len(rows) == (420 - 40) // 20 + 1
    with open(tmp_path / "H_power_correlation.csv", newline="") as fh:
        corr = {r[""]: r for r in csv.DictReader(fh)}
    assert float(corr["n2"]["n4"]) > 0.5


def test_sweep_skips_infeasible_window(prices, tmp_path):
    assert main(["sweep", str(prices), "--out", str(tmp_path), "--windows", "40,1000",
                 "--shifts", "20", "--powers", "2"]) == 0
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    assert summary["skipped"][0]["window"] == 1000
    assert not (tmp_path / "H_M1000_D20_n2.csv").exists()


def test_woe(tmp_path):
    assert main(["woe", "--n-assets", "30", "--replicates", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "woe_baseline.json").read_text())
    assert rep["std_H"] == 0.0
    assert rep["mean_H"] <= np.log(30)
    curve = (tmp_path / "woe_centralities.csv").read_text().splitlines()
    assert curve[0] == "rank,mean_p" and len(curve) == 31
    assert main(["woe", "--n-assets", "1", "--out", str(tmp_path)]) == 2


def test_events(analyzed, tmp_path):
    records = [json.loads(line) for line in (analyzed / "records.jsonl").read_text().splitlines()]
    mid = records[10]["end_date"]
    ev = tmp_path / "events.csv"
    ev.write_text("name,date\n"
                  f"Mid crash,{mid}\n"
                  f"Start,{records[0]['end_date']}\n"
                  "Broken,2001-13-45\n"
                  "Too early,1990-01-01\n")
    out = tmp_path / "ev"
    assert main(["events", str(analyzed / "records.jsonl"), str(ev), "--out", str(out),
                 "--standardize-window", "5"]) == 0
    report = json.loads((out / "events_report.json").read_text())["events"]
    assert [e["status"] for e in report] == ["ok", "ok", "bad_row", "not_covered"]
    with open(out / report[0]["file"], newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 7
    assert [int(r["offset"]) for r in rows] == [-3, -2, -1, 0, 1, 2, 3]
    assert rows[3]["end_date"] == mid and rows[3]["is_event"] == "true"
    assert all(r["H_std"] != "" for r in rows)
    assert report[1]["truncated"] and report[1]["n_frames"] == 4


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "eigenphase", "woe", "--n-assets", "5",
                          "--replicates", "2", "--out", str(tmp_path)], capture_output=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "eigenphase", "nope"], capture_output=True)
    assert res.returncode == 2

"""
Command line round trip
-----------------------

The same pipeline through the ``eigenphase`` command: analyze a price
file, then extract a seven-frame trajectory around a dated event.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from eigenphase.cli import main
from eigenphase.ensemble import one_factor_returns

work = Path(tempfile.mkdtemp())
rets = 0.01 * one_factor_returns(8, 600, 0.4, seed=6)
prices = 50 * np.exp(np.cumsum(rets, axis=1))
dates = np.arange("2015-01-01", "2018-01-01", dtype="datetime64[D]")
dates = dates[np.is_busday(dates)][:600]
rows = ["date," + ",".join(f"X{i}" for i in range(8))]
rows += [f"{d}," + ",".join("%.5f" % v for v in prices[:, t]) for t, d in enumerate(dates)]
(work / "prices.csv").write_text("\n".join(rows) + "\n")

rc = main(["analyze", str(work / "prices.csv"), "--out", str(work / "run"), "--fit", "--jobs", "1"])
summary = json.loads((work / "run" / "summary.json").read_text())
print("exit", rc, " epochs", summary["n_epochs"], " labels", summary["label_counts"])

(work / "events.csv").write_text("name,date\nSomething happened,2016-06-24\n")
rc = main(["events", str(work / "run" / "records.jsonl"), str(work / "events.csv"),
           "--out", str(work / "events"), "--standardize-window", "10"])
report = json.loads((work / "events" / "events_report.json").read_text())
print("exit", rc, report["events"][0]["status"], report["events"][0]["matched_end_date"])
print((work / "events" / report["events"][0]["file"]).read_text())

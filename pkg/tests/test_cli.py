import csv
import io
import json

import pytest

from hybridsom.cli import dispatch
from hybridsom.ingest import MonthKey, synth_generate


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    months = [MonthKey(2012, 1), MonthKey(2012, 2)]
    table = synth_generate(12, 3, months, seed=4)
    with open(d / "in.csv", "w") as fh:
        table.to_csv(fh)
    (d / "c.json").write_text(json.dumps({
        "months": ["2012-01", "2012-02"],
        "som_clusters_per_month": {"2012-01": 5, "2012-02": 5},
        "k_max": 6,
        "seed": 1,
    }))
    return d


def test_synth_smoke(tmp_path):
    code, out, err = call("synth", "--series", "4", "--archetypes", "4", "--months", "2012-01",
                          "--seed", "7", "--out", str(tmp_path / "s.csv"), "--truth", str(tmp_path / "t.csv"))
    assert code == 0 and out == "" and err == ""
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "series_id,timestamp,kwh"
    assert {ln.split(",")[0] for ln in lines[1:]} == {"s0", "s1", "s2", "s3"}
    assert (tmp_path / "t.csv").read_text() == "series_id,archetype\ns0,0\ns1,1\ns2,2\ns3,3\n"


def test_negative_kwh_is_runtime_error(tmp_path, data_dir):
    bad = tmp_path / "bad.csv"
    bad.write_text("series_id,timestamp,kwh\nH1,2012-01-01 00:00,-1.0\n")
    code, out, err = call("run", "--config", str(data_dir / "c.json"), "--input", str(bad),
                          "--out", str(tmp_path / "r.json"))
    assert code == 1 and "NegativeConsumption" in err and out == ""


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["synth", "--series", "4"],
    ["report", "--result", "x", "--bogus"],
    ["report", "--result", "x", "--format", "xml"],
    ["synth", "--series", "four", "--archetypes", "1", "--months", "2012-01", "--seed", "1", "--out", "x"],
])
def test_usage_errors(argv):
    code, out, err = call(*argv)
    assert code == 2 and "usage:" in err and out == ""


def test_runtime_errors(tmp_path):
    code, _, err = call("run", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "r.json"))
    assert code == 1 and err.startswith("IoFailure:")
    code, _, err = call("synth", "--series", "2", "--archetypes", "3", "--months", "2012-01",
                        "--seed", "1", "--out", str(tmp_path / "s.csv"))
    assert code == 1 and "InvalidArchetypeCount" in err
    code, _, err = call("synth", "--series", "2", "--archetypes", "1", "--months", "2012-13",
                        "--seed", "1", "--out", str(tmp_path / "s.csv"))
    assert code == 1 and "BadMonthSpec" in err
    (tmp_path / "c.json").write_text("{not json")
    code, _, err = call("sweep", "--config", str(tmp_path / "c.json"), "--input", "x")
    assert code == 1 and "InvalidConfig" in err


def test_run_report_and_sweep(tmp_path, data_dir):
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for r in (r1, r2):
        code, out, err = call("run", "--config", str(data_dir / "c.json"), "--input", str(data_dir / "in.csv"),
                              "--out", str(r))
        assert code == 0 and out == ""
        assert all(line.startswith("warning:") for line in err.splitlines())
    assert r1.read_bytes() == r2.read_bytes()

    code, out, _ = call("report", "--result", str(r1), "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 24
    assert set(rows[0]) == {"series_id", "year", "month", "label"}

    code, out, _ = call("report", "--result", str(r1), "--format", "csv")
    parsed = list(csv.reader(io.StringIO(out)))
    assert parsed[0] == ["series_id", "year", "month", "label"] and len(parsed) == 25

    code, out, err = call("sweep", "--config", str(data_dir / "c.json"), "--input", str(data_dir / "in.csv"))
    report = json.loads(out)
    assert code == 0 and report["best_k"] == 3
    assert report["best_k"] == max(report["per_k"], key=lambda e: e["silhouette"])["k"]


def test_ingest_summary(tmp_path, data_dir):
    code, _, _ = call("ingest", "--input", str(data_dir / "in.csv"), "--months", "2012-02,2012-03",
                      "--out", str(tmp_path / "m.json"))
    assert code == 0
    summary = json.loads((tmp_path / "m.json").read_text())
    feb, mar = summary["months"]
    assert feb["month"] == "2012-02" and feb["n_series"] == 12 and len(feb["values"][0]) == 28
    assert mar["n_series"] == 0 and mar["values"] == []


def test_report_on_corrupt_file(tmp_path):
    (tmp_path / "r.json").write_text('{"format_version": "1.0"')
    code, _, err = call("report", "--result", str(tmp_path / "r.json"))
    assert code == 1 and err.startswith("CorruptFile:")

"""CLI surface: flags, files, exit codes."""

import csv
import json
import stat

from autobva.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_detect_writes_archive_and_manifest(tmp_path):
    out = tmp_path / "run"
    code = run_cli("detect", "--sut", "bytecount", "--strategy", "bcs",
                   "--iterations", "1500", "--seed", "0", "--out", str(out))
    assert code == 0
    assert (out / "archive.csv").exists()
    assert (out / "archive.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["sut"] == "bytecount"
    assert manifest["budget"] == {"iterations": 1500}
    with open(out / "archive.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["input1", "input2", "output1", "output2",
                       "validity", "score_num", "score_den"]
    assert manifest["counts"]["candidates"] == len(rows) - 1 > 0


def test_detect_zero_iterations_is_ok(tmp_path):
    out = tmp_path / "empty"
    assert run_cli("detect", "--sut", "bytecount", "--iterations", "0",
                   "--out", str(out)) == 0
    with open(out / "archive.csv", newline="") as fh:
        assert len(list(csv.reader(fh))) == 1


def test_detect_unknown_sut_is_usage_error(capsys):
    assert run_cli("detect", "--sut", "nope", "--iterations", "1") == 1
    assert "unknown SUT" in capsys.readouterr().err


def test_detect_unknown_flag_is_usage_error():
    assert run_cli("detect", "--sut", "bytecount", "--frobnicate", "1") == 1


def test_detect_env_seed_overrides_flag(tmp_path, monkeypatch):
    out1, out2, out3 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    monkeypatch.setenv("AUTOBVA_SEED", "99")
    run_cli("detect", "--sut", "bytecount", "--iterations", "500",
            "--seed", "0", "--out", str(out1))
    monkeypatch.delenv("AUTOBVA_SEED")
    run_cli("detect", "--sut", "bytecount", "--iterations", "500",
            "--seed", "99", "--out", str(out2))
    run_cli("detect", "--sut", "bytecount", "--iterations", "500",
            "--seed", "0", "--out", str(out3))
    assert (out1 / "archive.csv").read_bytes() == (out2 / "archive.csv").read_bytes()
    assert (out1 / "archive.csv").read_bytes() != (out3 / "archive.csv").read_bytes()


def test_detect_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sampling.method": "uniform", "sampling.cts": False,
                               "sampling.big_int_bit_cap": 128, "seed": 7}))
    out = tmp_path / "run"
    assert run_cli("detect", "--sut", "bytecount", "--iterations", "300",
                   "--config", str(cfg), "--out", str(out)) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["sampling"]["sampling.method"] == "uniform"
    assert manifest["sampling"]["sampling.cts"] is False
    assert manifest["seed"] == 7


def test_detect_bad_config_key_is_data_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sampling.mode": "uniform"}))
    assert run_cli("detect", "--sut", "bytecount", "--iterations", "1",
                   "--config", str(cfg)) == 2


def test_summarize_and_rank(tmp_path):
    runs = []
    for seed in (0, 1):
        out = tmp_path / f"run{seed}"
        run_cli("detect", "--sut", "bytecount", "--strategy", "bcs",
                "--iterations", "1500", "--seed", str(seed), "--out", str(out))
        runs.append(str(out / "archive.json"))
    rep = tmp_path / "rep"
    assert run_cli("summarize", *runs, "--restarts", "40", "--seed", "0",
                   "--out", str(rep)) == 0
    report = json.loads((rep / "report.json").read_text())
    assert {g["validity"] for g in report["groups"]} >= {"VV"}
    assert (rep / "report.md").read_text().startswith("#")

    ranked = tmp_path / "ranked.csv"
    assert run_cli("rank", *runs, "--distance", "jaccard2", "--top", "5",
                   "--out", str(ranked)) == 0
    with open(ranked, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert 0 < len(rows) <= 5
    scores = [float(r["score"]) for r in rows]
    assert scores == sorted(scores, reverse=True)

    per_cluster = tmp_path / "percluster.csv"
    assert run_cli("rank", *runs, "--top", "1", "--report",
                   str(rep / "report.json"), "--out", str(per_cluster)) == 0
    with open(per_cluster, newline="") as fh:
        rows = list(csv.DictReader(fh))
    clusters = [r["cluster"] for r in rows]
    assert len(clusters) == len(set(clusters))


def test_rank_reproduces_reference_order(tmp_path):
    # the six worked example pairs, stored with their strlendist scores;
    # re-ranking under jaccard1 must order them 1,2,3,4 then the zero pair
    rows = [
        ("9", "10", "9B", "10B", "VV", "1", "1"),
        ("999949999", "999950000", "999.9 MB", "1.0 GB", "VV", "2", "1"),
        ("99949", "99950", "99.9 kB", "100.0 kB", "VV", "1", "1"),
        ("99949", "99951", "99.9 kB", "100.0 kB", "VV", "1", "2"),
        ("99951", "99952", "100.0 kB", "100.0 kB", "VV", "0", "1"),
        ("99948", "99949", "99.9 kB", "99.9 kB", "VV", "0", "1"),
    ]
    src = tmp_path / "table.csv"
    with open(src, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["input1", "input2", "output1", "output2",
                    "validity", "score_num", "score_den"])
        w.writerows(rows)
    out = tmp_path / "ranked.csv"
    assert run_cli("rank", str(src), "--distance", "jaccard1", "--out", str(out)) == 0
    with open(out, newline="") as fh:
        ranked = list(csv.DictReader(fh))
    assert [r["input1"] for r in ranked] == \
        ["9", "999949999", "99949", "99949", "99948", "99951"]
    assert [r["score"] for r in ranked[:2]] == ["0.75", "0.625"]
    # --top 1 surfaces the strongest pair
    top = tmp_path / "top.csv"
    assert run_cli("rank", str(src), "--top", "1", "--out", str(top)) == 0
    with open(top, newline="") as fh:
        (only,) = list(csv.DictReader(fh))
    assert (only["input1"], only["input2"]) == ("9", "10")


def test_summarize_empty_archive_exits_zero(tmp_path):
    out = tmp_path / "empty"
    run_cli("detect", "--sut", "bytecount", "--iterations", "0", "--out", str(out))
    rep = tmp_path / "rep"
    assert run_cli("summarize", str(out / "archive.csv"), "--out", str(rep)) == 0
    assert json.loads((rep / "report.json").read_text())["total_candidates"] == 0


def test_summarize_malformed_csv_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("input1,input2,output1,output2,validity,score_num,score_den\n"
                   "1,2,a,b,VV,not_a_number,1\n")
    assert run_cli("summarize", str(bad)) == 2
    assert ":2:" in capsys.readouterr().err


def test_oracle_bytecount_window(tmp_path):
    out = tmp_path / "boundaries.csv"
    assert run_cli("oracle", "--sut", "bytecount", "--from", "0", "--to", "2000",
                   "--out", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    assert [(r[0], r[1]) for r in rows] == [("9", "10"), ("99", "100"), ("999", "1000")]


def test_oracle_fixed_arguments(tmp_path):
    out = tmp_path / "date.csv"
    assert run_cli("oracle", "--sut", "date", "--vary", "2", "--fixed", "2021,2,1",
                   "--from", "25", "--to", "40", "--out", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    assert [(r[0], r[1]) for r in rows] == [("2021;2;28", "2021;2;29")]


def test_oracle_refuses_huge_window(tmp_path):
    assert run_cli("oracle", "--sut", "bytecount", "--from", "0",
                   "--to", str(2 * 10**8), "--out", str(tmp_path / "x.csv")) == 1


def test_oracle_empty_window(tmp_path):
    out = tmp_path / "none.csv"
    assert run_cli("oracle", "--sut", "bytecount", "--from", "5", "--to", "5",
                   "--out", str(out)) == 0
    with open(out, newline="") as fh:
        assert len(list(csv.reader(fh))) == 1


def test_experiment_harness(tmp_path):
    out = tmp_path / "exp"
    assert run_cli("experiment", "--sut", "bytecount", "--reps", "2",
                   "--iterations", "800", "--seed", "0", "--restarts", "30",
                   "--out", str(out)) == 0
    doc = json.loads((out / "experiment.json").read_text())
    assert set(doc["strategies"]) == {"lns", "bcs"}
    for stats in doc["strategies"].values():
        assert len(stats["found"]) == 2
    assert doc["union_total"] >= max(
        max(s["found"]) for s in doc["strategies"].values())
    md = (out / "experiment.md").read_text()
    assert "## Candidates" in md and "## Cluster coverage" in md
    # unique counts never exceed the union
    assert all(s["unique"] <= doc["union_total"] for s in doc["strategies"].values())


def test_external_sut_through_cli(tmp_path):
    script = tmp_path / "wrap.sh"
    script.write_text("#!/bin/sh\nif [ \"$1\" -lt 100 ]; then echo small; else echo big; fi\n")
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    out = tmp_path / "oracle.csv"
    assert run_cli("oracle", "--sut", f"external:{script}", "--from", "95",
                   "--to", "105", "--out", str(out)) == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    assert [(r[0], r[1]) for r in rows] == [("99", "100")]

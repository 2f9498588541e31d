"""End-to-end command line tests driving main() in-process."""

from __future__ import annotations

import json

import pytest

from querycore.cli import main

S2 = {
    "attributes": [
        {"name": "color", "kind": "discrete", "values": ["r", "b"], "query_style": "value_query"}
    ],
    "items": [
        {"id": "v1", "values": {"color": "r"}},
        {"id": "v2", "values": {"color": "r"}},
        {"id": "v3", "values": {"color": "b"}},
        {"id": "v4", "values": {"color": "b"}},
    ],
}


@pytest.fixture()
def s2_path(tmp_path):
    path = tmp_path / "s2.json"
    path.write_text(json.dumps(S2))
    return str(path)


# gen --------------------------------------------------------------------


def test_gen_writes_catalog(tmp_path, capsys):
    out = tmp_path / "cat.json"
    targets_out = tmp_path / "targets.json"
    code = main([
        "gen", "--seed", "7", "--items", "10", "--discrete", "2", "--continuous", "1",
        "--values", "3", "--out", str(out), "--targets-out", str(targets_out),
    ])
    assert code == 0
    data = json.loads(out.read_text())
    assert len(data["items"]) == 10
    assert len(data["attributes"]) == 3
    targets = json.loads(targets_out.read_text())
    assert isinstance(targets, list) and targets
    assert "wrote 10 items" in capsys.readouterr().out


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["gen", "--seed", "3", "--items", "8", "--out", str(a)])
    main(["gen", "--seed", "3", "--items", "8", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_gen_bad_n_targets(tmp_path, capsys):
    code = main(["gen", "--seed", "1", "--out", str(tmp_path / "x.json"),
                 "--n-targets", "5:2"])
    assert code == 1
    assert "bad --n-targets" in capsys.readouterr().err


# simulate ----------------------------------------------------------------


def test_simulate_prints_transcript(s2_path, capsys):
    code = main([
        "simulate", "--catalog", s2_path, "--targets", "v1",
        "--policy", "core", "--mode", "value", "--kmax", "5", "--seed", "0",
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "color = r?" in out
    assert "item v1?" in out
    assert "outcome: success at turn 2, item v1" in out


def test_simulate_writes_jsonl(s2_path, tmp_path, capsys):
    out = tmp_path / "t.jsonl"
    code = main([
        "simulate", "--catalog", s2_path, "--targets", "v3", "--mode", "value",
        "--quiet", "--out", str(out),
    ])
    assert code == 0
    assert capsys.readouterr().out == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["outcome"]["status"] in ("success", "exhausted")


def test_simulate_missing_catalog(tmp_path, capsys):
    code = main(["simulate", "--catalog", str(tmp_path / "ghost.json")])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_simulate_conflicting_target_flags(s2_path, tmp_path, capsys):
    tfile = tmp_path / "targets.json"
    tfile.write_text('["v1"]')
    code = main([
        "simulate", "--catalog", s2_path, "--targets", "v1",
        "--targets-file", str(tfile),
    ])
    assert code == 1
    assert "mutually exclusive" in capsys.readouterr().err


def test_simulate_targets_file(s2_path, tmp_path, capsys):
    tfile = tmp_path / "targets.json"
    tfile.write_text('["v2"]')
    code = main([
        "simulate", "--catalog", s2_path, "--targets-file", str(tfile), "--mode", "value",
    ])
    assert code == 0
    assert "outcome: success" in capsys.readouterr().out


def test_simulate_freq_scores(s2_path, tmp_path, capsys):
    log = tmp_path / "log.csv"
    log.write_text("item_id,count\nv1,3\nv2,1\n")
    code = main([
        "simulate", "--catalog", s2_path, "--targets", "v1", "--mode", "value",
        "--scores", f"freq:{log}", "--smoothing", "0.5",
    ])
    assert code == 0
    assert "outcome: success" in capsys.readouterr().out


def test_simulate_bad_scores_selector(s2_path, capsys):
    code = main(["simulate", "--catalog", s2_path, "--scores", "hot"])
    assert code == 1
    assert "bad --scores" in capsys.readouterr().err


# bench -------------------------------------------------------------------


def test_bench_fixed_catalog(s2_path, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main([
        "bench", "--catalog", s2_path, "--targets", "v1", "--mode", "value",
        "--sessions", "6", "--seed", "9", "--kmax", "5", "--out", str(out),
    ])
    assert code == 0
    table = capsys.readouterr().out
    assert table.splitlines()[0].split() == ["policy", "k_max", "T@K", "S@K", "sessions"]
    report = json.loads(out.read_text())
    assert report["policy"] == "core"
    assert report["n_sessions"] == 6
    assert report["t_at_k"] == 2.0 and report["s_at_k"] == 1.0


def test_bench_reports_are_byte_identical(s2_path, tmp_path):
    args = [
        "bench", "--catalog", s2_path, "--mode", "value", "--n-targets", "1:2",
        "--sessions", "12", "--seed", "4", "--kmax", "3",
    ]
    a, b, c = (tmp_path / n for n in ("a.json", "b.json", "c.json"))
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--jobs", "3"]) == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_bench_synthetic_and_transcripts(tmp_path, capsys):
    transcripts = tmp_path / "t.jsonl"
    code = main([
        "bench", "--synthetic", "--items", "8", "--discrete", "2", "--continuous", "0",
        "--values", "2", "--sessions", "5", "--seed", "1", "--kmax", "3",
        "--transcripts", str(transcripts),
    ])
    assert code == 0
    assert len(transcripts.read_text().splitlines()) == 5


def test_bench_source_flags_are_exclusive(s2_path, capsys):
    assert main(["bench", "--catalog", s2_path, "--synthetic"]) == 1
    assert "mutually exclusive" in capsys.readouterr().err
    assert main(["bench"]) == 1
    assert "needs --catalog" in capsys.readouterr().err


def test_bench_synthetic_rejects_file_scores(tmp_path, capsys):
    code = main(["bench", "--synthetic", "--scores", "file:scores.json",
                 "--sessions", "2"])
    assert code == 1
    assert "only supports --scores cold" in capsys.readouterr().err


# report ------------------------------------------------------------------


def test_report_table_and_json(s2_path, tmp_path, capsys):
    out = tmp_path / "report.json"
    main([
        "bench", "--catalog", s2_path, "--targets", "v1", "--mode", "value",
        "--sessions", "4", "--seed", "2", "--out", str(out),
    ])
    capsys.readouterr()

    assert main(["report", "--in", str(out)]) == 0
    table = capsys.readouterr().out
    assert "core" in table and "2.0000" in table

    assert main(["report", "--in", str(out), str(out), "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 2
    assert "sessions" not in rows[0]
    assert rows[0]["s_at_k"] == 1.0


def test_report_missing_file(tmp_path, capsys):
    assert main(["report", "--in", str(tmp_path / "ghost.json")]) == 1
    assert "not found" in capsys.readouterr().err


# usage errors ------------------------------------------------------------


def test_usage_errors_exit_2(s2_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--catalog", s2_path, "--policy", "sorcery"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--seed", "1"])  # missing --out
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2

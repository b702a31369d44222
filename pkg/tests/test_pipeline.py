import csv
import json
from pathlib import Path

import numpy as np
import pytest

from lofscan import cli, pipeline
from lofscan.errors import ConfigError
from lofscan.log_model import FilterConfig, LogEntry, load_classes, parse_log
from lofscan.pipeline import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_PARTIAL,
    PipelineConfig,
    emit_timeseries,
    load_report,
    process_chunk,
    render_text,
    report_json,
    run,
    select_top,
)
from lofscan.synthgen import ScenarioConfig, generate, render_log

ROOT = Path(__file__).resolve().parents[1]
CLASSES = ROOT / "scenarios" / "classes.csv"


@pytest.fixture(scope="module")
def day_log(tmp_path_factory):
    entries, _ = generate(ScenarioConfig(seed=4, duration_hours=30))
    path = tmp_path_factory.mktemp("log") / "log.csv"
    path.write_text(render_log(entries), encoding="utf-8")
    return path, entries


def _cfg(out, path, **kw):
    base = dict(input_path=path, out_dir=out, classes_path=CLASSES, chunk_size=600, top_n=5)
    base.update(kw)
    return PipelineConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(window=0).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(chunk_size=10, window=11).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(chunk_size=30, window=11, k=20).validate()
    PipelineConfig(chunk_size=31, window=11, k=20).validate()


def test_select_top():
    lof = np.array([1.0, 5.0, 5.0, 2.0, 9.0, 1.0])
    assert select_top(lof, 3) == [4, 1, 2]
    assert select_top(lof, 3, w=2, suppress_overlap=True) == [4, 1]
    assert select_top(lof, 3, w=1, suppress_overlap=True) == [4, 1, 2]
    assert select_top(lof, 10) == [4, 1, 2, 3, 0, 5]
    assert select_top(np.array([np.inf, 3.0, np.inf]), 2) == [0, 2]


def test_run_outputs(tmp_path, day_log):
    path, entries = day_log
    summary = run(_cfg(tmp_path, path))
    n_chunks = -(-len(entries) // 600)
    assert summary.exit_code == EXIT_OK
    assert summary.failed == {}
    assert sorted(summary.processed + summary.skipped) == list(range(n_chunks))
    for i in summary.processed:
        ts = list(csv.reader(open(tmp_path / f"chunk_{i}_timeseries.csv")))
        assert ts[0] == ["window_first_entry_id", "lof"]
        ids = [int(r[0]) for r in ts[1:]]
        assert ids == sorted(ids)
        chunk = entries[i * 600 : (i + 1) * 600]
        assert len(ids) == len(chunk) - 10
        records = json.loads((tmp_path / f"chunk_{i}_outliers.json").read_text())
        assert len(records) == 5
        lofs = [float(r["lof"]) for r in records]
        assert lofs == sorted(lofs, reverse=True)
        top = max(float(r[1]) for r in ts[1:])
        assert lofs[0] == top


def test_records_hold_full_neighbourhoods(tmp_path, day_log):
    path, entries = day_log
    classes = load_classes(CLASSES)
    cfg = _cfg(tmp_path, path)
    res = process_chunk(entries[:600], 0, cfg, classes)
    table = res.scores.table
    for rec in res.records:
        nb_idx = [nb.window_index for nb in rec.neighborhood]
        assert nb_idx == table.neighbors(rec.window_index).tolist()
        assert len(nb_idx) >= cfg.k
        assert all(len(nb.entries) == cfg.window for nb in rec.neighborhood)
        assert rec.entry_ids == [e.id for e in res.entries[rec.window_index : rec.window_index + cfg.window]]
    expected = select_top(res.scores.lof, 5)
    assert [r.window_index for r in res.records] == expected


def test_json_round_trip_and_text(tmp_path, day_log):
    path, entries = day_log
    run(_cfg(tmp_path, path))
    records = load_report(tmp_path / "chunk_0_outliers.json")
    assert report_json(records) == (tmp_path / "chunk_0_outliers.json").read_text()
    text = (tmp_path / "chunk_0_outliers.txt").read_text()
    assert text == render_text(records)
    source_lines = set(path.read_text().splitlines())
    for e in records[0].entries:
        assert e.line in source_lines
        assert e.line in text


def test_infinite_scores_serialize(tmp_path):
    entries = [LogEntry(i, 60 * i, "x", 0.0) for i in range(30)] + [LogEntry(30, 1800, "x", 7.0)]
    cfg = PipelineConfig(out_dir=tmp_path, chunk_size=100, window=1, k=3, top_n=1)
    run(cfg, entries)
    data = json.loads((tmp_path / "chunk_0_outliers.json").read_text())
    assert data[0]["lof"] == "Infinity"
    assert load_report(tmp_path / "chunk_0_outliers.json")[0].lof == float("inf")
    assert "inf" in (tmp_path / "chunk_0_timeseries.csv").read_text()


def test_empty_timeseries(tmp_path):
    emit_timeseries(tmp_path / "t.csv", [], [])
    assert (tmp_path / "t.csv").read_text() == "window_first_entry_id,lof\n"


def test_suppress_overlap(tmp_path, day_log):
    path, entries = day_log
    res = process_chunk(entries[:600], 0, _cfg(tmp_path, path, suppress_overlap=True), load_classes(CLASSES))
    idx = [r.window_index for r in res.records]
    assert all(abs(a - b) >= 11 for a in idx for b in idx if a != b)


def test_short_chunks_are_skipped(tmp_path, caplog):
    entries = [LogEntry(i, i, "x", float(i % 3)) for i in range(45)]
    summary = run(PipelineConfig(out_dir=tmp_path, chunk_size=40, window=11, k=5), entries)
    assert summary.processed == [0] and summary.skipped == [1]
    assert "skipped" in caplog.text
    assert not (tmp_path / "chunk_1_outliers.json").exists()
    # 25 entries leave 15 windows, too few for k=20
    more = [LogEntry(i, i, "x", float(i % 3)) for i in range(65)]
    summary = run(PipelineConfig(out_dir=tmp_path, chunk_size=40, window=11, k=20), more)
    assert summary.processed == [0] and summary.skipped == [1]
    assert "only 15 windows" in caplog.text


def test_filtering_applies(tmp_path, day_log):
    path, entries = day_log
    cfg = _cfg(tmp_path, path, filter=FilterConfig(frozenset(), ("target_*",)))
    res = process_chunk(entries[:600], 0, cfg, load_classes(CLASSES))
    assert all(not e.command.startswith("target_") for e in res.entries)


def test_chunk_independence(tmp_path, day_log):
    path, entries = day_log
    a = run(_cfg(tmp_path / "a", path), entries)
    edited = entries[:600] + [LogEntry(e.id, e.timestamp, e.command, 123.0) for e in entries[600:]]
    b = run(_cfg(tmp_path / "b", path), edited)
    assert 0 in a.processed and 0 in b.processed
    for name in ("chunk_0_timeseries.csv", "chunk_0_outliers.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_thread_count_does_not_change_reports(tmp_path, day_log):
    path, _ = day_log
    run(_cfg(tmp_path / "one", path, n_jobs=1))
    run(_cfg(tmp_path / "many", path, n_jobs=4))
    run(_cfg(tmp_path / "whole", path, n_jobs=4, chunk_size=5000))
    run(_cfg(tmp_path / "whole1", path, n_jobs=1, chunk_size=5000))
    for f in (tmp_path / "one").iterdir():
        assert f.read_bytes() == (tmp_path / "many" / f.name).read_bytes()
    for f in (tmp_path / "whole1").iterdir():
        assert f.read_bytes() == (tmp_path / "whole" / f.name).read_bytes()


def test_dump_vectors(tmp_path, day_log):
    path, entries = day_log
    run(_cfg(tmp_path, path, dump_vectors=True))
    ev = (tmp_path / "chunk_0_entry_vectors.csv").read_text().splitlines()
    wv = (tmp_path / "chunk_0_window_vectors.csv").read_text().splitlines()
    assert len(ev) == 600 and len(wv) == 590
    d = len(ev[0].split(",")) - 1
    assert len(wv[0].split(",")) - 1 == 11 * d
    assert ev[0].split(",")[0] == str(entries[0].id)
    # window 0 is the concatenation of the first 11 entry rows
    assert wv[0].split(",")[1:] == [x for row in ev[:11] for x in row.split(",")[1:]]


def test_failed_chunk_gives_partial_exit(tmp_path, day_log, monkeypatch):
    path, _ = day_log
    real = pipeline.score_chunk
    calls = []

    def flaky(entries, *a, **kw):
        calls.append(1)
        if len(calls) == 2:
            raise ValueError("boom")
        return real(entries, *a, **kw)

    monkeypatch.setattr(pipeline, "score_chunk", flaky)
    summary = run(_cfg(tmp_path, path))
    assert list(summary.failed) == [1]
    assert summary.exit_code == EXIT_PARTIAL
    assert (tmp_path / "chunk_2_outliers.json").exists()


def test_cli_end_to_end(tmp_path):
    log, truth, out = tmp_path / "log.csv", tmp_path / "truth.json", tmp_path / "out"
    rc = cli.main(["synth", "--seed", "2", "--out", str(log), "--truth", str(truth)])
    assert rc == EXIT_OK
    assert json.loads(truth.read_text()) == []
    rc = cli.main(["run", "--input", str(log), "--classes", str(CLASSES), "--chunk-size", "500",
                   "--top", "3", "--exclude-pattern", "fan*", "--out", str(out)])
    assert rc == EXIT_OK
    recs = load_report(out / "chunk_0_outliers.json")
    assert len(recs) == 3
    assert not any(e.command.startswith("fan") for r in recs for e in r.entries)
    assert len(parse_log(log)) > 500


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--input", "{out}/missing.csv", "--out", "{out}/o"],
        ["run", "--input", "{log}", "--out", "{out}", "--k", "600", "--chunk-size", "500"],
        ["run", "--input", "{log}", "--out", "{out}", "--exclude-class", "nonsense"],
        ["run", "--input", "{bad}", "--out", "{out}"],
        ["synth", "--scenario", "{bad}", "--out", "{out}/x", "--truth", "{out}/y"],
    ],
)
def test_cli_config_errors(tmp_path, day_log, argv):
    bad = tmp_path / "bad.csv"
    bad.write_text("this is not a log\n")
    fmt = {"log": str(day_log[0]), "out": str(tmp_path), "bad": str(bad)}
    argv = [a.format(**fmt) for a in argv]
    assert cli.main(argv) == EXIT_CONFIG
    assert not (tmp_path / "o").exists()


def test_cli_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["run", "--window", "0", "--input", "x", "--out", "y"])
    assert info.value.code == 2

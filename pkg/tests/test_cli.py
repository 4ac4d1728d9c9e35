import json
import os

import pytest

from altmon.cli import STAGES, Pipeline, PipelineConfig, main
from altmon.errors import NotFound
from conftest import make_pipeline_inputs


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def config_file(tmp_path):
    cfg = make_pipeline_inputs(tmp_path)
    cfg["output"] = str(tmp_path / "out")
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def error_record(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_stats_on_three_records(three_record_file, tmp_path):
    assert run("run", "stats", "--videos", three_record_file, "-o", tmp_path / "o") == 0
    stats = json.loads((tmp_path / "o" / "stats.json").read_text())
    assert stats["video_count"] == 3 and stats["channel_count"] == 2


def test_propagate_twice_is_cache_hit(config_file, tmp_path):
    assert run("run", "graph", "--config", config_file) == 0
    pipe = Pipeline(PipelineConfig.load(config_file))
    assert pipe.run("propagate") is False
    before = (tmp_path / "out" / "propagation.tsv").read_bytes()
    assert pipe.run("propagate") is True
    assert (tmp_path / "out" / "propagation.tsv").read_bytes() == before
    assert pipe.run("propagate", force=True) is False
    assert (tmp_path / "out" / "propagation.tsv").read_bytes() == before


def test_changed_parameter_invalidates_cache(config_file):
    pipe = Pipeline(PipelineConfig.load(config_file))
    pipe.run("graph")
    pipe.run("propagate")
    other = Pipeline(PipelineConfig.load(config_file, {"max_iters": 5}))
    assert other.run("propagate") is False


def test_report_without_lexicon(config_file, capsys):
    assert run("run", "report", "--config", config_file) == 2
    rec = error_record(capsys)
    assert rec["error"] == "MissingArtifact" and rec["path"].endswith("lexicon.tsv") and rec["stage"] == "report"


def test_propagate_without_graph(config_file, capsys):
    assert run("run", "propagate", "--config", config_file) == 2
    assert error_record(capsys)["path"].endswith("graph.txt")


def test_full_run_and_explain(config_file, tmp_path, capsys):
    assert run("run", "all", "--config", config_file) == 0
    out = tmp_path / "out"
    for name in ("stats.json", "scan.jsonl", "graph.txt", "propagation.tsv", "lexicon.tsv", "prevalence.csv",
                 "prevalence.csv.json", "top_domains.csv", "adoption.csv", "adoption_cohorts.csv", "deciles.csv",
                 "donation_review.csv", "donation_domains.csv", "earnings.csv", "pairs.csv", "productivity.csv",
                 "match_diagnostics.json", "problematic_pairs.csv", "problematic_adoption.csv",
                 "problematic_buckets.csv", "validation_samples.csv", "manifest.json"):
        assert (out / name).exists(), name
    assert set(json.loads((out / "manifest.json").read_text())) == set(STAGES)
    for path in out.glob("*.csv"):
        assert "np." not in path.read_text(), path.name   # numpy scalars must be written as plain numbers
    capsys.readouterr()

    assert run("explain", "patreon.com", "--config", config_file) == 0
    text = capsys.readouterr().out
    assert "label       DO" in text and "provenance  seed" in text and "top words" in text

    assert run("explain", "vid-merch", "--config", config_file) == 0
    text = capsys.readouterr().out
    assert "teespring.com" in text and "label=PC" in text and "labels      PC" in text
    assert "context   buy, merch, buy merch" in text

    assert run("explain", "vid-coin", "--config", config_file) == 0
    assert "BTC" in capsys.readouterr().out

    assert run("explain", "unknown.example", "--config", config_file) == 2
    assert error_record(capsys)["error"] == "NotFound"
    with pytest.raises(NotFound):
        Pipeline(PipelineConfig.load(config_file)).explain("unknown.example")


def test_stage_isolation(config_file, tmp_path):
    assert run("run", "all", "--config", config_file) == 0
    out = tmp_path / "out"
    upstream = {n: (out / n).read_bytes() for n in ("graph.txt", "propagation.tsv", "lexicon.tsv")}
    mtimes = {n: os.stat(out / n).st_mtime_ns for n in upstream}
    target = out / "productivity.csv"
    original = target.read_bytes()
    target.unlink()
    assert run("run", "all", "--config", config_file) == 0
    assert target.read_bytes() == original
    for n, data in upstream.items():
        assert (out / n).read_bytes() == data and os.stat(out / n).st_mtime_ns == mtimes[n]


@pytest.mark.parametrize("argv", [[], ["run"], ["run", "bogus"], ["run", "stats", "--k", "x"],
                                  ["run", "stats", "--set", "novalue"]])
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    assert error_record(capsys)["exit_code"] == 1


def test_input_errors_exit_2(tmp_path, capsys):
    assert run("run", "stats", "--videos", tmp_path / "missing.jsonl", "-o", tmp_path / "o") == 2
    assert run("run", "stats", "--set", "bogus_key=1") == 2
    assert "bogus_key" in error_record(capsys)["message"]
    assert run("run", "stats", "--seed", str(2 ** 64)) == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"video_id": 1}\n')
    assert run("run", "stats", "--videos", bad, "--strict", "-o", tmp_path / "o") == 2
    rec = error_record(capsys)
    assert rec["error"] == "SchemaViolation" and rec["line_no"] == 1


def test_internal_error_exit_3(monkeypatch, three_record_file, tmp_path, capsys):
    def boom(self):
        raise RuntimeError("boom")
    monkeypatch.setattr(Pipeline, "stats", boom)
    assert run("run", "stats", "--videos", three_record_file, "-o", tmp_path / "o") == 3
    assert error_record(capsys)["message"] == "boom"


def test_config_paths_relative_to_file(tmp_path):
    (tmp_path / "sub").mkdir()
    cfg = tmp_path / "sub" / "c.json"
    cfg.write_text(json.dumps({"videos": ["v.jsonl"], "output": "o", "k": 2}))
    loaded = PipelineConfig.load(cfg, {"seed": 9})
    assert loaded.videos == [str(tmp_path / "sub" / "v.jsonl")]
    assert loaded.output == str(tmp_path / "sub" / "o") and loaded.k == 2 and loaded.seed == 9


def test_views_are_imputed_per_input_file(tmp_path):
    from conftest import video, write_jsonl
    a = write_jsonl(tmp_path / "a.jsonl", [video("a1", view_count=10), video("a2", view_count=None)])
    b = write_jsonl(tmp_path / "b.jsonl", [video("b1", "c2", view_count=1000), video("b2", "c2", view_count=None)])
    out = tmp_path / "out"
    out.mkdir()
    (out / "lexicon.tsv").write_text("domain\tlabel\tprovenance\tDO\tPC\tAM\tNM\n")
    pipe = Pipeline(PipelineConfig.load(None, {"videos": [str(a)], "problematic_videos": [str(b)],
                                               "output": str(out)}))
    views = {v.video_id: v.view_count for v in pipe.corpus("report").videos}
    assert views == {"a1": 10, "a2": 10, "b1": 1000, "b2": 1000}

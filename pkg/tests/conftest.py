import json

import pytest

from altmon.corpus import VideoRecord

# Filled by test_acceptance.py: criterion -> (passed, detail)
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for o in objs:
            fh.write((o if isinstance(o, str) else json.dumps(o)) + "\n")
    return path


def video(video_id="v1", channel_id="c1", date="2019-01-01", description="", view_count=10, category="Gaming"):
    return {"video_id": video_id, "channel_id": channel_id, "upload_date": date, "description": description,
            "view_count": view_count, "category": category}


def record(**kw) -> VideoRecord:
    import datetime as dt
    d = video(**kw)
    return VideoRecord(d["video_id"], d["channel_id"], dt.date.fromisoformat(d["upload_date"]), d["description"],
                       d["view_count"], d["category"])


@pytest.fixture
def three_record_file(tmp_path):
    return write_jsonl(tmp_path / "videos.jsonl", [
        video("v1", "c1", description="Support me: https://www.patreon.com/me"),
        video("v2", "c1", date="2019-02-01", description="buy merch: www.teespring.com/YouTuberX"),
        video("v3", "c2", category="Music", view_count=None, description="no links"),
    ])


def make_pipeline_inputs(directory, n_descriptions=600, n_channels=60, seed=0):
    """Video, channel-metadata and earnings files for end-to-end runs; returns a config dict."""
    import datetime as dt

    from altmon.corpus import dump_corpus
    from altmon.synth import recovery_corpus

    corpus = recovery_corpus(n_descriptions=n_descriptions, n_channels=n_channels, domains_per_class=6, seed=seed)
    records = corpus.records + [
        VideoRecord("vid-merch", "UCmerch", dt.date(2018, 3, 1), "buy merch:\nwww.teespring.com/YouTuberX", 7,
                    "Gaming"),
        VideoRecord("vid-coin", "UCmerch", dt.date(2018, 4, 1), "BTC 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa", None,
                    "Gaming"),
    ]
    videos = directory / "videos.jsonl"
    dump_corpus(records, videos)
    ids = sorted({r.channel_id for r in records})
    write_jsonl(directory / "channels.jsonl", [
        {"channel_id": cid, "subscriber_count": 1000 * (i + 1), "source_tag": "alt_right" if i % 7 == 0 else "general"}
        for i, cid in enumerate(ids)])
    write_jsonl(directory / "earnings.jsonl", [
        {"channel_id": ids[0], "source": "patreon_snapshot", "lifetime_usd": 5540},
        {"channel_id": ids[7], "source": "btc_chain_snapshot", "lifetime_usd": 12.5},
    ])
    return {"videos": [str(videos)], "channels": str(directory / "channels.jsonl"),
            "earnings": [str(directory / "earnings.jsonl")], "k": 3, "cohorts": [[2008, 2017], [2017, 2020]],
            "validation_size": 5}

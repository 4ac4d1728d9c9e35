"""Generate a small synthetic dataset and run every pipeline stage on it.

    python demos/run_pipeline.py [output_dir]

Writes videos, channel metadata, earnings and a config into ``output_dir``
(default ``demo_run``), runs ``altmon run all`` and prints a few artifacts.
"""

import csv
import json
import sys
from pathlib import Path

from altmon.cli import main as cli
from altmon.corpus import dump_corpus
from altmon.synth import recovery_corpus


def write_inputs(root: Path) -> Path:
    corpus = recovery_corpus(n_descriptions=3000, n_channels=200, domains_per_class=10, seed=1)
    dump_corpus(corpus.records, root / "videos.jsonl")
    ids = sorted({r.channel_id for r in corpus.records})
    with open(root / "channels.jsonl", "w", encoding="utf-8") as fh:
        for i, cid in enumerate(ids):
            tag = "alt_right" if i % 7 == 0 else "general"
            fh.write(json.dumps({"channel_id": cid, "subscriber_count": 500 * (i + 1), "source_tag": tag}) + "\n")
    with open(root / "earnings.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"channel_id": ids[0], "source": "patreon_snapshot", "lifetime_usd": 5540}) + "\n")
    config = {"videos": ["videos.jsonl"], "channels": "channels.jsonl", "earnings": ["earnings.jsonl"],
              "output": "out", "k": 3, "cohorts": [[2008, 2017], [2017, 2020]], "validation_size": 10}
    path = root / "config.json"
    path.write_text(json.dumps(config, indent=2))
    return path


def show(path: Path, n=6):
    print(f"\n== {path.name}")
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if i > n:
                print("   ...")
                break
            print("   " + ", ".join(row))


def main(out="demo_run"):
    root = Path(out)
    root.mkdir(parents=True, exist_ok=True)
    config = write_inputs(root)
    code = cli(["run", "all", "--config", str(config)])
    if code:
        sys.exit(code)
    art = root / "out"
    for name in ("prevalence.csv", "top_domains.csv", "adoption_cohorts.csv", "deciles.csv"):
        show(art / name)
    print()
    cli(["explain", "patreon.com", "--config", str(config)])
    print(f"\nall artifacts in {art}/ (manifest.json lists stage inputs and parameters)")


if __name__ == "__main__":
    main(*sys.argv[1:2])

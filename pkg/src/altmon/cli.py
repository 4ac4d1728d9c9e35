"""Command-line pipeline: ``altmon run STAGE`` and ``altmon explain TARGET``.

Every stage reads the JSON config (flags override it), declares its inputs,
and writes artifacts atomically into the output directory. ``manifest.json``
records input digests and parameters per stage; a re-run with the same
inputs and parameters and intact outputs is a cache hit.

Exit codes: 0 success, 1 usage error, 2 input error, 3 internal error. On
failure a one-line JSON error record goes to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import warnings
from dataclasses import dataclass, field
from typing import Callable

from . import __version__
from .analytics import annotate
from .analytics.matching import (CONTRAST_HEADER, PROBLEMATIC_CATEGORIES, MatchSpec, productivity_contrast,
                                 stratified_match)
from .analytics.prevalence import (ADOPTION_HEADER, DECILE_HEADER, TOP_DOMAIN_HEADER, DecileSpec,
                                   PrevalenceReport, adoption_by_decile, adoption_series, prevalence_table,
                                   top_domains, usage_counts)
from .analytics.problematic import (ADOPTION_SHARE_HEADER, BUCKET_HEADER, EarningsHistogram,
                                    donation_domain_share, earnings_buckets, load_earnings,
                                    problematic_contrast)
from .analytics.validation import VALIDATION_HEADER, samples_table, validation_samples
from .cograph import accumulate_files, graph_to_text, prune_words, read_graph
from .corpus import corpus_stats, derive_channel_profiles, impute_views, load_channel_meta, load_corpus
from .crypto import detect_crypto
from .errors import EmptyCorpus, InputError, MissingArtifact, MissingMetric, NoSeedForCategory, NotFound
from .io import atomic_write_text, file_digest, write_report
from .labelprop import CLASSES, PropagationConfig, propagate, result_from_text, result_to_text
from .suffixes import PublicSuffixList, suffix_list_for
from .taxonomy import (DEFAULT_SEEDS, DomainLexicon, SeedTable, lexicon_from_scores, rank_donation_overrides,
                       read_overrides)
from .textscan import scan_jsonl, url_contexts

log = logging.getLogger("altmon")

STAGES = ("stats", "scan", "graph", "propagate", "lexicon", "report", "match", "validate")


class UsageError(Exception):
    pass


class ConfigError(InputError):
    pass


@dataclass
class PipelineConfig:
    videos: list[str] = field(default_factory=list)
    channels: str | None = None
    problematic_videos: list[str] = field(default_factory=list)
    problematic_channels: str | None = None
    overrides: str | None = None
    seeds: str | None = None
    suffix_list: str | None = None
    earnings: list[str] = field(default_factory=list)
    k: int = 30
    epsilon: float = 1e-15
    max_iters: int = 1000
    tie_order: list[str] = field(default_factory=lambda: ["NM", "DO", "PC", "AM"])
    deciles: dict = field(default_factory=lambda: {"metric": "subscribers", "groups": 10})
    cohorts: list[list[int]] | None = None
    match: dict = field(default_factory=dict)
    problematic_match: dict = field(default_factory=lambda: {
        "granularity": "year", "periods": [2017, 2018, 2019], "same_start_year": True,
        "same_category": False, "allowed_categories": list(PROBLEMATIC_CATEGORIES), "control_rule": "any"})
    horizon: int = 12
    top_n: int = 3
    validation_size: int = 50
    output: str = "out"
    seed: int = 0
    strict: bool = False
    shards: int = 1
    processes: int | None = None

    def __post_init__(self):
        if isinstance(self.videos, str):
            self.videos = [self.videos]
        if isinstance(self.problematic_videos, str):
            self.problematic_videos = [self.problematic_videos]
        if isinstance(self.earnings, str):
            self.earnings = [self.earnings]
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an integer in [0, 2**64)")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        try:
            self.propagation_config()
            self.decile_spec()
            self.match_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        data = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    data = json.load(fh)
            except FileNotFoundError:
                raise ConfigError(f"config file not found: {path}") from None
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from None
            base = os.path.dirname(os.path.abspath(path))
            data = _resolve_paths(data, base)
        data.update(overrides or {})
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def propagation_config(self) -> PropagationConfig:
        return PropagationConfig(self.epsilon, self.max_iters, tuple(self.tie_order))

    def decile_spec(self) -> DecileSpec:
        d = dict(self.deciles)
        if d.get("boundaries") is not None:
            d["boundaries"] = tuple(d["boundaries"])
        return DecileSpec(**d)

    def match_spec(self) -> MatchSpec:
        m = dict(self.match)
        if "x_start" in m or "x_end" in m:
            return MatchSpec.monthly(m.pop("x_start", "2015-01"), m.pop("x_end", "2019-09"), **m)
        return MatchSpec(**m)

    def problematic_spec(self) -> tuple[MatchSpec, list[int]]:
        m = dict(self.problematic_match)
        periods = m.pop("periods")
        return MatchSpec(**m), list(periods)

    @property
    def all_videos(self) -> list[str]:
        return list(self.videos) + list(self.problematic_videos)


_PATH_KEYS = ("videos", "channels", "problematic_videos", "problematic_channels", "overrides", "seeds",
              "suffix_list", "earnings", "output")


def _resolve_paths(data: dict, base: str) -> dict:
    """Relative paths in a config file are taken relative to the file."""
    out = dict(data)
    for key in _PATH_KEYS:
        val = out.get(key)
        if isinstance(val, str):
            out[key] = os.path.normpath(os.path.join(base, val))
        elif isinstance(val, list):
            out[key] = [os.path.normpath(os.path.join(base, v)) for v in val]
    return out


# ---------------------------------------------------------------------------
# stage machinery

@dataclass
class Stage:
    name: str
    run: Callable
    inputs: Callable   # config -> list of input files (upstream artifacts included)
    params: Callable   # config -> dict of parameters that affect the outputs


class Pipeline:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = config.output
        self._psl: PublicSuffixList | None = None
        self._seeds = None

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)

    # shared loaders

    def require(self, name: str, stage: str) -> str:
        p = self.path(name)
        if not os.path.exists(p):
            raise MissingArtifact(p, stage)
        return p

    @property
    def psl(self) -> PublicSuffixList:
        if self._psl is None:
            self._psl = suffix_list_for(self.config.suffix_list)
        return self._psl

    @property
    def seed_table(self) -> SeedTable:
        if self._seeds is None:
            self._seeds = SeedTable.from_file(self.config.seeds) if self.config.seeds else DEFAULT_SEEDS
        return self._seeds

    def _records(self, paths, impute=False):
        for p in paths:
            if not os.path.exists(p):
                raise InputError(f"input file not found: {p}")
        out = []
        for p in paths:
            stream = load_corpus(p, strict=self.config.strict)
            records = list(stream)
            if stream.skipped:
                log.warning("%s: skipped %d malformed lines", p, stream.skipped)
            # each input file is its own corpus for view imputation
            out.extend(impute_views(records) if impute and records else records)
        return out

    def _meta(self):
        metas = []
        for p in (self.config.channels, self.config.problematic_channels):
            if p:
                if not os.path.exists(p):
                    raise InputError(f"input file not found: {p}")
                metas.extend(load_channel_meta(p, strict=True))
        return metas or None

    def corpus(self, stage: str):
        records = self._records(self.config.all_videos, impute=True)
        if not records:
            raise EmptyCorpus("no video records loaded")
        profiles = derive_channel_profiles(records, self._meta())
        lexicon = DomainLexicon.from_file(self.require("lexicon.tsv", stage))
        return annotate(records, lexicon, profiles)

    def report(self, name, header, rows, params=None):
        write_report(self.path(name), header, rows, params, self.config.seed)
        return [name, name + ".json"]

    # stages

    def stats(self):
        records = self._records(self.config.all_videos)
        metas = self._meta()
        if records:
            profiles = derive_channel_profiles(records, metas)
        else:
            profiles = {}
        atomic_write_text(self.path("stats.json"), corpus_stats(records, profiles).to_json())
        atomic_write_text(self.path("profiles.jsonl"),
                          "".join(json.dumps(p.to_dict(), sort_keys=True) + "\n" for p in profiles.values()))
        return ["stats.json", "profiles.jsonl"]

    def scan(self):
        chunks = []
        for rec in self._records(self.config.all_videos):
            chunks.append(scan_jsonl(rec.video_id, rec.description, suffix_list=self.psl))
        atomic_write_text(self.path("scan.jsonl"), "".join(chunks))
        return ["scan.jsonl"]

    def graph(self):
        paths = self.config.all_videos
        for p in paths:
            if not os.path.exists(p):
                raise InputError(f"input file not found: {p}")
        acc, skipped = accumulate_files(paths, self.config.shards, self.config.processes, self.config.strict,
                                        self.config.suffix_list)
        if skipped:
            log.warning("graph: skipped %d malformed lines", skipped)
        graph = prune_words(acc.to_graph(), self.config.k)
        atomic_write_text(self.path("graph.txt"), graph_to_text(graph))
        return ["graph.txt"]

    def propagate(self):
        graph = read_graph(self.require("graph.txt", "propagate"))
        cfg = self.config.propagation_config()
        result = propagate(graph, self.seed_table.to_seed_set(), cfg)
        log.info("propagation: %d iterations, converged=%s, residual %.3g",
                 result.iterations, result.converged, result.residual)
        if not result.converged:
            log.warning("propagation hit max_iters=%d before converging", cfg.max_iters)
        atomic_write_text(self.path("propagation.tsv"), result_to_text(result, graph.domains, cfg.tie_order))
        atomic_write_text(self.path("propagation.json"), json.dumps(
            {"iterations": result.iterations, "converged": result.converged, "residual": result.residual,
             "missing_seed_words": list(result.clamp.missing_words),
             "missing_seed_domains": list(result.clamp.missing_domains)}, indent=2, sort_keys=True) + "\n")
        return ["propagation.tsv", "propagation.json"]

    def lexicon(self):
        with open(self.require("propagation.tsv", "lexicon"), encoding="utf-8") as fh:
            domains, scores, _ = result_from_text(fh.read())
        overrides = read_overrides(self.config.overrides) if self.config.overrides else None
        lex = lexicon_from_scores(domains, scores, self.seed_table.to_seed_set(), overrides,
                                  tuple(self.config.tie_order))
        atomic_write_text(self.path("lexicon.tsv"), lex.to_text())
        return ["lexicon.tsv"]

    def report_stage(self):
        cfg = self.config
        corpus = self.corpus("report")
        outputs = []
        prev: PrevalenceReport = prevalence_table(corpus)
        outputs += self.report("prevalence.csv", prev.header, prev.table())
        rows = top_domains(corpus, cfg.top_n)
        outputs += self.report("top_domains.csv", TOP_DOMAIN_HEADER,
                               [[getattr(r, f) for f in TOP_DOMAIN_HEADER] for r in rows], {"n": cfg.top_n})
        pts = adoption_series(corpus)
        outputs += self.report("adoption.csv", ADOPTION_HEADER, [[getattr(p, f) for f in ADOPTION_HEADER] for p in pts])
        if cfg.cohorts:
            pts = adoption_series(corpus, [tuple(c) for c in cfg.cohorts])
            outputs += self.report("adoption_cohorts.csv", ADOPTION_HEADER,
                                   [[getattr(p, f) for f in ADOPTION_HEADER] for p in pts], {"cohorts": cfg.cohorts})
        spec = cfg.decile_spec()
        try:
            rows = adoption_by_decile(corpus, spec)
        except MissingMetric as exc:
            log.warning("deciles skipped: %s", exc)
        else:
            outputs += self.report("deciles.csv", DECILE_HEADER, [[getattr(r, f) for f in DECILE_HEADER] for r in rows],
                                   {"deciles": cfg.deciles})
        usage = usage_counts(corpus)
        review = rank_donation_overrides(corpus.lexicon, usage)
        outputs += self.report("donation_review.csv", ["domain", "occurrences"], review)
        if any(p.problematic for p in corpus.profiles.values()):
            ds = donation_domain_share(corpus)
            outputs += self.report("donation_domains.csv", ds.header, ds.table(),
                                   {"baseline": ds.baseline, "min_channels": 20, "min_problematic": 5})
        if cfg.earnings:
            records = [r for p in cfg.earnings for r in load_earnings(p)]
            rows = []
            for source in sorted({r.source for r in records}):
                h: EarningsHistogram = earnings_buckets(r for r in records if r.source == source)
                rows += [[source, lab, c, h.median] for lab, c in zip(EarningsHistogram.labels, h.counts)]
            outputs += self.report("earnings.csv", ["source", "bucket", "channels", "median_usd"], rows)
        return outputs

    def match(self):
        cfg = self.config
        corpus = self.corpus("match")
        spec = cfg.match_spec()
        pairs = stratified_match(corpus, spec)
        outputs = self.report("pairs.csv", pairs.header, pairs.table(), dataclasses.asdict(spec))
        contrast = productivity_contrast(pairs, corpus, cfg.horizon)
        outputs += self.report("productivity.csv", CONTRAST_HEADER, contrast.table(),
                               {"horizon": cfg.horizon, "treated_total": contrast.treated_total,
                                "control_total": contrast.control_total, "ratio": contrast.ratio})
        atomic_write_text(self.path("match_diagnostics.json"),
                          json.dumps(pairs.diagnostics.to_dict(), indent=2, sort_keys=True) + "\n")
        outputs.append("match_diagnostics.json")
        flagged = sorted(cid for cid, p in corpus.profiles.items() if p.problematic)
        if flagged:
            pspec, periods = cfg.problematic_spec()
            ppairs = stratified_match(corpus, pspec, treated=flagged, periods=periods)
            outputs += self.report("problematic_pairs.csv", ppairs.header, ppairs.table(),
                                   {**dataclasses.asdict(pspec), "periods": periods})
            rep = problematic_contrast([p.treated for p in ppairs], [p.control for p in ppairs], corpus)
            outputs += self.report("problematic_adoption.csv", ADOPTION_SHARE_HEADER, rep.adoption_table())
            outputs += self.report("problematic_buckets.csv", BUCKET_HEADER, rep.bucket_table(),
                                   {"share_cuts": rep.share_cuts, "link_edges": list(rep.link_edges)})
        return outputs

    def validate(self):
        corpus = self.corpus("validate")
        with_warnings = []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            samples = validation_samples(corpus.lexicon, usage_counts(corpus), self.config.validation_size,
                                         self.config.seed)
        for w in caught:
            log.warning("%s", w.message)
            with_warnings.append(str(w.message))
        return self.report("validation_samples.csv", VALIDATION_HEADER, samples_table(samples),
                           {"size": self.config.validation_size, "warnings": with_warnings})

    # declarations

    def stages(self) -> dict[str, Stage]:
        c = self.config
        raw = lambda: [*c.all_videos, *(p for p in (c.channels, c.problematic_channels) if p)]  # noqa: E731
        seeds = lambda: [c.seeds] if c.seeds else []  # noqa: E731
        psl = lambda: [c.suffix_list] if c.suffix_list else []  # noqa: E731
        downstream = lambda: [*raw(), self.path("lexicon.tsv"), *psl()]  # noqa: E731
        return {
            "stats": Stage("stats", self.stats, raw, lambda: {"strict": c.strict}),
            "scan": Stage("scan", self.scan, lambda: [*c.all_videos, *psl()], lambda: {"strict": c.strict}),
            "graph": Stage("graph", self.graph, lambda: [*c.all_videos, *psl()],
                           lambda: {"k": c.k, "strict": c.strict}),
            "propagate": Stage("propagate", self.propagate, lambda: [self.path("graph.txt"), *seeds()],
                               lambda: {"epsilon": c.epsilon, "max_iters": c.max_iters, "tie_order": c.tie_order}),
            "lexicon": Stage("lexicon", self.lexicon,
                             lambda: [self.path("propagation.tsv"), *seeds(),
                                      *([c.overrides] if c.overrides else [])],
                             lambda: {"tie_order": c.tie_order}),
            "report": Stage("report", self.report_stage, lambda: [*downstream(), *c.earnings],
                            lambda: {"deciles": c.deciles, "cohorts": c.cohorts, "top_n": c.top_n,
                                     "strict": c.strict, "seed": c.seed}),
            "match": Stage("match", self.match, downstream,
                           lambda: {"match": c.match, "problematic_match": c.problematic_match,
                                    "horizon": c.horizon, "strict": c.strict, "seed": c.seed}),
            "validate": Stage("validate", self.validate, downstream,
                              lambda: {"size": c.validation_size, "seed": c.seed, "strict": c.strict}),
        }

    # manifest

    def _manifest_path(self):
        return self.path("manifest.json")

    def _load_manifest(self) -> dict:
        try:
            with open(self._manifest_path(), encoding="utf-8") as fh:
                return json.load(fh)
        except (FileNotFoundError, json.JSONDecodeError):
            return {}

    def run(self, name: str, force: bool = False) -> bool:
        """Run one stage; returns True when it was a cache hit."""
        stage = self.stages()[name]
        inputs = stage.inputs()
        for p in inputs:
            if not os.path.exists(p):
                if os.path.dirname(os.path.abspath(p)) == os.path.abspath(self.out):
                    raise MissingArtifact(p, name)
                raise InputError(f"input file not found: {p}")
        entry = {
            "inputs": {os.path.relpath(p, self.out) if _inside(p, self.out) else os.path.abspath(p): file_digest(p)
                       for p in inputs},
            "params": json.loads(json.dumps(stage.params(), default=str)),
            "version": __version__,
        }
        manifest = self._load_manifest()
        prev = manifest.get(name)
        if not force and prev and prev.get("inputs") == entry["inputs"] and prev.get("params") == entry["params"] \
                and prev.get("version") == entry["version"] and self._outputs_intact(prev.get("outputs", {})):
            log.info("%s: cache hit", name)
            return True
        os.makedirs(self.out, exist_ok=True)
        log.info("%s: running", name)
        outputs = stage.run()
        entry["outputs"] = {o: file_digest(self.path(o)) for o in sorted(outputs)}
        manifest = self._load_manifest()
        manifest[name] = entry
        atomic_write_text(self._manifest_path(), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return False

    def _outputs_intact(self, outputs: dict) -> bool:
        for name, digest in outputs.items():
            p = self.path(name)
            if not os.path.exists(p) or file_digest(p) != digest:
                return False
        return bool(outputs)

    # explain

    def explain(self, target: str) -> str:
        lex_path = self.path("lexicon.tsv")
        lexicon = DomainLexicon.from_file(lex_path) if os.path.exists(lex_path) else None
        if lexicon is not None and target in lexicon:
            e = lexicon[target]
            lines = [f"domain      {target}", f"label       {e.label}", f"provenance  {e.provenance}",
                     "scores      " + "  ".join(f"{c}={s:.6g}" for c, s in zip(CLASSES, e.scores))]
            gp = self.path("graph.txt")
            if os.path.exists(gp):
                graph = read_graph(gp)
                if target in graph.domain_index():
                    lines.append("top words   " + ", ".join(f"{w} ({n})" for w, n in graph.top_words(target, 5)))
            return "\n".join(lines) + "\n"
        for p in self.config.all_videos:
            if not os.path.exists(p):
                continue
            for rec in load_corpus(p, strict=False):
                if rec.video_id != target:
                    continue
                crypto = detect_crypto(rec.description)
                lines = [f"video       {rec.video_id}", f"channel     {rec.channel_id}"]
                labels = set()
                for m, words in url_contexts(rec.description, self.psl):
                    lab = lexicon.label(m.domain_key) if lexicon else None
                    if lab and lab != "NM":
                        labels.add(lab)
                    lines.append(f"url         {m.raw_url}  domain={m.domain_key}  label={lab or '-'}")
                    lines.append(f"  context   {', '.join(words) or '-'}")
                for cm in crypto:
                    if cm.checksum_valid:
                        labels.add("CR")
                    lines.append(f"crypto      {cm.coin} {cm.address}  valid={cm.checksum_valid}")
                lines.append("labels      " + (", ".join(sorted(labels)) or "-"))
                return "\n".join(lines) + "\n"
        raise NotFound(f"{target!r} is neither a lexicon domain nor a video id")


def _inside(path, directory) -> bool:
    return os.path.dirname(os.path.abspath(path)) == os.path.abspath(directory)


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="altmon", description="Alternative-monetization measurement pipeline.")
    parser.add_argument("--version", action="version", version=f"altmon {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at debug level")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON pipeline config")
        p.add_argument("--videos", action="append", help="video file (repeatable)")
        p.add_argument("--channels", help="channel metadata file")
        p.add_argument("--problematic-videos", action="append", dest="problematic_videos")
        p.add_argument("--problematic-channels", dest="problematic_channels")
        p.add_argument("--seeds", help="seed table file")
        p.add_argument("--overrides", help="domain label overrides (TSV)")
        p.add_argument("--suffix-list", dest="suffix_list")
        p.add_argument("--earnings", action="append")
        p.add_argument("--output", "-o", help="artifact directory")
        p.add_argument("--k", type=int)
        p.add_argument("--epsilon", type=float)
        p.add_argument("--max-iters", type=int, dest="max_iters")
        p.add_argument("--seed", type=int)
        p.add_argument("--shards", type=int)
        p.add_argument("--processes", type=int)
        p.add_argument("--strict", action="store_true", default=None)
        p.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                       help="override any config key with a JSON value")

    run = sub.add_parser("run", help="run a pipeline stage")
    run.add_argument("stage", choices=STAGES + ("all",))
    run.add_argument("--force", action="store_true", help="ignore the cache")
    common(run)
    explain = sub.add_parser("explain", help="trace a domain or video id")
    explain.add_argument("target")
    common(explain)
    return parser


def _overrides(args) -> dict:
    out = {}
    for key in ("videos", "channels", "problematic_videos", "problematic_channels", "seeds", "overrides",
                "suffix_list", "earnings", "output", "k", "epsilon", "max_iters", "seed", "shards",
                "processes", "strict"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=JSON, got {item!r}")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


_INPUT_ERRORS = (InputError, NotFound, NoSeedForCategory, EmptyCorpus, MissingMetric, FileNotFoundError)


def _error_record(exc, code, stage=None) -> str:
    rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if stage:
        rec["stage"] = stage
    for attr in ("path", "line_no", "field", "channel_id", "category"):
        if hasattr(exc, attr):
            rec[attr] = getattr(exc, attr)
    return json.dumps(rec, default=str, sort_keys=True)


def main(argv=None) -> int:
    stage = None
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: run or explain")
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        config = PipelineConfig.load(args.config, _overrides(args))
        pipe = Pipeline(config)
        if args.command == "explain":
            sys.stdout.write(pipe.explain(args.target))
            return 0
        names = STAGES if args.stage == "all" else (args.stage,)
        for stage in names:
            pipe.run(stage, force=args.force)
        return 0
    except UsageError as exc:
        sys.stderr.write(_error_record(exc, 1) + "\n")
        return 1
    except _INPUT_ERRORS as exc:
        sys.stderr.write(_error_record(exc, 2, stage) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 3
        log.debug("internal error", exc_info=True)
        sys.stderr.write(_error_record(exc, 3, stage) + "\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())

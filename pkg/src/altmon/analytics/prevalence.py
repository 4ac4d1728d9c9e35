"""Prevalence, top domains, adoption over time, and adoption by popularity bucket."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import EmptyCorpus, MissingMetric
from .annotate import STRATEGIES, AnnotatedCorpus, has
from .stats import bucket, cut_points, wilson_ci

LEVEL_STRATEGIES = STRATEGIES + ("Any",)


def _pct(k, n):
    return 100.0 * k / n if n else 0.0


@dataclass
class PrevalenceRow:
    category: str
    video_n: int
    video_pct: dict[str, float]
    channel_n: int
    channel_pct: dict[str, float]


@dataclass
class PrevalenceReport:
    rows: list[PrevalenceRow]

    @property
    def overall(self) -> PrevalenceRow:
        return self.rows[-1]

    def row(self, category: str) -> PrevalenceRow:
        return next(r for r in self.rows if r.category == category)

    header = (["category", "video_n"] + [f"video_{s}" for s in LEVEL_STRATEGIES]
              + ["channel_n"] + [f"channel_{s}" for s in LEVEL_STRATEGIES])

    def table(self):
        return [[r.category, r.video_n, *(r.video_pct[s] for s in LEVEL_STRATEGIES), r.channel_n,
                 *(r.channel_pct[s] for s in LEVEL_STRATEGIES)] for r in self.rows]


def prevalence_table(corpus: AnnotatedCorpus) -> PrevalenceReport:
    """Share of videos and channels exhibiting each strategy, per content category and overall.

    Videos are grouped by their own category, channels by derived category.
    """
    if not corpus.videos:
        raise EmptyCorpus("prevalence_table needs at least one video")
    v_tot: Counter = Counter()
    v_hit: dict[str, Counter] = defaultdict(Counter)
    for v in corpus.videos:
        for key in (v.category, None):
            v_tot[key] += 1
            for s in LEVEL_STRATEGIES:
                if has(v.labels, s):
                    v_hit[key][s] += 1
    labels = corpus.channel_labels()
    c_tot: Counter = Counter()
    c_hit: dict[str, Counter] = defaultdict(Counter)
    for cid, prof in corpus.profiles.items():
        for key in (prof.derived_category, None):
            c_tot[key] += 1
            for s in LEVEL_STRATEGIES:
                if has(labels.get(cid, frozenset()), s):
                    c_hit[key][s] += 1
    cats = sorted(k for k in set(v_tot) | set(c_tot) if k is not None)
    rows = []
    for key in cats + [None]:
        rows.append(PrevalenceRow(
            "All" if key is None else key,
            v_tot[key], {s: _pct(v_hit[key][s], v_tot[key]) for s in LEVEL_STRATEGIES},
            c_tot[key], {s: _pct(c_hit[key][s], c_tot[key]) for s in LEVEL_STRATEGIES},
        ))
    return PrevalenceReport(rows)


@dataclass(frozen=True)
class TopDomainRow:
    strategy: str
    key: str
    occurrences: int
    channel_pct: float
    employment_rate: float


def usage_counts(corpus: AnnotatedCorpus) -> Counter:
    """URL occurrences per domain across the corpus."""
    c: Counter = Counter()
    for v in corpus.videos:
        c.update(v.domains)
    return c


def top_domains(corpus: AnnotatedCorpus, n: int | None = 3) -> list[TopDomainRow]:
    """Most-used domains per strategy (coins for CR).

    Employment rate is the domain's share of all usages of its strategy.
    """
    lex = corpus.lexicon
    occ: dict[str, Counter] = defaultdict(Counter)
    chans: dict[tuple[str, str], set] = defaultdict(set)
    for v in corpus.videos:
        for d in v.domains:
            lab = lex.label(d)
            if lab in ("DO", "PC", "AM"):
                occ[lab][d] += 1
                chans[(lab, d)].add(v.channel_id)
        for coin, _ in v.coins:
            occ["CR"][coin] += 1
            chans[("CR", coin)].add(v.channel_id)
    n_channels = len(corpus.profiles)
    rows = []
    for strat in STRATEGIES:
        total = sum(occ[strat].values())
        ranked = sorted(occ[strat].items(), key=lambda kv: (-kv[1], kv[0]))
        for key, k in ranked[:n] if n is not None else ranked:
            rows.append(TopDomainRow(strat, key, k, _pct(len(chans[(strat, key)]), n_channels),
                                     _pct(k, total)))
    return rows


TOP_DOMAIN_HEADER = ["strategy", "key", "occurrences", "channel_pct", "employment_rate"]


# ---------------------------------------------------------------------------
# adoption over time

@dataclass(frozen=True)
class AdoptionPoint:
    cohort: str
    year: int
    strategy: str
    adopters: int
    channels: int
    pct: float
    ci_low: float
    ci_high: float


ADOPTION_HEADER = ["cohort", "year", "strategy", "adopters", "channels", "pct", "ci_low", "ci_high"]


def _cohort_name(lo, hi):
    return f"[{lo},{hi})"


def adoption_series(corpus: AnnotatedCorpus, cohorts: Sequence[tuple[int, int]] | None = None
                    ) -> list[AdoptionPoint]:
    """Per-year share of channels using each strategy, optionally split by cohort.

    A channel counts for year y if one of its videos uploaded in y carries the
    strategy. The denominator for y is the channels of the group whose first
    upload is in or before y. Cohorts are half-open year ranges over first
    upload.
    """
    if not corpus.videos:
        return []
    yearly: dict[tuple[str, int], set] = defaultdict(set)
    for v in corpus.videos:
        yearly[(v.channel_id, v.upload_date.year)].update(v.labels)
    years = range(min(v.upload_date.year for v in corpus.videos),
                  max(v.upload_date.year for v in corpus.videos) + 1)
    if cohorts is None:
        groups = [("all", list(corpus.profiles.values()))]
    else:
        groups = [(_cohort_name(lo, hi),
                   [p for p in corpus.profiles.values() if lo <= p.first_upload.year < hi])
                  for lo, hi in cohorts]
    out = []
    for name, members in groups:
        for y in years:
            alive = [p.channel_id for p in members if p.first_upload.year <= y]
            if not alive:
                continue
            for s in LEVEL_STRATEGIES:
                k = sum(1 for cid in alive if has(frozenset(yearly.get((cid, y), ())), s))
                lo, hi = wilson_ci(k, len(alive))
                out.append(AdoptionPoint(name, y, s, k, len(alive), _pct(k, len(alive)), 100 * lo, 100 * hi))
    return out


# ---------------------------------------------------------------------------
# deciles

@dataclass(frozen=True)
class DecileSpec:
    metric: str = "subscribers"
    groups: int = 10
    boundaries: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.metric not in ("subscribers", "videos", "views"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.groups < 2:
            raise ValueError("need at least 2 groups")
        if self.boundaries is not None:
            b = tuple(self.boundaries)
            if len(b) != self.groups - 1:
                raise ValueError(f"{self.groups} groups need {self.groups - 1} boundaries")
            if any(x >= y for x, y in zip(b, b[1:])):
                raise ValueError("boundaries must be strictly ascending")
            object.__setattr__(self, "boundaries", b)


# Subscriber boundaries reported for the 10-decile popularity figure.
REFERENCE_SUBSCRIBER_DECILES = DecileSpec(
    "subscribers", 10, (12_700, 16_400, 21_800, 29_800, 42_200, 63_000, 102_000, 185_000, 440_000))


@dataclass(frozen=True)
class DecileRow:
    group: int
    lower: float | None
    upper: float | None
    channels: int
    strategy: str
    adopters: int
    pct: float
    ci_low: float
    ci_high: float


DECILE_HEADER = ["group", "lower", "upper", "channels", "strategy", "adopters", "pct", "ci_low", "ci_high"]


def channel_metric(corpus: AnnotatedCorpus, metric: str, channels: Iterable[str] | None = None) -> dict:
    ids = sorted(channels) if channels is not None else sorted(corpus.profiles)
    if metric == "subscribers":
        out = {}
        for cid in ids:
            subs = corpus.profiles[cid].subscriber_count
            if subs is None:
                raise MissingMetric(cid, metric)
            out[cid] = subs
        return out
    per: Counter = Counter()
    for v in corpus.videos:
        per[v.channel_id] += 1 if metric == "videos" else v.view_count
    return {cid: per[cid] for cid in ids}


def adoption_by_decile(corpus: AnnotatedCorpus, spec: DecileSpec = DecileSpec(),
                       channels: Iterable[str] | None = None) -> list[DecileRow]:
    """Share of channels per popularity bucket that ever used each strategy, with Wilson CIs."""
    values = channel_metric(corpus, spec.metric, channels)
    cuts = list(spec.boundaries) if spec.boundaries is not None else cut_points(values.values(), spec.groups)
    labels = corpus.channel_labels()
    members: dict[int, list[str]] = defaultdict(list)
    for cid, val in values.items():
        members[bucket(val, cuts)].append(cid)
    out = []
    for g in range(spec.groups):
        ids = members.get(g, [])
        lower = cuts[g - 1] if g > 0 else None
        upper = cuts[g] if g < len(cuts) else None
        for s in LEVEL_STRATEGIES:
            k = sum(1 for cid in ids if has(labels.get(cid, frozenset()), s))
            lo, hi = wilson_ci(k, len(ids)) if ids else (float("nan"), float("nan"))
            out.append(DecileRow(g, lower, upper, len(ids), s, k, _pct(k, len(ids)), 100 * lo, 100 * hi))
    return out

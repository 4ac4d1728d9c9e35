"""Comparisons between problematic channels and their matched controls, and earnings."""

from __future__ import annotations

import json
import statistics
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import SchemaViolation
from .annotate import AnnotatedCorpus, has
from .prevalence import LEVEL_STRATEGIES
from .stats import StatResult, bucket, cut_points, mann_whitney_u, wilson_ci

# Upper edges of the distinct-link buckets {0, 1-2, 3-5, 6-10, >10}.
LINK_BUCKET_EDGES = (0, 2, 5, 10)


@dataclass(frozen=True)
class AdoptionShare:
    strategy: str
    group: str
    adopters: int
    channels: int
    pct: float
    ci_low: float
    ci_high: float


@dataclass
class ComparisonReport:
    adoption: list[AdoptionShare]
    share_cuts: list[float]
    share_buckets: dict[str, list[float]]   # group -> % of channels per bucket
    share_test: StatResult | None
    link_edges: tuple[float, ...]
    link_buckets: dict[str, list[float]]
    link_test: StatResult | None
    shares: dict[str, list[float]]
    link_medians: dict[str, list[float]]

    def adoption_table(self):
        return [[a.strategy, a.group, a.adopters, a.channels, a.pct, a.ci_low, a.ci_high]
                for a in self.adoption]

    def bucket_table(self):
        rows = []
        for panel, buckets, test in (("share", self.share_buckets, self.share_test),
                                     ("links", self.link_buckets, self.link_test)):
            for group, pcts in buckets.items():
                for i, pct in enumerate(pcts):
                    rows.append([panel, group, i, pct, test.pvalue if test else ""])
        return rows


ADOPTION_SHARE_HEADER = ["strategy", "group", "adopters", "channels", "pct", "ci_low", "ci_high"]
BUCKET_HEADER = ["panel", "group", "bucket", "pct", "mann_whitney_p"]


def _hist(values, key, n_buckets):
    counts = [0] * n_buckets
    for v in values:
        counts[key(v)] += 1
    total = len(values)
    return [100.0 * c / total if total else 0.0 for c in counts]


def problematic_contrast(problematic: Iterable[str], controls: Iterable[str], corpus: AnnotatedCorpus,
                         link_edges: Sequence[float] = LINK_BUCKET_EDGES, quantiles: int = 4
                         ) -> ComparisonReport:
    """Three-panel comparison of two channel groups.

    (a) share of channels adopting each strategy; (b) per-channel share of
    monetized videos, bucketed by cut points over both groups pooled; (c)
    per-channel median of distinct monetization links per video, bucketed
    by ``link_edges``. Channels without videos are left out of (b) and (c).
    """
    groups = {"problematic": sorted(set(problematic)), "control": sorted(set(controls))}
    by_channel = corpus.by_channel()
    labels = corpus.channel_labels()
    adoption = []
    for s in LEVEL_STRATEGIES:
        for g, ids in groups.items():
            k = sum(1 for cid in ids if has(labels.get(cid, frozenset()), s))
            lo, hi = wilson_ci(k, len(ids)) if ids else (float("nan"), float("nan"))
            adoption.append(AdoptionShare(s, g, k, len(ids), 100.0 * k / len(ids) if ids else 0.0,
                                          100 * lo, 100 * hi))
    shares: dict[str, list[float]] = defaultdict(list)
    medians: dict[str, list[float]] = defaultdict(list)
    for g, ids in groups.items():
        for cid in ids:
            vids = by_channel.get(cid, [])
            if not vids:
                continue
            shares[g].append(sum(1 for v in vids if v.monetized) / len(vids))
            medians[g].append(float(statistics.median(len(v.monetization_links(corpus.lexicon))
                                                      for v in vids)))
    cuts = cut_points(shares["problematic"] + shares["control"], quantiles)
    share_buckets = {g: _hist(shares[g], lambda v: bucket(v, cuts), quantiles) for g in groups}
    edges = tuple(link_edges)
    link_buckets = {g: _hist(medians[g], lambda v: bisect_left(edges, v), len(edges) + 1) for g in groups}

    def test(values):
        a, b = values["problematic"], values["control"]
        return mann_whitney_u(a, b) if a and b else None

    return ComparisonReport(adoption, cuts, share_buckets, test(shares), edges, link_buckets,
                            test(medians), {g: shares[g] for g in groups}, {g: medians[g] for g in groups})


# ---------------------------------------------------------------------------
# donation domains

@dataclass(frozen=True)
class DonationShareRow:
    domain: str
    channels: int
    problematic: int
    share: float


@dataclass
class DonationShareReport:
    rows: list[DonationShareRow]
    baseline: float
    do_channels: int
    do_problematic: int

    header = ["domain", "channels", "problematic", "share"]

    def table(self):
        return [[r.domain, r.channels, r.problematic, r.share] for r in self.rows]


def donation_domain_share(corpus: AnnotatedCorpus, problematic: Iterable[str] | None = None,
                          min_channels: int = 20, min_problematic: int = 5) -> DonationShareReport:
    """Percentage of each DO domain's channels that are problematic.

    A domain is kept if it has at least ``min_channels`` channels or at least
    ``min_problematic`` problematic channels. The baseline is the problematic
    percentage among all channels with any DO link. Problematic channels
    default to those whose source tag marks them so.
    """
    if problematic is None:
        flagged = {cid for cid, p in corpus.profiles.items() if p.problematic}
    else:
        flagged = set(problematic)
    users: dict[str, set] = defaultdict(set)
    for v in corpus.videos:
        for d in v.domains:
            if corpus.lexicon.label(d) == "DO":
                users[d].add(v.channel_id)
    rows = []
    for d, chans in users.items():
        n, k = len(chans), len(chans & flagged)
        if n >= min_channels or k >= min_problematic:
            rows.append(DonationShareRow(d, n, k, 100.0 * k / n))
    rows.sort(key=lambda r: (-r.share, -r.channels, r.domain))
    everyone = set().union(*users.values()) if users else set()
    k_all = len(everyone & flagged)
    baseline = 100.0 * k_all / len(everyone) if everyone else 0.0
    return DonationShareReport(rows, baseline, len(everyone), k_all)


# ---------------------------------------------------------------------------
# earnings

EARNINGS_SOURCES = ("patreon_snapshot", "btc_chain_snapshot", "eth_chain_snapshot")
EARNINGS_EDGES = (0, 1_000, 10_000, 100_000)


@dataclass(frozen=True)
class EarningsRecord:
    channel_id: str
    source: str
    lifetime_usd: Fraction


def load_earnings(path) -> list[EarningsRecord]:
    """Line-delimited ``{"channel_id", "source", "lifetime_usd"}`` records."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line, parse_float=Fraction, parse_int=Fraction)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(no, "<line>", f"invalid JSON: {exc.msg}") from None
            for key in ("channel_id", "source", "lifetime_usd"):
                if key not in obj:
                    raise SchemaViolation(no, key, "missing")
            if not isinstance(obj["channel_id"], str):
                raise SchemaViolation(no, "channel_id", "must be a string")
            if obj["source"] not in EARNINGS_SOURCES:
                raise SchemaViolation(no, "source", f"must be one of {EARNINGS_SOURCES}")
            usd = obj["lifetime_usd"]
            if not isinstance(usd, Fraction) or usd < 0:
                raise SchemaViolation(no, "lifetime_usd", "must be a nonnegative number")
            out.append(EarningsRecord(obj["channel_id"], obj["source"], usd))
    return out


@dataclass(frozen=True)
class EarningsHistogram:
    counts: tuple[int, ...]
    median: float | None

    labels = ("0", "(0,1k]", "(1k,10k]", "(10k,100k]", ">100k")


def earnings_buckets(records: Iterable, edges: Sequence[float] = EARNINGS_EDGES) -> EarningsHistogram:
    """Counts in {0, (0,1k], (1k,10k], (10k,100k], >100k} and the median (None when empty)."""
    values = [r.lifetime_usd if isinstance(r, EarningsRecord) else Fraction(r) for r in records]
    counts = [0] * (len(edges) + 1)
    for v in values:
        counts[bisect_left(edges, v)] += 1
    median = float(statistics.median(values)) if values else None
    return EarningsHistogram(tuple(counts), median)

"""Per-video monetization annotations shared by every report."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Mapping

from ..corpus import ChannelRecord, VideoRecord, derive_channel_profiles
from ..crypto import detect_crypto
from ..taxonomy import Category, DomainLexicon, label_video
from ..textscan import extract_urls


@dataclass(frozen=True, slots=True)
class VideoAnnotation:
    video_id: str
    channel_id: str
    upload_date: dt.date
    view_count: int
    category: str
    labels: frozenset
    domains: tuple[str, ...]   # one entry per URL occurrence
    urls: tuple[str, ...]
    coins: tuple[tuple[str, str], ...]  # (coin, address) for checksum-valid matches

    @property
    def monetized(self) -> bool:
        return bool(self.labels)

    def monetization_links(self, lexicon: DomainLexicon) -> set:
        """Distinct monetization URLs and valid crypto addresses in this video."""
        out = {u for u, d in zip(self.urls, self.domains) if lexicon.label(d) not in (None, "NM")}
        out |= {addr for _, addr in self.coins}
        return out


@dataclass
class AnnotatedCorpus:
    videos: list[VideoAnnotation]
    profiles: dict[str, ChannelRecord]
    lexicon: DomainLexicon

    def by_channel(self) -> dict[str, list[VideoAnnotation]]:
        out: dict[str, list] = {cid: [] for cid in sorted(self.profiles)}
        for v in self.videos:
            out.setdefault(v.channel_id, []).append(v)
        return out

    def channel_labels(self) -> dict[str, frozenset]:
        out = {cid: set() for cid in self.profiles}
        for v in self.videos:
            out.setdefault(v.channel_id, set()).update(v.labels)
        return {k: frozenset(s) for k, s in out.items()}


def annotate_video(rec: VideoRecord, lexicon: DomainLexicon) -> VideoAnnotation:
    mentions = extract_urls(rec.description)
    crypto = detect_crypto(rec.description)
    labels = label_video(rec, lexicon, crypto=crypto, mentions=mentions)
    return VideoAnnotation(
        rec.video_id, rec.channel_id, rec.upload_date,
        rec.view_count if rec.view_count is not None else 0,
        rec.category, labels,
        tuple(m.domain_key for m in mentions), tuple(m.raw_url for m in mentions),
        tuple((c.coin, c.address) for c in crypto if c.checksum_valid),
    )


def annotate(records: Iterable[VideoRecord], lexicon: DomainLexicon,
             profiles: Mapping[str, ChannelRecord] | None = None) -> AnnotatedCorpus:
    records = list(records)
    if profiles is None:
        profiles = derive_channel_profiles(records) if records else {}
    return AnnotatedCorpus([annotate_video(r, lexicon) for r in records], dict(profiles), lexicon)


STRATEGIES = ("PC", "AM", "DO", "CR")


def has(labels: frozenset, strategy: str) -> bool:
    if strategy == "Any":
        return bool(labels)
    return Category(strategy) in labels

"""Loading, validating and summarising line-delimited video corpora.

A video file holds one JSON object per line with exactly the fields
``video_id, channel_id, upload_date, description, view_count, category``.
An optional channel file carries ``channel_id, subscriber_count, source_tag``.
"""

from __future__ import annotations

import datetime as dt
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import AllViewsMissing, DuplicateChannelMeta, SchemaViolation

SOURCE_TAGS = ("general", "alt_lite", "alt_right", "manosphere")
PROBLEMATIC_TAGS = frozenset(SOURCE_TAGS[1:])

VIDEO_FIELDS = ("video_id", "channel_id", "upload_date", "description", "view_count", "category")
CHANNEL_FIELDS = ("channel_id", "subscriber_count", "source_tag")


@dataclass(frozen=True, slots=True)
class VideoRecord:
    video_id: str
    channel_id: str
    upload_date: dt.date
    description: str
    view_count: int | None
    category: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "video_id": self.video_id,
                "channel_id": self.channel_id,
                "upload_date": self.upload_date.isoformat(),
                "description": self.description,
                "view_count": self.view_count,
                "category": self.category,
            },
            ensure_ascii=False,
        )


@dataclass(frozen=True, slots=True)
class ChannelMeta:
    channel_id: str
    subscriber_count: int | None = None
    source_tag: str = "general"


@dataclass(frozen=True, slots=True)
class ChannelRecord:
    channel_id: str
    subscriber_count: int | None
    first_upload: dt.date
    derived_category: str
    source_tag: str = "general"

    @property
    def problematic(self) -> bool:
        return self.source_tag in PROBLEMATIC_TAGS

    def to_dict(self) -> dict:
        return {
            "channel_id": self.channel_id,
            "subscriber_count": self.subscriber_count,
            "first_upload": self.first_upload.isoformat(),
            "derived_category": self.derived_category,
            "source_tag": self.source_tag,
        }


@dataclass
class DatasetStats:
    video_count: int = 0
    channel_count: int = 0
    per_source: dict[str, tuple[int, int]] = field(default_factory=dict)
    missing_view_count: int = 0

    @property
    def missing_view_fraction(self) -> float:
        return self.missing_view_count / self.video_count if self.video_count else 0.0

    def to_dict(self) -> dict:
        return {
            "video_count": self.video_count,
            "channel_count": self.channel_count,
            "per_source": {k: {"videos": v, "channels": c} for k, (v, c) in sorted(self.per_source.items())},
            "missing_view_count": self.missing_view_count,
            "missing_view_fraction": self.missing_view_fraction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# parsing

def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_video(obj, line_no: int = 0) -> VideoRecord:
    """Validate one decoded JSON object against the video schema."""
    if not isinstance(obj, dict):
        raise SchemaViolation(line_no, "<record>", "not an object")
    for name in VIDEO_FIELDS:
        if name not in obj:
            raise SchemaViolation(line_no, name, "missing")
    extra = set(obj) - set(VIDEO_FIELDS)
    if extra:
        raise SchemaViolation(line_no, sorted(extra)[0], "unexpected field")
    for name in ("video_id", "channel_id", "description", "category"):
        if not isinstance(obj[name], str):
            raise SchemaViolation(line_no, name, "not a string")
    if not obj["video_id"]:
        raise SchemaViolation(line_no, "video_id", "empty")
    if not obj["channel_id"]:
        raise SchemaViolation(line_no, "channel_id", "empty")
    raw_date = obj["upload_date"]
    if not isinstance(raw_date, str) or len(raw_date) != 10:
        raise SchemaViolation(line_no, "upload_date", "not an ISO date")
    try:
        date = dt.date.fromisoformat(raw_date)
    except ValueError:
        raise SchemaViolation(line_no, "upload_date", "not an ISO date") from None
    views = obj["view_count"]
    if views is not None and (not _is_int(views) or views < 0):
        raise SchemaViolation(line_no, "view_count", "must be a nonnegative integer or null")
    return VideoRecord(obj["video_id"], obj["channel_id"], date, obj["description"], views, obj["category"])


def parse_channel(obj, line_no: int = 0) -> ChannelMeta:
    if not isinstance(obj, dict):
        raise SchemaViolation(line_no, "<record>", "not an object")
    for name in CHANNEL_FIELDS:
        if name not in obj:
            raise SchemaViolation(line_no, name, "missing")
    if not isinstance(obj["channel_id"], str) or not obj["channel_id"]:
        raise SchemaViolation(line_no, "channel_id")
    subs = obj["subscriber_count"]
    if subs is not None and (not _is_int(subs) or subs < 0):
        raise SchemaViolation(line_no, "subscriber_count")
    if obj["source_tag"] not in SOURCE_TAGS:
        raise SchemaViolation(line_no, "source_tag", f"expected one of {SOURCE_TAGS}")
    return ChannelMeta(obj["channel_id"], subs, obj["source_tag"])


class RecordStream:
    """Iterable over the records of one file; counts skipped lines as it goes.

    In strict mode the first malformed line raises :class:`SchemaViolation`.
    In lenient mode malformed lines are skipped and counted in ``skipped``.
    ``byte_range`` restricts reading to the lines starting inside
    ``[start, end)``, which is how shards split a file.
    """

    def __init__(self, path, strict=False, byte_range=None, parser=parse_video, unique_key="video_id"):
        self.path = os.fspath(path)
        if not os.path.exists(self.path):
            raise FileNotFoundError(self.path)
        self.strict = strict
        self.byte_range = byte_range
        self.parser = parser
        self.unique_key = unique_key
        self.skipped = 0
        self.loaded = 0

    def _lines(self) -> Iterator[tuple[int, bytes]]:
        with open(self.path, "rb") as fh:
            if self.byte_range is None:
                for i, line in enumerate(fh, 1):
                    yield i, line
                return
            start, end = self.byte_range
            if start > 0:
                fh.seek(start - 1)
                if fh.read(1) != b"\n":
                    fh.readline()  # partial line belongs to the previous shard
            pos = fh.tell()
            while pos < end:
                line = fh.readline()
                if not line:
                    break
                # negative key = byte offset; line number resolved only on error
                yield -pos, line
                pos += len(line)

    def _line_no(self, key: int) -> int:
        if key > 0:
            return key
        with open(self.path, "rb") as fh:
            return fh.read(-key).count(b"\n") + 1

    def __iter__(self) -> Iterator:
        seen = set()
        for key, raw in self._lines():
            if not raw.strip():
                continue
            try:
                try:
                    obj = json.loads(raw)
                except ValueError:
                    raise SchemaViolation(self._line_no(key), "<record>", "invalid JSON") from None
                try:
                    rec = self.parser(obj, key)
                except SchemaViolation as exc:
                    raise SchemaViolation(self._line_no(key), exc.field, exc.detail) from None
                ident = getattr(rec, self.unique_key)
                if ident in seen:
                    raise SchemaViolation(self._line_no(key), self.unique_key, "duplicate")
                seen.add(ident)
            except SchemaViolation:
                if self.strict:
                    raise
                self.skipped += 1
                continue
            self.loaded += 1
            yield rec


def load_corpus(path, strict: bool = False, byte_range=None) -> RecordStream:
    """Stream :class:`VideoRecord` objects from a line-delimited file, in file order."""
    return RecordStream(path, strict=strict, byte_range=byte_range)


def load_channel_meta(path, strict: bool = True) -> list[ChannelMeta]:
    stream = RecordStream(path, strict=strict, parser=parse_channel, unique_key="channel_id")
    try:
        return list(stream)
    except SchemaViolation as exc:
        if exc.field == "channel_id" and exc.detail == "duplicate":
            raise DuplicateChannelMeta(_channel_at_line(path, exc.line_no)) from None
        raise


def _channel_at_line(path, line_no):
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            if i == line_no:
                return json.loads(line)["channel_id"]
    return None


def shard_ranges(path, shards: int) -> list[tuple[int, int]]:
    """Split a file into ``shards`` contiguous byte ranges (line-aligned on read)."""
    size = os.path.getsize(path)
    shards = max(1, int(shards))
    bounds = [size * i // shards for i in range(shards + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(shards)]


def dump_corpus(records: Iterable[VideoRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json())
            fh.write("\n")


def dump_channel_meta(metas: Iterable[ChannelMeta], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in metas:
            fh.write(json.dumps({"channel_id": m.channel_id, "subscriber_count": m.subscriber_count,
                                 "source_tag": m.source_tag}) + "\n")


# ---------------------------------------------------------------------------
# enrichment

def impute_views(records: Iterable[VideoRecord]) -> list[VideoRecord]:
    """Replace missing view counts with the channel mean of present counts.

    The mean is rounded half-up to an integer. Present values are untouched.
    """
    records = list(records)
    sums: dict[str, int] = {}
    counts: dict[str, int] = {}
    channels = set()
    for r in records:
        channels.add(r.channel_id)
        if r.view_count is not None:
            sums[r.channel_id] = sums.get(r.channel_id, 0) + r.view_count
            counts[r.channel_id] = counts.get(r.channel_id, 0) + 1
    out = []
    for r in records:
        if r.view_count is not None:
            out.append(r)
            continue
        n = counts.get(r.channel_id)
        if not n:
            raise AllViewsMissing(r.channel_id)
        mean = (2 * sums[r.channel_id] + n) // (2 * n)
        out.append(VideoRecord(r.video_id, r.channel_id, r.upload_date, r.description, mean, r.category))
    return out


class ProfileAccumulator:
    """Per-channel partial aggregates; shards merge into one deterministic result."""

    def __init__(self):
        self.categories: dict[str, Counter] = {}
        self.first: dict[str, dt.date] = {}

    def add(self, rec: VideoRecord) -> None:
        cid = rec.channel_id
        cats = self.categories.get(cid)
        if cats is None:
            self.categories[cid] = Counter({rec.category: 1})
            self.first[cid] = rec.upload_date
        else:
            cats[rec.category] += 1
            if rec.upload_date < self.first[cid]:
                self.first[cid] = rec.upload_date

    def update(self, records: Iterable[VideoRecord]) -> "ProfileAccumulator":
        for r in records:
            self.add(r)
        return self

    def merge(self, other: "ProfileAccumulator") -> "ProfileAccumulator":
        for cid in sorted(other.categories):
            mine = self.categories.get(cid)
            if mine is None:
                self.categories[cid] = Counter(other.categories[cid])
                self.first[cid] = other.first[cid]
            else:
                mine.update(other.categories[cid])
                self.first[cid] = min(self.first[cid], other.first[cid])
        return self

    def finalize(self, channel_meta: Iterable[ChannelMeta] | Mapping[str, ChannelMeta] | None = None
                 ) -> dict[str, ChannelRecord]:
        meta = _index_meta(channel_meta)
        profiles = {}
        for cid in sorted(self.categories):
            cats = self.categories[cid]
            top = max(cats.values())
            category = min(c for c, n in cats.items() if n == top)
            m = meta.get(cid)
            profiles[cid] = ChannelRecord(
                channel_id=cid,
                subscriber_count=m.subscriber_count if m else None,
                first_upload=self.first[cid],
                derived_category=category,
                source_tag=m.source_tag if m else "general",
            )
        return profiles


def _index_meta(channel_meta) -> dict[str, ChannelMeta]:
    if channel_meta is None:
        return {}
    if isinstance(channel_meta, Mapping):
        return dict(channel_meta)
    out: dict[str, ChannelMeta] = {}
    for m in channel_meta:
        if m.channel_id in out:
            raise DuplicateChannelMeta(m.channel_id)
        out[m.channel_id] = m
    return out


def derive_channel_profiles(records: Iterable[VideoRecord], channel_meta=None) -> dict[str, ChannelRecord]:
    """One :class:`ChannelRecord` per channel, keyed and ordered by channel id.

    The derived category is the most frequent video category, ties broken by
    the lexicographically smallest name.
    """
    acc = ProfileAccumulator().update(records)
    if not acc.categories:
        raise ValueError("derive_channel_profiles needs at least one record")
    return acc.finalize(channel_meta)


def corpus_stats(records: Iterable[VideoRecord], profiles: Mapping[str, ChannelRecord]) -> DatasetStats:
    stats = DatasetStats()
    videos_by_source: Counter = Counter()
    for r in records:
        stats.video_count += 1
        if r.view_count is None:
            stats.missing_view_count += 1
        prof = profiles.get(r.channel_id)
        videos_by_source[prof.source_tag if prof else "general"] += 1
    channels_by_source = Counter(p.source_tag for p in profiles.values())
    stats.channel_count = len(profiles)
    for tag in sorted(set(videos_by_source) | set(channels_by_source)):
        stats.per_source[tag] = (videos_by_source[tag], channels_by_source[tag])
    return stats

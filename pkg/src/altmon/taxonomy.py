"""Monetization categories, default seeds, domain lexicon and labeling rules."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .crypto import CryptoMatch, detect_crypto
from .labelprop import (CLASSES, PropagationConfig, PropagationResult, SeedSet, assign_labels,
                        propagate)
from .textscan import extract_urls


class Category(str, enum.Enum):
    DO = "DO"  # donations
    CR = "CR"  # cryptocurrency addresses
    PC = "PC"  # products sold by the channel
    AM = "AM"  # affiliate marketing
    NM = "NM"  # not monetization

    def __str__(self):
        return self.value


MONETIZATION = (Category.PC, Category.AM, Category.DO, Category.CR)
PROPAGATED = tuple(Category(c) for c in CLASSES)


@dataclass(frozen=True)
class SeedTable:
    """Seed words and domains per propagation class.

    ``domain_names`` keeps the bare names as printed in the source table;
    ``domains`` holds the matching registrable-domain keys.
    """

    words: Mapping[str, tuple[str, ...]]
    domains: Mapping[str, tuple[str, ...]]

    def to_seed_set(self) -> SeedSet:
        return SeedSet.from_pairs(
            [(w, c) for c in CLASSES for w in self.words.get(c, ())],
            [(d, c) for c in CLASSES for d in self.domains.get(c, ())],
        )

    def domain_names(self, category: str) -> tuple[str, ...]:
        return tuple(_bare_name(d) for d in self.domains.get(category, ()))

    def to_text(self) -> str:
        out = []
        for c in CLASSES:
            out.append(f"[{c}]")
            out += [f"word\t{w}" for w in self.words.get(c, ())]
            out += [f"domain\t{d}" for d in self.domains.get(c, ())]
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SeedTable":
        words: dict[str, list] = {}
        domains: dict[str, list] = {}
        section = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in CLASSES:
                    raise ValueError(f"unknown seed section {section!r}")
                words.setdefault(section, [])
                domains.setdefault(section, [])
                continue
            if section is None:
                raise ValueError("seed entry before any [CATEGORY] section")
            kind, _, value = line.partition("\t")
            if kind == "word":
                words[section].append(value.strip())
            elif kind == "domain":
                domains[section].append(value.strip().lower())
            else:
                raise ValueError(f"bad seed line {raw!r}")
        return cls({k: tuple(v) for k, v in words.items()}, {k: tuple(v) for k, v in domains.items()})

    @classmethod
    def from_file(cls, path) -> "SeedTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def _bare_name(domain_key: str) -> str:
    return domain_key.split(".", 1)[0]


# Bare names from the seed table mapped to their registrable domains.
# "tiktok" is listed twice in the NM column of the original table; kept as-is.
DEFAULT_SEEDS = SeedTable(
    words={
        "DO": ("donate", "donation", "stream labs", "paypal"),
        "PC": ("merch", "merchandise", "shirt", "shirts", "swag", "merch shop", "mugs", "mug",
               "coaching", "course", "courses", "lesson", "lessons"),
        "AM": ("promo code", "code", "discount"),
        "NM": ("intro", "follow instagram", "facebook", "soundcloud", "snapchat", "twitch"),
    },
    domains={
        "DO": ("paypal.com", "subscribestar.com", "patreon.com", "gofundme.com", "ko-fi.com"),
        "PC": ("teespring.com", "bonfire.com", "merchlabs.com", "represent.com", "crowdmade.com"),
        "AM": ("amazon.com", "etsy.com", "ebay.com", "skillshare.com", "squarespace.com",
               "thegreatcourses.com"),
        "NM": ("facebook.com", "deviantart.com", "twitter.com", "cnn.com", "dropbox.com",
               "washingtontimes.com", "pastebin.com", "videvo.net", "audiomack.com", "canva.com",
               "t.co", "soundcloud.com", "tiktok.com", "freesfx.co.uk", "tiktok.com", "imgur.com",
               "pinterest.com", "wired.com", "snapchat.com", "pnas.org", "tapas.io",
               "washingtonpost.com"),
    },
)


# ---------------------------------------------------------------------------
# overrides and lexicon

@dataclass(frozen=True)
class Override:
    label: str
    reason: str = ""


def read_overrides(path) -> dict[str, Override]:
    """Tab-separated ``domain_key<TAB>label<TAB>reason`` lines."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"bad override line {raw!r}")
            label = parts[1].strip()
            if label not in CLASSES:
                raise ValueError(f"override label {label!r} must be one of {CLASSES}")
            out[parts[0].strip().lower()] = Override(label, parts[2].strip() if len(parts) > 2 else "")
    return out


def overrides_to_text(overrides: Mapping[str, Override]) -> str:
    return "".join(f"{d}\t{o.label}\t{o.reason}\n" for d, o in sorted(overrides.items()))


@dataclass(frozen=True)
class LexiconEntry:
    label: str
    provenance: str  # seed | propagated | override
    scores: tuple[float, float, float, float]
    reason: str = ""


@dataclass
class DomainLexicon:
    entries: dict[str, LexiconEntry] = field(default_factory=dict)
    iterations: int | None = None
    converged: bool | None = None

    def __contains__(self, domain):
        return domain in self.entries

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, domain) -> LexiconEntry:
        return self.entries[domain]

    def label(self, domain: str) -> str | None:
        e = self.entries.get(domain)
        return e.label if e else None

    def domains_with(self, label: str) -> list[str]:
        return sorted(d for d, e in self.entries.items() if e.label == label)

    def to_text(self) -> str:
        lines = ["domain\tlabel\tprovenance\tDO\tPC\tAM\tNM"]
        for d in sorted(self.entries):
            e = self.entries[d]
            lines.append("\t".join([d, e.label, e.provenance, *(repr(float(s)) for s in e.scores)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DomainLexicon":
        entries = {}
        for ln in text.splitlines()[1:]:
            if not ln:
                continue
            p = ln.split("\t")
            entries[p[0]] = LexiconEntry(p[1], p[2], tuple(float(x) for x in p[3:7]))
        return cls(entries)

    @classmethod
    def from_file(cls, path) -> "DomainLexicon":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def lexicon_from_scores(domains, d: np.ndarray, seeds: SeedSet,
                        overrides: Mapping[str, Override] | None = None,
                        tie_order=PropagationConfig().tie_order) -> DomainLexicon:
    labels = assign_labels(d, domains, tie_order)
    entries = {}
    for j, dom in enumerate(domains):
        scores = tuple(float(x) for x in d[j])
        if dom in seeds.domain_seeds:
            entries[dom] = LexiconEntry(seeds.domain_seeds[dom], "seed", scores)
        else:
            entries[dom] = LexiconEntry(labels[dom], "propagated", scores)
    for dom, ov in sorted((overrides or {}).items()):
        prev = entries.get(dom)
        entries[dom] = LexiconEntry(ov.label, "override", prev.scores if prev else (0.0, 0.0, 0.0, 0.0),
                                    ov.reason)
    return DomainLexicon(entries)


def build_lexicon(graph, seeds: SeedSet | SeedTable = DEFAULT_SEEDS,
                  overrides: Mapping[str, Override] | None = None,
                  config: PropagationConfig = PropagationConfig()) -> DomainLexicon:
    """Propagate, label every graph domain, then apply overrides last."""
    if isinstance(seeds, SeedTable):
        seeds = seeds.to_seed_set()
    result: PropagationResult = propagate(graph, seeds, config)
    lex = lexicon_from_scores(graph.domains, result.d, seeds, overrides, config.tie_order)
    lex.iterations = result.iterations
    lex.converged = result.converged
    return lex


def rank_donation_overrides(lexicon: DomainLexicon, usage: Mapping[str, int], n: int = 50
                            ) -> list[tuple[str, int]]:
    """The ``n`` most-linked DO domains (count desc, then domain) for manual review."""
    rows = [(d, int(usage.get(d, 0))) for d in lexicon.domains_with("DO")]
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows[:n]


# ---------------------------------------------------------------------------
# labeling

def label_video(video, lexicon: DomainLexicon, crypto: Iterable[CryptoMatch] | None = None,
                mentions=None) -> frozenset:
    """Monetization categories exhibited by one video (never contains NM)."""
    if mentions is None:
        mentions = extract_urls(video.description)
    if crypto is None:
        crypto = detect_crypto(video.description)
    labels = set()
    for m in mentions:
        lab = lexicon.label(m.domain_key)
        if lab and lab != "NM":
            labels.add(Category(lab))
    if any(c.checksum_valid for c in crypto):
        labels.add(Category.CR)
    return frozenset(labels)


def label_channel_period(videos: Iterable, lexicon: DomainLexicon) -> frozenset:
    """Union of :func:`label_video` over a channel's videos in one period."""
    out = set()
    for v in videos:
        out |= label_video(v, lexicon)
    return frozenset(out)

"""Synthetic corpora for tests, benchmarks and demos.

Everything here is driven by an explicit ``numpy`` Generator seed, so the
same arguments always give the same records.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass

import numpy as np

from .corpus import ChannelMeta, VideoRecord
from .taxonomy import DEFAULT_SEEDS, DomainLexicon, LexiconEntry

# Context vocabulary per class: the seed words plus unseeded synonyms.
SYNONYMS = {
    "DO": ("support", "tip", "tips", "contribute", "support the channel", "buy me a coffee", "pledge",
           "backers", "patrons", "fund"),
    "PC": ("hoodie", "hoodies", "tees", "apparel", "store", "official store", "posters", "stickers",
           "masterclass", "workshop"),
    "AM": ("coupon", "deal", "deals", "affiliate", "affiliate link", "off", "save", "sponsored",
           "use my code", "percent off"),
    "NM": ("follow", "follow me", "instagram", "tweets", "music", "outro", "credits", "playlist",
           "stream", "podcast"),
}

FILLER = ("check", "out", "my", "here", "link", "the", "and", "new", "video", "this", "channel", "below")

_SYLLABLES = ("ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "ze", "ba", "do", "fu", "gi", "ha", "ju",
              "pe", "qui", "ro", "su", "xe")
_TLDS = (".com", ".net", ".io", ".co.uk", ".org", ".shop", ".com.au")


def _name(rng: np.random.Generator, taken: set) -> str:
    while True:
        n = int(rng.integers(2, 5))
        label = "".join(_SYLLABLES[int(i)] for i in rng.integers(0, len(_SYLLABLES), n))
        domain = label + _TLDS[int(rng.integers(0, len(_TLDS)))]
        if domain not in taken:
            taken.add(domain)
            return domain


def _vocab(category: str) -> tuple[str, ...]:
    return DEFAULT_SEEDS.words[category] + SYNONYMS[category]


def _pick(rng, seq):
    return seq[int(rng.integers(0, len(seq)))]


@dataclass
class RecoveryCorpus:
    records: list[VideoRecord]
    planted: dict[str, str]   # non-seed domain -> intended class


def recovery_corpus(n_descriptions: int = 5000, n_channels: int = 400, domains_per_class: int = 40,
                    seed: int = 0) -> RecoveryCorpus:
    """Descriptions whose URLs carry context words of the domain's class.

    Each description has one to three link lines. A line is some class words
    (seed words and synonyms of the domain's class) plus optional filler,
    then the URL. Seed domains are used alongside the planted ones so the
    propagation has anchors, and a small share of lines mixes in a word of a
    different class as noise.
    """
    rng = np.random.default_rng(seed)
    taken = {d for ds in DEFAULT_SEEDS.domains.values() for d in ds}
    planted = {}
    pools = {}
    for c in ("DO", "PC", "AM", "NM"):
        new = [_name(rng, taken) for _ in range(domains_per_class)]
        planted.update({d: c for d in new})
        pools[c] = tuple(new) + tuple(dict.fromkeys(DEFAULT_SEEDS.domains[c]))
    classes = ("DO", "PC", "AM", "NM")
    start = dt.date(2016, 1, 1)
    records = []
    for i in range(n_descriptions):
        channel = f"UC{int(rng.integers(0, n_channels)):05d}"
        lines = [f"Video number {i} about things"]
        for _ in range(int(rng.integers(1, 4))):
            c = _pick(rng, classes)
            domain = _pick(rng, pools[c])
            vocab = _vocab(c)
            words = [_pick(rng, vocab) for _ in range(int(rng.integers(1, 3)))]
            if rng.random() < 0.5:
                words.insert(int(rng.integers(0, len(words) + 1)), _pick(rng, FILLER))
            if rng.random() < 0.05:
                words.append(_pick(rng, _vocab(_pick(rng, classes))))
            path = "".join(_pick(rng, "abcdefghijklmnopqrstuvwxyz0123456789") for _ in range(6))
            host = ("www." if rng.random() < 0.5 else "") + domain
            lines.append(f"{' '.join(words)}: https://{host}/{path}")
        day = start + dt.timedelta(days=int(rng.integers(0, 1400)))
        records.append(VideoRecord(f"v{i:07d}", channel, day, "\n".join(lines), int(rng.integers(0, 10 ** 6)),
                                   _pick(rng, ("Gaming", "Music", "Education", "Entertainment"))))
    return RecoveryCorpus(records, planted)


# ---------------------------------------------------------------------------
# throughput corpus

_TEMPLATES = (
    "New upload! {w1} {w2}: https://www.{d}/{p} and {w3} http://{d2}/{p}",
    "{w1} at https://{d}/{p} | {w2} {w3} www.{d2}/{p}",
    "Thanks for watching\n{w1} {w2} https://{d}/{p}\n{w3}: https://www.{d2}/{p}",
    "{w1} {w2} {w3} every week. Links: https://{d}/{p} https://{d2}/{p}",
)


def throughput_lines(n: int, seed: int = 0, n_channels: int = 20000, n_domains: int = 5000):
    """Yield ``n`` JSON lines of roughly 120-character descriptions."""
    rng = np.random.default_rng(seed)
    taken: set = set()
    domains = [_name(rng, taken) for _ in range(n_domains)]
    vocab = [w for c in ("DO", "PC", "AM", "NM") for w in _vocab(c)] + list(FILLER)
    block = 10_000
    base = dt.date(2015, 1, 1).toordinal()
    for lo in range(0, n, block):
        m = min(block, n - lo)
        t = rng.integers(0, len(_TEMPLATES), m)
        w = rng.integers(0, len(vocab), (m, 3))
        d = rng.integers(0, n_domains, (m, 2))
        p = rng.integers(0, 36 ** 5, m)
        ch = rng.integers(0, n_channels, m)
        days = rng.integers(0, 1800, m)
        views = rng.integers(0, 10 ** 6, m)
        for k in range(m):
            desc = _TEMPLATES[t[k]].format(w1=vocab[w[k, 0]], w2=vocab[w[k, 1]], w3=vocab[w[k, 2]],
                                           d=domains[d[k, 0]], d2=domains[d[k, 1]], p=np.base_repr(p[k], 36).lower())
            yield json.dumps({
                "video_id": f"t{lo + k:08d}", "channel_id": f"UC{ch[k]:06d}",
                "upload_date": dt.date.fromordinal(base + int(days[k])).isoformat(),
                "description": desc, "view_count": int(views[k]), "category": "Entertainment",
            }) + "\n"


def write_throughput_corpus(path, n: int, seed: int = 0) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        buf = []
        for line in throughput_lines(n, seed):
            buf.append(line)
            if len(buf) >= 10_000:
                fh.write("".join(buf))
                buf.clear()
        fh.write("".join(buf))


# ---------------------------------------------------------------------------
# activity corpora for matching

MONETIZED_LINK = "Support me: https://www.patreon.com/creator"
PLAIN_TEXT = "Thanks for watching, see you next time."


def activity_lexicon() -> DomainLexicon:
    return DomainLexicon({"patreon.com": LexiconEntry("DO", "seed", (1.0, 0.0, 0.0, 0.0))})


def month_date(period: int, day: int = 1) -> dt.date:
    return dt.date(period // 12, period % 12 + 1, day)


def channel_videos(channel_id: str, counts: dict[int, int], views: dict[int, int], category: str,
                   monetized_from: int | None = None) -> list[VideoRecord]:
    """Videos for one channel from per-month counts and per-month total views.

    Videos from month ``monetized_from`` on carry a monetization link.
    """
    out = []
    for p in sorted(counts):
        n = counts[p]
        total = views.get(p, 0)
        for j in range(n):
            v = total // n + (1 if j < total % n else 0)
            desc = MONETIZED_LINK if monetized_from is not None and p >= monetized_from else PLAIN_TEXT
            out.append(VideoRecord(f"{channel_id}-{p}-{j}", channel_id, month_date(p, 1 + j % 28), desc, v, category))
    return out


@dataclass
class ActivityCorpus:
    records: list[VideoRecord]
    metas: list[ChannelMeta]
    adoption: dict[str, int | None]


def random_activity_corpus(seed: int, n_channels: int = 120, start: int = 2016 * 12, months: int = 18,
                           categories=("Gaming", "News & Politics")) -> ActivityCorpus:
    """Channels with random monthly activity; about half adopt at a random month.

    Activity is drawn from a few coarse levels so that strata collide often
    and the matcher has real choices to make. Some months are inactive and a
    few have zero views, both of which must disqualify the month.
    """
    rng = np.random.default_rng(seed)
    records, metas, adoption = [], [], {}
    for i in range(n_channels):
        cid = f"C{i:04d}"
        cat = _pick(rng, categories)
        level = int(rng.integers(1, 4))
        counts, views = {}, {}
        for p in range(start, start + months):
            if rng.random() < 0.05:
                continue
            n = level if rng.random() < 0.8 else max(1, level + int(rng.integers(-1, 2)))
            counts[p] = n
            views[p] = 0 if rng.random() < 0.02 else n * 100 * int(rng.integers(1, 3))
        if not counts:
            counts[start], views[start] = 1, 100
        adopt = int(rng.integers(start + 3, start + months)) if rng.random() < 0.5 else None
        adoption[cid] = adopt
        records += channel_videos(cid, counts, views, cat, adopt)
        metas.append(ChannelMeta(cid, int(rng.integers(1, 10 ** 6)), "general"))
    return ActivityCorpus(records, metas, adoption)


def doubling_fixture(n_pairs: int = 20, x: int = 2017 * 12 + 6, window: int = 3, horizon: int = 12,
                     seed: int = 0) -> ActivityCorpus:
    """Treated channels produce exactly twice their control's output after adoption.

    Pair members share category and identical pre-window activity. Several
    levels can share a stratum, but treated and control ids sort in the same
    order inside it, so the greedy scan pairs ``T{i}`` with ``U{i}``.
    """
    rng = np.random.default_rng(seed)
    records, metas, adoption = [], [], {}
    for i in range(n_pairs):
        base = i + 1
        extra = int(rng.integers(0, 3))
        pre = {p: base for p in range(x - window, x)}
        pre_views = {p: 1000 * base for p in range(x - window, x)}
        post_c = {p: base + extra for p in range(x, x + horizon + 1)}
        post_t = {p: 2 * (base + extra) for p in range(x, x + horizon + 1)}
        views_post = {p: 1000 * base for p in range(x, x + horizon + 1)}
        cat = "Gaming"
        t, c = f"T{i:03d}", f"U{i:03d}"
        records += channel_videos(t, {**pre, **post_t}, {**pre_views, **views_post}, cat, monetized_from=x)
        records += channel_videos(c, {**pre, **post_c}, {**pre_views, **views_post}, cat)
        adoption[t], adoption[c] = x, None
        metas += [ChannelMeta(t, 1000, "general"), ChannelMeta(c, 1000, "general")]
    return ActivityCorpus(records, metas, adoption)

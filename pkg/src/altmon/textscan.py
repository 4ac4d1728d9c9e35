"""URL, domain, context-word and crypto-address extraction from description text.

All functions are pure and operate on a single description.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterator

from .crypto import detect_crypto
from .errors import NoHost
from .suffixes import PublicSuffixList, default_suffix_list

# A URL starts at http://, https:// or www. (not glued to a preceding word) and
# runs to the next whitespace.
_URL = re.compile(r"(?<![\w.@/-])(?:https?://|www\.)\S+", re.IGNORECASE)
_TRAILING = ".,;:!?)]}>'\"*"
_HOST_STOP = re.compile(r"[/?#\\]")
_HOST_OK = re.compile(r"[^\W_](?:[\w-]*[^\W_])?(?:\.[^\W_](?:[\w-]*[^\W_])?)*\.?", re.UNICODE)
_TOKEN = re.compile(r"(?:[^\W_]|['-])+")
_NUMERIC_HOST = re.compile(r"[\d.]+")


@dataclass(frozen=True, slots=True)
class UrlMention:
    raw_url: str
    domain_key: str
    line_index: int
    char_offset: int


@dataclass(frozen=True, slots=True)
class ContextPair:
    word: str
    domain_key: str
    video_id: str
    channel_id: str


def url_host(url: str) -> str:
    """Lowercase host of ``url``; scheme-agnostic. Raises :class:`NoHost`."""
    rest = url.split("://", 1)[1] if "://" in url else url
    rest = _HOST_STOP.split(rest, 1)[0]
    if "@" in rest:
        rest = rest.rsplit("@", 1)[1]
    if rest.startswith("["):
        raise NoHost(url)
    rest = rest.split(":", 1)[0]
    m = _HOST_OK.match(rest)
    if not m:
        raise NoHost(url)
    host = m.group(0).rstrip(".").lower()
    if not host:
        raise NoHost(url)
    return host


def registrable_domain(url: str, suffix_list: PublicSuffixList | None = None) -> str:
    """Lowercase eTLD+1 of the host in ``url``.

    Unknown suffixes fall back to the last two labels; a host that is itself a
    public suffix is returned unchanged.
    """
    host = url_host(url)
    return (suffix_list or default_suffix_list()).registrable(host)


def _domain_for(raw: str, psl: PublicSuffixList) -> str | None:
    try:
        host = url_host(raw)
    except NoHost:
        return None
    if "." not in host or _NUMERIC_HOST.fullmatch(host):
        return None
    key = psl.registrable(host)
    return key if "." in key else None


def _clean(raw: str) -> str:
    return raw.rstrip(_TRAILING)


def extract_urls(description: str, suffix_list: PublicSuffixList | None = None) -> list[UrlMention]:
    """Every URL with a registrable domain, ordered by (line, offset)."""
    if not description:
        return []
    psl = suffix_list or default_suffix_list()
    out = []
    for li, line in enumerate(description.split("\n")):
        for m in _URL.finditer(line):
            raw = _clean(m.group(0))
            key = _domain_for(raw, psl)
            if key is not None:
                out.append(UrlMention(raw, key, li, m.start()))
    return out


def _unigrams(text: str) -> list[str]:
    words = []
    for tok in _TOKEN.findall(text.lower()):
        tok = tok.strip("'-")
        if tok:
            words.append(tok)
    return words


def tokenize_ngrams(line: str) -> list[str]:
    """Lowercase unigrams followed by the bigrams of adjacent unigrams.

    URLs are removed first. Tokens split on anything that is not a letter,
    digit, apostrophe or hyphen.

    >>> tokenize_ngrams("mugs/t-shirts")
    ['mugs', 't-shirts', 'mugs t-shirts']
    """
    if not line:
        return []
    uni = _unigrams(_URL.sub(" ", line))
    return uni + [f"{a} {b}" for a, b in zip(uni, uni[1:])]


def url_contexts(description: str, suffix_list: PublicSuffixList | None = None
                 ) -> Iterator[tuple[UrlMention, list[str]]]:
    """Yield each URL mention with its deduplicated context tokens.

    Context = tokens of the same line strictly before the URL plus tokens of
    the whole previous line, URLs excluded.
    """
    if not description:
        return
    psl = suffix_list or default_suffix_list()
    lines = description.split("\n")
    for li, line in enumerate(lines):
        matches = list(_URL.finditer(line))
        if not matches:
            continue
        prev_tokens = tokenize_ngrams(lines[li - 1]) if li else []
        for m in matches:
            raw = _clean(m.group(0))
            key = _domain_for(raw, psl)
            if key is None:
                continue
            words = tokenize_ngrams(line[: m.start()]) + prev_tokens
            yield UrlMention(raw, key, li, m.start()), list(dict.fromkeys(words))


def context_pairs(description: str, video_id: str, channel_id: str,
                  suffix_list: PublicSuffixList | None = None) -> list[ContextPair]:
    """(word, domain) co-occurrences for every URL in the description."""
    return [
        ContextPair(word, mention.domain_key, video_id, channel_id)
        for mention, words in url_contexts(description, suffix_list)
        for word in words
    ]


def scan_records(video_id: str, description: str, suffix_list: PublicSuffixList | None = None,
                 bech32: bool = False) -> list[dict]:
    """Debug scan rows for one description (urls first, then crypto matches)."""
    rows = [
        {"video_id": video_id, "kind": "url", "key": m.domain_key, "value": m.raw_url,
         "line": m.line_index, "offset": m.char_offset}
        for m in extract_urls(description, suffix_list)
    ]
    rows.extend(
        {"video_id": video_id, "kind": "crypto", "key": c.coin, "value": c.address,
         "line": c.line_index, "offset": c.char_offset, "valid": c.checksum_valid}
        for c in detect_crypto(description, bech32=bech32)
    )
    return rows


def scan_jsonl(video_id: str, description: str, **kw) -> str:
    return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n"
                   for r in scan_records(video_id, description, **kw))

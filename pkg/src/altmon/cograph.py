"""Word-domain co-occurrence graph: accumulation, pruning, matrix export, I/O.

Accumulation is shardable: each shard fills a :class:`GraphAccumulator`,
shards are merged, and the final indexes are rebuilt by a global sort, so the
result does not depend on shard count or stream order.
"""

from __future__ import annotations

import multiprocessing as mp
import os
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .corpus import load_corpus, shard_ranges
from .suffixes import PublicSuffixList, default_suffix_list, suffix_list_for
from .textscan import ContextPair, url_contexts


@dataclass(frozen=True)
class BipartiteGraph:
    """Sorted word and domain indexes plus COO edges sorted by (row, col)."""

    words: tuple[str, ...]
    domains: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    word_channels: np.ndarray
    k: int = 0

    @property
    def shape(self):
        return len(self.words), len(self.domains)

    @property
    def edges(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): int(w) for i, j, w in zip(self.rows, self.cols, self.weights)}

    def word_index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}

    def domain_index(self) -> dict[str, int]:
        return {d: j for j, d in enumerate(self.domains)}

    def top_words(self, domain: str, n: int = 5) -> list[tuple[str, int]]:
        """Words most often co-occurring with ``domain``; ties by word."""
        j = self.domain_index()[domain]
        mask = self.cols == j
        pairs = [(self.words[i], int(w)) for i, w in zip(self.rows[mask], self.weights[mask])]
        pairs.sort(key=lambda p: (-p[1], p[0]))
        return pairs[:n]

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.words == other.words and self.domains == other.domains and self.k == other.k
                and np.array_equal(self.rows, other.rows) and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.word_channels, other.word_channels))

    __hash__ = None


class GraphAccumulator:
    """Mutable (word, domain) counts and per-word channel sets."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.channels: dict[str, set] = {}
        self.domains: set[str] = set()

    def add_context(self, words: Iterable[str], domain: str, channel_id: str) -> None:
        # one shared string per channel keeps the per-word sets small
        channel_id = sys.intern(channel_id)
        self.domains.add(domain)
        counts = self.counts
        channels = self.channels
        for w in words:
            counts[(w, domain)] += 1
            s = channels.get(w)
            if s is None:
                channels[w] = {channel_id}
            else:
                s.add(channel_id)

    def add_pair(self, pair: ContextPair) -> None:
        self.add_context((pair.word,), pair.domain_key, pair.channel_id)

    def add_domain(self, domain: str) -> None:
        """Register a parsed domain even if it has no context words."""
        self.domains.add(domain)

    def add_description(self, description: str, channel_id: str,
                        suffix_list: PublicSuffixList | None = None) -> None:
        for mention, words in url_contexts(description, suffix_list):
            self.add_context(words, mention.domain_key, channel_id)

    def merge(self, other: "GraphAccumulator") -> "GraphAccumulator":
        self.counts.update(other.counts)
        for w, chans in other.channels.items():
            mine = self.channels.get(w)
            if mine is None:
                self.channels[w] = set(chans)
            else:
                mine |= chans
        self.domains |= other.domains
        return self

    def to_graph(self) -> BipartiteGraph:
        words = tuple(sorted(self.channels))
        domains = tuple(sorted(self.domains))
        wi = {w: i for i, w in enumerate(words)}
        di = {d: j for j, d in enumerate(domains)}
        triples = sorted((wi[w], di[d], n) for (w, d), n in self.counts.items())
        arr = np.array(triples, dtype=np.int64).reshape(-1, 3)
        wc = np.array([len(self.channels[w]) for w in words], dtype=np.int64)
        return BipartiteGraph(words, domains, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), wc)


def accumulate(pairs: Iterable[ContextPair]) -> BipartiteGraph:
    """Graph whose edge weights count each (word, domain) pair in the stream."""
    acc = GraphAccumulator()
    for p in pairs:
        acc.add_pair(p)
    return acc.to_graph()


def prune_words(graph: BipartiteGraph, k: int = 30) -> BipartiteGraph:
    """Keep words seen in at least ``k`` distinct channels; domains are never pruned."""
    if k < 1:
        raise ValueError("k must be >= 1")
    keep = graph.word_channels >= k
    new_index = np.cumsum(keep) - 1
    edge_keep = keep[graph.rows] if len(graph.rows) else np.zeros(0, dtype=bool)
    return BipartiteGraph(
        words=tuple(w for w, ok in zip(graph.words, keep) if ok),
        domains=graph.domains,
        rows=new_index[graph.rows[edge_keep]].astype(np.int64),
        cols=graph.cols[edge_keep].copy(),
        weights=graph.weights[edge_keep].copy(),
        word_channels=graph.word_channels[keep].copy(),
        k=max(k, graph.k),
    )


def to_matrix(graph: BipartiteGraph) -> sp.csr_matrix:
    """Sparse |words| x |domains| weight matrix in index order."""
    m = sp.coo_matrix((graph.weights.astype(np.float64), (graph.rows, graph.cols)), shape=graph.shape)
    return m.tocsr()


# ---------------------------------------------------------------------------
# corpus-scale accumulation

def accumulate_records(records, suffix_list=None) -> GraphAccumulator:
    psl = suffix_list or default_suffix_list()
    acc = GraphAccumulator()
    for rec in records:
        for mention, words in url_contexts(rec.description, psl):
            acc.add_context(words, mention.domain_key, rec.channel_id)
    return acc


def _scan_shard(args):
    path, byte_range, strict, psl_path = args
    stream = load_corpus(path, strict=strict, byte_range=byte_range)
    acc = accumulate_records(stream, suffix_list_for(psl_path))
    return acc, stream.skipped


def accumulate_files(paths, shards: int = 1, processes: int | None = None, strict: bool = False,
                     suffix_list_path=None) -> tuple[GraphAccumulator, int]:
    """Scan video files in ``shards`` byte-range shards per file and merge.

    Returns the merged accumulator and the number of skipped lines. Merge
    order is fixed (file order, then shard order) and the final graph is
    re-sorted, so output is identical for any shard count.
    """
    psl_path = os.fspath(suffix_list_path) if suffix_list_path is not None else None
    tasks = [(os.fspath(p), r, strict, psl_path) for p in paths for r in shard_ranges(p, shards)]
    if processes is None:
        processes = min(len(tasks), os.cpu_count() or 1)
    merged = GraphAccumulator()
    skipped = 0

    def fold(results):
        nonlocal skipped
        for acc, sk in results:
            merged.merge(acc)
            skipped += sk

    if processes <= 1 or len(tasks) == 1:
        fold(_scan_shard(t) for t in tasks)
    else:
        with mp.get_context("fork").Pool(processes) as pool:
            fold(pool.imap(_scan_shard, tasks, chunksize=1))
    return merged, skipped


# ---------------------------------------------------------------------------
# text serialisation

def graph_to_text(graph: BipartiteGraph) -> str:
    lines = [
        "#altmon-graph\tv1",
        f"words\t{len(graph.words)}\tdomains\t{len(graph.domains)}\tedges\t{len(graph.weights)}\tk\t{graph.k}",
    ]
    lines += [f"W\t{w}\t{int(c)}" for w, c in zip(graph.words, graph.word_channels)]
    lines += [f"D\t{d}" for d in graph.domains]
    lines += [f"E\t{int(i)}\t{int(j)}\t{int(w)}" for i, j, w in zip(graph.rows, graph.cols, graph.weights)]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> BipartiteGraph:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#altmon-graph"):
        raise ValueError("not a graph file")
    head = lines[1].split("\t")
    nw, nd, ne, k = int(head[1]), int(head[3]), int(head[5]), int(head[7])
    body = lines[2:]
    words, wc = [], []
    for ln in body[:nw]:
        _, w, c = ln.split("\t")
        words.append(w)
        wc.append(int(c))
    domains = [ln.split("\t")[1] for ln in body[nw:nw + nd]]
    edges = np.array([[int(x) for x in ln.split("\t")[1:]] for ln in body[nw + nd:nw + nd + ne]],
                     dtype=np.int64).reshape(-1, 3)
    return BipartiteGraph(tuple(words), tuple(domains), edges[:, 0].copy(), edges[:, 1].copy(),
                          edges[:, 2].copy(), np.array(wc, dtype=np.int64), k)


def write_graph(graph: BipartiteGraph, path) -> None:
    from .io import atomic_write_text
    atomic_write_text(path, graph_to_text(graph))


def read_graph(path) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_text(fh.read())

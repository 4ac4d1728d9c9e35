"""Seeded label propagation over the word-domain matrix.

State is a pair of score arrays, ``w`` (|words| x 4) and ``d`` (|domains| x 4),
columns ordered DO, PC, AM, NM. One iteration is a simultaneous update from
the previous arrays::

    d' = M_domain.T @ w        (M_domain: columns of M sum to 1)
    w' = M_word @ d            (M_word: rows of M sum to 1)

followed by L1-normalising every column of d' and w', then clamping seed
rows back to their one-hot labels. Iteration stops when the elementwise
max-abs change of ``d`` drops below ``epsilon`` or after ``max_iters``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import NoSeedForCategory, ShapeMismatch

log = logging.getLogger(__name__)

CLASSES = ("DO", "PC", "AM", "NM")
CLASS_INDEX = {c: i for i, c in enumerate(CLASSES)}
DEFAULT_TIE_ORDER = ("NM", "DO", "PC", "AM")


def _label_str(label) -> str:
    return getattr(label, "value", label)


@dataclass(frozen=True)
class SeedSet:
    word_seeds: Mapping[str, str]
    domain_seeds: Mapping[str, str]

    def __post_init__(self):
        word_seeds = {w: _label_str(c) for w, c in self.word_seeds.items()}
        domain_seeds = {d: _label_str(c) for d, c in self.domain_seeds.items()}
        for label in list(word_seeds.values()) + list(domain_seeds.values()):
            if label not in CLASS_INDEX:
                raise ValueError(f"seed label {label!r} is not one of {CLASSES}")
        covered = set(word_seeds.values()) | set(domain_seeds.values())
        for c in CLASSES:
            if c not in covered:
                raise NoSeedForCategory(c)
        object.__setattr__(self, "word_seeds", word_seeds)
        object.__setattr__(self, "domain_seeds", domain_seeds)

    @classmethod
    def from_pairs(cls, words: Sequence[tuple[str, str]], domains: Sequence[tuple[str, str]]) -> "SeedSet":
        """Build from (item, label) pairs; an item listed under two labels is an error."""
        def collect(pairs):
            out = {}
            for item, label in pairs:
                label = _label_str(label)
                if out.get(item, label) != label:
                    raise ValueError(f"{item!r} seeded as both {out[item]} and {label}")
                out[item] = label
            return out
        return cls(collect(words), collect(domains))


@dataclass(frozen=True)
class PropagationConfig:
    epsilon: float = 1e-15
    max_iters: int = 1000
    tie_order: tuple[str, ...] = DEFAULT_TIE_ORDER

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if sorted(self.tie_order) != sorted(CLASSES):
            raise ValueError(f"tie_order must be a permutation of {CLASSES}")


@dataclass
class LabelArrays:
    w: np.ndarray
    d: np.ndarray

    def copy(self) -> "LabelArrays":
        return LabelArrays(self.w.copy(), self.d.copy())


@dataclass(frozen=True)
class Clamp:
    """Seed rows and their class columns for words and domains."""

    word_rows: np.ndarray
    word_cols: np.ndarray
    domain_rows: np.ndarray
    domain_cols: np.ndarray
    missing_words: tuple[str, ...] = ()
    missing_domains: tuple[str, ...] = ()

    def apply(self, arrays: LabelArrays) -> LabelArrays:
        arrays.w[self.word_rows] = 0.0
        arrays.w[self.word_rows, self.word_cols] = 1.0
        arrays.d[self.domain_rows] = 0.0
        arrays.d[self.domain_rows, self.domain_cols] = 1.0
        return arrays


@dataclass
class PropagationResult:
    arrays: LabelArrays
    iterations: int
    converged: bool
    residual: float
    clamp: Clamp
    normalized: LabelArrays | None = field(default=None, repr=False)

    @property
    def w(self):
        return self.arrays.w

    @property
    def d(self):
        return self.arrays.d


# ---------------------------------------------------------------------------
# normalisation

def _scale(M, sums, axis):
    """Divide rows (axis=1) or columns (axis=0) of ``M`` by ``sums``; zero lines untouched."""
    safe = np.where(sums > 0, sums, 1.0)
    if sp.issparse(M):
        M = sp.csr_matrix(M, dtype=np.float64, copy=True)
        if axis == 0:
            M.data /= safe[M.indices]
        else:
            M.data /= np.repeat(safe, np.diff(M.indptr))
        return M
    M = np.array(M, dtype=np.float64)
    return M / (safe[None, :] if axis == 0 else safe[:, None])


def normalize_for_domains(M):
    """Each nonzero column divided by its sum."""
    sums = np.asarray(M.sum(axis=0), dtype=np.float64).ravel()
    return _scale(M, sums, axis=0)


def normalize_for_words(M):
    """Each nonzero row divided by its sum."""
    sums = np.asarray(M.sum(axis=1), dtype=np.float64).ravel()
    return _scale(M, sums, axis=1)


def normalize_columns(a: np.ndarray) -> np.ndarray:
    sums = a.sum(axis=0)
    return a / np.where(sums > 0, sums, 1.0)


# ---------------------------------------------------------------------------
# iteration

def initialize(seeds: SeedSet, words: Sequence[str], domains: Sequence[str]) -> tuple[LabelArrays, Clamp]:
    """One-hot seed rows, zeros elsewhere. Seeds absent from the indexes are logged and skipped."""
    wi = {w: i for i, w in enumerate(words)}
    di = {d: j for j, d in enumerate(domains)}
    wr, wc, missing_w = [], [], []
    for word in sorted(seeds.word_seeds):
        if word in wi:
            wr.append(wi[word])
            wc.append(CLASS_INDEX[seeds.word_seeds[word]])
        else:
            missing_w.append(word)
    dr, dc, missing_d = [], [], []
    for dom in sorted(seeds.domain_seeds):
        if dom in di:
            dr.append(di[dom])
            dc.append(CLASS_INDEX[seeds.domain_seeds[dom]])
        else:
            missing_d.append(dom)
    present = {CLASSES[c] for c in wc + dc}
    for c in CLASSES:
        if c not in present:
            raise NoSeedForCategory(c)
    if missing_w or missing_d:
        log.warning("%d seed words and %d seed domains are not in the graph", len(missing_w), len(missing_d))
    clamp = Clamp(np.array(wr, dtype=np.intp), np.array(wc, dtype=np.intp),
                  np.array(dr, dtype=np.intp), np.array(dc, dtype=np.intp),
                  tuple(missing_w), tuple(missing_d))
    arrays = LabelArrays(np.zeros((len(words), 4)), np.zeros((len(domains), 4)))
    return clamp.apply(arrays), clamp


def iterate_once(M_word, M_domain, arrays: LabelArrays, clamp: Clamp,
                 normalized_out: list | None = None) -> LabelArrays:
    """One simultaneous update; returns new arrays, leaves ``arrays`` untouched."""
    n_words, n_domains = M_word.shape
    if M_domain.shape != (n_words, n_domains) or arrays.w.shape != (n_words, 4) \
            or arrays.d.shape != (n_domains, 4):
        raise ShapeMismatch(
            f"M_word {M_word.shape}, M_domain {M_domain.shape}, w {arrays.w.shape}, d {arrays.d.shape}")
    d_new = np.asarray(M_domain.T @ arrays.w)
    w_new = np.asarray(M_word @ arrays.d)
    out = LabelArrays(normalize_columns(w_new), normalize_columns(d_new))
    if normalized_out is not None:
        normalized_out.append(out.copy())
    return clamp.apply(out)


def propagate_matrix(M, clamp: Clamp, arrays: LabelArrays, config: PropagationConfig = PropagationConfig(),
                     on_iteration: Callable[[int, LabelArrays], None] | None = None) -> PropagationResult:
    M = sp.csr_matrix(M, dtype=np.float64)
    M_word = normalize_for_words(M)
    M_domain = normalize_for_domains(M)
    residual = float("inf")
    converged = False
    iterations = 0
    last_norm: list = []
    for iterations in range(1, config.max_iters + 1):
        last_norm.clear()
        nxt = iterate_once(M_word, M_domain, arrays, clamp, last_norm)
        residual = float(np.max(np.abs(nxt.d - arrays.d))) if nxt.d.size else 0.0
        arrays = nxt
        if on_iteration is not None:
            on_iteration(iterations, arrays)
        if residual < config.epsilon:
            converged = True
            break
    if not converged:
        log.info("propagation stopped at max_iters=%d, residual %.3g", config.max_iters, residual)
    return PropagationResult(arrays, iterations, converged, residual, clamp,
                             last_norm[0] if last_norm else None)


def propagate(graph, seeds: SeedSet, config: PropagationConfig = PropagationConfig(),
              on_iteration=None) -> PropagationResult:
    """Run propagation on a :class:`~altmon.cograph.BipartiteGraph`."""
    from .cograph import to_matrix

    arrays, clamp = initialize(seeds, graph.words, graph.domains)
    return propagate_matrix(to_matrix(graph), clamp, arrays, config, on_iteration)


def assign_labels(d: np.ndarray, domains: Sequence[str] | None = None,
                  tie_order: Sequence[str] = DEFAULT_TIE_ORDER) -> dict:
    """Per-row argmax; exact ties go to the earliest class in ``tie_order``; zero rows are NM."""
    d = np.asarray(d, dtype=np.float64)
    if domains is None:
        domains = range(len(d))
    rank = {c: i for i, c in enumerate(tie_order)}
    out = {}
    for key, row in zip(domains, d):
        top = row.max() if row.size else 0.0
        if top <= 0.0:
            out[key] = "NM"
            continue
        tied = [CLASSES[i] for i in range(4) if row[i] == top]
        out[key] = min(tied, key=rank.__getitem__)
    return out


def result_to_text(result: PropagationResult, domains: Sequence[str],
                   tie_order: Sequence[str] = DEFAULT_TIE_ORDER) -> str:
    """Tab-separated per-domain scores and label, sorted by domain key."""
    labels = assign_labels(result.d, domains, tie_order)
    order = sorted(range(len(domains)), key=domains.__getitem__)
    lines = ["domain\tDO\tPC\tAM\tNM\tlabel"]
    for j in order:
        row = result.d[j]
        lines.append("\t".join([domains[j], *(repr(float(x)) for x in row), labels[domains[j]]]))
    return "\n".join(lines) + "\n"


def result_from_text(text: str) -> tuple[list[str], np.ndarray, dict[str, str]]:
    domains, scores, labels = [], [], {}
    for ln in text.splitlines()[1:]:
        parts = ln.split("\t")
        domains.append(parts[0])
        scores.append([float(x) for x in parts[1:5]])
        labels[parts[0]] = parts[5]
    return domains, np.array(scores, dtype=np.float64).reshape(-1, 4), labels

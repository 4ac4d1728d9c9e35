"""Sampling domains for manual validation and scoring the annotations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import ClassTooSmall
from ..labelprop import CLASSES
from ..taxonomy import DomainLexicon

SAMPLE_STRATEGIES = ("rstrat", "pstrat", "random")


@dataclass(frozen=True)
class ValidationSample:
    strategy: str
    label: str | None   # predicted class; None for the unstratified random sample
    items: tuple[str, ...]


VALIDATION_HEADER = ["strategy", "predicted", "rank", "domain"]


def samples_table(samples: Iterable[ValidationSample]):
    return [[s.strategy, s.label or "", i, d] for s in samples for i, d in enumerate(s.items)]


def _draw(pool: Sequence[str], size: int, seed: int, stream: int) -> tuple[str, ...]:
    rng = np.random.default_rng([seed, stream])
    idx = rng.choice(len(pool), size=min(size, len(pool)), replace=False)
    return tuple(pool[i] for i in idx)


def validation_samples(lexicon: DomainLexicon, usage: Mapping[str, int], size: int = 50, seed: int = 0,
                       strategies: Sequence[str] = SAMPLE_STRATEGIES,
                       classes: Sequence[str] = CLASSES) -> list[ValidationSample]:
    """Domain samples per strategy.

    ``rstrat`` draws uniformly within each predicted class, ``pstrat`` takes
    the most-used domains of each class (usage desc, then name) and
    ``random`` draws uniformly over all labeled domains. Every draw uses its
    own stream derived from ``seed``, so asking for a subset of strategies
    does not change the others.
    """
    out = []
    for strategy in strategies:
        if strategy not in SAMPLE_STRATEGIES:
            raise ValueError(f"unknown sampling strategy {strategy!r}")
        if strategy == "random":
            pool = sorted(lexicon.entries)
            out.append(ValidationSample("random", None, _draw(pool, size, seed, len(classes))))
            continue
        for i, c in enumerate(classes):
            pool = lexicon.domains_with(c)
            if len(pool) < size:
                warnings.warn(ClassTooSmall(f"{strategy}: class {c} has {len(pool)} domains, wanted {size}"),
                              stacklevel=2)
            if strategy == "rstrat":
                items = _draw(pool, size, seed, i)
            else:
                items = tuple(sorted(pool, key=lambda d: (-usage.get(d, 0), d))[:size])
            out.append(ValidationSample(strategy, c, items))
    return out


@dataclass
class ConfusionMatrix:
    classes: tuple[str, ...]
    matrix: np.ndarray   # rows real, columns predicted

    @property
    def total(self) -> int:
        return int(self.matrix.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.matrix) / self.total) if self.total else float("nan")

    def precision(self) -> dict[str, float]:
        cols = self.matrix.sum(axis=0)
        return {c: float(self.matrix[i, i] / cols[i]) if cols[i] else float("nan")
                for i, c in enumerate(self.classes)}

    def recall(self) -> dict[str, float]:
        rows = self.matrix.sum(axis=1)
        return {c: float(self.matrix[i, i] / rows[i]) if rows[i] else float("nan")
                for i, c in enumerate(self.classes)}

    def table(self):
        prec = self.precision()
        return [[c, *(int(x) for x in self.matrix[i]), prec[c]] for i, c in enumerate(self.classes)]

    @property
    def header(self):
        return ["real", *self.classes, "precision"]


def confusion_matrix(annotations: Iterable[tuple], classes: Sequence[str] = CLASSES) -> ConfusionMatrix:
    """Counts from ``(item, real, predicted)`` triples."""
    index = {c: i for i, c in enumerate(classes)}
    m = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for _, real, pred in annotations:
        real, pred = getattr(real, "value", real), getattr(pred, "value", pred)
        if real not in index or pred not in index:
            raise ValueError(f"labels must be in {tuple(classes)}, got {real!r}/{pred!r}")
        m[index[real], index[pred]] += 1
    return ConfusionMatrix(tuple(classes), m)

"""Binomial intervals, rank tests, agreement, and quantile bucketing."""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import norm

from ..errors import EmptySample, InvalidCounts, LengthMismatch


@dataclass(frozen=True)
class StatResult:
    statistic: float
    pvalue: float | None = None
    interval: tuple[float, float] | None = None
    method: str = ""


def wilson_ci(successes: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1 or successes < 0 or successes > n:
        raise InvalidCounts(f"need 0 <= successes <= n and n >= 1, got {successes}/{n}")
    z = float(norm.ppf(0.5 + level / 2))
    p = successes / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


def rankdata(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties given their mean rank."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _exact_p(u: float, n1: int, n2: int) -> float:
    counts: dict[float, int] = {}
    base = n1 * (n1 + 1) / 2
    for combo in itertools.combinations(range(1, n1 + n2 + 1), n1):
        key = sum(combo) - base
        counts[key] = counts.get(key, 0) + 1
    total = sum(counts.values())
    lower = sum(c for k, c in counts.items() if k <= u) / total
    upper = sum(c for k, c in counts.items() if k >= u) / total
    return min(1.0, 2 * min(lower, upper))


def mann_whitney_u(a: Sequence[float], b: Sequence[float], exact_limit: int = 12) -> StatResult:
    """Two-sided Mann-Whitney U test; U is reported for sample ``a``.

    Exact enumeration when the pooled size is at most ``exact_limit`` and
    there are no ties, otherwise the normal approximation with tie and
    continuity corrections.
    """
    a, b = list(a), list(b)
    if not a or not b:
        raise EmptySample("both samples must be nonempty")
    n1, n2 = len(a), len(b)
    ranks = rankdata(a + b)
    u = sum(ranks[:n1]) - n1 * (n1 + 1) / 2
    pooled = a + b
    has_ties = len(set(pooled)) < len(pooled)
    if n1 + n2 <= exact_limit and not has_ties:
        return StatResult(u, _exact_p(u, n1, n2), method="mann-whitney-exact")
    n = n1 + n2
    tie_term = 0.0
    for _, grp in itertools.groupby(sorted(pooled)):
        t = len(list(grp))
        tie_term += t ** 3 - t
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    if var <= 0:
        return StatResult(u, 1.0, method="mann-whitney-normal")
    z = max(abs(u - n1 * n2 / 2) - 0.5, 0.0) / math.sqrt(var)
    return StatResult(u, min(1.0, 2 * norm.sf(z)), method="mann-whitney-normal")


def cohen_kappa(a: Sequence, b: Sequence) -> StatResult:
    """Cohen's kappa for two annotators' binary labels."""
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} != {len(b)}")
    if not a:
        raise LengthMismatch("need at least one item")
    n = len(a)
    a1 = sum(1 for x in a if x) / n
    b1 = sum(1 for x in b if x) / n
    po = sum(1 for x, y in zip(a, b) if bool(x) == bool(y)) / n
    pe = a1 * b1 + (1 - a1) * (1 - b1)
    if pe == 1.0:
        return StatResult(1.0 if po == 1.0 else 0.0, method="cohen-kappa")
    return StatResult((po - pe) / (1 - pe), method="cohen-kappa")


def cut_points(values: Sequence[float], groups: int = 10) -> list[float]:
    """Empirical quantile cut points: the ceil(i*n/groups)-th smallest value, i=1..groups-1."""
    s = sorted(values)
    n = len(s)
    if n == 0:
        return []
    return [s[max(0, -(-i * n // groups) - 1)] for i in range(1, groups)]


def bucket(value: float, cuts: Sequence[float]) -> int:
    """Number of cut points strictly below ``value`` (values on a cut go to the lower bucket)."""
    return bisect_left(cuts, value)


def mean_ci(values: Sequence[float], level: float = 0.95) -> tuple[float, float, float]:
    """Mean with a normal-approximation interval (sample standard deviation)."""
    n = len(values)
    if n == 0:
        return float("nan"), float("nan"), float("nan")
    m = math.fsum(values) / n
    if n == 1:
        return m, m, m
    var = math.fsum((x - m) ** 2 for x in values) / (n - 1)
    half = float(norm.ppf(0.5 + level / 2)) * math.sqrt(var / n)
    return m, m - half, m + half

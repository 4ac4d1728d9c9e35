"""Stratified 1:1 matching of adopting channels to comparable controls.

Periods are integer indexes: ``year*12 + month-1`` for monthly granularity,
the calendar year for yearly. In every period, channels that produced no
video or received no view are dropped, then the top ``trim`` share on each
metric is dropped (each metric on its own, union of both), and the rest are
bucketed into ``groups`` empirical quantile strata on videos and on views.
"""

from __future__ import annotations

import datetime as dt
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .annotate import AnnotatedCorpus
from .stats import bucket, cut_points, mean_ci


def period_of(date: dt.date, granularity: str = "month") -> int:
    if granularity == "month":
        return date.year * 12 + date.month - 1
    if granularity == "year":
        return date.year
    raise ValueError(f"unknown granularity {granularity!r}")


def period_label(p: int, granularity: str = "month") -> str:
    return f"{p // 12:04d}-{p % 12 + 1:02d}" if granularity == "month" else str(p)


@dataclass(frozen=True)
class MatchSpec:
    granularity: str = "month"
    window: int = 3
    groups: int = 10
    trim: float = 0.05
    # inclusive period-index bounds on the adoption period x
    x_range: tuple[int, int] | None = None
    same_category: bool = True
    # when set, both channels must have a derived category in this set
    allowed_categories: tuple[str, ...] | None = None
    same_start_year: bool = False
    # "never": control has no monetized video at all; "until_x": none before x
    control_rule: str = "never"

    def __post_init__(self):
        if self.granularity not in ("month", "year"):
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 0 <= self.trim < 0.5:
            raise ValueError("trim must be in [0, 0.5)")
        if self.groups < 2:
            raise ValueError("groups must be >= 2")
        if self.control_rule not in ("never", "until_x", "any"):
            raise ValueError(f"unknown control rule {self.control_rule!r}")
        if self.x_range is not None:
            object.__setattr__(self, "x_range", tuple(self.x_range))
        if self.allowed_categories is not None:
            object.__setattr__(self, "allowed_categories", tuple(self.allowed_categories))

    @classmethod
    def monthly(cls, start: str = "2015-01", end: str = "2019-09", **kw) -> "MatchSpec":
        """Monthly spec with x bounded by two ``YYYY-MM`` months."""
        def idx(s):
            y, m = s.split("-")
            return int(y) * 12 + int(m) - 1
        return cls(granularity="month", x_range=(idx(start), idx(end)), **kw)


# Category restriction used for the problematic-channel comparison.
PROBLEMATIC_CATEGORIES = ("News & Politics", "People & Blogs", "Entertainment")


def trim_threshold(values: Sequence[float], trim: float) -> float:
    """Largest retained value: the k-th smallest with k = n - floor(trim*n)."""
    s = sorted(values)
    n = len(s)
    k = n - math.floor(trim * n + 1e-9)
    return s[max(k, 1) - 1]


@dataclass
class Activity:
    """Per-channel, per-period video and view totals plus adoption periods."""

    videos: dict[str, dict[int, int]]
    views: dict[str, dict[int, int]]
    first_adoption: dict[str, int]
    granularity: str

    @classmethod
    def from_corpus(cls, corpus: AnnotatedCorpus, granularity: str = "month") -> "Activity":
        videos: dict = defaultdict(lambda: defaultdict(int))
        views: dict = defaultdict(lambda: defaultdict(int))
        first: dict[str, int] = {}
        for v in corpus.videos:
            p = period_of(v.upload_date, granularity)
            videos[v.channel_id][p] += 1
            views[v.channel_id][p] += v.view_count
            if v.labels and (v.channel_id not in first or p < first[v.channel_id]):
                first[v.channel_id] = p
        return cls({k: dict(d) for k, d in videos.items()}, {k: dict(d) for k, d in views.items()},
                   first, granularity)

    def periods(self) -> list[int]:
        return sorted({p for d in self.videos.values() for p in d})


def strata(activity: Activity, period: int, groups: int, trim: float) -> dict[str, tuple[int, int]]:
    """(video stratum, view stratum) for every retained channel in one period."""
    active = {}
    for cid, per in activity.videos.items():
        n = per.get(period, 0)
        w = activity.views[cid].get(period, 0)
        if n > 0 and w > 0:
            active[cid] = (n, w)
    if not active:
        return {}
    keep = active
    if trim > 0:
        tv = trim_threshold([a[0] for a in active.values()], trim)
        tw = trim_threshold([a[1] for a in active.values()], trim)
        keep = {cid: a for cid, a in active.items() if a[0] <= tv and a[1] <= tw}
    cv = cut_points([a[0] for a in keep.values()], groups)
    cw = cut_points([a[1] for a in keep.values()], groups)
    return {cid: (bucket(a[0], cv), bucket(a[1], cw)) for cid, a in keep.items()}


@dataclass(frozen=True)
class MatchedPair:
    treated: str
    control: str
    x: int


@dataclass
class MatchDiagnostics:
    treated_candidates: int = 0
    treated_outside_range: int = 0
    treated_incomplete_window: int = 0
    treated_category_excluded: int = 0
    control_pool: int = 0
    unmatched: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {**self.__dict__, "unmatched": list(self.unmatched)}


@dataclass
class MatchedPairSet:
    pairs: list[MatchedPair]
    spec: MatchSpec
    diagnostics: MatchDiagnostics

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    header = ["treated", "control", "x", "period"]

    def table(self):
        return [[p.treated, p.control, p.x, period_label(p.x, self.spec.granularity)] for p in self.pairs]


def _category_ok(spec: MatchSpec, cat_t, cat_c) -> bool:
    if spec.allowed_categories is not None:
        if cat_t not in spec.allowed_categories or cat_c not in spec.allowed_categories:
            return False
    return not spec.same_category or cat_t == cat_c


def stratified_match(corpus: AnnotatedCorpus, spec: MatchSpec = MatchSpec(),
                     treated: Iterable[str] | None = None,
                     periods: Sequence[int] | None = None) -> MatchedPairSet:
    """Greedy 1:1 matching without replacement.

    Default design: treated channels are those whose first monetized video
    falls in period x (within ``spec.x_range``); strata must agree over the
    ``window`` periods strictly before x. Treated channels are scanned in
    (x, channel_id) order and each takes the smallest unused eligible control
    id.

    Group design: pass ``treated`` (a fixed set, e.g. problematic channels)
    and ``periods`` (the periods on which strata must agree). Controls are
    then drawn from every other channel, and x is reported as the period
    after the last matched one.
    """
    activity = Activity.from_corpus(corpus, spec.granularity)
    profiles = corpus.profiles
    diag = MatchDiagnostics()
    strata_cache: dict[int, dict] = {}

    def strata_at(p):
        if p not in strata_cache:
            strata_cache[p] = strata(activity, p, spec.groups, spec.trim)
        return strata_cache[p]

    def signature(cid, window):
        sig = []
        for p in window:
            s = strata_at(p).get(cid)
            if s is None:
                return None
            sig.append(s)
        return tuple(sig)

    if treated is None:
        group = None
        todo = []
        for cid, x in activity.first_adoption.items():
            if cid not in profiles:
                continue
            if spec.x_range is not None and not spec.x_range[0] <= x <= spec.x_range[1]:
                diag.treated_outside_range += 1
                continue
            todo.append((x, cid))
        windows = {x: tuple(range(x - spec.window, x)) for x, _ in todo}
    else:
        group = set(treated)
        if periods is None:
            raise ValueError("the group design needs explicit periods")
        window = tuple(sorted(periods))
        x = window[-1] + 1
        todo = [(x, cid) for cid in group if cid in profiles]
        windows = {x: window}
    todo.sort()
    diag.treated_candidates = len(todo)

    def control_ok(cid, x):
        if group is not None and cid in group:
            return False
        adopt = activity.first_adoption.get(cid)
        if spec.control_rule == "never":
            return adopt is None
        if spec.control_rule == "until_x":
            return adopt is None or adopt > x
        return True

    control_ids = sorted(profiles)
    # pools[x][key] = sorted control ids sharing that key
    pools: dict[int, dict] = {}

    def start_year(cid):
        return profiles[cid].first_upload.year if spec.same_start_year else None

    def pool_for(x):
        if x not in pools:
            idx: dict = defaultdict(list)
            for cid in control_ids:
                if not control_ok(cid, x):
                    continue
                sig = signature(cid, windows[x])
                if sig is None:
                    continue
                idx[(sig, start_year(cid))].append(cid)
            pools[x] = idx
        return pools[x]

    used: set[str] = set()
    pairs = []
    for x, cid in todo:
        if cid in used:
            # already taken as a control for an earlier adopter
            diag.unmatched.append(cid)
            continue
        sig = signature(cid, windows[x])
        if sig is None:
            diag.treated_incomplete_window += 1
            diag.unmatched.append(cid)
            continue
        cat = profiles[cid].derived_category
        if spec.allowed_categories is not None and cat not in spec.allowed_categories:
            diag.treated_category_excluded += 1
            diag.unmatched.append(cid)
            continue
        chosen = None
        for ctrl in pool_for(x).get((sig, start_year(cid)), ()):
            if ctrl in used or ctrl == cid:
                continue
            if _category_ok(spec, cat, profiles[ctrl].derived_category):
                chosen = ctrl
                break
        if chosen is None:
            diag.unmatched.append(cid)
            continue
        used.add(chosen)
        used.add(cid)
        pairs.append(MatchedPair(cid, chosen, x))
    diag.control_pool = len({c for idx in pools.values() for ids in idx.values() for c in ids})
    return MatchedPairSet(pairs, spec, diag)


# ---------------------------------------------------------------------------
# productivity

@dataclass(frozen=True)
class ContrastRow:
    offset: int
    treated_mean: float
    treated_low: float
    treated_high: float
    control_mean: float
    control_low: float
    control_high: float
    pairs: int


CONTRAST_HEADER = ["offset", "treated_mean", "treated_low", "treated_high",
                   "control_mean", "control_low", "control_high", "pairs"]


@dataclass
class ProductivityContrast:
    rows: list[ContrastRow]
    treated_total: float
    control_total: float
    ratio: float
    total_periods: int

    def table(self):
        return [[r.offset, r.treated_mean, r.treated_low, r.treated_high,
                 r.control_mean, r.control_low, r.control_high, r.pairs] for r in self.rows]


def productivity_contrast(pairs: MatchedPairSet, corpus: AnnotatedCorpus, horizon: int = 12,
                          total_periods: int = 12) -> ProductivityContrast:
    """Mean videos per group for each period offset in [-window, horizon].

    Offset 0 is the adoption period. Totals are mean per-channel sums over
    offsets 1..total_periods; ``ratio`` is treated over control.
    """
    activity = Activity.from_corpus(corpus, pairs.spec.granularity)
    plist = list(pairs)

    def count(cid, p):
        return activity.videos.get(cid, {}).get(p, 0)

    rows = []
    for m in range(-pairs.spec.window, horizon + 1):
        t = [count(pr.treated, pr.x + m) for pr in plist]
        c = [count(pr.control, pr.x + m) for pr in plist]
        rows.append(ContrastRow(m, *mean_ci(t), *mean_ci(c), len(plist)))
    t_tot = [sum(count(pr.treated, pr.x + m) for m in range(1, total_periods + 1)) for pr in plist]
    c_tot = [sum(count(pr.control, pr.x + m) for m in range(1, total_periods + 1)) for pr in plist]
    t_mean = math.fsum(t_tot) / len(plist) if plist else float("nan")
    c_mean = math.fsum(c_tot) / len(plist) if plist else float("nan")
    ratio = t_mean / c_mean if plist and c_mean > 0 else float("nan")
    return ProductivityContrast(rows, t_mean, c_mean, ratio, total_periods)

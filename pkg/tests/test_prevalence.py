import random

import pytest

from altmon.analytics import annotate
from altmon.analytics.prevalence import (LEVEL_STRATEGIES, REFERENCE_SUBSCRIBER_DECILES, DecileSpec, adoption_by_decile,
                                         adoption_series, prevalence_table, top_domains, usage_counts)
from altmon.corpus import ChannelMeta, corpus_stats, derive_channel_profiles
from altmon.errors import EmptyCorpus, MissingMetric
from altmon.taxonomy import DomainLexicon, LexiconEntry
from conftest import record

GENESIS = "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa"
LINKS = {"DO": "https://www.patreon.com/me", "DO2": "https://ko-fi.com/me", "PC": "https://teespring.com/shop",
         "AM": "https://amazon.com/dp/1", "NM": "https://twitter.com/me", "CR": GENESIS}


def lexicon():
    z = (0.0, 0.0, 0.0, 0.0)
    return DomainLexicon({"patreon.com": LexiconEntry("DO", "seed", z), "ko-fi.com": LexiconEntry("DO", "seed", z),
                          "teespring.com": LexiconEntry("PC", "seed", z), "amazon.com": LexiconEntry("AM", "seed", z),
                          "twitter.com": LexiconEntry("NM", "seed", z)})


def corpus(records, metas=()):
    return annotate(records, lexicon(), derive_channel_profiles(records, metas))


def test_one_of_four_videos_is_donation():
    recs = [record(video_id=f"v{i}", description=LINKS["DO"] if i == 0 else "plain") for i in range(4)]
    rep = prevalence_table(corpus(recs))
    assert rep.overall.video_pct["DO"] == 25.0 and rep.overall.video_pct["Any"] == 25.0
    assert rep.overall.channel_pct["DO"] == 100.0
    assert rep.overall.video_n == 4 and rep.overall.channel_n == 1


def test_no_links_all_zero():
    rep = prevalence_table(corpus([record(video_id=f"v{i}", description=LINKS["NM"]) for i in range(3)]))
    assert all(v == 0 for r in rep.rows for v in (*r.video_pct.values(), *r.channel_pct.values()))


def test_empty_corpus_raises():
    with pytest.raises(EmptyCorpus):
        prevalence_table(annotate([], lexicon()))


def _random_records(seed, n=400):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        parts = rng.sample(list(LINKS.values()) + ["plain"] * 4, rng.randrange(0, 3))
        out.append(record(video_id=f"v{i}", channel_id=f"c{rng.randrange(40)}",
                          date=f"{rng.randrange(2012, 2020)}-0{rng.randrange(1, 10)}-1{rng.randrange(10)}",
                          description="\n".join(parts), category=rng.choice(["Gaming", "Music", "Comedy"])))
    return out


@pytest.mark.parametrize("seed", range(5))
def test_prevalence_invariants(seed):
    recs = _random_records(seed)
    c = corpus(recs)
    rep = prevalence_table(c)
    stats = corpus_stats(recs, c.profiles)
    assert rep.overall.video_n == stats.video_count and rep.overall.channel_n == stats.channel_count
    assert sum(r.video_n for r in rep.rows[:-1]) == stats.video_count
    assert sum(r.channel_n for r in rep.rows[:-1]) == stats.channel_count
    for r in rep.rows:
        for pct in (r.video_pct, r.channel_pct):
            assert all(0 <= v <= 100 for v in pct.values())
            assert pct["Any"] >= max(pct[s] for s in ("PC", "AM", "DO", "CR"))
    assert rep.header[0] == "category" and len(rep.table()[0]) == len(rep.header)


def test_top_domains_rates():
    recs = [record(video_id="a", channel_id="c1", description=f"{LINKS['DO']}\n{LINKS['DO']}"),
            record(video_id="b", channel_id="c2", description=f"{LINKS['DO']} {LINKS['DO2']}"),
            record(video_id="c", channel_id="c3", description=f"{LINKS['PC']}\n{GENESIS}"),
            record(video_id="d", channel_id="c4", description=LINKS["NM"])]
    rows = {(r.strategy, r.key): r for r in top_domains(corpus(recs))}
    assert rows[("DO", "patreon.com")].employment_rate == 75.0
    assert rows[("DO", "ko-fi.com")].employment_rate == 25.0
    assert rows[("DO", "patreon.com")].occurrences == 3 and rows[("DO", "patreon.com")].channel_pct == 50.0
    assert rows[("PC", "teespring.com")].employment_rate == 100.0
    assert rows[("CR", "BTC")].occurrences == 1
    assert not any(k[1] == "twitter.com" for k in rows)
    assert usage_counts(corpus(recs))["patreon.com"] == 3


def test_employment_rates_bounded():
    rows = top_domains(corpus(_random_records(9)), n=None)
    for s in ("PC", "AM", "DO", "CR"):
        total = sum(r.employment_rate for r in rows if r.strategy == s)
        assert total == pytest.approx(100.0) or total == 0


def _year_records():
    return [record(video_id="a1", channel_id="a", date="2017-03-01", description="plain"),
            record(video_id="a2", channel_id="a", date="2018-03-01", description=LINKS["DO"]),
            record(video_id="a3", channel_id="a", date="2019-03-01", description="plain"),
            record(video_id="b1", channel_id="b", date="2018-05-01", description="plain")]


def test_adoption_series_years():
    pts = {(p.year, p.strategy): p for p in adoption_series(corpus(_year_records()))}
    assert pts[(2017, "DO")].adopters == 0 and pts[(2017, "DO")].channels == 1
    assert pts[(2018, "DO")].pct == 50.0 and pts[(2018, "DO")].channels == 2
    assert pts[(2019, "DO")].adopters == 0
    p = pts[(2018, "DO")]
    assert p.ci_low <= p.pct <= p.ci_high


def test_cohort_half_open():
    recs = [record(video_id="x", channel_id="x", date="2010-12-31"),
            record(video_id="y", channel_id="y", date="2011-01-01")]
    pts = adoption_series(corpus(recs), cohorts=[(2008, 2011), (2011, 2014)])
    first = {p.cohort: p.channels for p in pts if p.year == 2011 and p.strategy == "Any"}
    assert first == {"[2008,2011)": 1, "[2011,2014)": 1}
    assert {p.channels for p in pts if p.cohort == "[2008,2011)" and p.year == 2010} == {1}


def test_single_cohort_equals_plain_series():
    c = corpus(_random_records(3))
    plain = adoption_series(c)
    one = adoption_series(c, cohorts=[(1900, 3000)])
    strip = lambda pts: [(p.year, p.strategy, p.adopters, p.channels, p.pct, p.ci_low, p.ci_high) for p in pts]
    assert strip(plain) == strip(one)


def test_decile_spec_validation():
    assert REFERENCE_SUBSCRIBER_DECILES.boundaries[0] == 12_700 and REFERENCE_SUBSCRIBER_DECILES.boundaries[-1] == 440_000
    with pytest.raises(ValueError):
        DecileSpec("subscribers", 10, (1, 2, 3))
    with pytest.raises(ValueError):
        DecileSpec("subscribers", 3, (5, 5))
    with pytest.raises(ValueError):
        DecileSpec("likes")


def _sub_corpus(n, adopters):
    recs, metas = [], []
    for i in range(n):
        cid = f"c{i:02d}"
        recs.append(record(video_id=f"v{i}", channel_id=cid, description=LINKS["PC"] if i in adopters else "plain"))
        metas.append(ChannelMeta(cid, (i + 1) * 1000, "general"))
    return corpus(recs, metas)


def test_ten_distinct_channels_ten_groups():
    rows = adoption_by_decile(_sub_corpus(10, set()), DecileSpec("subscribers", 10))
    assert [r.channels for r in rows if r.strategy == "Any"] == [1] * 10


def test_top_half_adopters_two_groups():
    rows = adoption_by_decile(_sub_corpus(20, set(range(10, 20))), DecileSpec("subscribers", 2))
    assert [r.pct for r in rows if r.strategy == "PC"] == [0.0, 100.0]


def test_explicit_boundaries_and_missing_metric():
    c = _sub_corpus(20, {19})
    rows = adoption_by_decile(c, DecileSpec("subscribers", 2, (10_000,)))
    assert [r.channels for r in rows if r.strategy == "Any"] == [10, 10]
    assert [r.lower for r in rows if r.strategy == "Any"] == [None, 10_000]
    rows = adoption_by_decile(c, REFERENCE_SUBSCRIBER_DECILES)
    assert sum(r.channels for r in rows if r.strategy == "Any") == 20
    bare = corpus([record(video_id="q", channel_id="q")])
    with pytest.raises(MissingMetric):
        adoption_by_decile(bare, DecileSpec("subscribers"))
    assert sum(r.channels for r in adoption_by_decile(bare, DecileSpec("videos", 2)) if r.strategy == "PC") == 1


def test_level_strategy_order():
    assert LEVEL_STRATEGIES == ("PC", "AM", "DO", "CR", "Any")

import dataclasses
import datetime as dt

import pytest

from altmon.analytics import annotate
from altmon.analytics.matching import (PROBLEMATIC_CATEGORIES, Activity, MatchSpec, period_label, period_of,
                                       productivity_contrast, strata, stratified_match, trim_threshold)
from altmon.corpus import derive_channel_profiles
from altmon.synth import activity_lexicon, channel_videos, doubling_fixture, random_activity_corpus
from oracles import check_matching

X = 2017 * 12 + 6


def build(records, metas=()):
    return annotate(records, activity_lexicon(), derive_channel_profiles(records, metas))


def flat(counts=2, views=100, start=X - 3, end=X + 3):
    return {p: counts for p in range(start, end)}, {p: views for p in range(start, end)}


def channel(cid, category="Gaming", adopt=None, counts=2, views=100):
    c, v = flat(counts, views)
    return channel_videos(cid, c, v, category, adopt)


def as_tuples(pairs):
    return [(p.treated, p.control, p.x) for p in pairs]


def test_periods():
    assert period_of(dt.date(2017, 7, 15)) == X
    assert period_of(dt.date(2017, 7, 15), "year") == 2017
    assert period_label(X) == "2017-07" and period_label(2017, "year") == "2017"
    with pytest.raises(ValueError):
        period_of(dt.date(2017, 1, 1), "week")


def test_spec_validation():
    assert MatchSpec.monthly("2015-01", "2019-09").x_range == (2015 * 12, 2019 * 12 + 8)
    for bad in (dict(window=0), dict(trim=0.5), dict(groups=1), dict(control_rule="sometimes"),
                dict(granularity="day")):
        with pytest.raises(ValueError):
            MatchSpec(**bad)


def test_trim_threshold():
    values = list(range(1, 41))
    assert trim_threshold(values, 0.05) == 38
    assert trim_threshold(values[:19], 0.05) == 19
    assert trim_threshold([5, 5, 5, 5] * 5, 0.05) == 5
    assert trim_threshold(values, 0.0) == 40


def test_strata_exclude_inactive_and_zero_views():
    recs = channel("A") + channel_videos("B", {X: 1}, {X: 0}, "Gaming") + channel("C", counts=5)
    act = Activity.from_corpus(build(recs))
    s = strata(act, X, groups=2, trim=0.0)
    assert set(s) == {"A", "C"}
    assert s["A"][0] < s["C"][0]
    assert strata(act, X - 20, 2, 0.0) == {}


def test_one_treated_one_control():
    res = stratified_match(build(channel("T", adopt=X) + channel("U")), MatchSpec())
    assert as_tuples(res) == [("T", "U", X)]
    assert res.diagnostics.treated_candidates == 1 and res.diagnostics.unmatched == []


def test_control_in_other_category():
    res = stratified_match(build(channel("T", adopt=X) + channel("U", "Music")), MatchSpec())
    assert len(res) == 0 and res.diagnostics.unmatched == ["T"]
    assert len(stratified_match(build(channel("T", adopt=X) + channel("U", "Music")),
                                MatchSpec(same_category=False))) == 1


def test_two_treated_one_control():
    res = stratified_match(build(channel("T2", adopt=X) + channel("T1", adopt=X) + channel("U")), MatchSpec())
    assert as_tuples(res) == [("T1", "U", X)]
    assert res.diagnostics.unmatched == ["T2"]


def test_incomplete_window_and_range():
    gap = channel_videos("T", {X - 3: 2, X - 1: 2, X: 2}, {X - 3: 100, X - 1: 100, X: 100}, "Gaming", X)
    res = stratified_match(build(gap + channel("U")), MatchSpec())
    assert len(res) == 0 and res.diagnostics.treated_incomplete_window == 1
    res = stratified_match(build(channel("T", adopt=X) + channel("U")), MatchSpec(x_range=(X + 1, X + 5)))
    assert len(res) == 0 and res.diagnostics.treated_outside_range == 1


def test_control_rules():
    recs = channel("T", adopt=X) + channel("U", adopt=X + 2)
    assert len(stratified_match(build(recs), MatchSpec(control_rule="never"))) == 0
    # U adopts later, so it is first treated itself; with until_x it cannot serve T once taken
    res = stratified_match(build(recs), MatchSpec(control_rule="until_x"))
    assert as_tuples(res) == [("T", "U", X)]
    assert res.diagnostics.unmatched == ["U"]


def test_group_design():
    recs = (channel("P1", "News & Politics", adopt=X - 2) + channel("P2", "Gaming")
            + channel("Q1", "Entertainment", adopt=X - 2) + channel("Q2", "Entertainment"))
    spec = MatchSpec(window=3, same_category=False, allowed_categories=PROBLEMATIC_CATEGORIES, control_rule="any")
    res = stratified_match(build(recs), spec, treated={"P1", "P2"}, periods=range(X - 3, X))
    assert as_tuples(res) == [("P1", "Q1", X)]
    assert res.diagnostics.treated_category_excluded == 1
    with pytest.raises(ValueError):
        stratified_match(build(recs), spec, treated={"P1"})


@pytest.mark.parametrize("seed", range(8))
def test_random_corpora_pass_verifier(seed):
    ac = random_activity_corpus(seed)
    corpus = build(ac.records, ac.metas)
    spec = MatchSpec(x_range=(2016 * 12 + 3, 2016 * 12 + 17))
    res = stratified_match(corpus, spec)
    assert check_matching(ac.records, as_tuples(res), x_range=spec.x_range) == []
    chans = [c for p in res for c in (p.treated, p.control)]
    assert len(chans) == len(set(chans))


def test_verifier_catches_corruption():
    ac = random_activity_corpus(1)
    res = stratified_match(build(ac.records, ac.metas), MatchSpec())
    pairs = as_tuples(res)
    assert len(pairs) >= 2 and check_matching(ac.records, pairs) == []
    (t, c, x), (_, c2, _) = pairs[0], pairs[1]
    assert check_matching(ac.records, [(t, c, x + 1)] + pairs[1:])
    assert check_matching(ac.records, [(t, c2, x)] + pairs[1:])
    assert check_matching(ac.records, pairs[1:])
    adopters = [cid for cid, a in ac.adoption.items() if a is not None and cid != t]
    assert check_matching(ac.records, [(t, adopters[0], x)] + pairs[1:])


def test_doubling_fixture_ratio():
    fx = doubling_fixture()
    corpus = build(fx.records, fx.metas)
    res = stratified_match(corpus, MatchSpec())
    assert all(p.treated[1:] == p.control[1:] for p in res)
    assert check_matching(fx.records, as_tuples(res)) == []
    contrast = productivity_contrast(res, corpus)
    assert contrast.ratio == pytest.approx(2.0, abs=0.01)
    for row in contrast.rows:
        if row.offset < 0:
            assert row.treated_mean == row.control_mean
    assert [r.offset for r in contrast.rows] == list(range(-3, 13))


def test_identical_activity_ratio_one():
    corpus = build(channel("T", adopt=X) + channel("U"))
    res = stratified_match(corpus, MatchSpec())
    assert productivity_contrast(res, corpus, horizon=2, total_periods=2).ratio == 1.0


def test_empty_pairs_contrast():
    corpus = build(channel("U"))
    res = stratified_match(corpus, MatchSpec())
    c = productivity_contrast(res, corpus)
    assert len(res) == 0 and c.ratio != c.ratio


def test_spec_is_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        MatchSpec().window = 5

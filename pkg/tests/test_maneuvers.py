from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bottypes.corpus import Corpus, Tweet, UserProfile
from bottypes.maneuvers import (
    MANEUVERS,
    LexiconSet,
    ManeuverConfig,
    ManeuverScores,
    analyse_text,
    engage_cue,
    excite_cue,
    explain_cue,
    read_scores_csv,
    score_all,
    score_back,
    score_boost,
    score_bridge,
    score_build,
    score_enhance,
    score_engage,
    score_excite,
    score_explain,
    summarize,
    write_scores_csv,
)
from bottypes.netgraph import ClusterAssignment, CommGraph

T0 = datetime(2023, 2, 1, tzinfo=timezone.utc)


def tw(text="", i=0, **kw):
    return Tweet(f"t{i}", kw.pop("author", "me"), text, T0, **kw)


def test_default_lexicons_are_disjoint(lexicons):
    assert not lexicons.first_person_pronouns & lexicons.connectives_function_words
    assert "i" in lexicons.first_person_pronouns and "because" in lexicons.connectives_function_words


def test_lexicon_validation():
    with pytest.raises(ValueError):
        LexiconSet(frozenset({"we"}), frozenset({"we"}), frozenset(), frozenset())
    with pytest.raises(ValueError):
        LexiconSet(frozenset(), frozenset(), frozenset(), frozenset({":)!"}))


def test_text_cues(lexicons):
    c = analyse_text("RT @bob I can't wait :) 😀 http://t.co/x #fun !!", lexicons)
    assert c.tokens == ("i", "can't", "wait") and c.positive_faces == 2 and c.exclamations == 2


def test_emoticon_must_stand_alone(lexicons):
    assert analyse_text("see:)", lexicons).positive_faces == 0
    assert analyse_text(":)x", lexicons).positive_faces == 0
    assert analyse_text("ok :)", lexicons).positive_faces == 1


def test_cues_by_hand(lexicons):
    assert engage_cue("I think we should go", lexicons) == 1.0  # 2 of 5 tokens, times 5
    assert engage_cue("the cat sat there", lexicons) == 0.0
    assert explain_cue("because therefore thus", lexicons) == 1.0
    assert explain_cue("because cats sleep most afternoons here today", lexicons) == pytest.approx(3 / 7)
    assert excite_cue("Great!!!", lexicons) == 1.0
    assert excite_cue("a b c d great", lexicons) == pytest.approx(1 / 5)
    assert excite_cue("", lexicons) == 0.0


def test_enhance_credit(lexicons):
    long_reply = tw(" ".join(["word"] * 10), reply_to_user="x")
    short_quote = tw("nice", quote_of_user="x")
    linked = tw("see", reply_to_user="x", urls=("http://a",))
    plain = tw("no interaction")
    assert score_enhance([long_reply, short_quote, linked, plain], lexicons) == pytest.approx((1 + 0.5 + 1 + 0) / 4)


def test_network_maneuvers():
    tweets = [
        tw("a", 0, retweet_of_user="x"),
        tw("b", 1, mentions=("x", "y")),
        tw("c", 2, mentions=("x",)),
        tw("d", 3, mentions=("me",)),
        tw("e", 4),
    ]
    assert score_back(tweets) == pytest.approx(3 / 5)
    assert score_build(tweets) == pytest.approx(1 / 2)
    assert score_bridge(tweets, {"x": 0, "y": 1}) == pytest.approx(1 / 2)
    assert score_bridge(tweets, {}) == 0.0


def test_boost_by_hand():
    g = CommGraph.from_weights([("me", f"n{i}", 1) for i in range(5)])
    m = {"me": 0, "n0": 0, "n1": 0, "n2": 0, "n3": 1, "n4": 1}
    assert score_boost("me", g, m) == pytest.approx(3 / 5 * 5 / 10)
    assert score_boost("ghost", g, m) == 0.0


def test_config_kappas(lexicons):
    loose = ManeuverConfig(kappa_engage=1.0)
    assert engage_cue("I think we should go", lexicons, loose) == pytest.approx(2 / 5)


words = st.sampled_from("i we me our because therefore thus great love happy :) 😀 ! !! the cat @x #y http://t.co/a".split())
texts = st.lists(words, max_size=20).map(" ".join)
tweet_lists = st.lists(texts, max_size=8).map(lambda ts: [tw(t, i) for i, t in enumerate(ts)])


@given(tweet_lists)
def test_text_scores_bounded(lexicons, tweets):
    for f in (score_engage, score_explain, score_excite, score_enhance):
        assert 0.0 <= f(tweets, lexicons) <= 1.0


@given(texts)
def test_exclamation_never_lowers_excite(lexicons, text):
    assert excite_cue(text + "!", lexicons) >= excite_cue(text, lexicons)


@given(tweet_lists)
def test_duplication_leaves_engage_and_explain(lexicons, tweets):
    assert score_engage(tweets * 2, lexicons) == score_engage(tweets, lexicons)
    assert score_explain(tweets * 3, lexicons) == score_explain(tweets, lexicons)


@given(st.lists(st.tuples(st.sampled_from("abcd"), st.booleans()), max_size=10))
def test_bridge_invariant_under_cluster_relabeling(pairs):
    tweets = [tw("x", i, mentions=(a, "z") if two else (a,)) for i, (a, two) in enumerate(pairs)]
    m = {"a": 0, "b": 0, "c": 1, "d": 2, "z": 1}
    relabeled = {k: {0: 7, 1: 3, 2: 0}[v] for k, v in m.items()}
    assert score_bridge(tweets, m) == score_bridge(tweets, relabeled)


def test_empty_activity_is_all_zero(lexicons):
    corpus = Corpus({"me": UserProfile("me")}, ())
    (s,) = score_all(corpus, CommGraph([], {}), ClusterAssignment({}, 0.0, 0), lexicons)
    assert s.values() == (0.0,) * len(MANEUVERS)


def test_scores_validated():
    with pytest.raises(ValueError):
        ManeuverScores("u", 1.2, 0, 0, 0, 0, 0, 0, 0)


def test_summary_and_csv(tmp_path):
    rows = [ManeuverScores("a", *([0.2] * 8)), ManeuverScores("b", *([0.6] * 8)), ManeuverScores("c", *([1.0] * 8))]
    (g,) = summarize(rows, {"a": "US:General", "b": "US:General"})
    assert g.n_users == 2 and g.mean["back"] == pytest.approx(0.4) and g.std["back"] == pytest.approx(0.2)
    write_scores_csv(rows, tmp_path / "s.csv")
    assert read_scores_csv(tmp_path / "s.csv") == rows

import json
from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bottypes.corpus import (
    Corpus,
    IngestionError,
    SchemaError,
    Tweet,
    UserProfile,
    dump_corpus,
    ingest_jsonl,
    language_matches,
    normalize_v1_status,
    parse_timestamp,
    serialize,
    tweet_from_dict,
    tweet_to_dict,
    validate,
)

T0 = datetime(2023, 2, 1, 12, tzinfo=timezone.utc)


def _line(**kw):
    base = {"tweet_id": "1", "author_id": "a", "text": "hello", "created_at": "2023-02-01T12:00:00Z", "user": {"user_id": "a"}}
    base.update(kw)
    return json.dumps(base)


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_retweet_and_quote_together_rejected():
    with pytest.raises(SchemaError):
        Tweet("1", "a", "x", T0, retweet_of_user="b", quote_of_user="c")


def test_negative_counts_rejected():
    with pytest.raises(SchemaError):
        Tweet("1", "a", "x", T0, like_count=-1)
    with pytest.raises(SchemaError):
        UserProfile("a", followers_count=-3)


def test_text_length_limit():
    Tweet("1", "a", "x" * 4000, T0)
    with pytest.raises(SchemaError):
        Tweet("1", "a", "x" * 4001, T0)


def test_malformed_lines_are_skipped_and_tallied(tmp_path):
    path = _write(
        tmp_path / "t.jsonl",
        [
            _line(),
            "{not json",
            "[1, 2]",
            _line(tweet_id="2", retweet_of_user="b", quote_of_user="c"),
            _line(tweet_id="1", text="dup"),
            _line(tweet_id="3", like_count=-5),
            json.dumps({"tweet_id": "4", "text": "x", "created_at": "2023-02-01T12:00:00Z"}),
            _line(tweet_id="5", author_id="zzz", user=None),
            "",
        ],
    )
    corpus, report = ingest_jsonl(path)
    assert [t.tweet_id for t in corpus.tweets] == ["1"]
    assert corpus.tweets[0].text == "hello"
    assert report.lines_total == 8 and report.lines_ok == 1 and report.lines_skipped == 7
    assert report.reasons["invalid_json"] == 1
    assert report.reasons["retweet_and_quote"] == 1
    assert report.reasons["duplicate_tweet_id"] == 1


def test_language_filter_keeps_users(tmp_path):
    path = _write(
        tmp_path / "t.jsonl",
        [_line(language="en"), _line(tweet_id="2", language="fr", author_id="b", user={"user_id": "b"}), _line(tweet_id="3", language=None)],
    )
    corpus, report = ingest_jsonl(path, language_filter="en")
    assert [t.tweet_id for t in corpus.tweets] == ["1", "3"]
    assert "b" in corpus.users
    assert report.language_filtered == 1


def test_language_primary_subtag():
    assert language_matches("en-GB", "en")
    assert not language_matches("fr", "en")
    assert language_matches(None, "en")
    assert language_matches("zh", None)


def test_missing_file_raises(tmp_path):
    with pytest.raises(IngestionError):
        ingest_jsonl(tmp_path / "absent.jsonl")


def test_invalid_utf8_raises(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_bytes(b'{"tweet_id": "\xff"}\n')
    with pytest.raises(IngestionError):
        ingest_jsonl(p)


def test_v1_status_normalisation():
    raw = {
        "id_str": "99",
        "created_at": "Wed Feb 01 12:00:00 +0000 2023",
        "text": "short",
        "extended_tweet": {"full_text": "the full text", "entities": {"user_mentions": [{"id_str": "7"}], "hashtags": [{"text": "Balloon"}]}},
        "user": {"id_str": "5", "screen_name": "s", "location": "Texas"},
        "retweeted_status": {"user": {"id_str": "6"}},
        "quoted_status": {"user": {"id_str": "8"}},
        "lang": "und",
        "coordinates": {"coordinates": [-97.7, 30.3]},
    }
    d = normalize_v1_status(raw)
    t = tweet_from_dict(d)
    assert t.text == "the full text" and t.retweet_of_user == "6" and t.quote_of_user is None
    assert t.mentions == ("7",) and t.hashtags == ("balloon",) and t.language is None
    assert d["user"]["declared_coordinates"] == [30.3, -97.7]
    assert t.created_at == T0


def test_timestamp_formats_agree():
    assert parse_timestamp("2023-02-01T12:00:00Z") == T0
    assert parse_timestamp("2023-02-01T13:00:00+01:00") == T0
    assert parse_timestamp(T0.timestamp()) == T0
    with pytest.raises(SchemaError):
        parse_timestamp("yesterday")


def test_dump_and_reingest_is_lossless(tmp_path):
    users = {"a": UserProfile("a", declared_location="Paris"), "b": UserProfile("b", declared_coordinates=(1.0, 2.0))}
    tweets = (
        Tweet("1", "a", "hi @b", T0, mentions=("b",), hashtags=("x",), language="en"),
        Tweet("2", "b", "rt", T0, retweet_of_user="a"),
    )
    corpus = Corpus(users, tweets)
    tweets_path, users_path = dump_corpus(corpus, tmp_path)
    again, report = ingest_jsonl(tweets_path, users_path=users_path)
    assert report.lines_skipped == 0
    assert serialize(again) == serialize(corpus)


def test_validate_counts_dangling_targets():
    corpus = Corpus({"a": UserProfile("a"), "c": UserProfile("c")}, (Tweet("1", "a", "x", T0, mentions=("b", "b")),))
    rep = validate(corpus)
    assert rep.dangling_targets == 1 and rep.users_without_tweets == 1 and rep.duplicate_ids == 0


ids = st.text(alphabet="abcdefg0123456789", min_size=1, max_size=6)


@given(
    tid=ids,
    author=ids,
    text=st.text(max_size=200),
    target=st.one_of(st.none(), ids),
    mentions=st.lists(ids, max_size=4),
    likes=st.integers(0, 10**6),
)
def test_tweet_dict_round_trip(tid, author, text, target, mentions, likes):
    t = Tweet(tid, author, text, T0, reply_to_user=target, mentions=tuple(mentions), like_count=likes)
    assert tweet_from_dict(tweet_to_dict(t)) == t

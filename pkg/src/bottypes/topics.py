"""Tweet preprocessing and per-group term-frequency tables.

The tables are the raw material of word clouds: one ranked list of unigram
counts per (region, bot type) group, written as ``group_id,rank,token,count``.
"""

from __future__ import annotations

import csv
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, Tweet

URL_RE = re.compile(r"(?:https?://|www\.)\S+|\bt\.co/\S+", re.IGNORECASE)
MENTION_RE = re.compile(r"(?<!\w)@\w+")
HASHTAG_RE = re.compile(r"(?<!\w)#(\w+)")
RETWEET_MARKER_RE = re.compile(r"^\s*rt\b:?", re.IGNORECASE)
TOKEN_RE = re.compile(r"[^\W_]+")

STRIP_PATTERNS = ("urls", "mentions", "hashtags", "retweet_markers")


def read_wordlist(path: str | Path) -> list[str]:
    """One entry per line, ``#`` starts a comment, blank lines ignored."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            out.append(line)
    return out


def _data_file(name: str) -> Path:
    return Path(str(resources.files("bottypes") / "data" / name))


def default_stopwords() -> frozenset[str]:
    return frozenset(read_wordlist(_data_file("stopwords.txt")))


def default_event_phrases() -> tuple[str, ...]:
    return tuple(read_wordlist(_data_file("event_phrases.txt")))


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str] = frozenset()
    event_phrases: tuple[str, ...] = ()
    strip_patterns: tuple[str, ...] = STRIP_PATTERNS
    keep_hashtag_words: bool = False
    min_token_length: int = 2
    _phrases: tuple[tuple[str, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        unknown = set(self.strip_patterns) - set(STRIP_PATTERNS)
        if unknown:
            raise ValueError(f"unknown strip patterns: {sorted(unknown)}")
        phrases = {tuple(TOKEN_RE.findall(p.lower())) for p in self.event_phrases}
        # longest phrase first so "united states" wins over "united"
        ordered = sorted((p for p in phrases if p), key=lambda p: (-len(p), p))
        object.__setattr__(self, "_phrases", tuple(ordered))

    @classmethod
    def default(cls, **overrides) -> "TokenizerConfig":
        kw = dict(stopwords=default_stopwords(), event_phrases=default_event_phrases())
        kw.update(overrides)
        return cls(**kw)


# headline classification keeps every word; only artifacts go
PLAIN = TokenizerConfig(min_token_length=1)


def strip_artifacts(text: str, config: TokenizerConfig = PLAIN) -> str:
    text = text.lower()
    for name in config.strip_patterns:
        if name == "urls":
            text = URL_RE.sub(" ", text)
        elif name == "mentions":
            text = MENTION_RE.sub(" ", text)
        elif name == "hashtags":
            text = HASHTAG_RE.sub(r" \1 " if config.keep_hashtag_words else " ", text)
        elif name == "retweet_markers":
            text = RETWEET_MARKER_RE.sub(" ", text)
    return text


def _drop_phrases(tokens: list[str], phrases: Sequence[tuple[str, ...]]) -> list[str]:
    if not phrases:
        return tokens
    out = []
    i = 0
    while i < len(tokens):
        for ph in phrases:
            if tuple(tokens[i : i + len(ph)]) == ph:
                i += len(ph)
                break
        else:
            out.append(tokens[i])
            i += 1
    return out


def preprocess(text: str, config: TokenizerConfig) -> list[str]:
    tokens = TOKEN_RE.findall(strip_artifacts(text, config))
    tokens = _drop_phrases(tokens, config._phrases)
    return [t for t in tokens if t not in config.stopwords and len(t) >= config.min_token_length]


@dataclass(frozen=True)
class TermFrequencies:
    group_id: str
    terms: tuple[tuple[str, int], ...]
    total_tokens: int  # before top_k truncation


def rank_terms(counts: Mapping[str, int], top_k: int | None) -> tuple[tuple[str, int], ...]:
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        ranked = ranked[:top_k]
    return tuple(ranked)


def term_frequencies(
    tweets: Iterable[Tweet],
    config: TokenizerConfig,
    top_k: int | None = 500,
    group_id: str = "all",
) -> TermFrequencies:
    if top_k is not None and top_k < 1:
        raise ValueError("top_k must be >= 1")
    counts: Counter[str] = Counter()
    for t in tweets:
        counts.update(preprocess(t.text, config))
    return TermFrequencies(group_id, rank_terms(counts, top_k), sum(counts.values()))


REGION_ORDER = ("US", "China", "RestOfWorld")
TYPE_ORDER = ("General", "News", "Bridging", "Human")


def group_key(region: str, user_type: str) -> str:
    return f"{region}:{user_type}"


def group_topics(
    corpus: Corpus,
    region_labels: Mapping[str, str],
    type_map: Mapping[str, str],
    config: TokenizerConfig,
    top_k: int | None = 500,
) -> list[TermFrequencies]:
    """One table per (region, type) group that has tweets; Unknown region excluded.

    ``region_labels`` and ``type_map`` hold plain strings (RegionLabel values
    and exclusive categories, ``Human`` for non-bots).
    """
    buckets: dict[tuple[str, str], list[Tweet]] = {}
    for t in corpus.tweets:
        label = region_labels.get(t.author_id)
        region = getattr(label, "value", label)
        if region not in REGION_ORDER:
            continue
        utype = type_map[t.author_id]
        buckets.setdefault((region, utype), []).append(t)

    def order(key: tuple[str, str]) -> tuple:
        r, ty = key
        return (REGION_ORDER.index(r), TYPE_ORDER.index(ty) if ty in TYPE_ORDER else len(TYPE_ORDER), ty)

    out = []
    for key in sorted(buckets, key=order):
        out.append(term_frequencies(buckets[key], config, top_k, group_key(*key)))
    return out


def write_term_csv(tables: Iterable[TermFrequencies], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group_id", "rank", "token", "count"])
        for tf in tables:
            for rank, (tok, n) in enumerate(tf.terms, start=1):
                w.writerow([tf.group_id, rank, tok, n])

"""Positive BEND maneuver scores per user.

Four narrative cues (engage, explain, excite, enhance) are averaged over a
user's tweets. Four network cues (back, build, bridge, boost) are ratios over
the user's actions or their position in the clustered, pruned graph. The
underlying cue formulas are documented per function; every constant sits in
:class:`ManeuverConfig`. Weighting across cues is uniform.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import fmean, pstdev
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, Tweet
from .netgraph.graph import CommGraph
from .netgraph.louvain import ClusterAssignment
from .topics import PLAIN, read_wordlist, strip_artifacts

MANEUVERS = ("back", "build", "bridge", "boost", "engage", "explain", "excite", "enhance")
WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")
_VARIATION_SELECTORS = dict.fromkeys(map(ord, "︎️"), None)

LEXICON_FILES = {
    "first_person_pronouns": "first_person_pronouns.txt",
    "connectives_function_words": "connectives_function_words.txt",
    "positive_emotion_words": "positive_emotion_words.txt",
    "positive_emoticons_emoji": "positive_emoticons_emoji.txt",
}


@dataclass(frozen=True)
class ManeuverConfig:
    kappa_engage: float = 5.0
    kappa_explain: float = 3.0
    kappa_boost: float = 10.0
    enhance_min_tokens: int = 10
    enhance_partial_credit: float = 0.5


@dataclass(frozen=True)
class LexiconSet:
    first_person_pronouns: frozenset[str]
    connectives_function_words: frozenset[str]
    positive_emotion_words: frozenset[str]
    positive_emoticons_emoji: frozenset[str]
    _emoticon_re: re.Pattern | None = field(default=None, init=False, repr=False, compare=False)
    _emoji: frozenset[str] = field(default=frozenset(), init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        clash = self.first_person_pronouns & self.connectives_function_words
        if clash:
            raise ValueError(f"pronoun and connective lexicons overlap: {sorted(clash)}")
        bang = [e for e in self.positive_emoticons_emoji if "!" in e]
        if bang:
            raise ValueError(f"emoticons must not contain '!': {bang}")
        emoji = {e.translate(_VARIATION_SELECTORS) for e in self.positive_emoticons_emoji if _is_emoji(e)}
        ascii_faces = sorted((e for e in self.positive_emoticons_emoji if not _is_emoji(e)), key=lambda e: (-len(e), e))
        pattern = None
        if ascii_faces:
            # a face must start a whitespace-delimited chunk and not run into a word
            alts = "|".join(re.escape(e) for e in ascii_faces)
            pattern = re.compile(rf"(?:(?<=\s)|^)(?:{alts})(?![^\W_])")
        object.__setattr__(self, "_emoticon_re", pattern)
        object.__setattr__(self, "_emoji", frozenset(emoji))

    @classmethod
    def load(cls, directory: str | Path) -> "LexiconSet":
        d = Path(directory)
        return cls(**{name: frozenset(read_wordlist(d / fname)) for name, fname in LEXICON_FILES.items()})

    @classmethod
    def default(cls) -> "LexiconSet":
        return cls.load(default_lexicon_dir())


def default_lexicon_dir() -> Path:
    from importlib import resources

    return Path(str(resources.files("bottypes") / "data" / "lexicons"))


def _is_emoji(entry: str) -> bool:
    core = entry.translate(_VARIATION_SELECTORS)
    return len(core) == 1 and ord(core) > 0x2000


@dataclass(frozen=True)
class TextCues:
    tokens: tuple[str, ...]
    positive_faces: int
    exclamations: int


def analyse_text(text: str, lexicons: LexiconSet) -> TextCues:
    """Strip URLs, mentions, hashtags and RT markers, then split into cues.

    Emoticons and emoji are removed before word tokenisation so they never
    count as words; exclamation marks are counted on the stripped text.
    """
    clean = strip_artifacts(text, PLAIN).replace("’", "'")
    faces = 0
    if lexicons._emoticon_re is not None:
        clean, faces = lexicons._emoticon_re.subn(" ", clean)
    emoji_hits = 0
    kept = []
    for ch in clean.translate(_VARIATION_SELECTORS):
        if ch in lexicons._emoji:
            emoji_hits += 1
            kept.append(" ")
        else:
            kept.append(ch)
    clean = "".join(kept)
    return TextCues(tuple(WORD_RE.findall(clean)), faces + emoji_hits, clean.count("!"))


def _mean(values: Iterable[float]) -> float:
    # exact rational mean, rounded once: repeating the tweet list cannot change it
    vals = list(values)
    return float(sum(map(Fraction, vals)) / len(vals)) if vals else 0.0


def engage_cue(text: str, lexicons: LexiconSet, config: ManeuverConfig = ManeuverConfig()) -> float:
    toks = analyse_text(text, lexicons).tokens
    hits = sum(t in lexicons.first_person_pronouns for t in toks)
    return min(1.0, hits / max(1, len(toks)) * config.kappa_engage)


def explain_cue(text: str, lexicons: LexiconSet, config: ManeuverConfig = ManeuverConfig()) -> float:
    toks = analyse_text(text, lexicons).tokens
    hits = sum(t in lexicons.connectives_function_words for t in toks)
    return min(1.0, hits / max(1, len(toks)) * config.kappa_explain)


def excite_cue(text: str, lexicons: LexiconSet) -> float:
    cues = analyse_text(text, lexicons)
    positive = sum(t in lexicons.positive_emotion_words for t in cues.tokens)
    num = positive + cues.positive_faces + cues.exclamations
    return min(1.0, num / max(1, len(cues.tokens) + cues.exclamations))


def enhance_cue(tweet: Tweet, lexicons: LexiconSet, config: ManeuverConfig = ManeuverConfig()) -> float:
    """1 for a reply or quote that adds a URL or enough text, partial credit otherwise."""
    if not (tweet.is_reply or tweet.is_quote):
        return 0.0
    if tweet.urls or len(analyse_text(tweet.text, lexicons).tokens) >= config.enhance_min_tokens:
        return 1.0
    return config.enhance_partial_credit


def score_engage(tweets: Sequence[Tweet], lexicons: LexiconSet, config: ManeuverConfig = ManeuverConfig()) -> float:
    return _mean(engage_cue(t.text, lexicons, config) for t in tweets)


def score_explain(tweets: Sequence[Tweet], lexicons: LexiconSet, config: ManeuverConfig = ManeuverConfig()) -> float:
    return _mean(explain_cue(t.text, lexicons, config) for t in tweets)


def score_excite(tweets: Sequence[Tweet], lexicons: LexiconSet) -> float:
    return _mean(excite_cue(t.text, lexicons) for t in tweets)


def score_enhance(
    tweets: Sequence[Tweet], lexicons: LexiconSet | None = None, config: ManeuverConfig = ManeuverConfig()
) -> float:
    lexicons = lexicons or LexiconSet.default()
    return _mean(enhance_cue(t, lexicons, config) for t in tweets)


def score_back(tweets: Sequence[Tweet]) -> float:
    """Share of tweets that amplify someone: retweets, or tweets carrying a mention."""
    backing = sum(1 for t in tweets if t.is_retweet or _mentioned(t))
    return min(1.0, backing / max(1, len(tweets)))


def _mentioned(t: Tweet) -> set[str]:
    return {m for m in t.mentions if m != t.author_id}


def score_build(tweets: Sequence[Tweet]) -> float:
    """Co-mentioning: tweets naming two or more users over tweets naming any."""
    with_mention = [len(_mentioned(t)) for t in tweets if _mentioned(t)]
    return min(1.0, sum(1 for n in with_mention if n >= 2) / max(1, len(with_mention)))


def score_bridge(tweets: Sequence[Tweet], membership: Mapping[str, int]) -> float:
    """Tweets whose clustered mentions span two or more clusters, over tweets with any clustered mention."""
    spanning = eligible = 0
    for t in tweets:
        clusters = {membership[m] for m in _mentioned(t) if m in membership}
        if clusters:
            eligible += 1
            spanning += len(clusters) >= 2
    return min(1.0, spanning / max(1, eligible))


def score_boost(user_id: str, graph: CommGraph, membership: Mapping[str, int], config: ManeuverConfig = ManeuverConfig()) -> float:
    """In-cluster share of neighbours times a saturating degree factor."""
    if user_id not in graph or user_id not in membership:
        return 0.0
    neighbours = graph.neighbors(user_id)
    degree = len(neighbours)
    if degree == 0:
        return 0.0
    own = membership[user_id]
    inside = sum(1 for nb in neighbours if membership.get(nb) == own)
    return min(1.0, inside / degree) * min(1.0, degree / config.kappa_boost)


@dataclass(frozen=True)
class ManeuverScores:
    user_id: str
    back: float
    build: float
    bridge: float
    boost: float
    engage: float
    explain: float
    excite: float
    enhance: float

    def __post_init__(self) -> None:
        for name in MANEUVERS:
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0) or math.isnan(v):
                raise ValueError(f"{name} score {v} outside [0, 1]")

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, m) for m in MANEUVERS)


def score_user(
    user_id: str,
    tweets: Sequence[Tweet],
    graph: CommGraph,
    clusters: ClusterAssignment,
    lexicons: LexiconSet,
    config: ManeuverConfig = ManeuverConfig(),
) -> ManeuverScores:
    m = clusters.membership
    return ManeuverScores(
        user_id,
        back=score_back(tweets),
        build=score_build(tweets),
        bridge=score_bridge(tweets, m),
        boost=score_boost(user_id, graph, m, config),
        engage=score_engage(tweets, lexicons, config),
        explain=score_explain(tweets, lexicons, config),
        excite=score_excite(tweets, lexicons),
        enhance=score_enhance(tweets, lexicons, config),
    )


def score_all(
    corpus: Corpus,
    graph: CommGraph,
    clusters: ClusterAssignment,
    lexicons: LexiconSet,
    config: ManeuverConfig = ManeuverConfig(),
    users: Iterable[str] | None = None,
) -> list[ManeuverScores]:
    """Scores for every corpus user (or the given subset), sorted by user id."""
    by_author = corpus.tweets_by_author()
    ids = sorted(set(corpus.users) if users is None else set(users))
    return [score_user(u, by_author.get(u, []), graph, clusters, lexicons, config) for u in ids]


@dataclass(frozen=True)
class GroupSummary:
    group_id: str
    n_users: int
    mean: Mapping[str, float]
    std: Mapping[str, float]


def summarize(scores: Iterable[ManeuverScores], group_of: Mapping[str, str]) -> list[GroupSummary]:
    """Per-group mean and population standard deviation; users without a group are skipped."""
    groups: dict[str, list[ManeuverScores]] = {}
    for s in scores:
        g = group_of.get(s.user_id)
        if g is not None:
            groups.setdefault(g, []).append(s)
    out = []
    for g in sorted(groups):
        rows = groups[g]
        mean = {m: fmean(getattr(r, m) for r in rows) for m in MANEUVERS}
        std = {m: pstdev([getattr(r, m) for r in rows]) for m in MANEUVERS}
        out.append(GroupSummary(g, len(rows), mean, std))
    return out


def write_scores_csv(scores: Iterable[ManeuverScores], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", *MANEUVERS])
        for s in scores:
            w.writerow([s.user_id, *(repr(v) for v in s.values())])


def read_scores_csv(path: str | Path) -> list[ManeuverScores]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [ManeuverScores(r["user_id"], **{m: float(r[m]) for m in MANEUVERS}) for r in csv.DictReader(fh)]


def write_summary_csv(summaries: Iterable[GroupSummary], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group_id", "n_users", *(f"{m}_{stat}" for m in MANEUVERS for stat in ("mean", "std"))])
        for s in summaries:
            w.writerow([s.group_id, s.n_users, *(f"{v:.6f}" for m in MANEUVERS for v in (s.mean[m], s.std[m]))])

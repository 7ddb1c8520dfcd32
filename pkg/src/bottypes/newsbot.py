"""News-bot reclassification: profile substring rule, then headline fraction.

The headline classifier is a multinomial naive Bayes over token counts,
using the same artifact-stripping tokenizer as the topic tables (no stopword
removal, single-character tokens kept).
"""

from __future__ import annotations

import csv
import json
import math
import random
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import ContractViolation, Corpus, IngestionError, Tweet, UserProfile
from .topics import PLAIN, TokenizerConfig, preprocess

HEADLINE = "headline"
NOT_HEADLINE = "not_headline"
DEFAULT_NEWS_FRACTION = 0.90
MODEL_FORMAT = "bottypes.headline_nb"


class Trigger(str, Enum):
    PROFILE_SUBSTRING = "ProfileSubstring"
    HEADLINE_FRACTION = "HeadlineFraction"
    NONE = "None"


@dataclass(frozen=True)
class NewsBotVerdict:
    user_id: str
    is_news_bot: bool
    trigger: Trigger
    headline_fraction: float | None = None


def profile_substring_match(user: UserProfile) -> bool:
    return any("news" in field.casefold() for field in (user.display_name, user.screen_name, user.description))


@dataclass(frozen=True)
class HeadlineModel:
    vocabulary: tuple[str, ...]  # sorted; index = position
    log_likelihood: Mapping[str, tuple[float, ...]]  # class -> per-token log P(token | class)
    log_prior: Mapping[str, float]
    seed: int
    alpha: float = 1.0
    heldout_accuracy: float | None = None
    tokenizer: TokenizerConfig = PLAIN

    def index(self, token: str) -> int | None:
        i = bisect_left(self.vocabulary, token)
        return i if i < len(self.vocabulary) and self.vocabulary[i] == token else None

    def log_odds(self, text: str) -> float:
        """log P(headline | text) - log P(not_headline | text); unseen tokens ignored."""
        score = self.log_prior[HEADLINE] - self.log_prior[NOT_HEADLINE]
        lh, ln = self.log_likelihood[HEADLINE], self.log_likelihood[NOT_HEADLINE]
        for tok in preprocess(text, self.tokenizer):
            i = self.index(tok)
            if i is not None:
                score += lh[i] - ln[i]
        return score

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": 1,
            "seed": self.seed,
            "alpha": self.alpha,
            "heldout_accuracy": self.heldout_accuracy,
            "vocabulary": list(self.vocabulary),
            "log_likelihood": {k: list(v) for k, v in sorted(self.log_likelihood.items())},
            "log_prior": dict(sorted(self.log_prior.items())),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HeadlineModel":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError("not a headline model file")
        return cls(
            vocabulary=tuple(d["vocabulary"]),
            log_likelihood={k: tuple(v) for k, v in d["log_likelihood"].items()},
            log_prior=dict(d["log_prior"]),
            seed=d["seed"],
            alpha=d["alpha"],
            heldout_accuracy=d.get("heldout_accuracy"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "HeadlineModel":
        try:
            return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
        except OSError as exc:
            raise IngestionError(f"cannot read headline model {path}: {exc}") from exc


def _fit(examples: Sequence[tuple[str, str]], seed: int, alpha: float) -> HeadlineModel:
    counts = {HEADLINE: Counter(), NOT_HEADLINE: Counter()}
    docs = Counter()
    for text, label in examples:
        counts[label].update(preprocess(text, PLAIN))
        docs[label] += 1
    vocab = tuple(sorted(set(counts[HEADLINE]) | set(counts[NOT_HEADLINE])))
    loglik = {}
    for label, c in counts.items():
        denom = sum(c.values()) + alpha * len(vocab)
        loglik[label] = tuple(math.log((c[t] + alpha) / denom) for t in vocab)
    total = docs[HEADLINE] + docs[NOT_HEADLINE]
    prior = {lab: math.log(docs[lab] / total) for lab in (HEADLINE, NOT_HEADLINE)}
    return HeadlineModel(vocab, loglik, prior, seed, alpha)


def train_headline_model(
    headlines: Sequence[str],
    non_news: Sequence[str],
    seed: int = 0,
    alpha: float = 1.0,
    holdout: float = 0.1,
) -> HeadlineModel:
    """Fit on a stratified 90/10 split and record the held-out accuracy.

    The returned model is the one fitted on the training part, so the stored
    accuracy describes it exactly.
    """
    if not headlines or not non_news:
        raise ValueError("both classes need at least one example")
    rng = random.Random(seed)
    train: list[tuple[str, str]] = []
    test: list[tuple[str, str]] = []
    for texts, label in ((headlines, HEADLINE), (non_news, NOT_HEADLINE)):
        order = list(range(len(texts)))
        rng.shuffle(order)
        n_test = int(len(texts) * holdout)
        test += [(texts[i], label) for i in order[:n_test]]
        train += [(texts[i], label) for i in order[n_test:]]
    model = _fit(train, seed, alpha)
    if test:
        hits = sum(classify_tweet(model, text)[0] == label for text, label in test)
        model = HeadlineModel(
            model.vocabulary, model.log_likelihood, model.log_prior, seed, alpha, hits / len(test)
        )
    return model


def load_training_texts(path: str | Path) -> list[str]:
    """One example per line; blank lines and ``#`` comment lines skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def classify_tweet(model: HeadlineModel, text: str) -> tuple[str, float]:
    """(label, P(headline)); a tie at 0.5 is not a headline."""
    z = model.log_odds(text)
    p = 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
    return (HEADLINE if p > 0.5 else NOT_HEADLINE), p


def headline_fraction_rule(
    user_id: str,
    tweets: Iterable[Tweet],
    model: HeadlineModel,
    threshold: float = DEFAULT_NEWS_FRACTION,
    include_retweets: bool = True,
) -> NewsBotVerdict:
    if not (0.0 < threshold <= 1.0):
        raise ValueError("news fraction threshold must lie in (0, 1]")
    texts = [t.text for t in tweets if include_retweets or not t.is_retweet]
    if not texts:
        return NewsBotVerdict(user_id, False, Trigger.NONE, None)
    hits = sum(classify_tweet(model, s)[0] == HEADLINE for s in texts)
    frac = hits / len(texts)
    if frac >= threshold:
        return NewsBotVerdict(user_id, True, Trigger.HEADLINE_FRACTION, frac)
    return NewsBotVerdict(user_id, False, Trigger.NONE, frac)


def classify_news_bots(
    bots: Sequence[str],
    corpus: Corpus,
    model: HeadlineModel,
    is_bot: Mapping[str, bool] | None = None,
    threshold: float = DEFAULT_NEWS_FRACTION,
    include_retweets: bool = True,
) -> list[NewsBotVerdict]:
    """Substring rule first; the headline rule only for bots it missed."""
    for uid in bots:
        if uid not in corpus.users:
            raise ContractViolation(f"unknown user id {uid!r}")
        if is_bot is not None and not is_bot.get(uid, False):
            raise ContractViolation(f"user {uid!r} does not hold a bot verdict")
    by_author = corpus.tweets_by_author()
    out = []
    for uid in bots:
        if profile_substring_match(corpus.users[uid]):
            out.append(NewsBotVerdict(uid, True, Trigger.PROFILE_SUBSTRING, None))
        else:
            out.append(headline_fraction_rule(uid, by_author.get(uid, []), model, threshold, include_retweets))
    return out


def default_training_paths() -> tuple[Path, Path]:
    base = Path(str(resources.files("bottypes") / "data"))
    return base / "headlines.txt", base / "conversational.txt"


def train_default_model(seed: int = 0) -> HeadlineModel:
    """Model fitted on the bundled fixture corpora."""
    h, n = default_training_paths()
    return train_headline_model(load_training_texts(h), load_training_texts(n), seed)



def write_verdicts_csv(verdicts: Iterable[NewsBotVerdict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "is_news_bot", "trigger", "headline_fraction"])
        for v in verdicts:
            frac = "" if v.headline_fraction is None else repr(v.headline_fraction)
            w.writerow([v.user_id, int(v.is_news_bot), v.trigger.value, frac])


def read_verdicts_csv(path: str | Path) -> list[NewsBotVerdict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [
            NewsBotVerdict(
                r["user_id"], r["is_news_bot"] == "1", Trigger(r["trigger"]),
                float(r["headline_fraction"]) if r["headline_fraction"] else None,
            )
            for r in csv.DictReader(fh)
        ]

"""Bot probability per account and the bot/human threshold.

Scores come from one of two sources: a CSV of externally computed
probabilities (replayed as-is), or the bundled baseline forest trained on
eleven account features.
"""

from __future__ import annotations

import csv
import logging
import math
import statistics
from collections import Counter
from dataclasses import astuple, dataclass, fields
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus import ContractViolation, IngestionError, Tweet, UserProfile
from .forest import RandomForest

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.70
SECONDS_PER_DAY = 86400.0

BASELINE_HYPERPARAMETERS = dict(n_trees=100, max_depth=10, min_samples_leaf=1, max_features="sqrt", bootstrap=True)


class ScoreSource(str, Enum):
    IMPORTED = "Imported"
    BASELINE = "BaselineModel"


@dataclass(frozen=True)
class BotScore:
    user_id: str
    p_bot: float
    source: ScoreSource = ScoreSource.IMPORTED

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_bot <= 1.0):
            raise ValueError(f"p_bot out of [0, 1]: {self.p_bot}")


@dataclass(frozen=True)
class BotVerdict:
    user_id: str
    is_bot: bool
    threshold_used: float
    p_bot: float


@dataclass(frozen=True)
class AccountFeatures:
    account_age_days: float
    followers_friends_ratio: float
    tweets_per_day: float
    retweet_fraction: float
    mention_rate: float
    url_rate: float
    screen_name_digit_fraction: float
    screen_name_entropy: float
    has_default_profile_image: bool
    inter_tweet_time_cv: float
    description_length: int

    def as_vector(self) -> np.ndarray:
        return np.array([float(v) for v in astuple(self)])


FEATURE_NAMES = tuple(f.name for f in fields(AccountFeatures))


def shannon_entropy(s: str) -> float:
    """Bits per character of the empirical character distribution."""
    if not s:
        return 0.0
    n = len(s)
    h = -sum(c / n * math.log2(c / n) for c in Counter(s).values())
    return h + 0.0  # avoid -0.0


def extract_features(user: UserProfile, tweets: Sequence[Tweet], now: datetime) -> AccountFeatures:
    """Deterministic account features.

    ``tweets_per_day`` is observed activity: tweet count over the span from the
    first observed tweet to ``now`` (at least one day). The gap coefficient of
    variation is 0 with fewer than three tweets or a zero mean gap.
    """
    for t in tweets:
        if t.author_id != user.user_id:
            raise ContractViolation(f"tweet {t.tweet_id} is by {t.author_id}, not {user.user_id}")
    age_s = (now - user.account_created_at).total_seconds()
    if age_s < 0:
        raise ContractViolation("now precedes account creation")

    n = len(tweets)
    times = sorted(t.created_at for t in tweets)
    if n:
        span_days = max(1.0, (now - times[0]).total_seconds() / SECONDS_PER_DAY)
        tweets_per_day = n / span_days
    else:
        tweets_per_day = 0.0

    cv = 0.0
    if n >= 3:
        gaps = [(b - a).total_seconds() for a, b in zip(times, times[1:])]
        mean = statistics.fmean(gaps)
        if mean > 0:
            cv = statistics.pstdev(gaps) / mean

    name = user.screen_name
    return AccountFeatures(
        account_age_days=age_s / SECONDS_PER_DAY,
        followers_friends_ratio=(
            user.followers_count / user.friends_count if user.friends_count else float(user.followers_count)
        ),
        tweets_per_day=tweets_per_day,
        retweet_fraction=sum(t.is_retweet for t in tweets) / n if n else 0.0,
        mention_rate=sum(len(t.mentions) for t in tweets) / n if n else 0.0,
        url_rate=sum(len(t.urls) for t in tweets) / n if n else 0.0,
        screen_name_digit_fraction=sum(ch.isdigit() for ch in name) / len(name) if name else 0.0,
        screen_name_entropy=shannon_entropy(name),
        has_default_profile_image=user.has_default_profile_image,
        inter_tweet_time_cv=cv,
        description_length=len(user.description),
    )


class TrainedModel(Protocol):
    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...


class ConstantModel:
    """Dummy model that returns the same probability for every account."""

    def __init__(self, p: float):
        self.p = p

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return np.full(np.atleast_2d(X).shape[0], self.p)


def score_baseline(features: AccountFeatures, model: TrainedModel, user_id: str = "") -> BotScore:
    x = features.as_vector()
    if not np.isfinite(x).all():
        raise ValueError("feature vector contains NaN or inf")
    p = float(model.predict_proba(x[None, :])[0])
    return BotScore(user_id, min(1.0, max(0.0, p)), ScoreSource.BASELINE)


def _label_value(label) -> float:
    if isinstance(label, str):
        low = label.strip().lower()
        if low == "bot":
            return 1.0
        if low == "human":
            return 0.0
        raise ValueError(f"unknown label {label!r}")
    return 1.0 if label else 0.0


def train_baseline(
    labeled: Iterable[tuple[AccountFeatures, object]],
    seed: int = 0,
    **hyperparameters,
) -> RandomForest:
    """Fit the baseline forest; labels are ``"bot"``/``"human"`` or truthy/falsy."""
    labeled = list(labeled)
    X = np.array([f.as_vector() for f, _ in labeled]) if labeled else np.zeros((0, len(FEATURE_NAMES)))
    y = np.array([_label_value(lab) for _, lab in labeled])
    n_bot = int(y.sum())
    if n_bot < 2 or len(y) - n_bot < 2:
        raise ValueError("need at least two examples of each class")
    params = {**BASELINE_HYPERPARAMETERS, **hyperparameters}
    return RandomForest(seed=seed, feature_names=FEATURE_NAMES, **params).fit(X, y)


# --------------------------------------------------------------------------
# score files


def read_scores(path: str | Path) -> tuple[list[BotScore], Counter]:
    """Parse ``user_id,p_bot[,source]`` rows; bad rows are counted, not fatal."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read scores {path}: {exc}") from exc
    rejected: Counter = Counter()
    scores: list[BotScore] = []
    seen: set[str] = set()
    for i, row in enumerate(csv.reader(text.splitlines())):
        if not row or not "".join(row).strip():
            continue
        if i == 0 and row[0].strip() == "user_id":
            continue
        if len(row) < 2 or not row[0].strip():
            rejected["malformed"] += 1
            continue
        uid = row[0].strip()
        try:
            p = float(row[1])
        except ValueError:
            rejected["not_a_number"] += 1
            continue
        if not (0.0 <= p <= 1.0):  # NaN fails this too
            rejected["out_of_range"] += 1
            continue
        if uid in seen:
            rejected["duplicate_user"] += 1
            continue
        seen.add(uid)
        scores.append(BotScore(uid, p, ScoreSource.IMPORTED))
    if rejected:
        log.warning("%s: rejected rows %s", path, dict(rejected))
    return scores, rejected


def import_scores(path: str | Path) -> list[BotScore]:
    return read_scores(path)[0]


def write_scores(scores: Iterable[BotScore], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "p_bot", "source"])
        for s in scores:
            w.writerow([s.user_id, repr(s.p_bot), s.source.value])


def read_scores_with_source(path: str | Path) -> list[BotScore]:
    """Re-read a file written by :func:`write_scores`, keeping each row's source."""
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(BotScore(row["user_id"], float(row["p_bot"]), ScoreSource(row.get("source") or "Imported")))
    return out


def apply_threshold(scores: Iterable[BotScore], threshold: float = DEFAULT_THRESHOLD) -> list[BotVerdict]:
    """``p_bot >= threshold`` marks a bot."""
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    return [BotVerdict(s.user_id, s.p_bot >= threshold, threshold, s.p_bot) for s in scores]


def default_model_path() -> Path:
    """Forest trained on the synthetic labelled accounts (``scripts/make_fixture.py``)."""
    from importlib import resources

    return Path(str(resources.files("bottypes") / "data" / "bot_model.json"))


def write_verdicts(verdicts: Iterable[BotVerdict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "p_bot", "is_bot", "threshold"])
        for v in verdicts:
            w.writerow([v.user_id, repr(v.p_bot), int(v.is_bot), repr(v.threshold_used)])


def read_verdicts(path: str | Path) -> list[BotVerdict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [
            BotVerdict(r["user_id"], r["is_bot"] == "1", float(r["threshold"]), float(r["p_bot"]))
            for r in csv.DictReader(fh)
        ]

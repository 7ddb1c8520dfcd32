"""Canonical tweet/user data model and JSONL ingestion.

Two on-disk layouts are accepted:

* embedded: every tweet line carries its author under ``"user"``;
* sidecar: tweet lines carry ``"author_id"`` and the profiles live in a
  separate ``users.jsonl`` (one profile object per line).

Raw Twitter V1 status objects (recognised by ``id_str`` and no ``tweet_id``)
are converted through :func:`normalize_v1_status` before validation.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

MAX_TEXT_CHARS = 4000
_TWITTER_TIME_FMT = "%a %b %d %H:%M:%S %z %Y"


class IngestionError(OSError):
    """Fatal ingestion failure (missing or unreadable file)."""


class ContractViolation(ValueError):
    """A caller broke an operation's precondition."""


class SchemaError(ValueError):
    """A single record does not match the documented schema."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


@dataclass(frozen=True)
class Tweet:
    tweet_id: str
    author_id: str
    text: str
    created_at: datetime
    retweet_of_user: str | None = None
    reply_to_user: str | None = None
    quote_of_user: str | None = None
    mentions: tuple[str, ...] = ()
    hashtags: tuple[str, ...] = ()
    urls: tuple[str, ...] = ()
    like_count: int = 0
    retweet_count: int = 0
    language: str | None = None

    def __post_init__(self) -> None:
        if not self.tweet_id:
            raise SchemaError("invalid_value", "tweet_id is empty")
        if not self.author_id:
            raise SchemaError("invalid_value", "author_id is empty")
        if self.retweet_of_user is not None and self.quote_of_user is not None:
            raise SchemaError("retweet_and_quote", self.tweet_id)
        if self.like_count < 0 or self.retweet_count < 0:
            raise SchemaError("invalid_value", "negative engagement count")
        if len(self.text) > MAX_TEXT_CHARS:
            raise SchemaError("text_too_long", self.tweet_id)

    @property
    def is_retweet(self) -> bool:
        return self.retweet_of_user is not None

    @property
    def is_reply(self) -> bool:
        return self.reply_to_user is not None

    @property
    def is_quote(self) -> bool:
        return self.quote_of_user is not None

    def interaction_targets(self) -> list[tuple[str, str]]:
        """(relation, target user id) pairs in a fixed order."""
        out = []
        if self.retweet_of_user is not None:
            out.append(("retweet", self.retweet_of_user))
        if self.reply_to_user is not None:
            out.append(("reply", self.reply_to_user))
        if self.quote_of_user is not None:
            out.append(("quote", self.quote_of_user))
        out.extend(("mention", m) for m in self.mentions)
        return out


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    screen_name: str = ""
    display_name: str = ""
    description: str = ""
    declared_location: str | None = None
    declared_coordinates: tuple[float, float] | None = None
    account_created_at: datetime = datetime(2006, 3, 21, tzinfo=timezone.utc)
    followers_count: int = 0
    friends_count: int = 0
    statuses_count: int = 0
    has_default_profile_image: bool = False

    def __post_init__(self) -> None:
        if not self.user_id:
            raise SchemaError("invalid_value", "user_id is empty")
        if self.declared_coordinates is not None:
            lat, lon = self.declared_coordinates
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise SchemaError("invalid_value", "coordinates out of range")
        for name in ("followers_count", "friends_count", "statuses_count"):
            if getattr(self, name) < 0:
                raise SchemaError("invalid_value", f"negative {name}")


@dataclass(frozen=True)
class Corpus:
    users: Mapping[str, UserProfile]
    tweets: tuple[Tweet, ...]
    language_filter: str | None = None

    def tweets_by_author(self) -> dict[str, list[Tweet]]:
        out: dict[str, list[Tweet]] = {uid: [] for uid in self.users}
        for t in self.tweets:
            out.setdefault(t.author_id, []).append(t)
        return out


@dataclass
class SkipReport:
    lines_total: int = 0
    lines_ok: int = 0
    lines_skipped: int = 0
    language_filtered: int = 0
    reasons: Counter = field(default_factory=Counter)

    def skip(self, reason: str) -> None:
        self.lines_skipped += 1
        self.reasons[reason] += 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "lines_total": self.lines_total,
            "lines_ok": self.lines_ok,
            "lines_skipped": self.lines_skipped,
            "language_filtered": self.language_filtered,
            "reasons": dict(sorted(self.reasons.items())),
        }


@dataclass(frozen=True)
class ValidationReport:
    users: int
    tweets: int
    dangling_targets: int
    duplicate_ids: int
    tweets_with_unknown_author: int
    users_without_tweets: int

    def to_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


# --------------------------------------------------------------------------
# parsing helpers


def parse_timestamp(value: Any) -> datetime:
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        if not math.isfinite(value):
            raise SchemaError("invalid_value", "timestamp")
        dt = datetime.fromtimestamp(value, tz=timezone.utc)
    elif isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            try:
                dt = datetime.strptime(value, _TWITTER_TIME_FMT)
            except ValueError as exc:
                raise SchemaError("invalid_value", f"timestamp {value!r}") from exc
    else:
        raise SchemaError("invalid_value", "timestamp")
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _opt_id(value: Any) -> str | None:
    if value is None or value == "":
        return None
    return str(value)


def _str_list(value: Any, name: str) -> tuple[str, ...]:
    if value is None:
        return ()
    if not isinstance(value, list):
        raise SchemaError("invalid_value", name)
    return tuple(str(v) for v in value)


def _count(value: Any, name: str) -> int:
    if value is None:
        return 0
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError("invalid_value", name)
    return value


def _coords(value: Any) -> tuple[float, float] | None:
    if value is None:
        return None
    if isinstance(value, Mapping):
        lat, lon = value.get("lat"), value.get("lon")
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        lat, lon = value
    else:
        raise SchemaError("invalid_value", "declared_coordinates")
    try:
        return float(lat), float(lon)
    except (TypeError, ValueError) as exc:
        raise SchemaError("invalid_value", "declared_coordinates") from exc


def user_from_dict(obj: Mapping[str, Any]) -> UserProfile:
    if not isinstance(obj, Mapping):
        raise SchemaError("invalid_value", "user")
    if "user_id" not in obj:
        raise SchemaError("missing_field", "user_id")
    created = obj.get("account_created_at")
    return UserProfile(
        user_id=str(obj["user_id"]),
        screen_name=str(obj.get("screen_name") or ""),
        display_name=str(obj.get("display_name") or ""),
        description=str(obj.get("description") or ""),
        declared_location=obj.get("declared_location") or None,
        declared_coordinates=_coords(obj.get("declared_coordinates")),
        account_created_at=parse_timestamp(created) if created is not None else UserProfile.account_created_at,
        followers_count=_count(obj.get("followers_count"), "followers_count"),
        friends_count=_count(obj.get("friends_count"), "friends_count"),
        statuses_count=_count(obj.get("statuses_count"), "statuses_count"),
        has_default_profile_image=bool(obj.get("has_default_profile_image", False)),
    )


def tweet_from_dict(obj: Mapping[str, Any]) -> Tweet:
    for key in ("tweet_id", "text", "created_at"):
        if key not in obj:
            raise SchemaError("missing_field", key)
    author = obj.get("author_id")
    if author is None and isinstance(obj.get("user"), Mapping):
        author = obj["user"].get("user_id")
    if author is None:
        raise SchemaError("missing_field", "author_id")
    if not isinstance(obj["text"], str):
        raise SchemaError("invalid_value", "text")
    lang = obj.get("language")
    return Tweet(
        tweet_id=str(obj["tweet_id"]),
        author_id=str(author),
        text=obj["text"],
        created_at=parse_timestamp(obj["created_at"]),
        retweet_of_user=_opt_id(obj.get("retweet_of_user")),
        reply_to_user=_opt_id(obj.get("reply_to_user")),
        quote_of_user=_opt_id(obj.get("quote_of_user")),
        mentions=_str_list(obj.get("mentions"), "mentions"),
        hashtags=tuple(h.lower() for h in _str_list(obj.get("hashtags"), "hashtags")),
        urls=_str_list(obj.get("urls"), "urls"),
        like_count=_count(obj.get("like_count"), "like_count"),
        retweet_count=_count(obj.get("retweet_count"), "retweet_count"),
        language=str(lang) if lang else None,
    )


def normalize_v1_status(raw: Mapping[str, Any]) -> dict[str, Any]:
    """Map a raw Twitter V1 status object onto the normalized tweet schema.

    ============================  ==================================
    normalized field              V1 source
    ============================  ==================================
    tweet_id                      id_str
    text                          extended_tweet.full_text / full_text / text
    created_at                    created_at
    retweet_of_user               retweeted_status.user.id_str
    quote_of_user                 quoted_status.user.id_str (not on retweets)
    reply_to_user                 in_reply_to_user_id_str
    mentions / hashtags / urls    entities.user_mentions / hashtags / urls
    like_count                    favorite_count
    retweet_count                 retweet_count
    language                      lang ("und" dropped)
    user.*                        user.{id_str, screen_name, name, ...}
    user.declared_coordinates     coordinates.coordinates (lon, lat)
    ============================  ==================================
    """
    ext = raw.get("extended_tweet") or {}
    text = ext.get("full_text") or raw.get("full_text") or raw.get("text") or ""
    entities = ext.get("entities") or raw.get("entities") or {}
    rt = raw.get("retweeted_status")
    qt = raw.get("quoted_status")
    lang = raw.get("lang")
    u = raw.get("user") or {}
    coords = None
    geo = raw.get("coordinates")
    if isinstance(geo, Mapping) and isinstance(geo.get("coordinates"), list):
        lon, lat = geo["coordinates"][:2]
        coords = [lat, lon]
    user = {
        "user_id": u.get("id_str") or _opt_id(u.get("id")),
        "screen_name": u.get("screen_name"),
        "display_name": u.get("name"),
        "description": u.get("description"),
        "declared_location": u.get("location"),
        "declared_coordinates": coords,
        "account_created_at": u.get("created_at"),
        "followers_count": u.get("followers_count"),
        "friends_count": u.get("friends_count"),
        "statuses_count": u.get("statuses_count"),
        "has_default_profile_image": u.get("default_profile_image", False),
    }
    return {
        "tweet_id": raw.get("id_str") or _opt_id(raw.get("id")),
        "author_id": user["user_id"],
        "text": text,
        "created_at": raw.get("created_at"),
        "retweet_of_user": (rt or {}).get("user", {}).get("id_str") if rt else None,
        "quote_of_user": (qt or {}).get("user", {}).get("id_str") if qt and not rt else None,
        "reply_to_user": raw.get("in_reply_to_user_id_str"),
        "mentions": [m.get("id_str") for m in entities.get("user_mentions", []) if m.get("id_str")],
        "hashtags": [h.get("text", "") for h in entities.get("hashtags", [])],
        "urls": [x.get("expanded_url") or x.get("url") for x in entities.get("urls", [])],
        "like_count": raw.get("favorite_count", 0),
        "retweet_count": raw.get("retweet_count", 0),
        "language": None if lang in (None, "und") else lang,
        "user": user,
    }


def tweet_to_dict(t: Tweet) -> dict[str, Any]:
    return {
        "tweet_id": t.tweet_id,
        "author_id": t.author_id,
        "text": t.text,
        "created_at": format_timestamp(t.created_at),
        "retweet_of_user": t.retweet_of_user,
        "reply_to_user": t.reply_to_user,
        "quote_of_user": t.quote_of_user,
        "mentions": list(t.mentions),
        "hashtags": list(t.hashtags),
        "urls": list(t.urls),
        "like_count": t.like_count,
        "retweet_count": t.retweet_count,
        "language": t.language,
    }


def user_to_dict(u: UserProfile) -> dict[str, Any]:
    return {
        "user_id": u.user_id,
        "screen_name": u.screen_name,
        "display_name": u.display_name,
        "description": u.description,
        "declared_location": u.declared_location,
        "declared_coordinates": list(u.declared_coordinates) if u.declared_coordinates else None,
        "account_created_at": format_timestamp(u.account_created_at),
        "followers_count": u.followers_count,
        "friends_count": u.friends_count,
        "statuses_count": u.statuses_count,
        "has_default_profile_image": u.has_default_profile_image,
    }


# --------------------------------------------------------------------------
# ingestion


def _iter_lines(path: Path) -> Iterator[str]:
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    with fh:
        try:
            yield from fh
        except UnicodeDecodeError as exc:
            raise IngestionError(f"{path} is not valid UTF-8: {exc}") from exc


def language_matches(tag: str | None, wanted: str | None) -> bool:
    """Primary-subtag comparison; an absent tag matches any filter."""
    if wanted is None or tag is None:
        return True
    return tag.split("-")[0].lower() == wanted.split("-")[0].lower()


def load_users_jsonl(path: str | Path, report: SkipReport | None = None) -> dict[str, UserProfile]:
    users: dict[str, UserProfile] = {}
    for line in _iter_lines(Path(path)):
        if not line.strip():
            continue
        try:
            u = user_from_dict(json.loads(line))
        except (json.JSONDecodeError, SchemaError, TypeError):
            if report is not None:
                report.reasons["bad_user_line"] += 1
            continue
        users.setdefault(u.user_id, u)
    return users


def ingest_jsonl(
    path: str | Path,
    language_filter: str | None = None,
    users_path: str | Path | None = None,
) -> tuple[Corpus, SkipReport]:
    """Read a tweet stream into a :class:`Corpus`.

    Malformed lines are skipped and tallied by reason; duplicate tweet ids
    keep their first occurrence. Users whose every tweet is filtered out by
    language remain in the corpus.
    """
    report = SkipReport()
    users: dict[str, UserProfile] = {}
    if users_path is not None:
        users.update(load_users_jsonl(users_path, report))
    tweets: list[Tweet] = []
    seen: set[str] = set()

    for line in _iter_lines(Path(path)):
        if not line.strip():
            continue
        report.lines_total += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.skip("invalid_json")
            continue
        if not isinstance(obj, dict):
            report.skip("not_object")
            continue
        try:
            if "tweet_id" not in obj and "id_str" in obj:
                obj = normalize_v1_status(obj)
            tweet = tweet_from_dict(obj)
            user = user_from_dict(obj["user"]) if obj.get("user") is not None else None
        except SchemaError as exc:
            report.skip(exc.reason)
            continue
        except (TypeError, ValueError, AttributeError):
            report.skip("invalid_value")
            continue
        if user is not None and user.user_id != tweet.author_id:
            report.skip("author_mismatch")
            continue
        if tweet.tweet_id in seen:
            report.skip("duplicate_tweet_id")
            continue
        if user is None and tweet.author_id not in users:
            report.skip("unknown_author")
            continue
        seen.add(tweet.tweet_id)
        if user is not None:
            users.setdefault(user.user_id, user)
        report.lines_ok += 1
        if not language_matches(tweet.language, language_filter):
            report.language_filtered += 1
            continue
        tweets.append(tweet)

    return Corpus(users=users, tweets=tuple(tweets), language_filter=language_filter), report


def validate(corpus: Corpus) -> ValidationReport:
    ids = Counter(t.tweet_id for t in corpus.tweets)
    dangling: set[str] = set()
    unknown_author = 0
    authors: set[str] = set()
    for t in corpus.tweets:
        authors.add(t.author_id)
        if t.author_id not in corpus.users:
            unknown_author += 1
        for _, target in t.interaction_targets():
            if target not in corpus.users:
                dangling.add(target)
    return ValidationReport(
        users=len(corpus.users),
        tweets=len(corpus.tweets),
        dangling_targets=len(dangling),
        duplicate_ids=sum(c - 1 for c in ids.values() if c > 1),
        tweets_with_unknown_author=unknown_author,
        users_without_tweets=sum(1 for uid in corpus.users if uid not in authors),
    )


def dump_corpus(corpus: Corpus, directory: str | Path) -> tuple[Path, Path]:
    """Write the corpus in sidecar layout; users sorted by id, tweets in order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    users_path = directory / "users.jsonl"
    tweets_path = directory / "tweets.jsonl"
    _write_jsonl(users_path, (user_to_dict(corpus.users[k]) for k in sorted(corpus.users)))
    _write_jsonl(tweets_path, (tweet_to_dict(t) for t in corpus.tweets))
    return tweets_path, users_path


def _write_jsonl(path: Path, rows: Iterable[Mapping[str, Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def serialize(corpus: Corpus) -> bytes:
    """Canonical byte serialization, used for determinism checks."""
    parts = [json.dumps({"language_filter": corpus.language_filter}, sort_keys=True)]
    parts += [json.dumps(user_to_dict(corpus.users[k]), sort_keys=True, ensure_ascii=False) for k in sorted(corpus.users)]
    parts += [json.dumps(tweet_to_dict(t), sort_keys=True, ensure_ascii=False) for t in corpus.tweets]
    return ("\n".join(parts) + "\n").encode("utf-8")

"""Seeded synthetic data: text, labelled account features, planted graphs and the demo corpus.

Everything here is generated from ``random.Random(seed)`` so that bundled
fixtures can be regenerated byte for byte by ``scripts/make_fixture.py``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .botdetect import AccountFeatures, BotScore, ScoreSource, write_scores
from .corpus import Corpus, Tweet, UserProfile, dump_corpus
from .netgraph.graph import CommGraph, EdgeCounts, edge_key

EPOCH = datetime(2020, 3, 1, tzinfo=timezone.utc)

# --------------------------------------------------------------------------
# text

_H_SUBJECT = [
    "Senate", "House Democrats", "Health Ministry", "Governor", "President", "Stocks", "Researchers",
    "Police", "Supreme Court", "WHO", "CDC", "Lawmakers", "Oil Prices", "Beijing", "Washington",
    "European Leaders", "Airlines", "Hospitals", "Tech Giants", "Central Bank", "Officials", "Mayor",
    "Automakers", "Retailers", "Scientists", "Trade Negotiators", "State Media", "Regulators",
]
_H_VERB = [
    "Announces", "Reports", "Warns Of", "Passes", "Approves", "Confirms", "Rejects", "Urges",
    "Extends", "Launches", "Faces", "Plans", "Delays", "Unveils", "Suspends", "Backs", "Probes",
    "Expands", "Cuts", "Weighs", "Blocks", "Slams", "Eases", "Imposes",
]
_H_OBJECT = [
    "New Measures", "Relief Bill", "Travel Ban", "Lockdown Rules", "Vaccine Trial", "Trade Deal",
    "Tariffs", "Emergency Funding", "Test Kits", "Export Controls", "Stimulus Package", "Rate Cut",
    "Border Closures", "Quarantine Orders", "Mask Mandate", "Supply Chain Plan", "Sanctions",
    "Aid Shipments", "Hiring Freeze", "Safety Review", "Investigation", "Price Caps",
]
_H_TAIL = [
    "Amid Outbreak", "As Cases Rise", "After Talks Stall", "Over Virus Fears", "In Hubei",
    "Across Europe", "Ahead Of Vote", "Despite Criticism", "As Markets Tumble", "For Second Week",
    "In Surprise Move", "Following Report", "As Deadline Nears", "Amid Trade Tensions",
    "After Record Losses", "In Wuhan", "Nationwide", "Worldwide", "This Week", "On Monday",
]

_C_OPEN = [
    "lol", "honestly", "ugh", "omg", "ok so", "not gonna lie", "tbh", "wait", "yo", "haha",
    "man", "literally", "hey", "guys", "seriously", "welp", "oh well", "ngl", "btw", "",
]
_C_BODY = [
    "i can't believe we stayed up this late again",
    "my cat keeps sitting on my keyboard",
    "anyone else tired of working from home",
    "we should totally get pizza tonight",
    "i miss going to the gym so much",
    "this lockdown is making me lose my mind",
    "my mom just learned how to video call",
    "i think i watched every show on netflix",
    "can't wait to see you all this weekend",
    "i'm so done with this weather",
    "we made banana bread and it actually worked",
    "why is my neighbor mowing the lawn at 7am",
    "just finished my first run in weeks",
    "i need more coffee before i talk to anyone",
    "my plants are the only ones listening to me",
    "we're having a game night over zoom later",
    "i keep forgetting what day it is",
    "honestly the virus stuff is stressing me out",
    "my sister sent me the funniest meme",
    "i bought way too much toilet paper",
    "does anyone know a good book to read",
    "i love how quiet the streets are now",
    "we ordered takeout because nobody wanted to cook",
    "my dog thinks every walk is the best day ever",
    "i'm trying to learn guitar because why not",
    "can someone explain why prices went up again",
    "i got a haircut at home and regret everything",
    "our wifi died right in the middle of class",
    "finally cleaned my room after a month",
    "i'm proud of how we handled this week",
]
_C_CLOSE = [
    "", "", "lol", "haha", "!!", "!", ":)", "😂", "❤️", "🙃", "smh", "ugh", "😭", "tbh", "?", "...",
]


def headline(rng: random.Random) -> str:
    parts = [rng.choice(_H_SUBJECT), rng.choice(_H_VERB), rng.choice(_H_OBJECT)]
    if rng.random() < 0.8:
        parts.append(rng.choice(_H_TAIL))
    if rng.random() < 0.25:
        parts.insert(2, str(rng.randint(2, 500)))
    return " ".join(parts)


def conversational(rng: random.Random) -> str:
    parts = [rng.choice(_C_OPEN), rng.choice(_C_BODY), rng.choice(_C_CLOSE)]
    return " ".join(p for p in parts if p)


def training_corpora(n_each: int = 1000, seed: int = 0) -> tuple[list[str], list[str]]:
    """Distinct headline and conversational lines, ``n_each`` of each."""
    rng = random.Random(seed)
    out = []
    for gen in (headline, conversational):
        seen: dict[str, None] = {}
        tries = 0
        while len(seen) < n_each:
            seen.setdefault(gen(rng), None)
            tries += 1
            if tries > 100 * n_each:
                raise RuntimeError("text generator cannot produce enough distinct lines")
        out.append(list(seen))
    return out[0], out[1]


# --------------------------------------------------------------------------
# account features


def labeled_account_features(n_per_class: int = 400, seed: int = 0) -> list[tuple[AccountFeatures, str]]:
    """Bot and human feature vectors drawn from overlapping distributions."""
    rng = random.Random(seed)
    out = []
    for _ in range(n_per_class):
        out.append((_features(rng, bot=True), "bot"))
        out.append((_features(rng, bot=False), "human"))
    return out


def _features(rng: random.Random, bot: bool) -> AccountFeatures:
    if bot:
        return AccountFeatures(
            account_age_days=rng.uniform(1, 900),
            followers_friends_ratio=rng.lognormvariate(-1.2, 1.0),
            tweets_per_day=rng.lognormvariate(3.3, 1.0),
            retweet_fraction=min(1.0, rng.betavariate(5, 2)),
            mention_rate=rng.uniform(0, 2.5),
            url_rate=rng.uniform(0.2, 1.0),
            screen_name_digit_fraction=rng.uniform(0.1, 0.6),
            screen_name_entropy=rng.uniform(2.8, 3.9),
            has_default_profile_image=rng.random() < 0.55,
            inter_tweet_time_cv=rng.uniform(0.0, 0.8),
            description_length=rng.randint(0, 60),
        )
    return AccountFeatures(
        account_age_days=rng.uniform(200, 4500),
        followers_friends_ratio=rng.lognormvariate(0.0, 1.0),
        tweets_per_day=rng.lognormvariate(1.0, 1.0),
        retweet_fraction=min(1.0, rng.betavariate(2, 4)),
        mention_rate=rng.uniform(0, 1.5),
        url_rate=rng.uniform(0.0, 0.5),
        screen_name_digit_fraction=rng.uniform(0.0, 0.25),
        screen_name_entropy=rng.uniform(2.0, 3.6),
        has_default_profile_image=rng.random() < 0.08,
        inter_tweet_time_cv=rng.uniform(0.6, 3.0),
        description_length=rng.randint(0, 160),
    )


OBVIOUS_BOT = AccountFeatures(30.0, 0.05, 500.0, 0.95, 2.0, 1.0, 0.5, 3.8, True, 0.01, 0)
OBVIOUS_HUMAN = AccountFeatures(3000.0, 1.5, 3.0, 0.1, 0.3, 0.05, 0.0, 2.5, False, 1.8, 120)


# --------------------------------------------------------------------------
# graphs


def planted_partition(
    n_blocks: int, block_size: int, p_in: float, p_out: float, seed: int, weight: tuple[int, int] = (1, 1)
) -> tuple[CommGraph, dict[str, int]]:
    """Stochastic block model with integer edge weights; returns the graph and true blocks.

    Node ids are zero-padded so that sorted order equals block order.
    """
    rng = random.Random(seed)
    n = n_blocks * block_size
    width = len(str(n - 1))
    ids = [f"n{i:0{width}d}" for i in range(n)]
    truth = {ids[i]: i // block_size for i in range(n)}
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if truth[ids[i]] == truth[ids[j]] else p_out
            if rng.random() < p:
                edges[(ids[i], ids[j])] = EdgeCounts(mention=rng.randint(*weight))
    return CommGraph(ids, edges), truth


@dataclass(frozen=True)
class PlantedBridging:
    graph: CommGraph
    bots: frozenset[str]
    bridges: frozenset[str]
    blocks: dict[str, int]


def planted_bridging(seed: int = 0, block_size: int = 30, n_bridges: int = 5, n_inner_bots: int = 10) -> PlantedBridging:
    """Two dense communities, ``n_bridges`` bots wired into both, plus bots living inside one block."""
    rng = random.Random(seed)
    base, blocks = planted_partition(2, block_size, 0.5, 0.0, seed, weight=(10, 12))
    edges = dict(base.edges)
    members = [[n for n in base.nodes if blocks[n] == b] for b in (0, 1)]
    bridges = [f"b{i}" for i in range(n_bridges)]
    # each bridge gets its own three contacts per block; shared contacts would form a side cluster
    picks = [rng.sample(side, 3 * n_bridges) for side in members]
    for k, b in enumerate(bridges):
        for side in picks:
            for nb in side[3 * k : 3 * k + 3]:
                edges[edge_key(b, nb)] = EdgeCounts(mention=rng.randint(10, 12))
    # in-block bots stay clear of the bridges so their ties never cross clusters
    touched = {nb for b in bridges for u, v in edges if b in (u, v) for nb in (u, v)}
    inner = rng.sample([n for n in base.nodes if n not in touched], n_inner_bots)
    graph = CommGraph(list(base.nodes) + bridges, edges)
    return PlantedBridging(graph, frozenset(inner + bridges), frozenset(bridges), blocks)


# --------------------------------------------------------------------------
# corpora

_HUMAN_BIOS = [
    "coffee first", "dog person", "teacher and runner", "amateur photographer", "i tweet about food",
    "student", "nurse on night shift", "dad of two", "gamer", "gardening and bad puns", "",
    "software engineer", "love travel", "music is life", "just here for the memes",
]
_BOT_BIOS = ["follow for follow", "deals every hour", "best offers daily", "crypto signals", "", "auto posting"]


def _tweet_times(rng: random.Random, n: int, regular: bool) -> list[datetime]:
    if regular:
        step = rng.uniform(600, 1800)
        start = rng.uniform(0, 86400)
        return [EPOCH + timedelta(seconds=start + i * step) for i in range(n)]
    t = rng.uniform(0, 86400)
    out = []
    for _ in range(n):
        t += rng.expovariate(1 / 40000)
        out.append(EPOCH + timedelta(seconds=round(t)))
    return out


def news_bot_corpus(seed: int = 0, n_news: int = 50, n_other: int = 50, tweets_per_user: int = 20) -> tuple[Corpus, frozenset[str]]:
    """Bots only: half the news bots say "news" in their profile, the rest post >= 95% headlines.

    Non-news bots post conversational text with up to 30% headline-style lines.
    """
    rng = random.Random(seed)
    users, tweets, news = {}, [], set()
    for i in range(n_news + n_other):
        uid = f"bot{i:03d}"
        is_news = i < n_news
        by_profile = is_news and i % 2 == 0
        if by_profile:
            u = UserProfile(uid, screen_name=f"Daily{rng.choice(['News', 'NEWS', 'news'])}{i}", display_name="Wire desk")
        else:
            u = UserProfile(uid, screen_name=f"auto{i}", display_name="Auto poster", description=rng.choice(_BOT_BIOS))
        users[uid] = u
        if is_news:
            news.add(uid)
        if by_profile:
            share = rng.uniform(0.0, 0.3)
        elif is_news:
            share = rng.choice([0.95, 1.0])
        else:
            share = rng.uniform(0.0, 0.3)
        n_head = round(share * tweets_per_user)
        kinds = [True] * n_head + [False] * (tweets_per_user - n_head)
        rng.shuffle(kinds)
        for j, (is_head, ts) in enumerate(zip(kinds, _tweet_times(rng, tweets_per_user, True))):
            text = headline(rng) if is_head else conversational(rng)
            tweets.append(Tweet(f"{uid}-{j}", uid, text, ts, language="en"))
    return Corpus(users, tuple(tweets), None), frozenset(news)


@dataclass(frozen=True)
class FixtureTruth:
    region: dict[str, str]
    role: dict[str, str]  # General / NewsProfile / NewsHeadline / Bridging / Human
    community: dict[str, int]

    def to_dict(self) -> dict:
        return {u: {"region": self.region[u], "role": self.role[u], "community": self.community[u]} for u in sorted(self.region)}


_LOCATIONS = {
    "US": ["Austin, Texas", "Seattle", "New York City", "California", "Texas", "New York", "USA"],
    "China": ["Beijing", "Shanghai", "Guangzhou", "Wuhan", "北京", "Beijing, China"],
    "RestOfWorld": ["London", "Paris", "Berlin", "Lagos", "Mumbai", "Tokyo", "Sydney", "Toronto"],
}
_COORDS = {"US": (30.27, -97.74), "China": (39.90, 116.40), "RestOfWorld": (48.85, 2.35)}
_UNKNOWN_LOCATIONS = ["", "somewhere", "planet earth", "the internet", None]


CONTACTS_PER_USER = 4


def demo_corpus(seed: int = 7) -> tuple[Corpus, dict[str, float], FixtureTruth]:
    """The 200-user demo corpus with planted regions, communities and bot roles.

    Regions form communities (US 80 users, China 60, rest of world 50) and
    ten users have no usable location. Each user keeps heavy ties (>= 10
    interactions) to four contacts in its own community plus light noise
    ties that pruning removes. Bridging bots hold heavy ties into two
    communities. Returns the corpus, a bot-score table and the planted truth.
    """
    rng = random.Random(seed)
    region_sizes = [("US", 80), ("China", 60), ("RestOfWorld", 50)]
    ids = [f"u{i:03d}" for i in range(1, 201)]
    region, community = {}, {}
    k = 0
    for c, (reg, size) in enumerate(region_sizes):
        for _ in range(size):
            region[ids[k]], community[ids[k]] = reg, c
            k += 1
    for uid in ids[k:]:
        region[uid], community[uid] = "Unknown", rng.randrange(3)

    role = dict.fromkeys(ids, "Human")
    pools = {c: [u for u in ids[:190] if community[u] == c] for c in range(3)}
    plan = {0: (2, 2, 8), 1: (2, 2, 7), 2: (2, 2, 6)}  # news-profile, news-headline, general per community
    for c, (n_prof, n_head, n_gen) in plan.items():
        picks = rng.sample(pools[c], n_prof + n_head + n_gen + 2)
        for u in picks[:n_prof]:
            role[u] = "NewsProfile"
        for u in picks[n_prof : n_prof + n_head]:
            role[u] = "NewsHeadline"
        for u in picks[n_prof + n_head : n_prof + n_head + n_gen]:
            role[u] = "General"
        for u in picks[-2:]:
            role[u] = "Bridging"
    bridging_pairs = {}
    for c in range(3):
        for j, u in enumerate(sorted(u for u in pools[c] if role[u] == "Bridging")):
            bridging_pairs[u] = (c, (c + 1 + j) % 3)

    # heavy ties; pool members that are bridging bots reach into a second community
    heavy: dict[tuple[str, str], int] = {}
    for u in ids:
        targets = [community[u]]
        if u in bridging_pairs:
            targets = list(bridging_pairs[u])
        for c in targets:
            # bridging bots only touch humans, so no other bot inherits a cross-cluster tie
            cands = [v for v in pools[c] if v != u and v not in bridging_pairs and (u not in bridging_pairs or role[v] == "Human")]
            for v in rng.sample(cands, CONTACTS_PER_USER):
                key = edge_key(u, v)
                heavy[key] = heavy.get(key, 0) + 1
    users = {}
    for u in ids:
        users[u] = _demo_user(rng, u, region[u], role[u])

    tweets: list[Tweet] = []
    counter = 0

    def text_for(u: str) -> str:
        r = role[u]
        if r == "NewsHeadline" or (r == "NewsProfile" and rng.random() < 0.5):
            return headline(rng)
        if r == "General" and rng.random() < 0.2:
            return headline(rng)
        return conversational(rng)

    # each heavy edge gets 10..13 interaction instances authored by its first endpoint
    per_user: dict[str, list[tuple[str, tuple[str, ...]]]] = {u: [] for u in ids}
    mention_queue: dict[str, list[str]] = {u: [] for u in ids}
    for (a, b), _ in sorted(heavy.items()):
        for _ in range(rng.randint(10, 13)):
            rel = rng.choice(["retweet", "mention", "mention", "mention", "reply", "quote"])
            if rel == "mention":
                mention_queue[a].append(b)
            else:
                per_user[a].append((rel, (b,)))
    # light noise, 1..2 mentions per pair anywhere in the corpus; pruning removes it
    for u in ids:
        for v in rng.sample([x for x in ids if x != u], 2):
            if edge_key(u, v) not in heavy:
                mention_queue[u].extend([v] * rng.randint(1, 2))
    # pack mentions into tweets naming up to three distinct users
    for u in ids:
        queue = mention_queue[u]
        rng.shuffle(queue)
        while queue:
            group: list[str] = []
            for v in list(queue):
                if v not in group:
                    group.append(v)
                    queue.remove(v)
                if len(group) == rng.choice((1, 2, 3)):
                    break
            per_user[u].append(("mention", tuple(group)))
        for _ in range(rng.randint(3, 8)):
            per_user[u].append(("original", ()))

    for u in ids:
        actions = per_user[u]
        rng.shuffle(actions)
        times = _tweet_times(rng, len(actions), regular=role[u] != "Human")
        for (rel, targets), ts in zip(actions, times):
            counter += 1
            body = text_for(u)
            kw: dict = {}
            handles = " ".join(f"@{users[v].screen_name}" for v in targets)
            if rel == "retweet":
                kw["retweet_of_user"] = targets[0]
                text = f"RT {handles}: {body}"
            elif rel == "reply":
                kw["reply_to_user"] = targets[0]
                text = f"{handles} {body}"
            elif rel == "quote":
                kw["quote_of_user"] = targets[0]
                text = body
            elif rel == "mention":
                kw["mentions"] = targets
                text = f"{body} {handles}"
            else:
                text = body
            urls = ()
            if rng.random() < (0.6 if role[u].startswith("News") else 0.15):
                link = f"https://t.co/{rng.getrandbits(32):08x}"
                urls = (link,)
                text = f"{text} {link}"
            tags = ()
            if rng.random() < 0.15:
                tag = rng.choice(["covid19", "coronavirus", "stayhome", "tradewar", "wuhan"])
                tags = (tag,)
                text = f"{text} #{tag}"
            lang = "en" if rng.random() > 0.03 else rng.choice(["es", "fr", "und"])
            tweets.append(
                Tweet(
                    f"t{counter:06d}", u, text, ts, hashtags=tags, urls=urls, like_count=rng.randint(0, 50),
                    retweet_count=rng.randint(0, 20), language=lang, **kw,
                )
            )
    tweets.sort(key=lambda t: (t.created_at, t.tweet_id))

    scores = {}
    for u in ids:
        scores[u] = round(rng.uniform(0.01, 0.65), 4) if role[u] == "Human" else round(rng.uniform(0.72, 0.99), 4)
    # the two accounts that sit exactly on either side of the decision threshold
    humans = [u for u in ids if role[u] == "Human"]
    generals = [u for u in ids if role[u] == "General"]
    scores[generals[0]] = 0.70
    scores[humans[0]] = 0.6999
    return Corpus(users, tuple(tweets), None), scores, FixtureTruth(region, role, community)


def _demo_user(rng: random.Random, uid: str, region: str, role: str) -> UserProfile:
    loc, coords = None, None
    if region == "Unknown":
        loc = rng.choice(_UNKNOWN_LOCATIONS)
    elif rng.random() < 0.15:
        lat, lon = _COORDS[region]
        coords = (round(lat + rng.uniform(-0.5, 0.5), 4), round(lon + rng.uniform(-0.5, 0.5), 4))
    else:
        loc = rng.choice(_LOCATIONS[region])
    if role == "NewsProfile":
        return UserProfile(
            uid, screen_name=f"{uid}News", display_name="City News Desk", description="breaking stories around the clock",
            declared_location=loc, declared_coordinates=coords, followers_count=rng.randint(500, 50000),
            friends_count=rng.randint(0, 200), statuses_count=rng.randint(5000, 90000),
        )
    if role == "Human":
        return UserProfile(
            uid, screen_name=f"{uid}_{rng.choice(['amy', 'li', 'sam', 'wei', 'jo', 'ravi', 'kim'])}", display_name=uid.upper(),
            description=rng.choice(_HUMAN_BIOS), declared_location=loc, declared_coordinates=coords,
            followers_count=rng.randint(10, 3000), friends_count=rng.randint(10, 2000), statuses_count=rng.randint(50, 20000),
        )
    return UserProfile(
        uid, screen_name=f"{uid}x{rng.randint(1000, 99999)}", display_name="updates", description=rng.choice(_BOT_BIOS),
        declared_location=loc, declared_coordinates=coords, followers_count=rng.randint(0, 300),
        friends_count=rng.randint(100, 5000), statuses_count=rng.randint(10000, 200000),
        has_default_profile_image=rng.random() < 0.6,
    )


def write_demo_fixture(directory: str | Path, seed: int = 7) -> dict[str, Path]:
    """Write tweets.jsonl, users.jsonl, scores.csv and truth.json into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    corpus, scores, truth = demo_corpus(seed)
    tweets_path, users_path = dump_corpus(corpus, d)
    scores_path = d / "scores.csv"
    write_scores([BotScore(u, p, ScoreSource.IMPORTED) for u, p in sorted(scores.items())], scores_path)
    truth_path = d / "truth.json"
    truth_path.write_text(json.dumps(truth.to_dict(), indent=1, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return {"users": users_path, "tweets": tweets_path, "scores": scores_path, "truth": truth_path}

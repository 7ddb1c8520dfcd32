"""Bridging-bot detection and the final bot-type assignment."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..corpus import ContractViolation
from .graph import CommGraph
from .louvain import ClusterAssignment


class BotType(str, Enum):
    GENERAL = "General"
    NEWS = "News"
    BRIDGING = "Bridging"


HUMAN = "Human"
DEFAULT_PRECEDENCE = (BotType.BRIDGING, BotType.NEWS, BotType.GENERAL)


@dataclass(frozen=True)
class BridgingVerdict:
    user_id: str
    is_bridging: bool
    clusters_touched: frozenset[int]
    edges_per_cluster: Mapping[int, int]


def bridging_bots(
    graph: CommGraph,
    clusters: ClusterAssignment,
    bot_ids: Iterable[str],
    min_edges_per_cluster: int = 1,
) -> list[BridgingVerdict]:
    """Verdicts for every bot present in ``graph``, sorted by user id.

    Each incident edge is tallied under its far endpoint's cluster (the bot's
    own cluster for within-cluster edges). A bot bridges when two or more
    clusters each collect at least ``min_edges_per_cluster`` edges.
    """
    missing = [n for n in graph.nodes if n not in clusters.membership]
    if missing:
        raise ContractViolation(f"cluster assignment lacks {len(missing)} graph node(s), e.g. {missing[0]!r}")
    out = []
    for uid in sorted(set(bot_ids)):
        if uid not in graph:
            continue
        tally = Counter(clusters.membership[nb] for nb in graph.neighbors(uid))
        qualifying = [c for c, n in tally.items() if n >= min_edges_per_cluster]
        out.append(BridgingVerdict(uid, len(qualifying) >= 2, frozenset(tally), dict(sorted(tally.items()))))
    return out


@dataclass(frozen=True)
class TypeAssignment:
    flags: frozenset[BotType]
    exclusive: BotType


def finalize_types(
    bots: Iterable[str],
    news_verdicts: Iterable,
    bridging_verdicts: Iterable[BridgingVerdict],
    precedence: Sequence[BotType] = DEFAULT_PRECEDENCE,
) -> dict[str, TypeAssignment]:
    """News/Bridging flags from the verdicts; General only when neither applies."""
    news = {v.user_id for v in news_verdicts if v.is_news_bot}
    bridging = {v.user_id for v in bridging_verdicts if v.is_bridging}
    precedence = [BotType(p) for p in precedence]
    out = {}
    for uid in sorted(set(bots)):
        flags = set()
        if uid in news:
            flags.add(BotType.NEWS)
        if uid in bridging:
            flags.add(BotType.BRIDGING)
        if not flags:
            flags.add(BotType.GENERAL)
        exclusive = next(p for p in precedence if p in flags)
        out[uid] = TypeAssignment(frozenset(flags), exclusive)
    return out


def exclusive_type_map(users: Iterable[str], types: Mapping[str, TypeAssignment]) -> dict[str, str]:
    """Single-label category for every user, ``Human`` for non-bots."""
    return {u: types[u].exclusive.value if u in types else HUMAN for u in users}


def write_bridging_csv(verdicts: Iterable[BridgingVerdict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "is_bridging", "clusters_touched", "edges_per_cluster"])
        for v in verdicts:
            tally = ";".join(f"{c}:{n}" for c, n in v.edges_per_cluster.items())
            w.writerow([v.user_id, int(v.is_bridging), len(v.clusters_touched), tally])


def write_types_csv(types: Mapping[str, TypeAssignment], path: str | Path) -> None:
    order = [BotType.GENERAL, BotType.NEWS, BotType.BRIDGING]
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "flags", "exclusive"])
        for uid in sorted(types):
            t = types[uid]
            w.writerow([uid, "|".join(b.value for b in order if b in t.flags), t.exclusive.value])


def read_types_csv(path: str | Path) -> dict[str, TypeAssignment]:
    out = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for r in csv.DictReader(fh):
            flags = frozenset(BotType(f) for f in r["flags"].split("|") if f)
            out[r["user_id"]] = TypeAssignment(flags, BotType(r["exclusive"]))
    return out

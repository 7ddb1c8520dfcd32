"""Summary tables: user-type proportions per region and centrality means per group.

Standard deviations are population standard deviations. A group with no
members yields an empty cell rather than a zero.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean, pstdev
from typing import Mapping, Sequence

from .corpus import Corpus
from .netgraph.centrality import CentralityReport

REGIONS = ("US", "China", "RestOfWorld")
BOT_TYPES = ("General", "News", "Bridging")
CATEGORIES = BOT_TYPES + ("Human",)
METRICS = ("betweenness", "eigenvector", "total_degree")


def _label(x) -> str:
    return getattr(x, "value", x)


@dataclass(frozen=True)
class ProportionRow:
    region: str
    category: str  # "Bot", "Human" or one of the exclusive user types
    users: int
    user_pct: float
    tweets: int
    tweet_pct: float


def report_proportions(
    type_map: Mapping[str, str], region_labels: Mapping[str, object], corpus: Corpus
) -> list[ProportionRow]:
    """Bot/human split, then the exclusive user types, for every region that has users.

    Users outside the analysed regions are left out. Tweet shares use the
    tweets held in ``corpus``.
    """
    tweets_by_user: dict[str, int] = {}
    for t in corpus.tweets:
        tweets_by_user[t.author_id] = tweets_by_user.get(t.author_id, 0) + 1
    rows = []
    for region in REGIONS:
        members = sorted(u for u, r in region_labels.items() if _label(r) == region)
        if not members:
            continue
        n_users = len(members)
        n_tweets = sum(tweets_by_user.get(u, 0) for u in members)
        cat = {u: _label(type_map.get(u, "Human")) for u in members}

        def row(name: str, who: list[str]) -> ProportionRow:
            tw = sum(tweets_by_user.get(u, 0) for u in who)
            return ProportionRow(
                region, name, len(who), 100.0 * len(who) / n_users, tw, 100.0 * tw / n_tweets if n_tweets else 0.0
            )

        rows.append(row("Bot", [u for u in members if cat[u] != "Human"]))
        rows.append(row("Human", [u for u in members if cat[u] == "Human"]))
        for c in BOT_TYPES:
            rows.append(row(c, [u for u in members if cat[u] == c]))
    return rows


@dataclass(frozen=True)
class MetricCell:
    region: str
    user_type: str
    n: int
    mean: Mapping[str, float] | None  # None for an empty group
    std: Mapping[str, float] | None


def report_centrality_means(
    centralities: CentralityReport,
    type_map: Mapping[str, str],
    region_labels: Mapping[str, object],
    user_types: Sequence[str] = BOT_TYPES,
) -> list[MetricCell]:
    """Mean and population std of each centrality per (region, user type), over graph nodes."""
    groups: dict[tuple[str, str], list[str]] = {}
    for node in sorted(centralities.betweenness):
        key = (_label(region_labels.get(node, "Unknown")), _label(type_map.get(node, "Human")))
        groups.setdefault(key, []).append(node)
    table = {"betweenness": centralities.betweenness, "eigenvector": centralities.eigenvector, "total_degree": centralities.total_degree}
    cells = []
    for region in REGIONS:
        for ut in user_types:
            nodes = groups.get((region, ut), [])
            if not nodes:
                cells.append(MetricCell(region, ut, 0, None, None))
                continue
            mean = {m: fmean(table[m][n] for n in nodes) for m in METRICS}
            std = {m: pstdev([table[m][n] for n in nodes]) for m in METRICS}
            cells.append(MetricCell(region, ut, len(nodes), mean, std))
    return cells


# --------------------------------------------------------------------------
# output


def write_proportions_csv(rows: Sequence[ProportionRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", "category", "users", "user_pct", "tweets", "tweet_pct"])
        for r in rows:
            w.writerow([r.region, r.category, r.users, f"{r.user_pct:.2f}", r.tweets, f"{r.tweet_pct:.2f}"])


def format_proportions(rows: Sequence[ProportionRow]) -> str:
    lines = [f"{'region':<12} {'category':<9} {'users':>6} {'users%':>7} {'tweets':>7} {'tweets%':>8}"]
    for r in rows:
        lines.append(f"{r.region:<12} {r.category:<9} {r.users:>6} {r.user_pct:>7.2f} {r.tweets:>7} {r.tweet_pct:>8.2f}")
    return "\n".join(lines) + "\n"


def write_centrality_means_csv(cells: Sequence[MetricCell], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", "user_type", "n", *(f"{m}_{s}" for m in METRICS for s in ("mean", "std"))])
        for c in cells:
            vals = ["" for _ in range(2 * len(METRICS))] if c.mean is None else [
                f"{v:.6g}" for m in METRICS for v in (c.mean[m], c.std[m])
            ]
            w.writerow([c.region, c.user_type, c.n, *vals])


def format_centrality_means(cells: Sequence[MetricCell]) -> str:
    """Regions down the side, user types across, one line per metric."""
    types = list(dict.fromkeys(c.user_type for c in cells))
    by_key = {(c.region, c.user_type): c for c in cells}
    width = 22
    lines = [f"{'region':<12} {'metric':<13} " + " ".join(f"{t:>{width}}" for t in types)]
    for region in dict.fromkeys(c.region for c in cells):
        for m in METRICS:
            parts = []
            for t in types:
                c = by_key[(region, t)]
                parts.append(f"{'':>{width}}" if c.mean is None else f"{c.mean[m]:.4g} ± {c.std[m]:.4g}".rjust(width))
            lines.append(f"{region:<12} {m:<13} " + " ".join(parts))
    return "\n".join(lines) + "\n"

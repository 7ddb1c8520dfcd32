"""Undirected all-communication network and its pruning."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from ..corpus import Corpus, IngestionError

RELATIONS = ("retweet", "mention", "quote", "reply")
EDGE_HEADER = ["u", "v", "weight", "retweets", "mentions", "quotes", "replies"]


@dataclass(frozen=True)
class EdgeCounts:
    retweet: int = 0
    mention: int = 0
    quote: int = 0
    reply: int = 0

    @property
    def weight(self) -> int:
        return self.retweet + self.mention + self.quote + self.reply

    def add(self, relation: str, n: int = 1) -> "EdgeCounts":
        vals = {r: getattr(self, r) for r in RELATIONS}
        vals[relation] += n
        return EdgeCounts(**vals)


def edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


class CommGraph:
    """Weighted simple graph keyed by unordered user-id pairs.

    Instances are treated as immutable; every transformation returns a new
    graph. Node and neighbour iteration is always in sorted id order.
    """

    def __init__(self, nodes: Iterable[str], edges: Mapping[tuple[str, str], EdgeCounts]):
        node_set = set(nodes)
        clean: dict[tuple[str, str], EdgeCounts] = {}
        for (u, v), counts in edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if counts.weight < 1:
                raise ValueError(f"edge {u!r}-{v!r} has weight < 1")
            key = edge_key(u, v)
            if key in clean:
                raise ValueError(f"duplicate edge {key}")
            clean[key] = counts
            node_set.update(key)
        self.nodes: tuple[str, ...] = tuple(sorted(node_set))
        self.edges: dict[tuple[str, str], EdgeCounts] = dict(sorted(clean.items()))
        adj: dict[str, dict[str, int]] = {n: {} for n in self.nodes}
        for (u, v), c in self.edges.items():
            adj[u][v] = c.weight
            adj[v][u] = c.weight
        self.adj = {n: dict(sorted(nb.items())) for n, nb in adj.items()}

    @classmethod
    def from_weights(cls, weighted_edges: Iterable[tuple[str, str, int]], nodes: Iterable[str] = ()) -> "CommGraph":
        """Convenience constructor; weights are booked as mentions."""
        edges: dict[tuple[str, str], EdgeCounts] = {}
        for u, v, w in weighted_edges:
            key = edge_key(u, v)
            edges[key] = edges.get(key, EdgeCounts()).add("mention", int(w))
        return cls(nodes, edges)

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node: object) -> bool:
        return node in self.adj

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CommGraph) and self.nodes == other.nodes and self.edges == other.edges

    def __repr__(self) -> str:
        return f"CommGraph(n={len(self.nodes)}, m={len(self.edges)})"

    def weight(self, u: str, v: str) -> int:
        return self.adj.get(u, {}).get(v, 0)

    def neighbors(self, u: str) -> dict[str, int]:
        return self.adj[u]

    def degree(self, u: str) -> int:
        return len(self.adj[u])

    def weighted_degree(self, u: str) -> int:
        return sum(self.adj[u].values())

    def total_weight(self) -> int:
        return sum(c.weight for c in self.edges.values())

    def subgraph(self, keep: Iterable[str]) -> "CommGraph":
        keep = set(keep)
        return CommGraph(keep, {k: c for k, c in self.edges.items() if k[0] in keep and k[1] in keep})

    def components(self) -> list[list[str]]:
        """Connected components, each sorted, ordered by their smallest node."""
        seen: set[str] = set()
        out = []
        for start in self.nodes:
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            i = 0
            while i < len(comp):
                for nb in self.adj[comp[i]]:
                    if nb not in seen:
                        seen.add(nb)
                        comp.append(nb)
                i += 1
            out.append(sorted(comp))
        return out


def build_graph(corpus: Corpus) -> CommGraph:
    """Every interaction instance adds one to its relation count; self-interactions are dropped."""
    nodes: set[str] = set()
    counts: dict[tuple[str, str], dict[str, int]] = {}
    for t in corpus.tweets:
        nodes.add(t.author_id)
        for relation, target in t.interaction_targets():
            nodes.add(target)
            if target == t.author_id:
                continue
            slot = counts.setdefault(edge_key(t.author_id, target), dict.fromkeys(RELATIONS, 0))
            slot[relation] += 1
    return CommGraph(nodes, {k: EdgeCounts(**v) for k, v in counts.items()})


def prune(graph: CommGraph, min_edge_weight: int = 10, min_component_size: int = 5) -> CommGraph:
    """Drop light edges, then small components; isolated nodes never survive."""
    if min_edge_weight < 1 or min_component_size < 1:
        raise ValueError("pruning thresholds must be >= 1")
    heavy = {k: c for k, c in graph.edges.items() if c.weight >= min_edge_weight}
    stage = CommGraph((), heavy)
    keep = [n for comp in stage.components() if len(comp) >= max(2, min_component_size) for n in comp]
    return stage.subgraph(keep)


# --------------------------------------------------------------------------
# CSV


def write_edges_csv(graph: CommGraph, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        for (u, v), c in graph.edges.items():
            w.writerow([u, v, c.weight, c.retweet, c.mention, c.quote, c.reply])


def write_nodes_csv(graph: CommGraph, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id"])
        for n in graph.nodes:
            w.writerow([n])


def read_graph_csv(edges_path: str | Path, nodes_path: str | Path | None = None) -> CommGraph:
    try:
        with Path(edges_path).open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        nodes = []
        if nodes_path is not None:
            with Path(nodes_path).open(encoding="utf-8", newline="") as fh:
                nodes = [r["user_id"] for r in csv.DictReader(fh)]
    except OSError as exc:
        raise IngestionError(f"cannot read graph: {exc}") from exc
    edges = {
        edge_key(r["u"], r["v"]): EdgeCounts(int(r["retweets"]), int(r["mentions"]), int(r["quotes"]), int(r["replies"]))
        for r in rows
    }
    return CommGraph(nodes, edges)

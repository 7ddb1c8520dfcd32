"""Two-phase Louvain modularity optimisation on weighted undirected graphs."""

from __future__ import annotations

import csv
import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .graph import CommGraph


@dataclass(frozen=True)
class ClusterAssignment:
    membership: Mapping[str, int]
    modularity: float
    seed: int
    resolution: float = 1.0
    level_modularity: tuple[float, ...] = field(default=(), compare=False)

    @property
    def n_clusters(self) -> int:
        return len(set(self.membership.values()))

    def relabeled(self, mapping: Mapping[int, int]) -> "ClusterAssignment":
        return ClusterAssignment(
            {n: mapping[c] for n, c in self.membership.items()},
            self.modularity,
            self.seed,
            self.resolution,
            self.level_modularity,
        )


def modularity(graph: CommGraph, membership: Mapping[str, int], resolution: float = 1.0) -> float:
    """Weighted Newman-Girvan modularity; 0 for a graph without edges."""
    two_m = 2.0 * graph.total_weight()
    if two_m == 0:
        return 0.0
    internal: dict[int, float] = {}
    tot: dict[int, float] = {}
    for (u, v), c in graph.edges.items():
        if membership[u] == membership[v]:
            internal[membership[u]] = internal.get(membership[u], 0.0) + 2.0 * c.weight
    for n in graph.nodes:
        cid = membership[n]
        tot[cid] = tot.get(cid, 0.0) + graph.weighted_degree(n)
    q = 0.0
    for cid in sorted(tot):
        q += internal.get(cid, 0.0) / two_m - resolution * (tot[cid] / two_m) ** 2
    return q


class _Level:
    """Aggregated graph: symmetric neighbour weights plus self-loop mass.

    ``loops[i]`` is the ordered-pair internal weight of super-node ``i`` (twice
    the collapsed edge weight), so ``k[i] = loops[i] + sum(adj[i].values())``.
    """

    def __init__(self, adj: list[dict[int, float]], loops: list[float]):
        self.adj = adj
        self.loops = loops
        self.k = [loops[i] + sum(adj[i].values()) for i in range(len(adj))]
        self.two_m = sum(self.k)

    def __len__(self) -> int:
        return len(self.adj)

    def quality(self, comm: list[int], resolution: float) -> float:
        internal: dict[int, float] = {}
        tot: dict[int, float] = {}
        for i in range(len(self)):
            c = comm[i]
            internal[c] = internal.get(c, 0.0) + self.loops[i]
            tot[c] = tot.get(c, 0.0) + self.k[i]
            for j, w in self.adj[i].items():
                if comm[j] == c:
                    internal[c] += w
        return sum(internal[c] / self.two_m - resolution * (tot[c] / self.two_m) ** 2 for c in sorted(tot))


def _move_nodes(
    level: _Level,
    rng: random.Random,
    resolution: float,
    max_passes: int,
    init: list[int] | None = None,
    active: list[int] | None = None,
) -> tuple[list[int], bool]:
    """Greedy single-node moves until no node can improve modularity.

    Nodes wait in a queue, first in a shuffled order; when a node moves, its
    neighbours outside the new cluster are queued again. ``active`` limits
    the initial queue to nodes near a local change. An emptied cluster id
    stays available, so a node may also split off on its own when that is
    strictly better. ``max_passes`` caps the work at that many visits per node.
    """
    n = len(level)
    comm = list(range(n)) if init is None else list(init)
    k, two_m = level.k, level.two_m
    tot = [0.0] * n
    for i in range(n):
        tot[comm[i]] += k[i]
    eps = 1e-12 * max(1.0, max(k))
    empty = [c for c in range(n) if tot[c] == 0]  # min-heap, validated lazily
    order = list(range(n)) if active is None else sorted(set(active))
    rng.shuffle(order)
    queue = deque(order)
    queued = [False] * n
    for i in order:
        queued[i] = True
    moved_any = False
    budget = max_passes * n
    while queue and budget > 0:
        budget -= 1
        i = queue.popleft()
        queued[i] = False
        ci = comm[i]
        links: dict[int, float] = {}
        for j, w in level.adj[i].items():
            links[comm[j]] = links.get(comm[j], 0.0) + w
        tot[ci] -= k[i]
        scale = resolution * k[i] / two_m
        best_c = ci
        best_gain = links.get(ci, 0.0) - scale * tot[ci]
        candidates = sorted(links)
        if tot[ci] > 0:
            while empty and tot[empty[0]] != 0:
                heapq.heappop(empty)
            if empty and empty[0] not in links:
                candidates = sorted(candidates + [empty[0]])
        for c in candidates:
            if c == ci:
                continue
            gain = links.get(c, 0.0) - scale * tot[c]
            if gain > best_gain + eps:
                best_c, best_gain = c, gain
        tot[best_c] += k[i]
        if best_c != ci:
            comm[i] = best_c
            moved_any = True
            if tot[ci] == 0:
                heapq.heappush(empty, ci)
            for j in level.adj[i]:
                if comm[j] != best_c and not queued[j]:
                    queued[j] = True
                    queue.append(j)
    return comm, moved_any


def _aggregate(level: _Level, comm: list[int]) -> tuple[_Level, list[int]]:
    relabel: dict[int, int] = {}
    for c in comm:
        relabel.setdefault(c, len(relabel))
    dense = [relabel[c] for c in comm]
    size = len(relabel)
    adj: list[dict[int, float]] = [{} for _ in range(size)]
    loops = [0.0] * size
    for i in range(len(level)):
        ci = dense[i]
        loops[ci] += level.loops[i]
        for j, w in level.adj[i].items():
            cj = dense[j]
            if ci == cj:
                loops[ci] += w
            else:
                adj[ci][cj] = adj[ci].get(cj, 0.0) + w
    return _Level(adj, loops), dense


def _multilevel(
    base: _Level, start: list[int], rng: random.Random, resolution: float, max_passes: int
) -> tuple[list[int], list[float]]:
    """Classic local-move / aggregate cycle, starting from partition ``start``."""
    level, dense = _aggregate(base, start)
    node_comm = list(dense)
    history = []
    while len(level) > 1:
        comm, moved = _move_nodes(level, rng, resolution, max_passes)
        if not moved:
            break
        history.append(level.quality(comm, resolution))
        level, dense = _aggregate(level, comm)
        node_comm = [dense[c] for c in node_comm]
    return node_comm, history


def _dissolve(base: _Level, part: list[int], rng: random.Random, resolution: float, max_passes: int) -> list[int] | None:
    """Break each cluster into singletons in turn and let its nodes re-settle.

    Returns the first strictly better partition found, or None. This escapes
    optima where a whole cluster would have to split between two neighbours,
    which no single move or merge can reach.
    """
    q0 = base.quality(part, resolution)
    n = len(base)
    for cid in sorted(set(part)):
        members = [i for i in range(n) if part[i] == cid]
        if len(members) < 2:
            continue
        used = set(part)
        fresh = (c for c in range(n) if c not in used)
        trial = list(part)
        for i in members[1:]:
            trial[i] = next(fresh)
        trial, _ = _move_nodes(base, rng, resolution, max_passes, init=trial, active=members)
        if base.quality(trial, resolution) > q0 + 1e-12:
            return trial
    return None


def _merge_adjacent(
    base: _Level, part: list[int], rng: random.Random, resolution: float, max_passes: int
) -> list[int] | None:
    """Merge each pair of linked clusters in turn and let nodes re-settle.

    Lets a cluster hand nodes to one neighbour and the rest to another, a
    move that is invisible to single-node steps. Returns the first strictly
    better partition, or None.
    """
    q0 = base.quality(part, resolution)
    pairs = sorted({(min(part[i], part[j]), max(part[i], part[j])) for i in range(len(base)) for j in base.adj[i] if part[i] != part[j]})
    for a, b in pairs:
        trial = [a if c == b else c for c in part]
        members = [i for i, c in enumerate(trial) if c == a]
        trial, _ = _move_nodes(base, rng, resolution, max_passes, init=trial, active=members)
        if base.quality(trial, resolution) > q0 + 1e-12:
            return trial
    return None


def _forced_moves(
    base: _Level, part: list[int], rng: random.Random, resolution: float, max_passes: int
) -> list[int] | None:
    """Push one boundary node into a neighbouring cluster, then re-settle.

    A one-step lookahead that can trigger chains of follow-up moves.
    """
    q0 = base.quality(part, resolution)
    for i in range(len(base)):
        for c in sorted({part[j] for j in base.adj[i]} - {part[i]}):
            trial = list(part)
            trial[i] = c
            trial, _ = _move_nodes(base, rng, resolution, max_passes, init=trial, active=list(base.adj[i]))
            if base.quality(trial, resolution) > q0 + 1e-12:
                return trial
    return None


_CHEAP = (_dissolve, _merge_adjacent)
_FULL = (_dissolve, _merge_adjacent, _forced_moves)


def _optimise(
    base: _Level,
    rng: random.Random,
    resolution: float,
    max_passes: int,
    part: list[int],
    perturbations,
) -> tuple[list[int], list[float]]:
    """Multilevel Louvain plus node-level refinement, then perturbations, to a fixed point."""
    best_q = base.quality(part, resolution)
    history = [best_q]
    while True:
        cand, hist = _multilevel(base, part, rng, resolution, max_passes)
        history.extend(hist)
        cand, _ = _move_nodes(base, rng, resolution, max_passes, init=cand)
        q = base.quality(cand, resolution)
        if q <= best_q + 1e-12:
            for step in perturbations:
                cand = step(base, part, rng, resolution, max_passes)
                if cand is not None:
                    break
            else:
                return part, history
            q = base.quality(cand, resolution)
        part, best_q = cand, q
        history.append(q)


def louvain(
    graph: CommGraph,
    seed: int = 0,
    resolution: float = 1.0,
    max_passes: int = 1000,
    restarts: int = 8,
) -> ClusterAssignment:
    """Louvain clustering.

    Nodes are visited in a seed-shuffled order at every level. A node moves
    only for a strict modularity gain, and among equally good target clusters
    the smallest cluster id wins. After the multilevel phase converges, nodes
    of the original graph get one more round of single moves, and each
    cluster is tentatively dissolved, and each linked pair of clusters
    tentatively merged, with nodes then re-placed; any strict
    improvement is aggregated again, until modularity stops rising. ``restarts``
    independent visit orders are drawn from ``seed`` and the best partition
    is kept (earliest wins ties).

    Cluster ids in the result are dense, with cluster 0 holding the smallest
    node id.
    """
    if len(graph) == 0:
        raise ValueError("cannot cluster an empty graph")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    nodes = graph.nodes
    index = {n: i for i, n in enumerate(nodes)}
    if graph.total_weight() == 0:
        return ClusterAssignment({n: i for i, n in enumerate(nodes)}, 0.0, seed, resolution, (0.0,))

    adj = [{index[nb]: float(w) for nb, w in graph.adj[n].items()} for n in nodes]
    base = _Level(adj, [0.0] * len(nodes))
    rng = random.Random(seed)
    best = None
    singletons = list(range(len(nodes)))
    for _ in range(restarts):
        part, history = _optimise(base, random.Random(rng.getrandbits(64)), resolution, max_passes, singletons, _CHEAP)
        q = base.quality(part, resolution)
        if best is None or q > best[0] + 1e-12:
            best = (q, part, history)
    _, part, history = best
    node_comm, polish = _optimise(base, rng, resolution, max_passes, part, _FULL)
    history = history + polish[1:]

    first_seen: dict[int, int] = {}
    for c in node_comm:
        first_seen.setdefault(c, len(first_seen))
    membership = {n: first_seen[node_comm[i]] for i, n in enumerate(nodes)}
    q = modularity(graph, membership, resolution)
    return ClusterAssignment(membership, q, seed, resolution, tuple(history))


def write_clusters_csv(assign: ClusterAssignment, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "cluster"])
        for n in sorted(assign.membership):
            w.writerow([n, assign.membership[n]])


def read_clusters_csv(path: str | Path, modularity_value: float = float("nan"), seed: int = 0) -> ClusterAssignment:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        membership = {r["user_id"]: int(r["cluster"]) for r in csv.DictReader(fh)}
    return ClusterAssignment(membership, modularity_value, seed)

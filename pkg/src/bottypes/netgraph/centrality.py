"""Betweenness, eigenvector and total-degree centrality."""

from __future__ import annotations

import csv
import heapq
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import CommGraph

EIG_TOL = 1e-10
EIG_MAX_ITER = 1000


@dataclass(frozen=True)
class CentralityReport:
    betweenness: dict[str, float]
    eigenvector: dict[str, float]
    total_degree: dict[str, float]
    eigenvalue: float = 0.0

    def rows(self) -> list[tuple[str, float, float, float]]:
        return [(n, self.betweenness[n], self.eigenvector[n], self.total_degree[n]) for n in sorted(self.betweenness)]


def _unweighted_sssp(graph: CommGraph, s: str):
    order, preds = [], {s: []}
    sigma = {s: 1.0}
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        order.append(v)
        for w in graph.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0.0
                preds[w] = []
                q.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def _weighted_sssp(graph: CommGraph, s: str):
    """Dijkstra with distance 1/weight; path lengths within 1e-12 relative count as equal."""
    order, preds = [], {s: []}
    sigma = {s: 1.0}
    dist = {s: 0.0}
    done: set[str] = set()
    heap = [(0.0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        order.append(v)
        for w, wt in graph.adj[v].items():
            nd = d + 1.0 / wt
            if w in done:
                continue
            if w not in dist or nd < dist[w] * (1 - 1e-12):
                dist[w] = nd
                sigma[w] = sigma[v]
                preds[w] = [v]
                heapq.heappush(heap, (nd, w))
            elif abs(nd - dist[w]) <= 1e-12 * max(nd, dist[w]):
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, preds, sigma


def betweenness(graph: CommGraph, weighted: bool = False) -> dict[str, float]:
    """Brandes pair-dependency accumulation, normalised by (n-1)(n-2)/2."""
    bc = dict.fromkeys(graph.nodes, 0.0)
    sssp = _weighted_sssp if weighted else _unweighted_sssp
    for s in graph.nodes:
        order, preds, sigma = sssp(graph, s)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    n = len(graph.nodes)
    # each unordered pair was counted from both endpoints
    scale = 0.5 / ((n - 1) * (n - 2) / 2) if n > 2 else 0.0
    return {v: bc[v] * scale for v in graph.nodes}


def _power_iteration(rows: np.ndarray, cols: np.ndarray, w: np.ndarray, size: int) -> tuple[np.ndarray, float]:
    """Dominant eigenvector of one connected block, iterating with A + I.

    The identity shift keeps bipartite blocks from oscillating without
    changing the eigenvectors.
    """
    x = np.full(size, 1.0 / math.sqrt(size))
    if len(w) == 0:
        return x, 0.0
    for _ in range(EIG_MAX_ITER):
        y = np.bincount(rows, weights=w * x[cols], minlength=size) + x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < EIG_TOL:
            x = y
            break
        x = y
    ax = np.bincount(rows, weights=w * x[cols], minlength=size)
    return x, float(x @ ax)


def eigenvector(graph: CommGraph, per_component: bool = False) -> tuple[dict[str, float], float]:
    """Eigenvector centrality on the weighted adjacency.

    Each connected component is iterated separately. By default the result is
    the limit of power iteration on the whole graph from a uniform start: only
    the component(s) with the largest eigenvalue keep non-zero entries, and
    the vector has unit L2 norm. With ``per_component`` every component gets
    its own unit-norm vector instead.
    """
    out = dict.fromkeys(graph.nodes, 0.0)
    if not graph.nodes:
        return out, 0.0
    blocks = []
    for comp in graph.components():
        local = {n: i for i, n in enumerate(comp)}
        r, c, w = [], [], []
        for u in comp:
            for v, wt in graph.adj[u].items():
                r.append(local[u])
                c.append(local[v])
                w.append(float(wt))
        x, lam = _power_iteration(np.array(r, dtype=np.int64), np.array(c, dtype=np.int64), np.array(w), len(comp))
        blocks.append((comp, x, lam))

    lam_max = max(lam for _, _, lam in blocks)
    if per_component:
        for comp, x, _ in blocks:
            out.update(zip(comp, x.tolist()))
        return out, lam_max

    tied = [(comp, x) for comp, x, lam in blocks if lam >= lam_max * (1 - 1e-9)]
    norm = math.sqrt(sum(float(x.sum()) ** 2 for _, x in tied))
    for comp, x in tied:
        out.update(zip(comp, (x * float(x.sum()) / norm).tolist()))
    return out, lam_max


def total_degree(graph: CommGraph) -> dict[str, float]:
    """Weighted degree over (n - 1) times the heaviest edge weight."""
    n = len(graph.nodes)
    w_max = max((c.weight for c in graph.edges.values()), default=0)
    if n < 2 or w_max == 0:
        return dict.fromkeys(graph.nodes, 0.0)
    denom = (n - 1) * w_max
    return {v: graph.weighted_degree(v) / denom for v in graph.nodes}


def centralities(
    graph: CommGraph,
    weighted_betweenness: bool = False,
    per_component_eigenvector: bool = False,
) -> CentralityReport:
    if len(graph) == 0:
        raise ValueError("centralities of an empty graph are undefined")
    eig, lam = eigenvector(graph, per_component_eigenvector)
    return CentralityReport(betweenness(graph, weighted_betweenness), eig, total_degree(graph), lam)


def write_centrality_csv(report: CentralityReport, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "betweenness", "eigenvector", "total_degree"])
        for n, b, e, d in report.rows():
            w.writerow([n, repr(b), repr(e), repr(d)])


def read_centrality_csv(path: str | Path) -> CentralityReport:
    b, e, d = {}, {}, {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for r in csv.DictReader(fh):
            b[r["user_id"]] = float(r["betweenness"])
            e[r["user_id"]] = float(r["eigenvector"])
            d[r["user_id"]] = float(r["total_degree"])
    return CentralityReport(b, e, d)

"""Planted-partition sweep: how well does Louvain recover two blocks as p_out grows?

For each p_out, clusters ``--seeds`` random graphs (2 blocks, ``--block-size``
nodes each, in-block density ``--p-in``) and prints mean and minimum NMI
against the planted blocks, next to networkx's Louvain as a reference.

    python scripts/louvain_planted.py --seeds 20
"""

from __future__ import annotations

import argparse
import statistics
import time

import networkx as nx
from sklearn.metrics import normalized_mutual_info_score

from bottypes.netgraph import louvain
from bottypes.synth import planted_partition


def _nx_labels(graph, seed):
    h = nx.Graph()
    h.add_nodes_from(graph.nodes)
    h.add_weighted_edges_from((u, v, c.weight) for (u, v), c in graph.edges.items())
    comms = nx.community.louvain_communities(h, seed=seed)
    return {v: i for i, comm in enumerate(comms) for v in comm}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--block-size", type=int, default=30)
    ap.add_argument("--p-in", type=float, default=0.3)
    ap.add_argument("--p-out", type=float, nargs="+", default=[0.01, 0.03, 0.05, 0.08, 0.12])
    args = ap.parse_args()

    print(f"{'p_out':>6} {'mean NMI':>9} {'min NMI':>8} {'nx mean':>8} {'Q':>7} {'secs':>6}")
    for p_out in args.p_out:
        ours, ref, qs = [], [], []
        t0 = time.perf_counter()
        for seed in range(args.seeds):
            g, truth = planted_partition(2, args.block_size, args.p_in, p_out, seed)
            c = louvain(g, seed=seed)
            planted = [truth[v] for v in g.nodes]
            ours.append(normalized_mutual_info_score(planted, [c.membership[v] for v in g.nodes]))
            nx_lab = _nx_labels(g, seed)
            ref.append(normalized_mutual_info_score(planted, [nx_lab[v] for v in g.nodes]))
            qs.append(c.modularity)
        secs = time.perf_counter() - t0
        print(
            f"{p_out:>6.2f} {statistics.fmean(ours):>9.3f} {min(ours):>8.3f} "
            f"{statistics.fmean(ref):>8.3f} {statistics.fmean(qs):>7.3f} {secs:>6.1f}"
        )


if __name__ == "__main__":
    main()

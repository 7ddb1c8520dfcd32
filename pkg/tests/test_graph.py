import random
from datetime import datetime, timezone

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bottypes.corpus import Corpus, Tweet, UserProfile
from bottypes.netgraph import CommGraph, EdgeCounts, build_graph, prune
from bottypes.netgraph.graph import read_graph_csv, write_edges_csv, write_nodes_csv

from oracles import random_graph

T0 = datetime(2023, 2, 1, tzinfo=timezone.utc)


def test_every_interaction_counts_once():
    tweets = (
        Tweet("1", "a", "x", T0, retweet_of_user="b"),
        Tweet("2", "a", "x", T0, reply_to_user="b", mentions=("b", "c")),
        Tweet("3", "b", "x", T0, quote_of_user="a"),
        Tweet("4", "a", "x", T0, mentions=("a",)),
    )
    g = build_graph(Corpus({u: UserProfile(u) for u in "abc"}, tweets))
    assert g.edges[("a", "b")] == EdgeCounts(retweet=1, mention=1, quote=1, reply=1)
    assert g.weight("a", "b") == 4 and g.weight("c", "a") == 1
    assert set(g.nodes) == {"a", "b", "c"}


def test_graph_refuses_bad_edges():
    with pytest.raises(ValueError):
        CommGraph(["a"], {("a", "a"): EdgeCounts(mention=1)})
    with pytest.raises(ValueError):
        CommGraph([], {("a", "b"): EdgeCounts()})
    with pytest.raises(ValueError):
        CommGraph([], {("a", "b"): EdgeCounts(mention=1), ("b", "a"): EdgeCounts(mention=1)})


def test_prune_boundaries():
    g = CommGraph.from_weights([("a", "b", 10), ("b", "c", 9)] + [(f"k{i}", f"k{i+1}", 12) for i in range(4)])
    out = prune(g, 10, 2)
    assert ("a", "b") in out.edges and ("b", "c") not in out.edges and "c" not in out
    out = prune(g, 10, 5)
    assert set(out.nodes) == {f"k{i}" for i in range(5)}


def test_prune_thresholds_validated():
    with pytest.raises(ValueError):
        prune(CommGraph([], {}), 0, 5)


def _nx(g: CommGraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_weighted_edges_from((u, v, c.weight) for (u, v), c in g.edges.items())
    return h


@given(st.integers(0, 2**32 - 1), st.integers(1, 15), st.integers(1, 8))
def test_prune_matches_networkx_route(seed, min_w, min_size):
    g = random_graph(random.Random(seed), 18, 0.25, max_weight=15)
    ours = prune(g, min_w, min_size)
    h = _nx(g)
    h.remove_edges_from([(u, v) for u, v, w in h.edges(data="weight") if w < min_w])
    keep = {n for comp in nx.connected_components(h) if len(comp) >= max(2, min_size) for n in comp}
    h = h.subgraph(keep)
    assert set(ours.nodes) == set(h.nodes)
    assert {frozenset(e) for e in ours.edges} == {frozenset(e) for e in h.edges}


@given(st.integers(0, 2**32 - 1))
def test_prune_idempotent_and_monotone(seed):
    g = random_graph(random.Random(seed), 20, 0.3, max_weight=20)
    once = prune(g)
    assert prune(once) == once
    assert set(once.nodes) <= set(g.nodes)
    assert set(prune(g, 12, 5).edges) <= set(once.edges)


def test_components_sorted():
    g = CommGraph.from_weights([("d", "e", 1), ("a", "c", 1), ("c", "b", 1)], nodes=["z"])
    assert g.components() == [["a", "b", "c"], ["d", "e"], ["z"]]


def test_csv_round_trip(tmp_path):
    g = random_graph(random.Random(0), 12, 0.4, max_weight=9)
    write_edges_csv(g, tmp_path / "e.csv")
    write_nodes_csv(g, tmp_path / "n.csv")
    assert read_graph_csv(tmp_path / "e.csv", tmp_path / "n.csv") == g

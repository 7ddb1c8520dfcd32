import pytest
from hypothesis import given
from hypothesis import strategies as st

from bottypes.corpus import ContractViolation
from bottypes.netgraph import BotType, BridgingVerdict, ClusterAssignment, CommGraph, bridging_bots, exclusive_type_map, finalize_types, louvain
from bottypes.netgraph.bridging import read_types_csv, write_bridging_csv, write_types_csv
from bottypes.newsbot import NewsBotVerdict, Trigger
from bottypes.synth import planted_bridging


def _assign(m):
    return ClusterAssignment(m, 0.0, 0)


GRAPH = CommGraph.from_weights([("bot", "x1", 10), ("bot", "x2", 10), ("bot", "y1", 10), ("x1", "x2", 10)])
CLUSTERS = _assign({"bot": 0, "x1": 0, "x2": 0, "y1": 1})


def test_two_clusters_bridge():
    (v,) = bridging_bots(GRAPH, CLUSTERS, ["bot"])
    assert v.is_bridging and v.clusters_touched == {0, 1} and v.edges_per_cluster == {0: 2, 1: 1}


def test_min_edges_per_cluster():
    (v,) = bridging_bots(GRAPH, CLUSTERS, ["bot"], min_edges_per_cluster=2)
    assert not v.is_bridging


def test_single_cluster_does_not_bridge():
    (v,) = bridging_bots(GRAPH, _assign({"bot": 0, "x1": 0, "x2": 0, "y1": 0}), ["bot"])
    assert not v.is_bridging


def test_bots_outside_graph_skipped_and_missing_cluster_refused():
    assert [v.user_id for v in bridging_bots(GRAPH, CLUSTERS, ["bot", "ghost"])] == ["bot"]
    with pytest.raises(ContractViolation):
        bridging_bots(GRAPH, _assign({"bot": 0}), ["bot"])


@pytest.mark.parametrize("seed", range(10))
def test_planted_bridges_recovered(seed):
    case = planted_bridging(seed=seed)
    verdicts = bridging_bots(case.graph, louvain(case.graph, seed=seed), case.bots)
    assert {v.user_id for v in verdicts if v.is_bridging} == case.bridges


@given(st.permutations(range(4)))
def test_label_permutation_invariance(perm):
    g = CommGraph.from_weights([("b", "p", 1), ("b", "q", 1), ("b", "r", 1), ("c", "p", 1), ("c", "s", 1)])
    base = _assign({"b": 0, "c": 1, "p": 0, "q": 1, "r": 2, "s": 3})
    a = bridging_bots(g, base, ["b", "c"])
    b = bridging_bots(g, base.relabeled(dict(enumerate(perm))), ["b", "c"])
    assert [(v.user_id, v.is_bridging, len(v.clusters_touched)) for v in a] == [
        (v.user_id, v.is_bridging, len(v.clusters_touched)) for v in b
    ]


def _news(uid, yes):
    return NewsBotVerdict(uid, yes, Trigger.PROFILE_SUBSTRING if yes else Trigger.NONE)


@given(st.sets(st.sampled_from("abcdefgh")), st.sets(st.sampled_from("abcdefgh")), st.sets(st.sampled_from("abcdefgh")))
def test_type_flags_exclusive(bots, news, bridging):
    types = finalize_types(
        bots,
        [_news(u, u in news) for u in "abcdefgh"],
        [BridgingVerdict(u, u in bridging, frozenset(), {}) for u in "abcdefgh"],
    )
    assert set(types) == bots
    for uid, t in types.items():
        assert t.flags
        assert (BotType.GENERAL in t.flags) == (uid not in news and uid not in bridging)
        assert (BotType.NEWS in t.flags) == (uid in news)
        assert t.exclusive in t.flags


def test_precedence_controls_exclusive_type():
    news = [_news("a", True)]
    bridging = [BridgingVerdict("a", True, frozenset({0, 1}), {0: 1, 1: 1})]
    assert finalize_types(["a"], news, bridging)["a"].exclusive is BotType.BRIDGING
    flipped = finalize_types(["a"], news, bridging, precedence=("News", "Bridging", "General"))
    assert flipped["a"].exclusive is BotType.NEWS and flipped["a"].flags == {BotType.NEWS, BotType.BRIDGING}


def test_exclusive_map_and_csv(tmp_path):
    types = finalize_types(["a", "b"], [_news("a", True)], [])
    assert exclusive_type_map(["a", "b", "h"], types) == {"a": "News", "b": "General", "h": "Human"}
    write_types_csv(types, tmp_path / "t.csv")
    assert read_types_csv(tmp_path / "t.csv") == types
    write_bridging_csv(bridging_bots(GRAPH, CLUSTERS, ["bot"]), tmp_path / "b.csv")
    assert (tmp_path / "b.csv").read_text().splitlines()[1] == "bot,1,2,0:2;1:1"

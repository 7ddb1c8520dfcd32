from .bridging import (
    HUMAN,
    BotType,
    BridgingVerdict,
    TypeAssignment,
    bridging_bots,
    exclusive_type_map,
    finalize_types,
)
from .centrality import CentralityReport, betweenness, centralities, eigenvector, total_degree
from .graph import CommGraph, EdgeCounts, build_graph, prune
from .louvain import ClusterAssignment, louvain, modularity

__all__ = [
    "HUMAN",
    "BotType",
    "BridgingVerdict",
    "CentralityReport",
    "ClusterAssignment",
    "CommGraph",
    "EdgeCounts",
    "TypeAssignment",
    "betweenness",
    "bridging_bots",
    "build_graph",
    "centralities",
    "eigenvector",
    "exclusive_type_map",
    "finalize_types",
    "louvain",
    "modularity",
    "prune",
    "total_degree",
]

"""One-call construction of every artifact for a point set."""

from __future__ import annotations

from dataclasses import dataclass, field

from .decomposition import HeavyPathLabelling, TieBreak, heavy_path_decompose
from .metric import EuclideanMetric, Hypercube, Metric
from .nettree import NetTreeParams, build_net_tree
from .quadtree import build_compressed_quadtree
from .routing import RoutingTable, make_routing_tables
from .spanner import PathOracle, SpannerGraph, build_spanner
from .tree import RootedTree
from .wspd import SeparationIndex, Wspd, build_wspd_doubling, build_wspd_euclidean


@dataclass
class Build:
    metric: Metric
    s: float
    tree: RootedTree
    hp: HeavyPathLabelling
    wspd: Wspd
    graph: SpannerGraph
    tables: dict[int, RoutingTable]
    index: SeparationIndex
    tau: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.metric.n

    @property
    def kind(self) -> str:
        return self.wspd.kind

    def path_oracle(self) -> PathOracle:
        return PathOracle(self.graph, self.index)


def build_pipeline(
    metric: Metric,
    s: float,
    *,
    doubling: bool | None = None,
    tau: float = 11.0,
    root_cube: Hypercube | None = None,
    tie_break: TieBreak | None = None,
) -> Build:
    """Quadtree path for Euclidean metrics, net-tree path otherwise (or when
    ``doubling`` is set)."""
    if doubling is None:
        doubling = not isinstance(metric, EuclideanMetric)
    if doubling:
        tree = build_net_tree(metric, NetTreeParams(tau))
        w_builder = build_wspd_doubling
    else:
        tree = build_compressed_quadtree(metric, root_cube)
        w_builder = build_wspd_euclidean
        tau = None
    hp = heavy_path_decompose(tree, tie_break)
    w = w_builder(tree, s)
    g = build_spanner(w, hp, metric)
    tables = make_routing_tables(g)
    return Build(metric, s, tree, hp, w, g, tables, SeparationIndex(w, hp), tau)

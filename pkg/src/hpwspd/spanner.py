"""Heavy path WSPD spanner and the centralized path construction."""

from __future__ import annotations

from dataclasses import dataclass

from .decomposition import HeavyPathLabelling
from .errors import CorruptionError, InputError
from .metric import Metric
from .wspd import SeparationIndex, Wspd


@dataclass(frozen=True)
class SpannerEdge:
    u: int  # label of r(a)
    v: int  # label of r(b)
    pair: int  # index into Wspd.pairs
    a: int
    b: int
    length: float


class SpannerGraph:
    """Vertices are leaf labels 1..n.  ``adj[u]`` maps neighbour label to edge index."""

    def __init__(self, n: int, edges: list[SpannerEdge], metric: Metric, hp: HeavyPathLabelling, w: Wspd):
        self.n = n
        self.edges = edges
        self.metric = metric
        self.hp = hp
        self.wspd = w
        self.adj: list[dict[int, int]] = [dict() for _ in range(n + 1)]
        for i, e in enumerate(edges):
            if e.u == e.v:
                raise CorruptionError(f"pair {e.pair} produced a self-loop at label {e.u}")
            if e.v in self.adj[e.u]:
                raise CorruptionError(f"pair {e.pair} duplicates edge {{{e.u},{e.v}}}")
            self.adj[e.u][e.v] = i
            self.adj[e.v][e.u] = i

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def point(self, x: int) -> int:
        return self.hp.point_of_label[x]

    def dist(self, x: int, y: int) -> float:
        """Metric distance between the points labelled x and y."""
        if x == y:
            return 0.0
        return self.metric.distance(self.point(x), self.point(y))

    def weight(self, x: int, y: int) -> float:
        return self.edges[self.adj[x][y]].length

    def path_length(self, path: list[int]) -> float:
        total = 0.0
        for x, y in zip(path, path[1:]):
            if y not in self.adj[x]:
                raise CorruptionError(f"{x}->{y} is not an edge")
            total += self.weight(x, y)
        return total


def build_spanner(w: Wspd, hp: HeavyPathLabelling, metric: Metric | None = None) -> SpannerGraph:
    """One edge per pair {a, b}, joining r(a) and r(b)."""
    metric = metric or w.tree.metric
    edges = []
    for k, (a, b) in enumerate(w.pairs):
        u, v = hp.rep_label(a), hp.rep_label(b)
        length = metric.distance(hp.point_of_label[u], hp.point_of_label[v]) if u != v else 0.0
        edges.append(SpannerEdge(u, v, k, a, b, length))
    return SpannerGraph(hp.n, edges, metric, hp, w)


def build_path(g: SpannerGraph, index: SeparationIndex, x_p: int, x_q: int) -> list[int]:
    """Vertex labels from p to q: recurse to r(a), cross the pair's edge, recurse from r(b)."""
    if x_p == x_q:
        return []
    return [x_p] + [v for _, v, _ in build_path_edges(g, index, x_p, x_q)]


def build_path_edges(g: SpannerGraph, index: SeparationIndex, x_p: int, x_q: int) -> list[tuple[int, int, int]]:
    """Edges (u, v, recursion depth) of build_path in path order; the top call is depth 0."""
    out = []

    def walk(x: int, y: int, depth: int) -> None:
        if x == y:
            return
        _, a, b = index.oriented(x, y)
        ra, rb = g.hp.rep_label(a), g.hp.rep_label(b)
        walk(x, ra, depth + 1)
        if rb not in g.adj[ra]:
            raise CorruptionError(f"missing spanner edge {{{ra},{rb}}}")
        out.append((ra, rb, depth))
        walk(rb, y, depth + 1)

    walk(x_p, x_q, 0)
    return out


class PathOracle:
    """Memoized length and hop count of build_path for every label pair."""

    def __init__(self, g: SpannerGraph, index: SeparationIndex) -> None:
        self.g = g
        self.index = index
        self._memo: dict[tuple[int, int], tuple[float, int]] = {}

    def measure(self, x: int, y: int) -> tuple[float, int]:
        if x == y:
            return 0.0, 0
        key = (x, y)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        _, a, b = self.index.oriented(x, y)
        ra, rb = self.g.hp.rep_label(a), self.g.hp.rep_label(b)
        l1, h1 = self.measure(x, ra)
        l2, h2 = self.measure(rb, y)
        res = (l1 + self.g.weight(ra, rb) + l2, h1 + 1 + h2)
        self._memo[key] = res
        return res


def check_label(g: SpannerGraph, x: int) -> None:
    if not (isinstance(x, int) and 1 <= x <= g.n):
        raise InputError(f"label {x!r} outside 1..{g.n}")

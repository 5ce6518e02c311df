"""Net trees for point sets in an abstract (doubling) metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, TreeError
from .metric import Metric, set_diameter
from .tree import RootedTree

LEAF_LEVEL = -math.inf


@dataclass(frozen=True)
class NetTreeParams:
    tau: float = 11.0

    def __post_init__(self) -> None:
        if not (self.tau >= 11 and math.isfinite(self.tau)):
            raise InputError(f"tau must be >= 11, got {self.tau!r}")

    @property
    def covering_factor(self) -> float:
        """2τ/(τ−1)."""
        return 2 * self.tau / (self.tau - 1)

    @property
    def packing_factor(self) -> float:
        """(τ−5)/(2(τ−1))."""
        return (self.tau - 5) / (2 * (self.tau - 1))

    def power(self, level: float) -> float:
        """τ^level, with τ^(−∞) = 0."""
        return 0.0 if level == LEAF_LEVEL else self.tau ** level


class NetTree(RootedTree):
    """``level[a]`` is an int for internal nodes and ``-inf`` for leaves.

    ``rep_hm[a]`` is the construction representative (a point index); it is
    unrelated to the heavy-path representative chosen later.
    """

    def __init__(self, parent, children, point, root, metric: Metric, level, rep_hm, params: NetTreeParams):
        super().__init__(parent, children, point, root, metric.n)
        self.metric = metric
        self.level: list[float] = level
        self.rep_hm: list[int] = rep_hm
        self.params = params

    def radius(self, a: int) -> float:
        """Covering radius (2τ/(τ−1))·τ^level(a)."""
        return self.params.covering_factor * self.params.power(self.level[a])

    def dump(self, label_of=None) -> str:
        lines = []
        for a in self.preorder():
            pad = "  " * self.depth[a]
            lvl = "-inf" if self.level[a] == LEAF_LEVEL else str(self.level[a])
            rep = self.rep_hm[a]
            pt = ""
            if self.is_leaf(a):
                pt = f" point={label_of(self.point[a]) if label_of else self.point[a]}"
            lines.append(f"{pad}{a} level={lvl} rep={rep}{pt}")
        return "\n".join(lines) + "\n"


def _level_range(dist: np.ndarray, tau: float) -> tuple[int, int]:
    off = dist[~np.eye(len(dist), dtype=bool)]
    dmin, diam = float(off.min()), float(off.max())
    bottom = math.floor(math.log(dmin, tau)) - 1
    top = math.ceil(math.log(diam, tau)) + 1
    while tau ** bottom >= dmin:
        bottom -= 1
    # a single net point must cover everything at the top level
    while tau ** top < float(dist[0].max()):
        top += 1
    return bottom, top


def build_net_tree(m: Metric, params: NetTreeParams | None = None, *, verify: bool = True) -> NetTree:
    """Nested greedy nets, one per integer level, linked to the nearest point
    of the next coarser net, with single-child chains contracted.

    The net at level i keeps the coarser net's points first and then adds, in
    index order, every point farther than τ^i from all chosen ones, so its
    points are more than τ^i apart and cover everything within τ^i.  A contracted node takes
    the level at which its chain branches.  Ties go to the lowest index.
    """
    params = params or NetTreeParams()
    tau = params.tau
    n = m.n
    if n == 1:
        return NetTree([-1], [[]], [0], 0, m, [LEAF_LEVEL], [0], params)

    dist = m.matrix()
    bottom, top = _level_range(dist, tau)

    nets: dict[int, np.ndarray] = {top: np.array([0])}
    link: dict[int, np.ndarray] = {}  # link[i][x] = parent point at level i+1 of x in nets[i]
    for i in range(top - 1, bottom - 1, -1):
        coarse = nets[i + 1]
        chosen = list(coarse)
        gap = dist[coarse].min(axis=0)
        r = tau ** i
        for x in range(n):
            if gap[x] > r:
                chosen.append(x)
                gap = np.minimum(gap, dist[x])
        net = np.array(sorted(chosen))
        nets[i] = net
        nearest = coarse[np.argmin(dist[np.ix_(net, coarse)], axis=1)]
        link[i] = dict(zip(net.tolist(), nearest.tolist()))
    if len(nets[bottom]) != n:
        raise TreeError("finest net does not contain every point")

    # children of (y, i+1) are the x in nets[i] linked to y; sorted by index
    kids: dict[int, dict[int, list[int]]] = {}
    for i, lk in link.items():
        bucket: dict[int, list[int]] = {}
        for x, y in lk.items():
            bucket.setdefault(y, []).append(x)
        kids[i + 1] = bucket

    parent: list[int] = []
    children: list[list[int]] = []
    point: list[int] = []
    level: list[float] = []
    rep: list[int] = []

    stack = [(0, top, -1)]
    while stack:
        x, i, par = stack.pop()
        # walk down the single-child chain of (x, i)
        while i > bottom and len(kids[i].get(x, ())) == 1:
            i -= 1
        a = len(parent)
        parent.append(par)
        children.append([])
        if par >= 0:
            children[par].append(a)
        rep.append(x)
        if i == bottom:
            point.append(x)
            level.append(LEAF_LEVEL)
            continue
        point.append(-1)
        level.append(i)
        stack.extend((c, i - 1, a) for c in reversed(kids[i][x]))

    tree = NetTree(parent, children, point, 0, m, level, rep, params)
    if verify:
        problems = verify_covering(tree) + verify_packing(tree)
        if problems:
            raise TreeError("net tree property check failed: " + "; ".join(problems[:5]))
    return tree


def verify_covering(t: NetTree, m: Metric | None = None) -> list[str]:
    """Every point of S(a) within (2τ/(τ−1))·τ^level(a) of rep_hm(a)."""
    m = m or t.metric
    out = []
    for a in t.preorder():
        pts = t.subtree_points(a)
        d = m.block([t.rep_hm[a]], pts)[0]
        radius = t.radius(a)
        for p, dp in zip(pts, d):
            if dp > radius:
                out.append(f"covering: node {a} point {p} at {dp:.12g} > {radius:.12g}")
    return out


def verify_packing(t: NetTree, m: Metric | None = None) -> list[str]:
    """Every point within ((τ−5)/(2(τ−1)))·τ^(level(parent)−1) of rep_hm(a) is in S(a)."""
    m = m or t.metric
    out = []
    for a in t.preorder():
        par = t.parent[a]
        if par < 0:
            continue
        radius = t.params.packing_factor * t.params.power(t.level[par] - 1)
        inside = set(t.subtree_points(a))
        d = m.row(t.rep_hm[a])
        for p in np.flatnonzero(d <= radius).tolist():
            if p not in inside:
                out.append(f"packing: node {a} misses point {p} at {d[p]:.12g} <= {radius:.12g}")
    return out


def nettree_subtree_diameter_bound(t: NetTree, a: int, k: int) -> float:
    """(4τ/(τ−1))·τ^(level(p^k(a)) − k); zero when that level is −∞."""
    t.check_node(a)
    if k < 0:
        raise InputError("k must be non-negative")
    anc = t.kth_ancestor(a, k)
    lvl = t.level[anc]
    if lvl == LEAF_LEVEL:
        return 0.0
    return 2 * t.params.covering_factor * t.params.power(lvl - k)


def check_net_tree(t: NetTree) -> list[str]:
    """Level monotonicity, rep inheritance and the subtree diameter bound for every (a, k)."""
    out = []
    for a in t.preorder():
        par = t.parent[a]
        if par >= 0 and not t.level[a] < t.level[par]:
            out.append(f"node {a}: level {t.level[a]} not below parent's {t.level[par]}")
        if t.is_leaf(a):
            if t.level[a] != LEAF_LEVEL or t.rep_hm[a] != t.point[a]:
                out.append(f"leaf {a}: bad level or representative")
        elif not any(t.rep_hm[c] == t.rep_hm[a] for c in t.children[a]):
            out.append(f"node {a}: no child shares its representative")
        diam = set_diameter(t.subtree_points(a), t.metric)
        for k in range(t.depth[a] + 1):
            bound = nettree_subtree_diameter_bound(t, a, k)
            if diam > bound * (1 + 1e-12):
                out.append(f"node {a}, k={k}: diameter {diam:.12g} > {bound:.12g}")
    return out

"""Heavy path decomposition and heavy-first DFS labelling."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

from .errors import TreeError
from .tree import RootedTree

# tie_break(tree, node, tied_children) -> chosen child
TieBreak = Callable[[RootedTree, int, list], int]


def first_child(tree: RootedTree, a: int, tied: list[int]) -> int:
    return tied[0]


@dataclass
class HeavyPathLabelling:
    """All maps are lists indexed by node id.

    ``rep[a]`` is the leaf node r(a).  ``apex[v]`` is h(v) for a leaf v and
    -1 elsewhere.  Labels run 1..n; ``leaf_label`` is 0 on internal nodes.
    """

    tree: RootedTree
    heavy_child: list[int]
    rep: list[int]
    apex: list[int]
    leaf_label: list[int]
    interval: list[tuple[int, int]]
    label_of_point: list[int]
    point_of_label: list[int]  # index 0 unused

    @property
    def n(self) -> int:
        return len(self.label_of_point)

    def rep_label(self, a: int) -> int:
        return self.leaf_label[self.rep[a]]

    def leaf_of_label(self, x: int) -> int:
        return self.tree.leaf_of[self.point_of_label[x]]

    def contains(self, a: int, x: int) -> bool:
        lo, hi = self.interval[a]
        return lo <= x <= hi

    def apex_interval_of_label(self, x: int) -> tuple[int, int]:
        return self.interval[self.apex[self.leaf_of_label(x)]]


def heavy_path_decompose(t: RootedTree, tie_break: TieBreak | None = None) -> HeavyPathLabelling:
    """Mark heavy children (most leaves; ties via ``tie_break``, default first
    child), then derive representatives, apexes and the DFS labels."""
    tie_break = tie_break or first_child
    size = t.leaf_count
    heavy = [-1] * len(t)
    for a in range(len(t)):
        kids = t.children[a]
        if not kids:
            continue
        best = max(size[c] for c in kids)
        tied = [c for c in kids if size[c] == best]
        choice = tie_break(t, a, tied) if len(tied) > 1 else tied[0]
        if choice not in tied:
            raise TreeError(f"tie-break picked {choice}, not a largest child of {a}")
        heavy[a] = choice

    rep = list(range(len(t)))
    for a in t.postorder():
        if heavy[a] >= 0:
            rep[a] = rep[heavy[a]]
    apex = [-1] * len(t)
    for a in t.preorder():
        par = t.parent[a]
        if par < 0 or heavy[par] != a:
            apex[rep[a]] = a

    hp = HeavyPathLabelling(t, heavy, rep, apex, [], [], [], [])
    heavy_dfs_label(t, hp)
    return hp


def heavy_dfs_label(t: RootedTree, hp: HeavyPathLabelling) -> HeavyPathLabelling:
    """Number leaves 1..n visiting the heavy child first, then the others in
    stored order; fill node intervals.  Mutates and returns ``hp``."""
    label = [0] * len(t)
    next_label = 1
    stack = [t.root]
    while stack:
        a = stack.pop()
        if t.is_leaf(a):
            label[a] = next_label
            next_label += 1
            continue
        h = hp.heavy_child[a]
        order = [h] + [c for c in t.children[a] if c != h]
        stack.extend(reversed(order))
    size = t.leaf_count
    interval: list[tuple[int, int]] = [(0, 0)] * len(t)
    for a in range(len(t)):
        lo = label[hp.rep[a]]
        interval[a] = (lo, lo + size[a] - 1)
    hp.leaf_label = label
    hp.interval = interval
    hp.label_of_point = [label[t.leaf_of[p]] for p in range(t.n_points)]
    hp.point_of_label = [-1] * (t.n_points + 1)
    for p, x in enumerate(hp.label_of_point):
        hp.point_of_label[x] = p
    return hp


def light_depth(t: RootedTree, hp: HeavyPathLabelling, v: int) -> int:
    """Light edges on the root-to-``v`` path."""
    t.check_node(v)
    if not t.is_leaf(v):
        raise TreeError(f"node {v} is not a leaf")
    count = 0
    while t.parent[v] >= 0:
        if hp.heavy_child[t.parent[v]] != v:
            count += 1
        v = t.parent[v]
    return count


def check_labelling(t: RootedTree, hp: HeavyPathLabelling) -> list[str]:
    """Sweep the labelling invariants; returns violations."""
    out = []
    size = t.leaf_count
    for a in range(len(t)):
        lo, hi = hp.interval[a]
        labels = sorted(hp.leaf_label[x] for x in t.preorder(a) if t.is_leaf(x))
        if labels != list(range(lo, hi + 1)):
            out.append(f"node {a}: labels {labels[:4]}... do not fill interval {(lo, hi)}")
        if hp.rep_label(a) != lo:
            out.append(f"node {a}: rep label {hp.rep_label(a)} != interval low {lo}")
        kids = t.children[a]
        if kids:
            if size[hp.heavy_child[a]] != max(size[c] for c in kids):
                out.append(f"node {a}: heavy child is not a largest child")
            if hp.rep[a] != hp.rep[hp.heavy_child[a]]:
                out.append(f"node {a}: rep differs from heavy child's")
            spans = sorted(hp.interval[c] for c in kids)
            if spans[0][0] != lo or spans[-1][1] != hi or any(
                x[1] + 1 != y[0] for x, y in zip(spans, spans[1:])
            ):
                out.append(f"node {a}: children intervals do not partition {(lo, hi)}")
        elif hp.rep[a] != a:
            out.append(f"leaf {a}: rep is not itself")
    for v in range(len(t)):
        if not t.is_leaf(v):
            continue
        h = hp.apex[v]
        if h < 0 or hp.rep[h] != v:
            out.append(f"leaf {v}: apex {h} does not represent it")
            continue
        par = t.parent[h]
        if par >= 0 and hp.rep[par] == v:
            out.append(f"leaf {v}: apex {h} is not the shallowest node it represents")
        for b in t.ancestors(v):
            if hp.rep[b] != v:
                out.append(f"leaf {v}: node {b} on its heavy path has another rep")
            if b == h:
                break
    return out


def labels_csv(hp: HeavyPathLabelling) -> str:
    """CSV rows: point index, leaf label, apex interval low, apex interval high."""
    buf = io.StringIO()
    buf.write("point,label,apex_lo,apex_hi\n")
    for p, x in enumerate(hp.label_of_point):
        lo, hi = hp.apex_interval_of_label(x)
        buf.write(f"{p},{x},{lo},{hi}\n")
    return buf.getvalue()

"""Node-arena rooted tree shared by the quadtree and the net tree."""

from __future__ import annotations

from functools import cached_property
from typing import Iterator

from .errors import TreeError


class RootedTree:
    """Leaves store exactly one point index; internal nodes store ``-1``.

    Node ids are dense integers ``0..len(tree)-1``.  ``parent[root] == -1``.
    """

    def __init__(self, parent: list[int], children: list[list[int]], point: list[int], root: int, n_points: int):
        self.parent = parent
        self.children = children
        self.point = point
        self.root = root
        self.n_points = n_points
        leaf_of = [-1] * n_points
        for node, p in enumerate(point):
            if p >= 0:
                if leaf_of[p] != -1:
                    raise TreeError(f"point {p} stored in two leaves")
                leaf_of[p] = node
        if -1 in leaf_of:
            raise TreeError(f"point {leaf_of.index(-1)} is not stored in any leaf")
        self.leaf_of = leaf_of

    def __len__(self) -> int:
        return len(self.parent)

    def is_leaf(self, a: int) -> bool:
        return self.point[a] >= 0

    def check_node(self, a: int) -> None:
        if not (isinstance(a, int) and 0 <= a < len(self)):
            raise TreeError(f"unknown node id {a!r}")

    def preorder(self, start: int | None = None) -> Iterator[int]:
        stack = [self.root if start is None else start]
        while stack:
            a = stack.pop()
            yield a
            stack.extend(reversed(self.children[a]))

    def postorder(self) -> list[int]:
        return list(reversed(list(self._reverse_postorder())))

    def _reverse_postorder(self) -> Iterator[int]:
        stack = [self.root]
        while stack:
            a = stack.pop()
            yield a
            stack.extend(self.children[a])

    @cached_property
    def leaf_count(self) -> list[int]:
        size = [0] * len(self)
        for a in self.postorder():
            size[a] = 1 if self.is_leaf(a) else sum(size[c] for c in self.children[a])
        return size

    @cached_property
    def depth(self) -> list[int]:
        depth = [0] * len(self)
        for a in self.preorder():
            if a != self.root:
                depth[a] = depth[self.parent[a]] + 1
        return depth

    def ancestors(self, a: int) -> Iterator[int]:
        """``a`` itself, then its parent, up to the root."""
        while a != -1:
            yield a
            a = self.parent[a]

    def kth_ancestor(self, a: int, k: int) -> int:
        for _ in range(k):
            a = self.parent[a]
            if a == -1:
                raise TreeError(f"node has fewer than {k} ancestors")
        return a

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` is an ancestor of ``b`` (a node is its own ancestor)."""
        return any(x == a for x in self.ancestors(b))

    def subtree_points(self, a: int) -> list[int]:
        return [self.point[x] for x in self.preorder(a) if self.point[x] >= 0]

    def check_structure(self) -> None:
        """Raise if parent/child links disagree or some node is unreachable."""
        seen = 0
        for a in self.preorder():
            seen += 1
            for c in self.children[a]:
                if self.parent[c] != a:
                    raise TreeError(f"child {c} of {a} has parent {self.parent[c]}")
            if self.is_leaf(a) and self.children[a]:
                raise TreeError(f"leaf {a} has children")
            if not self.is_leaf(a) and len(self.children[a]) < 2:
                raise TreeError(f"internal node {a} has {len(self.children[a])} child(ren)")
        if seen != len(self):
            raise TreeError(f"{len(self) - seen} node(s) unreachable from the root")

"""Compressed quadtree over a Euclidean point set."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DuplicatePointError, InputError, TreeError
from .metric import EuclideanMetric, Hypercube, smallest_enclosing_hypercube
from .tree import RootedTree

# Single-child chains longer than this are resolved with exact arithmetic.
MAX_FLOAT_CHAIN = 64


class QuadtreeTree(RootedTree):
    """Compressed quadtree.  ``cell_small[a]`` is C_S(a), ``cell_large[a]`` is C_L(a)."""

    def __init__(self, parent, children, point, root, metric: EuclideanMetric, cell_large, cell_small):
        super().__init__(parent, children, point, root, metric.n)
        self.metric = metric
        self.dimension = metric.dim
        self.cell_large: list[Hypercube] = cell_large
        self.cell_small: list[Hypercube] = cell_small

    def diagonal(self, a: int) -> float:
        """ℓ(a); zero for leaves."""
        if self.is_leaf(a):
            return 0.0
        return self.cell_small[a].diagonal

    def predicate_box(self, a: int) -> tuple[np.ndarray, np.ndarray]:
        """Box used in the separation test: the point itself for a leaf, else C_S(a)."""
        if self.is_leaf(a):
            x = self.metric.coords[self.point[a]]
            return x, x
        c = self.cell_small[a]
        lo = np.array(c.min_corner)
        return lo, lo + c.side

    def dump(self, label_of=None) -> str:
        """Indented text: one node per line with id, C_S, ℓ and the point label."""
        lines = []
        for a in self.preorder():
            pad = "  " * self.depth[a]
            pt = ""
            if self.is_leaf(a):
                p = self.point[a]
                pt = f" point={label_of(p) if label_of else p}"
            lines.append(f"{pad}{a} cell={self.cell_small[a]} l={self.diagonal(a):.12g}{pt}")
        return "\n".join(lines) + "\n"


def build_compressed_quadtree(pts, root_cube: Hypercube | None = None) -> QuadtreeTree:
    """Split the current cube into 2^d sub-cubes, recurse into the occupied
    ones, and contract single-child chains as they are found.

    Children are ordered by sub-cube index: bit ``d-1-k`` of the index is set
    when the point lies in the upper half along axis ``k``.  A coordinate equal
    to a split value goes to the upper half.
    """
    metric = pts if isinstance(pts, EuclideanMetric) else EuclideanMetric(pts)
    coords = metric.coords
    n, d = coords.shape
    if root_cube is None:
        root_cube = smallest_enclosing_hypercube(coords)
    if root_cube.dim != d:
        raise InputError(f"root cube has dimension {root_cube.dim}, points have {d}")
    lo0 = np.array(root_cube.min_corner)
    outside = np.any((coords < lo0) | (coords > lo0 + root_cube.side), axis=1)
    if outside.any():
        raise InputError(f"point {int(np.argmax(outside))} lies outside the root cube")

    weights = 1 << np.arange(d - 1, -1, -1)
    parent: list[int] = []
    children: list[list[int]] = []
    point: list[int] = []
    cell_large: list[Hypercube] = []
    cell_small: list[Hypercube] = []

    # (point indices, cube lower corner, side, parent id)
    stack = [(np.arange(n), lo0, root_cube.side, -1)]
    while stack:
        idx, lo, side, par = stack.pop()
        a = len(parent)
        parent.append(par)
        children.append([])
        if par >= 0:
            children[par].append(a)
        large = Hypercube(tuple(lo), side)
        cell_large.append(large)
        if len(idx) == 1:
            point.append(int(idx[0]))
            cell_small.append(large)
            continue
        point.append(-1)

        sub = coords[idx]
        chain = 0
        while True:
            half = side / 2.0
            codes = (sub >= lo + half).astype(np.int64) @ weights
            first = codes[0]
            if np.any(codes != first):
                break
            chain += 1
            if chain > MAX_FLOAT_CHAIN or half <= 0.0 or half == side:
                lo, side, codes = _exact_split(sub, lo, side)
                half = side / 2.0
                break
            lo = lo + _code_bits(first, d) * half
            side = half
        cell_small.append(Hypercube(tuple(lo), side))

        order = np.unique(codes)
        pending = []
        for code in order:
            mask = codes == code
            child_lo = lo + _code_bits(code, d) * half
            pending.append((idx[mask], child_lo, half, a))
        stack.extend(reversed(pending))

    tree = QuadtreeTree(parent, children, point, 0, metric, cell_large, cell_small)
    return tree


def _code_bits(code: int, d: int) -> np.ndarray:
    return np.array([(int(code) >> (d - 1 - k)) & 1 for k in range(d)], dtype=float)


def _exact_split(sub: np.ndarray, lo: np.ndarray, side: float):
    """Jump straight to the deepest dyadic sub-cube holding every point of
    ``sub`` (exact rational arithmetic), returning it with child codes."""
    d = sub.shape[1]
    S = Fraction(side)
    rel = [[(Fraction(float(x)) - Fraction(float(l))) / S for x, l in zip(row, lo)] for row in sub]

    def cells(m: int) -> list[tuple[int, ...]]:
        top = (1 << m) - 1
        return [tuple(min(math.floor(t * (1 << m)), top) for t in row) for row in rel]

    lo_m, hi_m = 0, 1
    while len(set(cells(hi_m))) == 1:
        lo_m, hi_m = hi_m, hi_m * 2
        if hi_m > 1 << 12:
            raise DuplicatePointError("points cannot be separated (duplicates?)")
    while hi_m - lo_m > 1:
        mid = (lo_m + hi_m) // 2
        if len(set(cells(mid))) == 1:
            lo_m = mid
        else:
            hi_m = mid
    m = lo_m
    corner = cells(m)[0]
    new_side = Fraction(side) / (1 << m)
    new_lo = [Fraction(float(l)) + c * new_side for l, c in zip(lo, corner)]
    child = cells(m + 1)
    codes = np.array(
        [sum(((c[k] - 2 * corner[k]) & 1) << (d - 1 - k) for k in range(d)) for c in child],
        dtype=np.int64,
    )
    return np.array([float(v) for v in new_lo]), float(new_side), codes


def cell_diagonal(t: QuadtreeTree, a: int) -> float:
    t.check_node(a)
    return t.diagonal(a)


def check_quadtree(t: QuadtreeTree) -> list[str]:
    """Sweep every node for the structural quadtree properties; return violations."""
    problems = []
    try:
        t.check_structure()
    except TreeError as exc:
        problems.append(str(exc))
    coords = t.metric.coords
    # corners are sums of halved sides; allow a few ulps of accumulated rounding
    tol = 4 * math.ulp(float(np.abs(coords).max()) + t.cell_large[t.root].side)
    for a in t.preorder():
        cs, cl = t.cell_small[a], t.cell_large[a]
        if not cl.contains_cube(cs, tol):
            problems.append(f"node {a}: C_S not inside C_L")
        for p in t.subtree_points(a):
            if not cs.contains(coords[p], tol):
                problems.append(f"node {a}: point {p} outside C_S")
        par = t.parent[a]
        if par >= 0:
            if t.diagonal(a) > 0.5 * t.diagonal(par):
                problems.append(f"node {a}: l={t.diagonal(a)!r} exceeds half of parent's {t.diagonal(par)!r}")
            ps = t.cell_small[par]
            half = ps.side / 2
            split = all(o in (lo, lo + half) for o, lo in zip(cl.min_corner, ps.min_corner))
            if cl.side != half or not split:
                problems.append(f"node {a}: C_L is not a half-split of the parent's C_S")
    return problems

"""Well-separated pair decompositions from a quadtree or a net tree."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import HeavyPathLabelling
from .errors import InputError, WspdError
from .nettree import NetTree
from .quadtree import QuadtreeTree
from .tree import RootedTree

# Dense pair-lookup matrices are built up to this many points.
DENSE_LOCATOR_LIMIT = 4096


@dataclass
class Wspd:
    """``pairs[k] = (a, b)`` with ``a`` the node that was larger when emitted."""

    pairs: list[tuple[int, int]]
    s: float
    tree: RootedTree
    kind: str
    incident: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.incident = [[] for _ in range(len(self.tree))]
        for k, (a, b) in enumerate(self.pairs):
            self.incident[a].append(k)
            self.incident[b].append(k)

    def __len__(self) -> int:
        return len(self.pairs)

    def other(self, k: int, a: int) -> int:
        x, y = self.pairs[k]
        return y if x == a else x


def _check_s(s: float) -> None:
    if not (s > 2 and math.isfinite(s)):
        raise InputError(f"separation s must be > 2, got {s!r}")


def _expand(a: int, b: int, t: RootedTree, separated, split_first) -> list[tuple[int, int]]:
    """Shared recursion: ``separated(a, b)`` decides emission, ``split_first``
    says whether ``a`` (rather than ``b``) should be split."""
    pairs: list[tuple[int, int]] = []
    stack = [(a, b)]
    while stack:
        a, b = stack.pop()
        if a == b:
            kids = t.children[a]
            # each unordered child pair once; (c, c) handles points inside c
            todo = [(kids[i], kids[j]) for i in range(len(kids)) for j in range(i, len(kids))]
            stack.extend(reversed(todo))
            continue
        if not split_first(a, b):
            a, b = b, a
        if separated(a, b):
            pairs.append((a, b))
        else:
            stack.extend((c, b) for c in reversed(t.children[a]))
    return pairs


def build_wspd_euclidean(t: QuadtreeTree, s: float) -> Wspd:
    """Split the node with the larger ℓ until d(box(a), box(b)) >= s·max ℓ.

    A leaf's box is its point, so two leaves are always separated.
    """
    _check_s(s)
    boxes = [t.predicate_box(a) for a in range(len(t))]
    lo = [tuple(map(float, b[0])) for b in boxes]
    hi = [tuple(map(float, b[1])) for b in boxes]
    diag = [t.diagonal(a) for a in range(len(t))]

    def gap(a: int, b: int) -> float:
        return math.sqrt(
            sum(max(0.0, l1 - h2, l2 - h1) ** 2 for l1, h1, l2, h2 in zip(lo[a], hi[a], lo[b], hi[b]))
        )

    def separated(a: int, b: int) -> bool:
        return gap(a, b) >= s * diag[a]

    pairs = _expand(t.root, t.root, t, separated, lambda a, b: diag[a] >= diag[b])
    return Wspd(pairs, s, t, "euclidean")


def build_wspd_doubling(t: NetTree, s: float) -> Wspd:
    """Split the node with the larger level until
    8s·(2τ/(τ−1))·max τ^level <= d(rep_hm(a), rep_hm(b))."""
    _check_s(s)
    p = t.params
    factor = 8 * s * p.covering_factor
    scale = [p.power(lv) for lv in t.level]
    m = t.metric

    def separated(a: int, b: int) -> bool:
        return factor * scale[a] <= m.distance(t.rep_hm[a], t.rep_hm[b])

    pairs = _expand(t.root, t.root, t, separated, lambda a, b: t.level[a] >= t.level[b])
    return Wspd(pairs, s, t, "doubling")


def find_separating_pair(w: Wspd, hp: HeavyPathLabelling, x_p: int, x_q: int) -> int:
    """Index of the pair separating labels ``x_p`` and ``x_q``: walk the
    ancestors of p's leaf and test q's label against the partner intervals."""
    if x_p == x_q:
        raise InputError("p and q must differ")
    found = []
    for a in w.tree.ancestors(hp.leaf_of_label(x_p)):
        for k in w.incident[a]:
            if hp.contains(w.other(k, a), x_q):
                found.append(k)
    if len(found) != 1:
        raise WspdError(f"{len(found)} pairs separate labels {x_p} and {x_q}")
    return found[0]


def find_separating_pair_bruteforce(w: Wspd, p: int, q: int) -> list[int]:
    """Every pair index with point ``p`` on one side and ``q`` on the other
    (full scan over point sets; used as an oracle)."""
    t = w.tree
    out = []
    for k, (a, b) in enumerate(w.pairs):
        sa, sb = set(t.subtree_points(a)), set(t.subtree_points(b))
        if (p in sa and q in sb) or (p in sb and q in sa):
            out.append(k)
    return out


class SeparationIndex:
    """``pair(x, y)``: separating pair index for two labels, from a dense
    label×label table when n is small enough, else by ancestor walk."""

    def __init__(self, w: Wspd, hp: HeavyPathLabelling) -> None:
        self.w = w
        self.hp = hp
        n = hp.n
        self.table: np.ndarray | None = None
        if n <= DENSE_LOCATOR_LIMIT:
            table = np.full((n + 1, n + 1), -1, dtype=np.int32)
            for k, (a, b) in enumerate(w.pairs):
                alo, ahi = hp.interval[a]
                blo, bhi = hp.interval[b]
                table[alo : ahi + 1, blo : bhi + 1] = k
                table[blo : bhi + 1, alo : ahi + 1] = k
            self.table = table

    def pair(self, x: int, y: int) -> int:
        if self.table is not None:
            k = int(self.table[x, y])
            if k < 0:
                raise WspdError(f"no pair separates labels {x} and {y}")
            return k
        return find_separating_pair(self.w, self.hp, x, y)

    def oriented(self, x: int, y: int) -> tuple[int, int, int]:
        """(k, a, b) with x in S(a) and y in S(b)."""
        k = self.pair(x, y)
        a, b = self.w.pairs[k]
        if not self.hp.contains(a, x):
            a, b = b, a
        return k, a, b


def wspd_csv(w: Wspd, hp: HeavyPathLabelling) -> str:
    buf = io.StringIO()
    buf.write("a_lo,a_hi,b_lo,b_hi\n")
    for a, b in w.pairs:
        (alo, ahi), (blo, bhi) = hp.interval[a], hp.interval[b]
        buf.write(f"{alo},{ahi},{blo},{bhi}\n")
    return buf.getvalue()

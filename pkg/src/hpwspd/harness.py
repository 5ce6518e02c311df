"""Oracles, bound measurement, instance generators and error-constant tables."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import CorruptionError, InputError
from .metric import EuclideanMetric, Hypercube, MatrixMetric, Metric, set_diameter, set_distance
from .pipeline import Build
from .routing import ASCEND, DESCEND, hop_budget, next_hop_matrix, route_trace
from .spanner import SpannerGraph
from .tree import RootedTree
from .wspd import Wspd

EXHAUSTIVE_LIMIT = 512
SAMPLES_PER_POINT = 10


# ---------------------------------------------------------------- bounds


def spanning_bound(s: float) -> float:
    return 1 + 2 / s + 2 / (s - 1)


def routing_bound(s: float) -> float:
    return 1 + 4 / s + 1 / (s - 1)


def doubling_routing_bound(s: float, tau: float) -> float:
    return 1 + (2 + tau / (tau - 1)) / s + 1 / (s - 1)


def doubling_spanning_bound_small_s(s: float, tau: float) -> float:
    """Bound on the shortest-path ratio when s <= τ."""
    return 1 + (2 + 2 * tau / (tau - 1)) / s


def hop_bound(n: int) -> float:
    return 2 * math.log2(n) + 1 if n > 1 else 0


# ---------------------------------------------------------------- oracles


def spanner_csgraph(g: SpannerGraph) -> csr_matrix:
    rows = [e.u - 1 for e in g.edges]
    cols = [e.v - 1 for e in g.edges]
    w = [e.length for e in g.edges]
    return csr_matrix((w, (rows, cols)), shape=(g.n, g.n))


def dijkstra_all_pairs(g: SpannerGraph, sources=None) -> np.ndarray:
    """Shortest-path lengths; row/column i is label i+1.  ``sources`` (labels)
    restricts the rows."""
    mat = spanner_csgraph(g)
    ncomp, comp = connected_components(mat, directed=False)
    if ncomp > 1:
        stray = np.flatnonzero(comp != comp[0]) + 1
        raise CorruptionError(f"spanner is disconnected; labels {stray[:10].tolist()} unreachable from 1")
    idx = None if sources is None else [x - 1 for x in sources]
    return shortest_path(mat, method="D", directed=False, indices=idx)


@dataclass
class ExactnessReport:
    pairs: int
    incidences: int
    uncovered: list[tuple[int, int]] = field(default_factory=list)
    overcovered: list[tuple[int, int]] = field(default_factory=list)
    not_separated: list[str] = field(default_factory=list)
    overlapping: list[int] = field(default_factory=list)
    min_relative_slack: float = math.inf

    @property
    def ok(self) -> bool:
        return not (self.uncovered or self.overcovered or self.not_separated or self.overlapping)


def wspd_exactness_check(w: Wspd, m: Metric | None = None, tol: float = 1e-9) -> ExactnessReport:
    """Brute-force incidence count over point pairs plus the point-set
    separation test d(A,B) >= s·max(diam A, diam B), relative slack >= −tol."""
    t = w.tree
    m = m or t.metric
    n = m.n
    count = np.zeros((n, n), dtype=np.int64)
    rep = ExactnessReport(len(w), 0)
    for k, (a, b) in enumerate(w.pairs):
        A, B = t.subtree_points(a), t.subtree_points(b)
        if set(A) & set(B):
            rep.overlapping.append(k)
        count[np.ix_(A, B)] += 1
        count[np.ix_(B, A)] += 1
        gap = set_distance(A, B, m)
        need = w.s * max(set_diameter(A, m), set_diameter(B, m))
        slack = (gap - need) / gap if gap > 0 else -math.inf
        rep.min_relative_slack = min(rep.min_relative_slack, slack)
        if slack < -tol:
            rep.not_separated.append(f"pair {k}: d={gap:.12g} < s*diam={need:.12g}")
    iu = np.triu_indices(n, 1)
    c = count[iu]
    rep.incidences = int(c.sum())
    rep.uncovered = [(int(i), int(j)) for i, j in zip(iu[0][c == 0], iu[1][c == 0])]
    rep.overcovered = [(int(i), int(j)) for i, j in zip(iu[0][c > 1], iu[1][c > 1])]
    return rep


# ---------------------------------------------------------------- lower bound


@dataclass
class LowerBoundInstance:
    s: float
    eps: float
    k: int
    alpha: float
    points: np.ndarray  # p1..p8 are point indices 0..7
    root_cube: Hypercube
    expected_pairs: int = 13
    expected_route: tuple[int, ...] = (3, 2, 0, 7, 4)
    expected_spanner_path: tuple[int, ...] = (3, 0, 7, 4)

    @property
    def expected_ratio(self) -> float:
        a, e = self.alpha, self.eps
        return (1 + 10 * a + 6 * e) / (1 - 14 * a - 2 * e)

    @staticmethod
    def tie_break(tree: RootedTree, node: int, tied: list[int]) -> int:
        """First child in the left half of [0, 1], last child in the right half,
        so r(a) = p1 and r(b) = p8."""
        pts = tree.subtree_points(node)
        right = all(tree.metric.coords[p, 0] > 0.5 for p in pts)
        return tied[-1] if right else tied[0]


def lower_bound_instance(s: float, eps: float = 0.0, k: int | None = None) -> LowerBoundInstance:
    """Eight points on [0, 1] at odd multiples of α = 2^−k from either end,
    with the outer four nudged outward by ``eps``.  By default k = ⌈lg(4s+8)⌉."""
    if not s > 2:
        raise InputError(f"s must be > 2, got {s!r}")
    if k is None:
        k = math.ceil(math.log2(4 * s + 8))
    alpha = 2.0**-k
    if not 0 <= eps < alpha:
        raise InputError(f"eps must lie in [0, alpha={alpha!r}), got {eps!r}")
    a, e = alpha, eps
    pts = np.array([a - e, 3 * a, 5 * a, 7 * a + e, 1 - 7 * a - e, 1 - 5 * a, 1 - 3 * a, 1 - a + e]).reshape(-1, 1)
    return LowerBoundInstance(s, eps, k, alpha, pts, Hypercube((0.0,), 1.0))


# ---------------------------------------------------------------- ratios


@dataclass
class RatioReport:
    kind: str
    n: int
    s: float
    tau: float | None
    seed: int | None
    exhaustive: bool
    p: np.ndarray
    q: np.ndarray
    dist: np.ndarray
    spanner_len: np.ndarray
    shortest_len: np.ndarray
    routed_len: np.ndarray
    spanner_hops: np.ndarray
    routed_hops: np.ndarray
    ascending_len: np.ndarray
    phase_violations: int = 0

    COLUMNS = (
        "p", "q", "dist", "spanner_len", "shortest_len", "routed_len",
        "spanner_hops", "routed_hops", "ascending_len",
    )

    def __len__(self) -> int:
        return len(self.p)

    @property
    def abs_error(self) -> np.ndarray:
        """(routed − spanner)/d per pair."""
        return (self.routed_len - self.spanner_len) / self.dist

    @property
    def rel_error(self) -> np.ndarray:
        return self.routed_len / self.spanner_len - 1

    def aggregates(self) -> dict:
        if not len(self):
            return {"measured_pairs": 0}
        return {
            "measured_pairs": len(self),
            "max_spanning_ratio": float(np.max(self.spanner_len / self.dist)),
            "max_shortest_ratio": float(np.max(self.shortest_len / self.dist)),
            "max_routing_ratio": float(np.max(self.routed_len / self.dist)),
            "max_ascending_ratio": float(np.max(self.ascending_len / self.dist)),
            "max_spanner_hops": int(self.spanner_hops.max()),
            "max_routed_hops": int(self.routed_hops.max()),
            "mean_routed_hops": float(self.routed_hops.mean()),
            "max_abs_error": float(self.abs_error.max()),
            "max_rel_error": float(self.rel_error.max()),
            "phase_violations": self.phase_violations,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.COLUMNS) + "\n")
        for row in zip(*(getattr(self, c) for c in self.COLUMNS)):
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        head = {"kind": self.kind, "n": self.n, "s": self.s, "tau": self.tau, "seed": self.seed,
                "exhaustive": self.exhaustive}
        return json.dumps({**head, **{k: _jsonable(v) for k, v in self.aggregates().items()}}, indent=2) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _jsonable(v):
    return float(f"{v:.12g}") if isinstance(v, float) else v


def route_all_pairs(b: Build) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Hops, routed length and ascending length for every ordered label pair
    (row = source, column = destination, index 0 unused), plus the number of
    routes that ascend after descending.  All routes advance in lockstep
    through the next-hop matrix."""
    n, g = b.n, b.graph
    nh, up = next_hop_matrix(b.tables)
    weight = np.zeros((n + 1, n + 1))
    for e in g.edges:
        weight[e.u, e.v] = weight[e.v, e.u] = e.length
    is_edge = weight > 0
    dest = np.broadcast_to(np.arange(n + 1), (n + 1, n + 1))
    cur = np.broadcast_to(np.arange(n + 1)[:, None], (n + 1, n + 1)).copy()
    cur[0] = 0
    hops = np.zeros((n + 1, n + 1), dtype=np.int64)
    length = np.zeros((n + 1, n + 1))
    asc = np.zeros((n + 1, n + 1))
    descended = np.zeros((n + 1, n + 1), dtype=bool)
    bad = np.zeros((n + 1, n + 1), dtype=bool)
    for _ in range(hop_budget(n)):
        live = cur != dest
        live[0] = live[:, 0] = False
        if not live.any():
            break
        nxt = np.where(live, nh[cur, dest], cur)
        if np.any(live & (nxt == 0)):
            u, q = np.argwhere(live & (nxt == 0))[0]
            raise CorruptionError(f"no routing candidate at {cur[u, q]} toward {q}")
        if not np.all(is_edge[cur[live], nxt[live]]):
            raise CorruptionError("routing table names a non-neighbour")
        w = weight[cur, nxt]
        step_up = live & up[cur, dest]
        bad |= step_up & descended
        asc += np.where(step_up & ~descended, w, 0.0)
        descended |= live & ~step_up
        length += np.where(live, w, 0.0)
        hops += live
        cur = nxt
    stuck = cur != dest
    stuck[0] = stuck[:, 0] = False
    if stuck.any():
        u, q = np.argwhere(stuck)[0]
        raise CorruptionError(f"hop budget {hop_budget(n)} exceeded routing {u} -> {q}")
    return hops, length, asc, int(bad.sum())


def ascends_after_descending(phases: list[str]) -> bool:
    if DESCEND not in phases:
        return False
    return ASCEND in phases[phases.index(DESCEND):]


def _sample_pairs(n: int, count: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    while len(out) < count:
        x, y = (int(v) + 1 for v in rng.integers(0, n, size=2))
        if x != y:
            out.append((x, y))
    return out


def measure_ratios(
    b: Build,
    *,
    exhaustive: bool | None = None,
    seed: int = 0,
    with_spanner: bool = True,
) -> RatioReport:
    """Per-pair spanner/shortest/routed lengths and hops.  All ordered pairs
    when ``exhaustive`` (default for n <= 512), else 10·n seeded samples."""
    n, g = b.n, b.graph
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_LIMIT
    oracle = b.path_oracle() if with_spanner else None
    if exhaustive:
        hops, length, asc, violations = route_all_pairs(b)
        P, Q = np.nonzero(~np.eye(n, dtype=bool))
        P, Q = P + 1, Q + 1
        order = np.asarray(b.hp.point_of_label[1:])
        dist = b.metric.matrix()[np.ix_(order, order)][P - 1, Q - 1]
        if with_spanner:
            short = dijkstra_all_pairs(g)[P - 1, Q - 1]
            measured = [oracle.measure(int(p), int(q)) for p, q in zip(P, Q)]
            span_len = np.array([m[0] for m in measured])
            span_hops = np.array([m[1] for m in measured], dtype=np.int64)
        else:
            short = span_len = np.full(len(P), math.nan)
            span_hops = np.full(len(P), -1, dtype=np.int64)
        return RatioReport(b.kind, n, b.s, b.tau, seed, True, P, Q, dist, span_len, short,
                           length[P, Q], span_hops, hops[P, Q], asc[P, Q], phase_violations=violations)
    rows: list[tuple] = []
    violations = 0
    pairs = _sample_pairs(n, SAMPLES_PER_POINT * n, seed)
    sources = sorted({p for p, _ in pairs})
    sp = dijkstra_all_pairs(g, sources) if with_spanner else None
    row_of = {x: i for i, x in enumerate(sources)}
    for p, q in pairs:
        trace = route_trace(b.tables, p, q)
        path = [x for x, _ in trace]
        routed = g.path_length(path)
        asc = sum(g.weight(x, y) for (x, _), (y, ph) in zip(trace, trace[1:]) if ph == ASCEND)
        violations += ascends_after_descending([ph for _, ph in trace[1:]])
        sl, sh = oracle.measure(p, q) if oracle else (math.nan, -1)
        short = sp[row_of[p], q - 1] if sp is not None else math.nan
        rows.append((p, q, g.dist(p, q), sl, short, routed, sh, len(path) - 1, asc))
    cols = list(zip(*rows)) if rows else [[] for _ in RatioReport.COLUMNS]
    ints = {"p", "q", "spanner_hops", "routed_hops"}
    arrays = [np.array(c, dtype=np.int64 if name in ints else float) for name, c in zip(RatioReport.COLUMNS, cols)]
    return RatioReport(b.kind, n, b.s, b.tau, seed, False, *arrays, phase_violations=violations)


# ---------------------------------------------------------------- error constants


def abs_error(s):
    """Δ(s) = R − S for the Euclidean bounds."""
    return routing_bound(s) - spanning_bound(s)


def rel_error(s):
    """δ(s) = R/S − 1 = (s−2)/(s²+3s−2)."""
    return routing_bound(s) / spanning_bound(s) - 1


def doubling_errors(s, tau):
    """(Δ, δ) against the spanning bound that applies at s: the s <= τ bound
    below τ, the general one above."""
    s = np.asarray(s, dtype=float)
    R = doubling_routing_bound(s, tau)
    S = np.where(s <= tau, doubling_spanning_bound_small_s(s, tau), spanning_bound(s))
    return R - S, R / S - 1


def error_bound_table(step: float = 1e-4, lo: float = 2.01, hi: float = 100.0, taus=(11, 16, 32, 100, 1000)) -> dict:
    """Closed-form error maxima next to grid maxima over s in [lo, hi]."""
    grid = np.arange(lo, hi + step / 2, step)
    d_abs, d_rel = abs_error(grid), rel_error(grid)
    out = {
        "euclid_abs": {
            "closed_max": 3 - 2 * math.sqrt(2), "closed_argmax": 2 + math.sqrt(2),
            "grid_max": float(d_abs.max()), "grid_argmax": float(grid[d_abs.argmax()]),
        },
        "euclid_rel": {
            "closed_max": (7 - 4 * math.sqrt(2)) / 17, "closed_argmax": 2 + 2 * math.sqrt(2),
            "grid_max": float(d_rel.max()), "grid_argmax": float(grid[d_rel.argmax()]),
        },
        "doubling": [],
        "doubling_abs_limit": 0.5,
        "doubling_rel_limit": 1 / 6,
    }
    for tau in taus:
        g = np.arange(2 + step, max(hi, 4 * tau) + step / 2, step)
        da, dr = doubling_errors(g, tau)
        small = g <= tau
        s_abs = tau + math.sqrt(tau * tau - tau)
        s_rel = tau + math.sqrt(tau * tau + 3 * tau - 2)
        out["doubling"].append({
            "tau": tau,
            "abs_at_2": (2 - tau) / (2 - 2 * tau),
            "rel_at_2": (tau - 2) / (6 * tau - 4),
            "abs_large_argmax": s_abs,
            "abs_large_max": float(doubling_errors(s_abs, tau)[0]),
            "rel_large_argmax": s_rel,
            "rel_large_max": float(doubling_errors(s_rel, tau)[1]),
            "grid_abs_max_small": float(da[small].max()),
            "grid_abs_max_large": float(da[~small].max()),
            "grid_abs_argmax_large": float(g[~small][da[~small].argmax()]),
            "grid_rel_max_small": float(dr[small].max()),
            "grid_rel_max_large": float(dr[~small].max()),
            "grid_rel_argmax_large": float(g[~small][dr[~small].argmax()]),
        })
    return out


# ---------------------------------------------------------------- generators


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_unit_cube(n: int, d: int, seed: int) -> np.ndarray:
    """Uniform points in [0,1]^d; redraws on the (unlikely) duplicate."""
    rng = make_rng(seed)
    while True:
        pts = rng.random((n, d))
        if len(np.unique(pts, axis=0)) == n:
            return pts


def random_multiscale(n: int, d: int, seed: int, levels: int = 3, ratio: float = 1e-3) -> np.ndarray:
    """Nested clusters: each level scales the offsets by ``ratio``, so the
    spread spans several orders of magnitude.  Point i takes, at every level,
    the offset of its prefix in a mixed-radix numbering with equal branching."""
    rng = make_rng(seed)
    branching = max(2, math.ceil(n ** (1 / levels)))
    while True:
        pts = np.zeros((n, d))
        idx = np.arange(n)
        for j in range(levels):
            prefix = idx // branching ** (levels - 1 - j)
            offsets = rng.random((int(prefix.max()) + 1, d))
            pts += ratio**j * offsets[prefix]
        if len(np.unique(pts, axis=0)) == n:
            return pts


def euclidean_matrix(coords) -> MatrixMetric:
    e = EuclideanMetric(coords)
    return MatrixMetric(e.matrix())


def l1_matrix(coords) -> MatrixMetric:
    c = np.asarray(coords, dtype=float)
    return MatrixMetric(np.abs(c[:, None, :] - c[None, :, :]).sum(axis=2))

"""Run every invariant suite over a build and collect pass/fail findings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import check_labelling, light_depth
from .errors import CorruptionError
from .harness import (
    LowerBoundInstance,
    RatioReport,
    doubling_routing_bound,
    doubling_spanning_bound_small_s,
    measure_ratios,
    routing_bound,
    spanning_bound,
    wspd_exactness_check,
)
from .nettree import NetTree, check_net_tree, verify_covering, verify_packing
from .pipeline import Build
from .quadtree import QuadtreeTree, check_quadtree
from .routing import RoutingTable, check_tables, decode_table, encode_table, route, table_bits
from .spanner import build_path

TOL = 1e-9
EXACTNESS_LIMIT = 1024


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyResult:
    checks: list[Check] = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, problems: list[str] | bool, detail: str = "") -> None:
        if isinstance(problems, bool):
            self.checks.append(Check(name, problems, detail))
        else:
            self.checks.append(Check(name, not problems, "; ".join(problems[:3]) or detail))

    def document(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            "aggregates": self.aggregates,
        }


def _bound_check(res: VerifyResult, name: str, values: np.ndarray, bound: float) -> None:
    worst = float(values.max()) if len(values) else 0.0
    res.add(name, worst <= bound + TOL, f"max {worst:.12g} vs bound {bound:.12g}")


def check_ratio_report(res: VerifyResult, b: Build, rep: RatioReport) -> None:
    s, n = b.s, b.n
    d = rep.dist
    res.add("shortest <= spanner path", bool(np.all(rep.shortest_len <= rep.spanner_len * (1 + TOL))))
    res.add("distance <= shortest <= routed", bool(np.all(d <= rep.shortest_len * (1 + TOL)) and np.all(rep.shortest_len <= rep.routed_len * (1 + TOL))))
    _bound_check(res, "spanning ratio", rep.spanner_len / d, spanning_bound(s))
    hop_cap = 2 * math.log2(n) + 1
    res.add("spanner hops", bool(np.all(rep.spanner_hops <= hop_cap)), f"max {int(rep.spanner_hops.max())} vs {hop_cap:.12g}")
    res.add("routed hops", bool(np.all(rep.routed_hops <= hop_cap)), f"max {int(rep.routed_hops.max())} vs {hop_cap:.12g}")
    res.add("phase order", rep.phase_violations == 0, f"{rep.phase_violations} route(s) ascend after descending")
    if b.kind == "euclidean":
        _bound_check(res, "routing ratio", rep.routed_len / d, routing_bound(s))
        _bound_check(res, "ascending length", rep.ascending_len / d, 2 / s)
        _bound_check(res, "absolute error", rep.abs_error, 0.1716)
        _bound_check(res, "relative error", rep.rel_error, 0.0790)
    else:
        tau = b.tau
        _bound_check(res, "routing ratio", rep.routed_len / d, doubling_routing_bound(s, tau))
        _bound_check(res, "ascending length", rep.ascending_len / d, tau / (s * (tau - 1)))
        if s <= tau:
            _bound_check(res, "shortest-path ratio (s <= tau)", rep.shortest_len / d, doubling_spanning_bound_small_s(s, tau))
        _bound_check(res, "absolute error", rep.abs_error, 0.5)
        _bound_check(res, "relative error", rep.rel_error, 1 / 6)


def check_table_encoding(tables: dict[int, RoutingTable], n: int) -> list[str]:
    out = []
    for x, t in tables.items():
        data, nbits = encode_table(t, n)
        if nbits != table_bits(t, n):
            out.append(f"table {x}: {nbits} bits, expected {table_bits(t, n)}")
        elif n > 1 and decode_table(data, nbits, n) != t:
            out.append(f"table {x}: packed form does not round-trip")
    return out


def run_suite(b: Build, *, seed: int = 0, lower_bound: LowerBoundInstance | None = None) -> VerifyResult:
    res = VerifyResult()
    t = b.tree
    if isinstance(t, QuadtreeTree):
        res.add("quadtree structure", check_quadtree(t))
    elif isinstance(t, NetTree):
        res.add("net tree covering", verify_covering(t))
        res.add("net tree packing", verify_packing(t))
        res.add("net tree levels and diameters", check_net_tree(t))
    res.add("labelling", check_labelling(t, b.hp))
    leaves = [v for v in range(len(t)) if t.is_leaf(v)]
    worst = max(light_depth(t, b.hp, v) for v in leaves)
    res.add("light depth", worst <= math.log2(b.n) if b.n > 1 else worst == 0, f"max {worst}")
    if b.n <= EXACTNESS_LIMIT:
        ex = wspd_exactness_check(b.wspd, b.metric)
        res.add("wspd exactness", ex.ok, f"{len(ex.uncovered)} uncovered, {len(ex.overcovered)} overcovered, "
                f"{len(ex.not_separated)} not separated")
    res.add("routing tables", check_tables(b.tables))
    res.add("table bit size", check_table_encoding(b.tables, b.n))
    agg = {"n": b.n, "s": b.s, "tau": b.tau, "seed": seed, "pairs": len(b.wspd), "edges": len(b.graph.edges)}
    if b.n > 1:
        try:
            rep = measure_ratios(b, seed=seed)
        except CorruptionError as exc:
            res.add("routing delivery", False, str(exc))
        else:
            res.add("routing delivery", True)
            check_ratio_report(res, b, rep)
            agg.update(rep.aggregates())
    if lower_bound is not None:
        check_lower_bound(res, b, lower_bound)
    res.aggregates = agg
    return res


def lower_bound_observation(b: Build, lb: LowerBoundInstance) -> dict:
    hp = b.hp
    x4, x5 = hp.label_of_point[3], hp.label_of_point[4]
    routed = route(b.tables, x4, x5)
    spanner = build_path(b.graph, b.index, x4, x5)
    return {
        "pairs": len(b.wspd),
        "route": [hp.point_of_label[x] for x in routed],
        "spanner_path": [hp.point_of_label[x] for x in spanner],
        "ratio": b.graph.path_length(routed) / b.graph.dist(x4, x5),
        "expected_ratio": lb.expected_ratio,
    }


def _names(pts: list[int]) -> str:
    return ",".join(f"p{p + 1}" for p in pts)


def check_lower_bound(res: VerifyResult, b: Build, lb: LowerBoundInstance) -> None:
    obs = lower_bound_observation(b, lb)
    res.add("lower bound: pair count", obs["pairs"] == lb.expected_pairs, f"{obs['pairs']} pairs")
    res.add("lower bound: routing path", tuple(obs["route"]) == lb.expected_route, _names(obs["route"]))
    res.add("lower bound: spanner path", tuple(obs["spanner_path"]) == lb.expected_spanner_path, _names(obs["spanner_path"]))
    res.add("lower bound: routing ratio", abs(obs["ratio"] - obs["expected_ratio"]) <= 1e-12,
            f"observed {obs['ratio']:.12g}, predicted {obs['expected_ratio']:.12g}")

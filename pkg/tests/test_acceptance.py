"""Acceptance criteria 1-10, one PASS/FAIL line each (collected in the terminal summary)."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
import pytest

from hpwspd.cli import main
from hpwspd.decomposition import check_labelling, light_depth
from hpwspd.harness import (
    dijkstra_all_pairs,
    doubling_routing_bound,
    doubling_spanning_bound_small_s,
    error_bound_table,
    euclidean_matrix,
    l1_matrix,
    measure_ratios,
    random_multiscale,
    random_unit_cube,
    routing_bound,
    spanning_bound,
    wspd_exactness_check,
)
from hpwspd.metric import EuclideanMetric
from hpwspd.nettree import check_net_tree, verify_covering, verify_packing
from hpwspd.pipeline import build_pipeline
from hpwspd.quadtree import check_quadtree
from hpwspd.routing import check_tables, encode_table, field_width
from hpwspd.verify import lower_bound_observation

from conftest import lb_build

TOL = 1e-9
RESULTS: list[str] = []

NS, DS, SS = (16, 64, 256), (1, 2, 3), (2.5, 4.0, 8.0)


def report(num: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def instance_params() -> list[tuple[int, int, float, int]]:
    """20 seeded (n, d, s, seed) settings covering every n, d and s value."""
    return [(NS[i % 3], DS[(i // 3) % 3], SS[(i + i // 9) % 3], 1000 + i) for i in range(20)]


@lru_cache(maxsize=None)
def euclid_instance(n, d, s, seed):
    b = build_pipeline(EuclideanMetric(random_unit_cube(n, d, seed)), s)
    return b, measure_ratios(b, exhaustive=True, seed=seed)


def test_instances_cover_grid():
    ps = instance_params()
    assert {p[0] for p in ps} == set(NS) and {p[1] for p in ps} == set(DS) and {p[2] for p in ps} == set(SS)


def test_c01_wspd_exactness():
    bad, slack = [], math.inf
    for n, d, s, seed in instance_params():
        b, _ = euclid_instance(n, d, s, seed)
        rep = wspd_exactness_check(b.wspd, b.metric, tol=TOL)
        slack = min(slack, rep.min_relative_slack)
        if not rep.ok or rep.incidences != n * (n - 1) // 2:
            bad.append((n, d, s, seed))
    report(1, "WSPD exactness", not bad, f"20 instances, min relative slack {slack:.3g}, failing {bad}")


def test_c02_spanning_ratio():
    worst, ok = 0.0, True
    for n, d, s, seed in instance_params():
        _, rep = euclid_instance(n, d, s, seed)
        r = float(np.max(rep.spanner_len / rep.dist))
        worst = max(worst, r - spanning_bound(s))
        ok &= r <= spanning_bound(s) + TOL
        ok &= bool(np.all(rep.shortest_len <= rep.spanner_len * (1 + TOL)))
    report(2, "spanning ratio", ok, f"max(ratio - bound) = {worst:.6g}; Dijkstra <= build_path on every pair")


def test_c03_routing_ratio():
    worst_r, worst_a, ok = -math.inf, -math.inf, True
    for n, d, s, seed in instance_params():
        _, rep = euclid_instance(n, d, s, seed)
        r = rep.routed_len / rep.dist
        excess_a = rep.ascending_len - (2 / s) * rep.dist
        worst_r = max(worst_r, float(r.max()) - routing_bound(s))
        worst_a = max(worst_a, float(excess_a.max()))
        ok &= float(r.max()) <= routing_bound(s) + TOL and float(excess_a.max()) <= TOL
    report(3, "routing ratio", ok, f"max(ratio - bound) = {worst_r:.6g}, max ascending excess = {worst_a:.6g}")


def test_c04_lower_bound():
    lb, b = lb_build(3.0, 0.0)
    obs = lower_bound_observation(b, lb)
    names = lambda pts: ",".join(f"p{p + 1}" for p in pts)
    lb2, b2 = lb_build(3.0, 0.99 * lb.alpha)
    ratio2 = lower_bound_observation(b2, lb2)["ratio"]
    checks = {
        "13 pairs": obs["pairs"] == 13,
        "route p4,p3,p1,p8,p5": names(obs["route"]) == "p4,p3,p1,p8,p5",
        "spanner p4,p1,p8,p5": names(obs["spanner_path"]) == "p4,p1,p8,p5",
        "ratio 7/3": abs(obs["ratio"] - 7 / 3) <= 1e-12,
        "eps=0.99a ratio >= 1+4/s-0.05": ratio2 >= 1 + 4 / 3 - 0.05,
    }
    failed = [k for k, v in checks.items() if not v]
    report(4, "lower-bound reproduction", not failed,
           f"alpha={lb.alpha}: {obs['pairs']} pairs, route {names(obs['route'])}, spanner "
           f"{names(obs['spanner_path'])}, ratio {obs['ratio']:.6g}, eps=0.99a ratio {ratio2:.6g}; failed {failed}")


def test_c05_hop_bound():
    worst = []
    for n in (64, 256, 1024):
        for s in (2.5, 4.0):
            b = build_pipeline(EuclideanMetric(random_unit_cube(n, 2, n + int(s))), s)
            rep = measure_ratios(b, exhaustive=True, with_spanner=False)
            worst.append((n, s, int(rep.routed_hops.max()), 2 * math.log2(n) + 1))
    ok = all(h <= cap for _, _, h, cap in worst)
    report(5, "hop bound", ok, "; ".join(f"n={n} s={s}: {h} <= {cap:g}" for n, s, h, cap in worst))


def test_c06_table_size():
    mismatches, tables = 0, 0
    for n, d, s, seed in instance_params():
        b, _ = euclid_instance(n, d, s, seed)
        w = math.ceil(math.log2(n))
        assert field_width(n) == w
        for x, t in b.tables.items():
            _, nbits = encode_table(t, n)
            tables += 1
            mismatches += nbits != (3 * b.graph.degree(x) + 1) * w
    report(6, "table size", mismatches == 0, f"{tables} tables, {mismatches} with a bit count other than (3deg+1)*ceil(lg n)")


def test_c07_error_constants():
    t = error_bound_table()
    grid_abs = abs(t["euclid_abs"]["grid_max"] - (3 - 2 * math.sqrt(2)))
    grid_rel = abs(t["euclid_rel"]["grid_max"] - (7 - 4 * math.sqrt(2)) / 17)
    max_abs = max_rel = 0.0
    worst_rel = None
    for n, d, s, seed in instance_params():
        _, rep = euclid_instance(n, d, s, seed)
        a, r = rep.abs_error, rep.rel_error
        max_abs = max(max_abs, float(a.max()))
        if float(r.max()) > max_rel:
            i = int(r.argmax())
            max_rel, worst_rel = float(r.max()), (n, d, s, int(rep.p[i]), int(rep.q[i]))
    ok = grid_abs <= 1e-6 and grid_rel <= 1e-6 and max_abs <= 0.1716 + TOL and max_rel <= 0.0790 + TOL
    report(7, "error-bound constants", ok,
           f"grid gaps {grid_abs:.2e}/{grid_rel:.2e}; observed max abs {max_abs:.6g} (<= 0.1716), "
           f"max rel {max_rel:.6g} (<= 0.0790) at (n, d, s, p, q) = {worst_rel}")


def test_c08_doubling():
    problems, worst = [], {"route": -math.inf, "short": -math.inf, "abs": 0.0, "rel": 0.0}
    for n, tau, gen, s in itertools.product((32, 128), (11.0, 16.0), ("euclid", "l1"), (3.0, 24.0)):
        coords = random_multiscale(n, 2, n + int(tau))
        m = euclidean_matrix(coords) if gen == "euclid" else l1_matrix(coords)
        b = build_pipeline(m, s, tau=tau)
        tag = f"n={n} tau={tau:g} {gen} s={s:g}"
        for name, errs in (("covering", verify_covering(b.tree)), ("packing", verify_packing(b.tree)),
                           ("levels/diameter", check_net_tree(b.tree))):
            if errs:
                problems.append(f"{tag} {name}: {errs[0]}")
        rep = measure_ratios(b, exhaustive=True)
        worst["route"] = max(worst["route"], float((rep.routed_len / rep.dist).max()) - doubling_routing_bound(s, tau))
        if s <= tau:
            worst["short"] = max(worst["short"], float((rep.shortest_len / rep.dist).max())
                                 - doubling_spanning_bound_small_s(s, tau))
        worst["abs"] = max(worst["abs"], float(rep.abs_error.max()))
        worst["rel"] = max(worst["rel"], float(rep.rel_error.max()))
    ok = (not problems and worst["route"] <= TOL and worst["short"] <= TOL
          and worst["abs"] <= 0.5 + TOL and worst["rel"] <= 1 / 6 + TOL)
    report(8, "doubling pipeline", ok,
           f"16 builds; routed excess {worst['route']:.4g}, shortest excess {worst['short']:.4g}, "
           f"max abs err {worst['abs']:.4g}, max rel err {worst['rel']:.4g}; {problems[:2]}")


def test_c09_structure():
    problems = []
    for n, d, seed in itertools.product((16, 64, 128), (1, 2, 3), (0, 1)):
        b = build_pipeline(EuclideanMetric(random_unit_cube(n, d, seed)), 4.0)
        t = b.tree
        problems += check_quadtree(t)
        problems += check_labelling(t, b.hp)
        depth = max(light_depth(t, b.hp, v) for v in range(len(t)) if t.is_leaf(v))
        if depth > math.log2(n):
            problems.append(f"n={n}: light depth {depth}")
        problems += check_tables(b.tables)
    report(9, "structural invariants", not problems, f"18 instances, {len(problems)} problems {problems[:2]}")


def test_c10_determinism(tmp_path, capsys):
    argv = ["build", "--n", "200", "--dim", "2", "--seed", "17"]
    for d in ("a", "b"):
        assert main(argv + ["--out", str(tmp_path / d)]) == 0
    capsys.readouterr()
    files = ("spanner.json", "tables.csv", "spanner.dot", "labels.csv", "wspd.csv", "tree.txt")
    diff = [f for f in files if (tmp_path / "a" / f).read_bytes() != (tmp_path / "b" / f).read_bytes()]
    report(10, "determinism", not diff, f"{len(files)} files compared, differing {diff}")

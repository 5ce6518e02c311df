from __future__ import annotations

import copy
import math

import pytest

from hpwspd.errors import InputError, TreeError
from hpwspd.harness import euclidean_matrix, l1_matrix, lower_bound_instance, random_multiscale, random_unit_cube
from hpwspd.metric import MatrixMetric, set_diameter
from hpwspd.nettree import (
    LEAF_LEVEL,
    NetTreeParams,
    build_net_tree,
    check_net_tree,
    nettree_subtree_diameter_bound,
    verify_covering,
    verify_packing,
)


def test_params():
    with pytest.raises(InputError):
        NetTreeParams(10.9)
    p = NetTreeParams(11)
    assert p.covering_factor == pytest.approx(2.2)
    assert p.packing_factor == pytest.approx(0.3)
    assert p.power(LEAF_LEVEL) == 0


def test_single_point():
    t = build_net_tree(MatrixMetric([[0.0]]))
    assert len(t) == 1 and t.level[0] == LEAF_LEVEL
    assert verify_covering(t) == [] and verify_packing(t) == []


def test_two_points():
    t = build_net_tree(MatrixMetric([[0, 1], [1, 0]]))
    assert len(t) == 3
    # smallest level whose covering radius 2.2·11^l reaches distance 1
    assert t.level[t.root] == 0
    assert t.radius(t.root) >= 1 > 2.2 * 11.0**-1
    assert verify_packing(t) == []
    leaf = t.children[0][0]
    assert nettree_subtree_diameter_bound(t, leaf, 0) == 0
    # (4τ/(τ−1))·τ^(0−1) = 0.4, above the singleton's diameter
    assert nettree_subtree_diameter_bound(t, leaf, 1) == pytest.approx(0.4)


def test_diameter_bound_base_case():
    t = build_net_tree(euclidean_matrix(random_unit_cube(40, 2, 0)))
    for a in t.preorder():
        lv = t.level[a]
        want = 0 if lv == LEAF_LEVEL else (4 * 11 / 10) * 11.0**lv
        assert nettree_subtree_diameter_bound(t, a, 0) == pytest.approx(want)
    with pytest.raises(TreeError):
        nettree_subtree_diameter_bound(t, t.root, 1)


def test_lower_bound_set_as_matrix():
    t = build_net_tree(euclidean_matrix(lower_bound_instance(3).points))
    assert verify_covering(t) == [] and verify_packing(t) == [] and check_net_tree(t) == []


@pytest.mark.parametrize("tau", [11, 16])
@pytest.mark.parametrize("gen", ["uniform", "multiscale", "l1"])
def test_random_trees_pass_every_check(tau, gen):
    for seed in range(3):
        if gen == "uniform":
            m = euclidean_matrix(random_unit_cube(150, 2, seed))
        elif gen == "multiscale":
            m = euclidean_matrix(random_multiscale(150, 2, seed))
        else:
            m = l1_matrix(random_unit_cube(150, 3, seed))
        t = build_net_tree(m, NetTreeParams(tau))
        t.check_structure()
        assert verify_covering(t) == []
        assert verify_packing(t) == []
        assert check_net_tree(t) == []


def test_large_tree_properties():
    t = build_net_tree(euclidean_matrix(random_multiscale(2000, 2, 9)), verify=False)
    assert verify_covering(t) == [] and verify_packing(t) == []


def test_corrupted_tree_is_reported():
    t = build_net_tree(euclidean_matrix(random_multiscale(64, 2, 4)))
    bad = copy.deepcopy(t)
    # move a leaf under a far-away internal node
    leaf = next(a for a in bad.preorder() if bad.is_leaf(a) and bad.depth[a] >= 2)
    old = bad.parent[leaf]
    target = next(a for a in bad.preorder() if not bad.is_leaf(a) and not bad.is_ancestor(a, leaf)
                  and bad.metric.distance(bad.rep_hm[a], bad.point[leaf]) > bad.radius(a))
    bad.children[old].remove(leaf)
    bad.children[target].append(leaf)
    bad.parent[leaf] = target
    assert verify_covering(bad)
    assert verify_packing(bad)


def test_levels_strictly_decrease_and_diameters():
    m = euclidean_matrix(random_multiscale(100, 3, 2))
    t = build_net_tree(m)
    for a in t.preorder():
        if t.parent[a] >= 0:
            assert t.level[a] < t.level[t.parent[a]]
        for k in range(t.depth[a] + 1):
            assert set_diameter(t.subtree_points(a), m) <= nettree_subtree_diameter_bound(t, a, k) * (1 + 1e-12)
    assert math.isinf(t.level[t.leaf_of[0]])


def test_dump():
    t = build_net_tree(MatrixMetric([[0, 1], [1, 0]]))
    assert t.dump().splitlines()[0] == "0 level=0 rep=0"

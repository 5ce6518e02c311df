from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given

from hpwspd.errors import DuplicatePointError, InputError, TreeError
from hpwspd.harness import lower_bound_instance, random_unit_cube
from hpwspd.metric import Hypercube, set_diameter
from hpwspd.quadtree import build_compressed_quadtree, cell_diagonal, check_quadtree

from conftest import point_sets


def test_single_point_is_a_leaf():
    t = build_compressed_quadtree([[0.4, 0.4]])
    assert len(t) == 1 and t.is_leaf(t.root)
    assert cell_diagonal(t, t.root) == 0


def test_two_points_compress_to_root_with_two_leaves():
    t = build_compressed_quadtree([[0.1], [0.9]], Hypercube((0,), 1))
    assert len(t) == 3
    assert all(t.is_leaf(c) for c in t.children[t.root])


def test_lower_bound_tree_cells():
    lb = lower_bound_instance(3.0)
    a = lb.alpha
    t = build_compressed_quadtree(lb.points, lb.root_cube)
    assert cell_diagonal(t, t.root) == 1
    na, nb = t.children[t.root]
    assert t.cell_small[na] == Hypercube((0,), 8 * a)
    assert t.cell_small[nb] == Hypercube((1 - 8 * a,), 8 * a)
    assert cell_diagonal(t, na) == 0.25
    c, d = t.children[na]
    e, f = t.children[nb]
    assert t.cell_small[c] == Hypercube((0,), 4 * a)
    assert t.cell_small[d] == Hypercube((4 * a,), 4 * a)
    assert t.cell_small[e] == Hypercube((1 - 8 * a,), 4 * a)
    assert t.cell_small[f] == Hypercube((1 - 4 * a,), 4 * a)
    for x in (c, d, e, f):
        assert len(t.children[x]) == 2 and all(t.is_leaf(y) for y in t.children[x])


def test_errors():
    with pytest.raises(InputError, match="outside"):
        build_compressed_quadtree([[0.5], [2.0]], Hypercube((0,), 1))
    with pytest.raises(DuplicatePointError):
        build_compressed_quadtree([[0.5], [0.5]])
    t = build_compressed_quadtree([[0.1], [0.9]])
    with pytest.raises(TreeError):
        cell_diagonal(t, 99)


def test_boundary_points_go_to_upper_half():
    t = build_compressed_quadtree([[0.0], [0.5], [1.0]], Hypercube((0,), 1))
    first, second = t.children[t.root]
    assert t.subtree_points(first) == [0]
    assert sorted(t.subtree_points(second)) == [1, 2]


def test_nearly_equal_points_use_exact_split():
    x = 0.3
    y = np.nextafter(x, 1)
    t = build_compressed_quadtree([[x], [y], [0.9]])
    assert check_quadtree(t) == []
    assert len(t.leaf_of) == 3


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_random_sets_are_valid(d):
    t = build_compressed_quadtree(random_unit_cube(400, d, seed=d))
    assert check_quadtree(t) == []
    for a in t.preorder():
        assert set_diameter(t.subtree_points(a), t.metric) <= t.cell_small[a].diagonal * (1 + 1e-12)


def test_deterministic():
    pts = random_unit_cube(200, 2, seed=1)
    t1, t2 = build_compressed_quadtree(pts), build_compressed_quadtree(pts)
    assert t1.parent == t2.parent and t1.point == t2.point and t1.cell_small == t2.cell_small
    assert t1.dump() == t2.dump()


@given(point_sets())
def test_quadtree_properties(pts):
    t = build_compressed_quadtree(pts)
    assert check_quadtree(t) == []
    assert sum(t.is_leaf(a) for a in range(len(t))) == len(pts)
    for a in range(len(t)):
        if t.parent[a] >= 0:
            assert t.diagonal(a) <= 0.5 * t.diagonal(t.parent[a])


def test_dump_lists_every_node():
    t = build_compressed_quadtree([[0.1, 0.1], [0.9, 0.9], [0.2, 0.8]])
    text = t.dump()
    assert len(text.splitlines()) == len(t)
    assert "point=" in text and math.isfinite(t.diagonal(t.root))

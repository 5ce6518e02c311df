from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hpwspd.errors import DuplicatePointError, InputError, MetricError
from hpwspd.metric import (
    EuclideanMetric,
    Hypercube,
    MatrixMetric,
    distance,
    hypercube_distance,
    load_matrix,
    load_points,
    set_diameter,
    smallest_enclosing_hypercube,
    write_matrix,
    write_points,
)


def test_distance_examples():
    m = EuclideanMetric([[0, 0], [3, 4]])
    assert distance(0, 0, m) == 0
    assert distance(0, 1, m) == 5
    mm = MatrixMetric([[0, 2], [2, 0]])
    assert distance(0, 1, mm) == 2


def test_distance_bad_index():
    with pytest.raises(InputError):
        distance(0, 5, EuclideanMetric([[0.0], [1.0]]))


def test_set_diameter_examples():
    m = EuclideanMetric([[0, 0], [1, 0], [0, 1]])
    assert set_diameter([0], m) == 0
    assert set_diameter([0, 1, 2], m) == pytest.approx(math.sqrt(2))
    a = 1 / 32
    sub = EuclideanMetric([[a], [3 * a], [5 * a], [7 * a]])
    assert set_diameter(range(4), sub) == 0.1875
    with pytest.raises(InputError):
        set_diameter([], m)


def test_hypercube_distance_examples():
    assert hypercube_distance(Hypercube((0, 0), 1), Hypercube((0.5, 0.5), 1)) == 0
    a = 1 / 32
    assert hypercube_distance(Hypercube((0,), 8 * a), Hypercube((1 - 8 * a,), 8 * a)) == 0.5
    # unit squares at the origin and at (3, 4): per-axis gaps (2, 3)
    assert hypercube_distance(Hypercube((0, 0), 1), Hypercube((3, 4), 1)) == pytest.approx(math.sqrt(13))
    with pytest.raises(InputError):
        hypercube_distance(Hypercube((0,), 1), Hypercube((0, 0), 1))


def test_hypercube_validation():
    with pytest.raises(InputError):
        Hypercube((0,), 0)
    with pytest.raises(InputError):
        Hypercube((math.nan,), 1)
    c = Hypercube((1, 2, 3), 2)
    assert c.diagonal == pytest.approx(2 * math.sqrt(3))
    assert c.max_corner == (3, 4, 5)


def test_smallest_enclosing_hypercube():
    c = smallest_enclosing_hypercube([[0, 0], [1, 2]])
    assert c.min_corner == (0, 0) and c.side == 2
    one = smallest_enclosing_hypercube([[0.3, 0.7]])
    assert one.side == 1 and one.contains((0.3, 0.7))
    a = 1 / 32
    lb = smallest_enclosing_hypercube([[a], [1 - a]])
    assert lb.contains((a,)) and lb.contains((1 - a,))


def test_duplicates_rejected():
    with pytest.raises(DuplicatePointError, match="coincide"):
        EuclideanMetric([[1, 1], [1, 1]])
    with pytest.raises(DuplicatePointError, match="duplicate"):
        EuclideanMetric([[1, 1], [1, 1], [0, 0]])
    with pytest.raises(InputError):
        EuclideanMetric([[0, math.inf]])


def test_matrix_validation():
    with pytest.raises(MetricError, match="symmetric"):
        MatrixMetric([[0, 1], [2, 0]])
    with pytest.raises(MetricError, match="diagonal"):
        MatrixMetric([[1, 1], [1, 0]])
    with pytest.raises(DuplicatePointError):
        MatrixMetric([[0, 0], [0, 0]])
    with pytest.raises(MetricError, match="triangle"):
        MatrixMetric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(MetricError, match="negative"):
        MatrixMetric([[0, -1], [-1, 0]])


def test_point_and_matrix_files(tmp_path):
    pts = np.array([[0.1, 0.2], [1.5, -3.0]])
    write_points(tmp_path / "p.csv", pts)
    (tmp_path / "q.csv").write_text("# header\n" + (tmp_path / "p.csv").read_text())
    assert np.array_equal(load_points(tmp_path / "q.csv"), pts)
    mat = EuclideanMetric(pts).matrix()
    write_matrix(tmp_path / "m.txt", mat)
    assert np.array_equal(load_matrix(tmp_path / "m.txt").mat, mat)
    (tmp_path / "bad.csv").write_text("1,2\n3\n")
    with pytest.raises(InputError):
        load_points(tmp_path / "bad.csv")


@given(
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.floats(0.1, 3),
    st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    st.floats(0.1, 3),
    st.lists(st.floats(0, 1), min_size=4, max_size=4),
)
def test_hypercube_distance_lower_bounds_point_distance(lo1, s1, lo2, s2, t):
    c1, c2 = Hypercube(tuple(lo1), s1), Hypercube(tuple(lo2), s2)
    p = np.array(lo1) + s1 * np.array(t[:2])
    q = np.array(lo2) + s2 * np.array(t[2:])
    assert hypercube_distance(c1, c2) <= math.dist(p, q) + 1e-12

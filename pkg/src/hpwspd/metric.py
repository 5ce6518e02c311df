"""Points, metrics, hypercubes and the elementary distance computations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DuplicatePointError, InputError, MetricError

# Exhaustive triangle-inequality validation is O(n^3); above this size only
# symmetry/positivity are checked.
TRIANGLE_CHECK_LIMIT = 500


@dataclass(frozen=True)
class Hypercube:
    """Axis-aligned cube ``[min_corner, min_corner + side]^d``."""

    min_corner: tuple[float, ...]
    side: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "min_corner", tuple(float(x) for x in self.min_corner))
        if not self.min_corner:
            raise InputError("hypercube needs at least one dimension")
        if not all(math.isfinite(x) for x in self.min_corner):
            raise InputError("hypercube corner must be finite")
        if not (self.side > 0 and math.isfinite(self.side)):
            raise InputError(f"hypercube side must be positive, got {self.side!r}")

    @property
    def dim(self) -> int:
        return len(self.min_corner)

    @property
    def max_corner(self) -> tuple[float, ...]:
        return tuple(x + self.side for x in self.min_corner)

    @property
    def diagonal(self) -> float:
        return self.side * math.sqrt(self.dim)

    def contains(self, point: Sequence[float], tol: float = 0.0) -> bool:
        return all(lo - tol <= x <= lo + self.side + tol for lo, x in zip(self.min_corner, point))

    def contains_cube(self, other: Hypercube, tol: float = 0.0) -> bool:
        return all(
            lo - tol <= olo and olo + other.side <= lo + self.side + tol
            for lo, olo in zip(self.min_corner, other.min_corner)
        )

    def __str__(self) -> str:
        return " x ".join(f"[{lo:.12g}, {lo + self.side:.12g}]" for lo in self.min_corner)


def euclidean_distance(p: Sequence[float], q: Sequence[float]) -> float:
    if len(p) != len(q):
        raise InputError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return math.dist(p, q)


def box_gap(lo1, hi1, lo2, hi2) -> float:
    """Euclidean distance between two closed axis-aligned boxes."""
    lo1, hi1, lo2, hi2 = (np.asarray(v, dtype=float) for v in (lo1, hi1, lo2, hi2))
    gap = np.maximum(0.0, np.maximum(lo1 - hi2, lo2 - hi1))
    return float(np.sqrt(np.dot(gap, gap)))


def hypercube_distance(c1: Hypercube, c2: Hypercube) -> float:
    if c1.dim != c2.dim:
        raise InputError(f"dimension mismatch: {c1.dim} vs {c2.dim}")
    return box_gap(c1.min_corner, c1.max_corner, c2.min_corner, c2.max_corner)


def smallest_enclosing_hypercube(coords) -> Hypercube:
    """Cube anchored at the coordinate-wise minimum with side = largest extent.

    A single point (or all-equal coordinates) gets side 1.
    """
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise InputError("cannot enclose an empty point set")
    lo = pts.min(axis=0)
    side = float((pts.max(axis=0) - lo).max())
    if side <= 0.0:
        side = 1.0
    return Hypercube(tuple(lo), side)


class Metric:
    """Distances between the ``n`` points of a point set, addressed by index."""

    kind: str = "abstract"
    n: int

    def distance(self, i: int, j: int) -> float:
        raise NotImplementedError

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        raise NotImplementedError

    def row(self, i: int) -> np.ndarray:
        return self.block([i], range(self.n))[0]

    def matrix(self) -> np.ndarray:
        idx = range(self.n)
        return self.block(idx, idx)

    def descriptor(self) -> dict:
        return {"kind": self.kind, "n": self.n}


class EuclideanMetric(Metric):
    kind = "euclidean"

    def __init__(self, coords) -> None:
        pts = np.array(coords, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InputError("expected a non-empty n x d coordinate array")
        if not np.all(np.isfinite(pts)):
            raise InputError("coordinates must be finite")
        _reject_duplicates(pts)
        pts.setflags(write=False)
        self.coords = pts
        self.n, self.dim = pts.shape

    def distance(self, i: int, j: int) -> float:
        return math.dist(self.coords[i], self.coords[j])

    def block(self, rows, cols) -> np.ndarray:
        return cdist(self.coords[list(rows)], self.coords[list(cols)])

    def descriptor(self) -> dict:
        return {"kind": self.kind, "n": self.n, "dim": self.dim}


class MatrixMetric(Metric):
    kind = "matrix"

    def __init__(self, matrix, *, source: str | None = None, check_triangle: bool | None = None) -> None:
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise MetricError("distance matrix must be square and non-empty")
        validate_metric_matrix(m, check_triangle=check_triangle)
        m.setflags(write=False)
        self.mat = m
        self.n = m.shape[0]
        self.source = source

    def distance(self, i: int, j: int) -> float:
        return float(self.mat[i, j])

    def block(self, rows, cols) -> np.ndarray:
        return self.mat[np.ix_(list(rows), list(cols))]

    def matrix(self) -> np.ndarray:
        return self.mat

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.source:
            d["source"] = self.source
        return d


def validate_metric_matrix(m: np.ndarray, *, check_triangle: bool | None = None) -> None:
    if not np.all(np.isfinite(m)):
        raise MetricError("distance matrix has non-finite entries")
    if np.any(m < 0):
        raise MetricError("distance matrix has negative entries")
    if np.any(np.diag(m) != 0):
        raise MetricError("distance matrix must have a zero diagonal")
    if not np.array_equal(m, m.T):
        raise MetricError("distance matrix is not symmetric")
    off = m[~np.eye(len(m), dtype=bool)]
    if off.size and off.min() <= 0:
        raise DuplicatePointError("two distinct points are at distance zero")
    if check_triangle is None:
        check_triangle = len(m) <= TRIANGLE_CHECK_LIMIT
    if check_triangle:
        tol = 1e-12 * max(1.0, float(m.max()))
        for k in range(len(m)):
            via = m[:, k, None] + m[None, k, :]
            bad = np.argwhere(m > via + tol)
            if bad.size:
                i, j = bad[0]
                raise MetricError(
                    f"triangle inequality fails: d({i},{j})={m[i, j]:.12g} > "
                    f"d({i},{k})+d({k},{j})={via[i, j]:.12g}"
                )


def _reject_duplicates(pts: np.ndarray) -> None:
    if len(pts) < 2:
        return
    uniq = np.unique(pts, axis=0)
    if len(uniq) == 1:
        raise DuplicatePointError(f"all {len(pts)} points coincide")
    if len(uniq) < len(pts):
        raise DuplicatePointError(f"{len(pts) - len(uniq)} duplicate point(s) in input")


def distance(p: int, q: int, m: Metric) -> float:
    for x in (p, q):
        if not 0 <= x < m.n:
            raise InputError(f"point index {x} out of range for {m.n} points")
    if p == q:
        return 0.0
    return m.distance(p, q)


def set_diameter(pts: Iterable[int], m: Metric) -> float:
    idx = list(pts)
    if not idx:
        raise InputError("diameter of an empty set is undefined")
    if len(idx) == 1:
        return 0.0
    if isinstance(m, EuclideanMetric):
        return float(pdist(m.coords[idx]).max())
    return float(m.block(idx, idx).max())


def set_distance(a: Iterable[int], b: Iterable[int], m: Metric) -> float:
    """min d(x, y) over x in a, y in b (brute force)."""
    return float(m.block(list(a), list(b)).min())


def load_points(path: str | Path) -> np.ndarray:
    """Read the CSV point format: one point per line, ``#`` comments."""
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
            if rows and len(row) != len(rows[0]):
                raise InputError(f"{path}:{lineno}: expected {len(rows[0])} coordinates, got {len(row)}")
            rows.append(row)
    if not rows:
        raise InputError(f"{path}: no points")
    return np.array(rows, dtype=float)


def load_matrix(path: str | Path) -> MatrixMetric:
    """Read an explicit metric: first line n, then n rows of n numbers."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InputError(f"{path}: empty matrix file")
    try:
        n = int(lines[0])
        rows = [[float(tok) for tok in ln.replace(",", " ").split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"{path}: expected {n} rows of {n} entries")
    return MatrixMetric(rows, source=str(path))


def write_points(path: str | Path, coords) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.atleast_2d(coords):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def write_matrix(path: str | Path, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(m)}\n")
        for row in m:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")

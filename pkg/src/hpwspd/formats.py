"""Spanner JSON, DOT and other text outputs, plus their loaders."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CorruptionError
from .metric import EuclideanMetric
from .pipeline import Build


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _num(x: float) -> float:
    return float(fmt(x))


def spanner_document(b: Build, seed: int | None = None) -> dict:
    hp = b.hp
    used = sorted({iv for a, c in b.wspd.pairs for iv in (hp.interval[a], hp.interval[c])})
    doc = {
        "n": b.n,
        "s": b.s,
        "tau": b.tau,
        "seed": seed,
        "metric": b.metric.descriptor(),
        "labels": hp.label_of_point,
        "intervals": [list(iv) for iv in used],
        "edges": [
            {
                "u": e.u,
                "v": e.v,
                "a_interval": list(hp.interval[e.a]),
                "b_interval": list(hp.interval[e.b]),
                "length": _num(e.length),
            }
            for e in b.graph.edges
        ],
    }
    if isinstance(b.metric, EuclideanMetric):
        doc["points"] = [[_num(x) for x in row] for row in b.metric.coords]
    else:
        doc["points"] = list(range(b.n))
    return doc


def spanner_json(b: Build, seed: int | None = None) -> str:
    return json.dumps(spanner_document(b, seed), indent=1, sort_keys=True) + "\n"


def spanner_dot(b: Build) -> str:
    lines = ["graph spanner {"]
    for x in range(1, b.n + 1):
        lines.append(f'  {x} [label="{x}"];')
    for e in b.graph.edges:
        lines.append(f'  {e.u} -- {e.v} [label="{fmt(e.length)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class LoadedSpanner:
    n: int
    s: float
    labels: list[int]
    weights: dict[tuple[int, int], float]

    def weight(self, x: int, y: int) -> float:
        try:
            return self.weights[(x, y)]
        except KeyError:
            raise CorruptionError(f"{x}->{y} is not a spanner edge") from None

    def label_of_point(self, p: int) -> int:
        return self.labels[p]


def load_spanner_json(text: str) -> LoadedSpanner:
    try:
        doc = json.loads(text)
        n = int(doc["n"])
        weights = {}
        for e in doc["edges"]:
            u, v, w = int(e["u"]), int(e["v"]), float(e["length"])
            weights[(u, v)] = weights[(v, u)] = w
        labels = [int(x) for x in doc["labels"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptionError(f"malformed spanner file: {exc}") from None
    if sorted(labels) != list(range(1, n + 1)):
        raise CorruptionError("spanner file labels are not a permutation of 1..n")
    return LoadedSpanner(n, float(doc["s"]), labels, weights)

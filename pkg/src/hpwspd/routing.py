"""Routing tables and the memoryless local routing function."""

from __future__ import annotations

import bisect
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CorruptionError, InputError
from .spanner import SpannerGraph

ASCEND = "ascend"
DESCEND = "descend"


@dataclass(frozen=True)
class RoutingEntry:
    x_v: int  # neighbour's label
    y_b: int  # hi of interval(b_v); its low end is x_v
    y_h: int  # hi of interval(h(v)); its low end is x_v


@dataclass(frozen=True)
class RoutingTable:
    x_u: int
    entries: tuple[RoutingEntry, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e.x_v)))

    @cached_property
    def _starts(self) -> list[int]:
        return [e.x_v for e in self.entries]

    @cached_property
    def ascend_entry(self) -> RoutingEntry | None:
        """Entry whose [x_v, y_h] is the smallest interval containing x_u.

        Depends on the table only, so it is computed once."""
        best = None
        for e in self.entries:
            if e.x_v <= self.x_u <= e.y_h and (best is None or e.y_h - e.x_v < best.y_h - best.x_v):
                best = e
        return best

    def descend_entry(self, x_q: int) -> RoutingEntry | None:
        """The entry with x_q in [x_v, y_b].  These intervals are pairwise
        disjoint within one table, so the last start <= x_q decides."""
        i = bisect.bisect_right(self._starts, x_q) - 1
        if i >= 0:
            e = self.entries[i]
            if x_q <= e.y_b:
                return e
        return None

    def __len__(self) -> int:
        return len(self.entries)


def make_routing_tables(g: SpannerGraph) -> dict[int, RoutingTable]:
    """Table of every vertex, keyed by label."""
    hp = g.hp
    rows: dict[int, list[RoutingEntry]] = {x: [] for x in range(1, g.n + 1)}
    for e in g.edges:
        if e.a < 0 or e.b < 0:
            raise CorruptionError(f"edge {{{e.u},{e.v}}} lacks its pair annotation")
        # u = r(a) stores v = r(b) together with b; v stores u with a
        for x_u, x_v, side in ((e.u, e.v, e.b), (e.v, e.u, e.a)):
            y_b = hp.interval[side][1]
            y_h = hp.apex_interval_of_label(x_v)[1]
            rows[x_u].append(RoutingEntry(x_v, y_b, y_h))
    return {x: RoutingTable(x, tuple(es)) for x, es in rows.items()}


def route_step_phase(x_u: int, x_q: int, table: RoutingTable) -> tuple[int, str]:
    """Next hop and the stage that chose it.  Descending is tried first."""
    if x_u == x_q:
        raise InputError("already at the destination")
    e = table.descend_entry(x_q)
    if e is not None:
        return e.x_v, DESCEND
    e = table.ascend_entry
    if e is not None:
        return e.x_v, ASCEND
    raise CorruptionError(f"no routing candidate at {x_u} toward {x_q}")


def route_step(x_u: int, x_q: int, table: RoutingTable) -> int:
    return route_step_phase(x_u, x_q, table)[0]


def next_hop_matrix(tables: dict[int, RoutingTable]) -> tuple[np.ndarray, np.ndarray]:
    """``nh[u, q]`` = route_step(u, q) for every label pair, and whether that
    hop ascends.  Rows and columns are labels (index 0 unused); ``nh[u, u] = u``
    and 0 marks a missing candidate."""
    n = len(tables)
    nh = np.zeros((n + 1, n + 1), dtype=np.int32)
    up = np.zeros((n + 1, n + 1), dtype=bool)
    q = np.arange(n + 1)
    for u in range(1, n + 1):
        t = tables[u]
        asc = t.ascend_entry
        fallback = asc.x_v if asc is not None else 0
        if t.entries:
            starts = np.array([e.x_v for e in t.entries])
            ends = np.array([e.y_b for e in t.entries])
            xv = starts
            i = np.searchsorted(starts, q, side="right") - 1
            hit = (i >= 0) & (q <= ends[np.maximum(i, 0)])
            nh[u] = np.where(hit, xv[np.maximum(i, 0)], fallback)
            up[u] = ~hit
        nh[u, u] = u
        up[u, u] = False
    return nh, up


def hop_budget(n: int) -> int:
    return 2 * math.ceil(math.log2(n)) + 1 if n > 1 else 1


def route(tables: dict[int, RoutingTable], x_p: int, x_q: int) -> list[int]:
    """Labels visited from p to q, both included."""
    return [x for x, _ in route_trace(tables, x_p, x_q)]


def route_trace(tables: dict[int, RoutingTable], x_p: int, x_q: int) -> list[tuple[int, str]]:
    """(label, phase of the hop that reached it); the source carries ''."""
    for x in (x_p, x_q):
        if x not in tables:
            raise InputError(f"unknown label {x!r}")
    budget = hop_budget(len(tables))
    out = [(x_p, "")]
    x = x_p
    while x != x_q:
        if len(out) > budget:
            raise CorruptionError(f"hop budget {budget} exceeded routing {x_p} -> {x_q}")
        x, phase = route_step_phase(x, x_q, tables[x])
        out.append((x, phase))
    return out


def field_width(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0


def table_bits(table: RoutingTable, n: int) -> int:
    return (3 * len(table) + 1) * field_width(n)


def encode_table(table: RoutingTable, n: int) -> tuple[bytes, int]:
    """Pack x_u then (x_v, y_b, y_h) per entry, each as label−1 in a
    ⌈lg n⌉-bit little-endian field.  Returns (bytes, bit count)."""
    w = field_width(n)
    values = [table.x_u] + [v for e in table.entries for v in (e.x_v, e.y_b, e.y_h)]
    acc = 0
    for i, v in enumerate(values):
        if not 1 <= v <= n:
            raise InputError(f"label {v} outside 1..{n}")
        acc |= (v - 1) << (i * w)
    nbits = len(values) * w
    return acc.to_bytes((nbits + 7) // 8, "little"), nbits


def decode_table(data: bytes, nbits: int, n: int) -> RoutingTable:
    w = field_width(n)
    if w == 0:
        return RoutingTable(1, ())
    count = nbits // w
    if count * w != nbits or (count - 1) % 3:
        raise CorruptionError(f"{nbits} bits is not a whole table for n={n}")
    acc = int.from_bytes(data, "little")
    mask = (1 << w) - 1
    values = [((acc >> (i * w)) & mask) + 1 for i in range(count)]
    entries = tuple(RoutingEntry(*values[i : i + 3]) for i in range(1, count, 3))
    return RoutingTable(values[0], entries)


def tables_csv(tables: dict[int, RoutingTable]) -> str:
    buf = io.StringIO()
    buf.write("u_label,x_v,y_b,y_h\n")
    for x in sorted(tables):
        for e in tables[x].entries:
            buf.write(f"{x},{e.x_v},{e.y_b},{e.y_h}\n")
    return buf.getvalue()


def load_tables_csv(text: str, n: int) -> dict[int, RoutingTable]:
    rows: dict[int, list[RoutingEntry]] = {x: [] for x in range(1, n + 1)}
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "u_label,x_v,y_b,y_h":
        raise CorruptionError("routing table file lacks its header")
    for lineno, line in enumerate(lines[1:], 2):
        try:
            u, xv, yb, yh = (int(t) for t in line.split(","))
        except ValueError:
            raise CorruptionError(f"line {lineno}: malformed row {line!r}") from None
        if u not in rows or not all(1 <= v <= n for v in (xv, yb, yh)):
            raise CorruptionError(f"line {lineno}: label outside 1..{n}")
        rows[u].append(RoutingEntry(xv, yb, yh))
    return {x: RoutingTable(x, tuple(es)) for x, es in rows.items()}


def check_tables(tables: dict[int, RoutingTable]) -> list[str]:
    """Exhaustive candidate-uniqueness sweep over every (vertex, destination)."""
    out = []
    n = len(tables)
    for x_u in sorted(tables):
        t = tables[x_u]
        for e in t.entries:
            if not (e.x_v <= e.y_b <= e.y_h):
                out.append(f"table {x_u}: entry {e} has inconsistent intervals")
        asc = sorted(((e.x_v, e.y_h) for e in t.entries if e.x_v <= x_u <= e.y_h), key=lambda iv: iv[1] - iv[0])
        if len(asc) > 1 and asc[0][1] - asc[0][0] == asc[1][1] - asc[1][0]:
            out.append(f"table {x_u}: ascending minimum is not unique")
        for a, b in zip(asc, asc[1:]):
            if not (b[0] <= a[0] and a[1] <= b[1]):
                out.append(f"table {x_u}: ascending candidates {a} and {b} are not nested")
        # candidates per destination label via a difference array
        cover = np.zeros(n + 2, dtype=np.int64)
        np.add.at(cover, [min(max(e.x_v, 0), n + 1) for e in t.entries], 1)
        np.add.at(cover, [min(max(e.y_b + 1, 0), n + 1) for e in t.entries], -1)
        hits = np.cumsum(cover)
        hits[x_u] = 0
        for x_q in np.flatnonzero(hits[1 : n + 1] > 1) + 1:
            out.append(f"table {x_u}: {hits[x_q]} descending candidates toward {x_q}")
    return out

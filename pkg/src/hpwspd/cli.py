"""Command-line entry point: build, route, verify, bench."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .decomposition import labels_csv
from .errors import CorruptionError, HpwError
from .formats import fmt, load_spanner_json, spanner_dot, spanner_json
from .harness import (
    LowerBoundInstance,
    euclidean_matrix,
    lower_bound_instance,
    measure_ratios,
    random_multiscale,
    random_unit_cube,
)
from .metric import EuclideanMetric, load_matrix, load_points
from .pipeline import Build, build_pipeline
from .routing import check_tables, load_tables_csv, route_trace, table_bits, tables_csv
from .verify import VerifyResult, run_suite
from .wspd import wspd_csv

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
WORKERS_ENV = "HPWSPD_WORKERS"


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", type=float, default=4.0, help="separation ratio (> 2)")
    common.add_argument("--tau", type=float, default=11.0, help="net-tree base (>= 11)")
    common.add_argument("--dim", type=int, default=2, help="dimension of generated points")
    common.add_argument("--n", type=int, default=256, help="number of generated points")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--metric", default="euclidean", help="euclidean | matrix:<path>")
    common.add_argument("--input", help="CSV point file (otherwise points are generated)")
    common.add_argument("--generator", choices=("uniform", "multiscale"), default="uniform")
    common.add_argument("--doubling", action="store_true", help="use the net-tree pipeline on generated points")
    common.add_argument("--lowerbound", action="store_true", help="use the eight-point lower-bound instance")
    common.add_argument("--eps", type=float, default=0.0, help="lower-bound perturbation")
    common.add_argument("--k", type=int, default=None, help="lower-bound exponent override (alpha = 2^-k)")
    common.add_argument("--out", default="out", help="output directory")

    p = argparse.ArgumentParser(prog="hpwspd", description="Heavy path WSPD spanners and local routing.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="build spanner and routing tables")
    r = sub.add_parser("route", parents=[common], help="route between two labels of a built spanner")
    r.add_argument("p", help="source label, or pK for the K-th input point")
    r.add_argument("q", help="destination label, or pK")
    v = sub.add_parser("verify", parents=[common], help="run every invariant suite")
    v.add_argument("--from", dest="from_dir", help="check the tables stored in a build directory instead")
    b = sub.add_parser("bench", parents=[common], help="ratio and size sweeps as CSV")
    b.add_argument("--sweep", choices=("s", "n", "tau"), default="s")
    b.add_argument("--values", help="comma-separated sweep values")
    return p


def _instance(args) -> tuple[Build, LowerBoundInstance | None]:
    if args.lowerbound:
        lb = lower_bound_instance(args.s, args.eps, args.k)
        m = EuclideanMetric(lb.points)
        return build_pipeline(m, args.s, root_cube=lb.root_cube, tie_break=lb.tie_break), lb
    if args.metric.startswith("matrix:"):
        m = load_matrix(args.metric[len("matrix:"):])
        return build_pipeline(m, args.s, tau=args.tau), None
    if args.metric != "euclidean":
        raise UsageError(f"unknown metric {args.metric!r}")
    if args.input:
        coords = load_points(args.input)
    elif args.generator == "multiscale":
        coords = random_multiscale(args.n, args.dim, args.seed)
    else:
        coords = random_unit_cube(args.n, args.dim, args.seed)
    if args.doubling:
        return build_pipeline(euclidean_matrix(coords), args.s, tau=args.tau), None
    return build_pipeline(EuclideanMetric(coords), args.s), None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_build(args) -> int:
    b, _ = _instance(args)
    out = Path(args.out)
    _write(out / "spanner.json", spanner_json(b, args.seed))
    _write(out / "tables.csv", tables_csv(b.tables))
    _write(out / "spanner.dot", spanner_dot(b))
    _write(out / "labels.csv", labels_csv(b.hp))
    _write(out / "wspd.csv", wspd_csv(b.wspd, b.hp))
    _write(out / "tree.txt", b.tree.dump(label_of=lambda p: b.hp.label_of_point[p]))
    bits = sum(table_bits(t, b.n) for t in b.tables.values())
    max_deg = max((b.graph.degree(x) for x in range(1, b.n + 1)), default=0)
    print(f"n={b.n} pairs={len(b.wspd)} edges={len(b.graph.edges)} max_degree={max_deg} "
          f"table_bits={bits} edges_per_point={fmt(len(b.graph.edges) / b.n)} seed={args.seed}")
    return EXIT_OK


def _parse_label(tok: str, labels: list[int]) -> int:
    try:
        if tok.startswith("p"):
            return labels[int(tok[1:]) - 1]
        return int(tok)
    except (ValueError, IndexError):
        raise UsageError(f"bad label {tok!r}") from None


def cmd_route(args) -> int:
    out = Path(args.out)
    try:
        sp = load_spanner_json((out / "spanner.json").read_text(encoding="utf-8"))
        tables = load_tables_csv((out / "tables.csv").read_text(encoding="utf-8"), sp.n)
    except OSError as exc:
        raise UsageError(f"cannot read build in {out}: {exc}") from None
    x_p, x_q = _parse_label(args.p, sp.labels), _parse_label(args.q, sp.labels)
    for x in (x_p, x_q):
        if not 1 <= x <= sp.n:
            raise UsageError(f"label {x} outside 1..{sp.n}")
    trace = route_trace(tables, x_p, x_q)
    print(f"start {x_p}")
    total = 0.0
    for (x, _), (y, phase) in zip(trace, trace[1:]):
        w = sp.weight(x, y)
        total += w
        print(f"{phase} {x} -> {y} length={fmt(w)}")
    print(f"hops={len(trace) - 1} length={fmt(total)}")
    return EXIT_OK


def _verify_stored(out: Path) -> VerifyResult:
    res = VerifyResult()
    sp = load_spanner_json((out / "spanner.json").read_text(encoding="utf-8"))
    tables = load_tables_csv((out / "tables.csv").read_text(encoding="utf-8"), sp.n)
    res.add("routing tables", check_tables(tables))
    failures = []
    for p in range(1, sp.n + 1):
        for q in range(1, sp.n + 1):
            if p == q:
                continue
            try:
                trace = route_trace(tables, p, q)
                for x, y in zip(trace, trace[1:]):
                    sp.weight(x[0], y[0])
            except CorruptionError as exc:
                failures.append(str(exc))
    res.add("routing delivery", failures)
    res.aggregates = {"n": sp.n, "s": sp.s, "failed_routes": len(failures)}
    return res


def cmd_verify(args) -> int:
    if args.from_dir:
        res = _verify_stored(Path(args.from_dir))
    else:
        b, lb = _instance(args)
        res = run_suite(b, seed=args.seed, lower_bound=lb)
    doc = res.document()
    doc["aggregates"] = {k: (float(fmt(v)) if isinstance(v, float) else v) for k, v in doc["aggregates"].items()}
    text = json.dumps(doc, indent=1) + "\n"
    sys.stdout.write(text)
    return EXIT_OK if res.ok else EXIT_VIOLATION


BENCH_COLUMNS = ("n", "d_or_tau", "s", "pairs", "edges", "max_spanning", "max_routing",
                 "max_hops", "mean_hops", "build_ms", "route_ns_per_hop")
BENCH_DEFAULTS = {"s": "2.5,3,4,6,8,16", "n": ",".join(str(2**k) for k in range(6, 14)), "tau": "11,16,32"}


def _bench_row(job: dict) -> list:
    t0 = time.perf_counter()
    if job["doubling"]:
        coords = random_multiscale(job["n"], job["dim"], job["seed"])
        b = build_pipeline(euclidean_matrix(coords), job["s"], tau=job["tau"])
    else:
        b = build_pipeline(EuclideanMetric(random_unit_cube(job["n"], job["dim"], job["seed"])), job["s"])
    build_ms = (time.perf_counter() - t0) * 1000
    t0 = time.perf_counter()
    rep = measure_ratios(b, seed=job["seed"])
    elapsed = time.perf_counter() - t0
    agg = rep.aggregates()
    hops = int(rep.routed_hops.sum())
    return [b.n, job["tau"] if job["doubling"] else job["dim"], job["s"], len(b.wspd), len(b.graph.edges),
            agg["max_spanning_ratio"], agg["max_routing_ratio"], agg["max_routed_hops"], agg["mean_routed_hops"],
            build_ms, elapsed * 1e9 / max(hops, 1)]


def cmd_bench(args) -> int:
    try:
        values = [float(v) for v in (args.values or BENCH_DEFAULTS[args.sweep]).split(",")]
    except ValueError:
        raise UsageError(f"bad --values {args.values!r}") from None
    jobs = []
    for v in values:
        job = {"n": args.n, "dim": args.dim, "s": args.s, "tau": args.tau, "seed": args.seed, "doubling": args.doubling}
        if args.sweep == "s":
            job["s"] = v
        elif args.sweep == "n":
            job["n"] = int(v)
        else:
            job["tau"], job["doubling"] = v, True
        jobs.append(job)
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_row, jobs))
    else:
        rows = [_bench_row(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, float) else x for x in row])
    text = buf.getvalue()
    sys.stdout.write(text)
    _write(Path(args.out) / f"bench_{args.sweep}.csv", text)
    return EXIT_OK


COMMANDS = {"build": cmd_build, "route": cmd_route, "verify": cmd_verify, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except CorruptionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (UsageError, HpwError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

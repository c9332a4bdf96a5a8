"""Command-line front end: build indexes, serve queries, benchmark, simulate.

Artifacts live in an index directory: `partition.txt`, `border_labels.bin`,
one `district_NNNN.bin` per district, and `manifest.json` with checksums,
stage timings, and size accounting. Exit codes: 0 ok, 1 input error,
2 correctness violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from .borders import BorderLabels
from .districts import DistrictIndex, aug_query, certified_local_query, load_district_index, save_district_index
from .errors import CorrectnessError, InputError
from .graph import Graph, dijkstra, dijkstra_pair, load_graph
from .labels import LabelSet, VertexOrder, label_stats, lambda_query, load_labels, save_labels
from .partition import Partition, load_partition, partition_region_growing, save_partition
from .pipeline import build_index_family, default_district_count
from .sim import (
    Topology,
    parse_topology_config,
    parse_workload,
    run_simulation,
    write_trace_csv,
)

PARTITION_FILE = "partition.txt"
BORDER_LABEL_FILE = "border_labels.bin"
MANIFEST_FILE = "manifest.json"


def _district_file(i: int) -> str:
    return f"district_{i:04d}.bin"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# build


def cmd_build(args) -> int:
    graph_path = Path(args.graph)
    graph = load_graph(graph_path)
    seed = args.seed
    if args.partition:
        text = Path(args.partition).read_text()
        partition = load_partition(text, graph)
        partition_desc = {"mode": "file", "path": str(args.partition)}
    else:
        m = args.districts or default_district_count(graph.vertex_count)
        partition = partition_region_growing(graph, m, seed)
        partition_desc = {"mode": "region-growing", "districts": m, "seed": seed}

    family, timings = build_index_family(graph, partition, parallel_districts=args.parallel_districts)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / PARTITION_FILE).write_text(save_partition(partition))
    with open(out / BORDER_LABEL_FILE, "wb") as fh:
        save_labels(
            family.border_labels.labels,
            fh,
            hubs_are_borders=True,
            border_count=family.borders.q,
        )
    bl_stats = label_stats(family.border_labels.labels)
    district_entries = []
    districts_bytes = 0
    for idx in family.district_indexes:
        name = _district_file(idx.district_id)
        with open(out / name, "wb") as fh:
            save_district_index(idx, fh)
        local = label_stats(idx.local_labels)
        aug = label_stats(idx.aug_labels)
        districts_bytes += local.byte_size + aug.byte_size
        district_entries.append(
            {
                "file": name,
                "district": idx.district_id,
                "vertices": idx.vertex_count,
                "borders": len(idx.border_locals),
                "shortcuts": len(idx.shortcuts),
                "local_entries": local.total_entries,
                "aug_entries": aug.total_entries,
                "bytes": local.byte_size + aug.byte_size,
            }
        )
    manifest = {
        "graph": {
            "path": str(graph_path),
            "sha256": _sha256(graph_path),
            "vertices": graph.vertex_count,
            "edges": graph.edge_count,
        },
        "partition": partition_desc,
        "seed": seed,
        "timings_s": {
            "border_labels": round(timings.border_label_s, 6),
            "districts": round(timings.districts_s, 6),
        },
        "parallel_districts": timings.parallel_districts,
        "border_count": family.borders.q,
        "sizes_bytes": {
            "border_labels": bl_stats.byte_size,
            "districts_total": districts_bytes,
        },
        "border_label_stats": {
            "entries": bl_stats.total_entries,
            "max_per_vertex": bl_stats.max_per_vertex,
            "mean_per_vertex": round(bl_stats.mean_per_vertex, 4),
        },
        "districts": district_entries,
    }
    (out / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(
        f"built {partition.district_count} districts, {family.borders.q} borders: "
        f"border labels {timings.border_label_s:.2f}s ({bl_stats.byte_size / 1e6:.1f} MB), "
        f"districts {timings.districts_s:.2f}s ({districts_bytes / 1e6:.1f} MB)"
    )
    return 0


# ---------------------------------------------------------------------------
# query serving


@dataclass
class IndexDir:
    """Lazily loaded persisted index family."""

    path: Path
    partition: Partition
    border_labels: LabelSet
    border_count: int
    _districts: dict = field(default_factory=dict)

    @classmethod
    def open(cls, path) -> "IndexDir":
        path = Path(path)
        part_file = path / PARTITION_FILE
        if not part_file.exists():
            raise InputError(f"no {PARTITION_FILE} in {path}")
        ids = [int(line) for line in part_file.read_text().split()]
        partition = Partition.from_assignment(ids)
        with open(path / BORDER_LABEL_FILE, "rb") as fh:
            labels, info = load_labels(fh)
        return cls(path, partition, labels, info.border_count)

    def district(self, i: int) -> DistrictIndex:
        idx = self._districts.get(i)
        if idx is None:
            with open(self.path / _district_file(i), "rb") as fh:
                idx = load_district_index(fh)
            if idx.district_id != i:
                raise InputError(f"{_district_file(i)} holds district {idx.district_id}")
            self._districts[i] = idx
        return idx

    def is_border(self, v: int) -> bool:
        # every border stores its own (v, 0) entry during its push
        hubs = self.border_labels.hubs[v]
        dists = self.border_labels.dists[v]
        for hub, d in zip(hubs, dists):
            if hub == v:
                return d == 0
            if hub > v:
                return False
        return False

    def dispatch(self, s: int, t: int):
        """(value, class tag): border labels for border/cross-district pairs,
        augmented district labels otherwise."""
        n = self.partition.vertex_count
        if not (0 <= s < n and 0 <= t < n):
            raise InputError(f"query ids ({s},{t}) out of range for {n} vertices")
        cross = self.partition.district_of[s] != self.partition.district_of[t]
        if cross or (self.is_border(s) and self.is_border(t)):
            return lambda_query(s, t, self.border_labels), "border"
        idx = self.district(self.partition.district_of[s])
        return aug_query(s, t, idx), "L+"


def cmd_query(args) -> int:
    index = IndexDir.open(args.index)
    value, tag = index.dispatch(args.s, args.t)
    print(f"{value} [{tag}]")
    return 0


# ---------------------------------------------------------------------------
# benchmark


@dataclass
class ClassStats:
    count: int = 0
    mean_us: float = 0.0
    p50_us: float = 0.0
    p99_us: float = 0.0
    max_us: float = 0.0


@dataclass
class BenchReport:
    query_count: int
    seed: int
    classes: dict  # tag -> ClassStats
    verified: int
    correct: int
    certified_rate: float


def _percentile(sorted_vals, fraction: float) -> float:
    if not sorted_vals:
        return 0.0
    pos = min(len(sorted_vals) - 1, max(0, round(fraction * (len(sorted_vals) - 1))))
    return sorted_vals[pos]


def _class_stats(samples_us) -> ClassStats:
    if not samples_us:
        return ClassStats()
    ordered = sorted(samples_us)
    return ClassStats(
        count=len(ordered),
        mean_us=statistics.fmean(ordered),
        p50_us=_percentile(ordered, 0.50),
        p99_us=_percentile(ordered, 0.99),
        max_us=ordered[-1],
    )


def cmd_bench(args) -> int:
    index = IndexDir.open(args.index)
    graph = load_graph(args.graph)
    if graph.vertex_count != index.partition.vertex_count:
        raise InputError("graph does not match the index directory")
    if args.n < 1:
        raise InputError("need n >= 1 queries")
    rng = random.Random(args.seed)
    n = graph.vertex_count
    pairs = []
    for _ in range(args.n):
        s = rng.randrange(n)
        t = rng.randrange(n - 1)
        if t >= s:
            t += 1
        pairs.append((s, t, rng.random() < args.verify_fraction))

    samples = {"border": [], "L+": [], "local_certified": []}
    verified = correct = 0
    certified_hits = certified_total = 0
    mismatches = []
    for s, t, check in pairs:
        start = time.perf_counter_ns()
        value, tag = index.dispatch(s, t)
        samples[tag].append((time.perf_counter_ns() - start) / 1000)
        if tag == "L+":
            idx = index.district(index.partition.district_of[s])
            start = time.perf_counter_ns()
            local_value, certified = certified_local_query(s, t, idx)
            samples["local_certified"].append((time.perf_counter_ns() - start) / 1000)
            certified_total += 1
            if certified:
                certified_hits += 1
                if local_value != value:
                    mismatches.append((s, t, local_value, value))
        if check:
            verified += 1
            if value == dijkstra_pair(graph, s, t):
                correct += 1
            else:
                mismatches.append((s, t, value, "oracle"))
    report = BenchReport(
        query_count=args.n,
        seed=args.seed,
        classes={tag: _class_stats(vals) for tag, vals in samples.items()},
        verified=verified,
        correct=correct,
        certified_rate=certified_hits / certified_total if certified_total else 0.0,
    )

    out_csv = Path(args.out) if args.out else Path(args.index) / "bench.csv"
    with open(out_csv, "w") as fh:
        fh.write("class,count,mean_us,p50_us,p99_us,max_us\n")
        for tag, st in report.classes.items():
            fh.write(f"{tag},{st.count},{st.mean_us:.3f},{st.p50_us:.3f},{st.p99_us:.3f},{st.max_us:.3f}\n")
    print(f"{'class':>16} {'count':>8} {'mean_us':>10} {'p50_us':>10} {'p99_us':>10} {'max_us':>10}")
    for tag, st in report.classes.items():
        print(f"{tag:>16} {st.count:>8} {st.mean_us:>10.2f} {st.p50_us:>10.2f} {st.p99_us:>10.2f} {st.max_us:>10.2f}")
    print(f"verified {report.verified} sampled queries, {report.correct} correct; "
          f"certified-local rate {report.certified_rate:.2%}")
    if mismatches:
        print(f"MISMATCHES: {mismatches[:5]}", file=sys.stderr)
        raise CorrectnessError(f"{len(mismatches)} benchmark answers disagreed with the oracle")
    if report.verified != report.correct:  # pragma: no cover - guarded above
        raise CorrectnessError("verification counter mismatch")
    return 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    graph = load_graph(args.graph)
    topology = parse_topology_config(Path(args.topology).read_text())
    if args.stale_reads:
        topology = Topology(**{**topology.__dict__, "stale_reads": True})
    if args.partition:
        partition = load_partition(Path(args.partition).read_text(), graph)
    else:
        m = args.districts or default_district_count(graph.vertex_count)
        partition = partition_region_growing(graph, m, args.seed)
    workload = parse_workload(Path(args.workload).read_text(), graph)
    result = run_simulation(graph, partition, topology, workload, args.seed, strict=False)
    with open(args.out, "w") as fh:
        write_trace_csv(result.records, fh)
    print(f"{len(result.records)} queries answered, {result.violations} incorrect")
    for ep in result.epochs:
        r1, r2, r3 = ep.rule_counts
        rebuild = f"rebuild gen {ep.rebuild_gen}" if ep.rebuild_gen is not None else "no rebuild"
        print(
            f"epoch {ep.epoch} (start {ep.start_ms} ms): {ep.updates} updates, {rebuild}; "
            f"answered {ep.answered} (r1={r1} r2={r2} r3={r3}), "
            f"certified {ep.certified}, stale {ep.stale}, incorrect {ep.incorrect}"
        )
    if result.violations:
        print(f"CORRECTNESS VIOLATIONS: {result.violations}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    graph = load_graph(args.graph)
    if graph.vertex_count > args.max_vertices:
        raise InputError(
            f"verify sweeps all pairs; {graph.vertex_count} vertices exceeds "
            f"--max-vertices {args.max_vertices}"
        )
    m = args.districts or default_district_count(graph.vertex_count)
    partition = partition_region_growing(graph, m, args.seed)
    family, _ = build_index_family(graph, partition)
    bl = family.border_labels.labels
    indexes = family.district_indexes
    district_of = partition.district_of
    is_border = family.borders.is_border
    checked = bad = 0
    for s in range(graph.vertex_count):
        truth = dijkstra(graph, s)
        for t in range(graph.vertex_count):
            if district_of[s] != district_of[t] or (is_border(s) and is_border(t)):
                value = lambda_query(s, t, bl)
            else:
                value = aug_query(s, t, indexes[district_of[s]])
            checked += 1
            if value != truth[t]:
                bad += 1
                if bad <= 5:
                    print(f"MISMATCH ({s},{t}): got {value}, oracle {truth[t]}", file=sys.stderr)
    print(f"verified {checked} pairs on {graph.vertex_count} vertices, {m} districts: {bad} mismatches")
    if bad:
        raise CorrectnessError(f"{bad} dispatch answers disagree with the Dijkstra oracle")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="borderlab",
        description="Exact road-network distance queries via border labeling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and persist all indexes")
    p.add_argument("graph", help="DIMACS .gr or .gr.gz file")
    p.add_argument("out", help="output index directory")
    p.add_argument("--districts", "-m", type=int, default=None)
    p.add_argument("--partition", default=None, help="external partition file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallel-districts", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer one query from a persisted index")
    p.add_argument("index", help="index directory")
    p.add_argument("s", type=int)
    p.add_argument("t", type=int)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="time seeded random queries through the dispatch path")
    p.add_argument("index", help="index directory")
    p.add_argument("graph", help="graph file for oracle verification")
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify-fraction", type=float, default=0.01)
    p.add_argument("--out", default=None, help="CSV path (default: <index>/bench.csv)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="run the edge-computing simulation")
    p.add_argument("graph")
    p.add_argument("topology", help="key=value topology config")
    p.add_argument("workload", help="Q/U schedule file")
    p.add_argument("out", help="trace CSV output path")
    p.add_argument("--districts", "-m", type=int, default=None)
    p.add_argument("--partition", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stale-reads", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="exhaustive oracle sweep on a small graph")
    p.add_argument("graph")
    p.add_argument("--districts", "-m", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=2000)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CorrectnessError as exc:
        print(f"correctness violation: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

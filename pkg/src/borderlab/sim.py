"""Deterministic discrete-event simulation of the two-tier query service.

One computing center holds the border labels; one edge server per district
holds that district's indexes; clients attach to an edge server and issue
distance queries. Edge weights change over time: each update is collected
immediately by its district's server (which rebuilds its plain local labels),
and at every epoch boundary the center pulls all updates seen so far, rebuilds
the border labels on that weight snapshot, and distributes fresh shortcut
weights to the edge servers, which then rebuild their augmented labels.

Routing rules:
  1. both endpoints in the origin server's district -> answered locally;
  2. both endpoints in one other district -> forwarded to that server through
     the center;
  3. endpoints in different districts -> answered by the center.

While a rebuilt index generation is still in flight, in-district queries are
answered through the plain local labels when the local-bound certificate
holds; uncertified queries wait for whichever index can answer them first
(the local augmented labels, or the center when both endpoints are borders).
With stale reads enabled they are instead served from the previous generation
and marked stale. Every answer is validated against an exact Dijkstra run on
the weight snapshot its serving index encodes; virtual time is integer
microseconds, so identical inputs give identical traces.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field

from .borders import build_border_labels
from .districts import augmented_graph, build_shortcuts, certify_local
from .errors import CorrectnessError, InputError, ParseError
from .graph import INF, Graph, dijkstra_pair
from .labels import LabelSet, build_pll, lambda_query
from .partition import Partition, extract_district_subgraph
from .pipeline import build_index_family, district_order


# ---------------------------------------------------------------------------
# configuration and workload


@dataclass(frozen=True)
class Topology:
    """Latency and cost model for the center/edge/client layering.

    Delays are one-way per link, in microseconds internally. Rebuild
    durations are fixed virtual costs standing in for measured build times;
    they keep the simulation deterministic.
    """

    client_edge_delay_us: int = 5_000
    edge_center_delay_us: int = 20_000
    edge_service_us: int = 0
    center_service_us: int = 0
    epoch_us: int = 60_000_000
    center_rebuild_us: int = 1_000_000
    edge_rebuild_us: int = 100_000
    stale_reads: bool = False

    def __post_init__(self):
        for name in (
            "client_edge_delay_us",
            "edge_center_delay_us",
            "edge_service_us",
            "center_service_us",
            "center_rebuild_us",
            "edge_rebuild_us",
        ):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be >= 0")
        if self.epoch_us <= 0:
            raise InputError("epoch_ms must be > 0")


_TOPOLOGY_KEYS = {
    "client_edge_delay_ms": ("client_edge_delay_us", 1000),
    "edge_center_delay_ms": ("edge_center_delay_us", 1000),
    "edge_service_us": ("edge_service_us", 1),
    "center_service_us": ("center_service_us", 1),
    "epoch_ms": ("epoch_us", 1000),
    "center_rebuild_ms": ("center_rebuild_us", 1000),
    "edge_rebuild_ms": ("edge_rebuild_us", 1000),
}


def parse_topology_config(text) -> Topology:
    """key=value lines; delays/epochs in ms, service times in microseconds;
    `stale_reads = on|off`. Unknown keys are parse errors."""
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", lineno)
        key, _, val = (part.strip() for part in line.partition("="))
        if key == "stale_reads":
            if val not in ("on", "off"):
                raise ParseError(f"stale_reads must be on or off, got {val!r}", lineno)
            values["stale_reads"] = val == "on"
            continue
        if key not in _TOPOLOGY_KEYS:
            raise ParseError(f"unknown topology key {key!r}", lineno)
        field_name, scale = _TOPOLOGY_KEYS[key]
        try:
            values[field_name] = int(val) * scale
        except ValueError:
            raise ParseError(f"malformed integer {val!r} for {key}", lineno) from None
    return Topology(**values)


@dataclass(frozen=True)
class QueryJob:
    time_us: int
    s: int
    t: int
    client: int  # vertex the issuing client sits at; fixes the origin server


@dataclass(frozen=True)
class UpdateJob:
    time_us: int
    u: int
    v: int
    weight: int


def generate_workload(
    graph: Graph, n_queries: int, n_updates: int, horizon_ms: int, seed: int
) -> list:
    """Seeded random schedule: uniform (s, t, client) triples with s != t and
    uniform arrival times; updates rescale a random existing edge's base
    weight by a factor in [0.5, 2.0], rounded and clamped to >= 1."""
    if n_queries < 0 or n_updates < 0:
        raise InputError("workload counts must be >= 0")
    if (n_queries or n_updates) and horizon_ms < 1:
        raise InputError("horizon must be >= 1 ms for a non-empty workload")
    n = graph.vertex_count
    if n_queries and n < 2:
        raise InputError("queries need at least two vertices")
    rng = random.Random(seed)
    edge_list = list(graph.edges())
    if n_updates and not edge_list:
        raise InputError("updates need at least one edge")
    jobs: list = []
    for _ in range(n_queries):
        s = rng.randrange(n)
        t = rng.randrange(n - 1)
        if t >= s:
            t += 1
        client = rng.randrange(n)
        jobs.append(QueryJob(rng.randrange(horizon_ms) * 1000, s, t, client))
    for _ in range(n_updates):
        u, v, w = edge_list[rng.randrange(len(edge_list))]
        factor = rng.uniform(0.5, 2.0)
        jobs.append(UpdateJob(rng.randrange(horizon_ms) * 1000, u, v, max(1, round(w * factor))))
    jobs.sort(key=lambda job: job.time_us)
    return jobs


def serialize_workload(jobs) -> str:
    """Text form: `Q <t_ms> <s> <t> <client>` / `U <t_ms> <u> <v> <new_w>`."""
    lines = []
    for job in jobs:
        t_ms = job.time_us // 1000
        if isinstance(job, QueryJob):
            lines.append(f"Q {t_ms} {job.s} {job.t} {job.client}\n")
        else:
            lines.append(f"U {t_ms} {job.u} {job.v} {job.weight}\n")
    return "".join(lines)


def parse_workload(text, graph: Graph) -> list:
    """Parse and validate a workload file against the graph.

    Q lines take an optional trailing client vertex (defaults to the origin
    s). Updates must name existing edges with new weight >= 1. Timestamps
    must be sorted non-decreasing.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    n = graph.vertex_count
    jobs: list = []
    last_time = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] not in ("Q", "U"):
            raise ParseError(f"unknown workload line type {tok[0]!r}", lineno)
        try:
            t_ms = int(tok[1])
        except (IndexError, ValueError):
            raise ParseError(f"malformed timestamp on {line!r}", lineno) from None
        if t_ms < 0:
            raise ParseError("negative timestamp", lineno)
        if tok[0] == "Q":
            if len(tok) not in (4, 5):
                raise ParseError(f"malformed query line {line!r}", lineno)
            try:
                s, t = int(tok[2]), int(tok[3])
                client = int(tok[4]) if len(tok) == 5 else s
            except ValueError:
                raise ParseError(f"malformed query line {line!r}", lineno) from None
            if not (0 <= s < n and 0 <= t < n and 0 <= client < n):
                raise ParseError(f"query vertex out of range in {line!r}", lineno)
            jobs.append(QueryJob(t_ms * 1000, s, t, client))
        else:
            if len(tok) != 5:
                raise ParseError(f"malformed update line {line!r}", lineno)
            try:
                u, v, w = int(tok[2]), int(tok[3]), int(tok[4])
            except ValueError:
                raise ParseError(f"malformed update line {line!r}", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"update vertex out of range in {line!r}", lineno)
            if not graph.has_edge(u, v):
                raise ParseError(f"update names a non-existent edge ({u},{v})", lineno)
            if w < 1:
                raise ParseError(f"update weight must be >= 1 in {line!r}", lineno)
            jobs.append(UpdateJob(t_ms * 1000, u, v, w))
        if jobs[-1].time_us < last_time:
            raise ParseError("workload timestamps must be sorted", lineno)
        last_time = jobs[-1].time_us
    return jobs


# ---------------------------------------------------------------------------
# routing and trace records

RULE_LOCAL = 1
RULE_REMOTE_DISTRICT = 2
RULE_CROSS_DISTRICT = 3


def route(query: tuple[int, int], partition: Partition, origin_server: int) -> int:
    """Which of the three routing rules applies to (s, t) issued at
    origin_server's district."""
    s, t = query
    n = partition.vertex_count
    if not (0 <= s < n and 0 <= t < n):
        raise InputError(f"query ({s},{t}) out of range")
    ds = partition.district_of[s]
    dt = partition.district_of[t]
    if ds != dt:
        return RULE_CROSS_DISTRICT
    if ds == origin_server:
        return RULE_LOCAL
    return RULE_REMOTE_DISTRICT


@dataclass(frozen=True)
class SimEvent:
    """One processed simulation event, for tracing."""

    time_us: int
    seq: int
    kind: str  # query-arrival | forward-to-center | forward-to-edge | answer
    #            | update-batch | rebuild-start | rebuild-complete
    #            | shortcut-distribution
    payload: dict


@dataclass
class QueryRecord:
    query_id: int
    s: int
    t: int
    origin_district: int
    arrival_us: int
    answer_us: int
    rule: int
    answered_by: str  # border | aug | local
    gen: int
    certified: bool
    stale: bool
    value: object  # int or INF
    correct: bool = False


@dataclass
class EpochSummary:
    epoch: int
    start_ms: int
    updates: int
    rebuild_gen: int | None
    answered: int
    rule_counts: tuple[int, int, int]
    certified: int
    stale: int
    incorrect: int


@dataclass
class SimResult:
    records: list
    epochs: list
    events: list
    seed: int
    violations: int = 0

    @property
    def all_correct(self) -> bool:
        return self.violations == 0


# ---------------------------------------------------------------------------
# simulator internals


@dataclass
class _DistrictStatics:
    to_global: list
    to_local: dict
    border_locals: list
    order: object  # VertexOrder reused for every rebuild of this district


@dataclass
class _EdgeServer:
    district: int
    applied_gen: int = 0
    li_labels: LabelSet | None = None
    li_version: tuple = (0, 0)  # (time_us, update count) the labels encode
    li_weights: dict = field(default_factory=dict)  # live intra-district weights
    li_snapshot: dict = field(default_factory=dict)  # weights current li_labels encode
    li_busy_until: int | None = None
    li_dirty: bool = False
    li_pending: tuple | None = None  # (labels, version, weights copy)
    waiting: list = field(default_factory=list)  # queries parked on a busy rebuild


class _Query:
    __slots__ = ("qid", "s", "t", "origin", "rule", "arrival_us", "answered")

    def __init__(self, qid, s, t, origin, rule, arrival_us):
        self.qid = qid
        self.s = s
        self.t = t
        self.origin = origin
        self.rule = rule
        self.arrival_us = arrival_us
        self.answered = False


class _Simulator:
    def __init__(self, graph, partition, topology, workload, seed):
        self.base_graph = graph
        self.partition = partition
        self.topology = topology
        self.workload = workload
        self.seed = seed
        self.events: list[SimEvent] = []
        self.records: list[QueryRecord] = []
        self.heap: list = []
        self.seq = itertools.count()
        self.updates_log: list = []  # (time_us, u, v, w) in processing order
        self.pulled_count = 0
        self.boundaries_scheduled: set[int] = set()
        self.pull_history: list = []  # (boundary_us, n_updates, gen)

        family, _ = build_index_family(graph, partition)
        self.borders = family.borders
        self.border_order = family.border_labels.order
        m = partition.district_count

        self.statics: list[_DistrictStatics] = []
        self.servers: list[_EdgeServer] = []
        for i in range(m):
            idx = family.district_indexes[i]
            sub = extract_district_subgraph(graph, partition, i)
            weights = {(lu, lv): w for lu, lv, w in sub.graph.edges()}
            self.statics.append(
                _DistrictStatics(
                    to_global=idx.to_global,
                    to_local=idx.to_local,
                    border_locals=idx.border_locals,
                    order=district_order(sub, idx.shortcuts),
                )
            )
            server = _EdgeServer(district=i)
            server.li_labels = idx.local_labels
            server.li_weights = dict(weights)
            server.li_snapshot = weights
            self.servers.append(server)

        # generation 0 is the pre-run build over the base weights
        self.gen = 0
        self.announced_gen = 0
        self.completed_gen = 0
        self.center_busy_until = 0
        self.center_ready_us = {0: 0}
        self.snapshot_by_gen = {0: graph}
        self.bl_by_gen = {0: family.border_labels.labels}
        self.aug_by_gen = {(0, i): family.district_indexes[i].aug_labels for i in range(m)}
        self.aug_ready_us = {(0, i): 0 for i in range(m)}
        self._oracle_cache: dict = {}

    # -- event plumbing -----------------------------------------------------

    def _push(self, time_us, kind, payload):
        heapq.heappush(self.heap, (time_us, next(self.seq), kind, payload))

    def _log(self, time_us, kind, payload):
        self.events.append(SimEvent(time_us, len(self.events), kind, payload))

    # -- setup --------------------------------------------------------------

    def schedule_workload(self):
        c_e = self.topology.client_edge_delay_us
        qid = 0
        for job in self.workload:
            if isinstance(job, QueryJob):
                origin = self.partition.district_of[job.client]
                rule = route((job.s, job.t), self.partition, origin)
                q = _Query(qid, job.s, job.t, origin, rule, job.time_us)
                qid += 1
                self._push(job.time_us + c_e, "query", q)
            else:
                self._push(job.time_us, "update", job)
        self.query_count = qid

    # -- main loop ----------------------------------------------------------

    def run(self):
        self.schedule_workload()
        while self.heap:
            time_us, _seq, kind, payload = heapq.heappop(self.heap)
            if kind == "query":
                self.on_query_arrival(time_us, payload)
            elif kind == "center":
                self.process_at_center(time_us, payload)
            elif kind == "host":
                self._log(time_us, "forward-to-edge", {"query": payload.qid})
                self.process_in_district(
                    time_us, payload, host=self.partition.district_of[payload.s]
                )
            elif kind == "update":
                self.on_update(time_us, payload)
            elif kind == "pull":
                self.on_pull(time_us)
            elif kind == "center_done":
                self.on_center_done(time_us, payload)
            elif kind == "distribute":
                self._log(time_us, "shortcut-distribution", payload)
            elif kind == "edge_apply":
                self.on_edge_apply(time_us, payload)
            elif kind == "li_done":
                self.on_li_done(time_us, payload)
            elif kind == "answer":
                self.on_answer(time_us, payload)
            else:  # pragma: no cover
                raise AssertionError(f"unknown event kind {kind}")
        return self.finish()

    # -- updates and rebuilds -----------------------------------------------

    def on_update(self, now, job: UpdateJob):
        self.updates_log.append((now, job.u, job.v, job.weight))
        self._log(now, "update-batch", {"edge": (job.u, job.v), "weight": job.weight})
        boundary = (now // self.topology.epoch_us + 1) * self.topology.epoch_us
        if boundary not in self.boundaries_scheduled:
            self.boundaries_scheduled.add(boundary)
            self._push(boundary, "pull", None)
        district_of = self.partition.district_of
        du, dv = district_of[job.u], district_of[job.v]
        if du == dv:
            server = self.servers[du]
            statics = self.statics[du]
            lu, lv = statics.to_local[job.u], statics.to_local[job.v]
            key = (lu, lv) if lu < lv else (lv, lu)
            server.li_weights[key] = job.weight
            self._start_li_rebuild(now, server)

    def _local_graph(self, district, weights) -> Graph:
        n_local = len(self.statics[district].to_global)
        return Graph(n_local, [(u, v, w) for (u, v), w in weights.items()])

    def _start_li_rebuild(self, now, server: _EdgeServer):
        if server.li_busy_until is not None:
            server.li_dirty = True
            return
        statics = self.statics[server.district]
        labels = build_pll(self._local_graph(server.district, server.li_weights), statics.order)
        version = (now, len(self.updates_log))
        server.li_pending = (labels, version, dict(server.li_weights))
        server.li_busy_until = now + self.topology.edge_rebuild_us
        server.li_dirty = False
        self._log(now, "rebuild-start", {"scope": "local", "district": server.district})
        self._push(server.li_busy_until, "li_done", server)

    def on_li_done(self, now, server: _EdgeServer):
        labels, version, weights = server.li_pending
        server.li_labels = labels
        server.li_version = version
        server.li_snapshot = weights
        server.li_pending = None
        server.li_busy_until = None
        self._log(now, "rebuild-complete", {"scope": "local", "district": server.district})
        if server.li_dirty:
            self._start_li_rebuild(now, server)
        waiting, server.waiting = server.waiting, []
        for query in waiting:
            self.process_in_district(now, query, host=server.district)

    def on_pull(self, now):
        pulled = [u for u in self.updates_log if u[0] < now]
        if len(pulled) <= self.pulled_count:
            return  # nothing new to fold into a snapshot
        new_count = len(pulled) - self.pulled_count
        self.pulled_count = len(pulled)
        self.gen += 1
        gen = self.gen
        self._log(now, "update-batch", {"scope": "center-pull", "updates": new_count, "gen": gen})
        snapshot = self._apply_updates(pulled)
        self.snapshot_by_gen[gen] = snapshot
        start = max(now, self.center_busy_until)
        done = start + self.topology.center_rebuild_us
        self.center_busy_until = done
        self.center_ready_us[gen] = done
        self.announced_gen = gen
        self.pull_history.append((now, new_count, gen))
        self._log(start, "rebuild-start", {"scope": "center", "gen": gen})

        # the real rebuild happens now; virtual completion is at `done`
        bl = build_border_labels(snapshot, self.borders, self.border_order)
        self.bl_by_gen[gen] = bl.labels
        e_c = self.topology.edge_center_delay_us
        rebuild = self.topology.edge_rebuild_us
        for i in range(self.partition.district_count):
            sub = extract_district_subgraph(snapshot, self.partition, i)
            shortcuts = build_shortcuts(bl, self.borders, i)
            aug = augmented_graph(sub, shortcuts)
            self.aug_by_gen[(gen, i)] = build_pll(aug, self.statics[i].order)
            self.aug_ready_us[(gen, i)] = done + e_c + rebuild
            self._push(done + e_c, "distribute", {"district": i, "gen": gen})
            self._push(done + e_c + rebuild, "edge_apply", (i, gen))
        self._push(done, "center_done", gen)

    def _apply_updates(self, updates) -> Graph:
        weights = {(u, v): w for u, v, w in self.base_graph.edges()}
        for _, u, v, w in updates:
            key = (u, v) if u < v else (v, u)
            weights[key] = w
        return Graph(self.base_graph.vertex_count, [(u, v, w) for (u, v), w in weights.items()])

    def on_center_done(self, now, gen):
        self.completed_gen = max(self.completed_gen, gen)
        self._log(now, "rebuild-complete", {"scope": "center", "gen": gen})

    def on_edge_apply(self, now, payload):
        district, gen = payload
        server = self.servers[district]
        server.applied_gen = max(server.applied_gen, gen)
        self._log(now, "rebuild-complete", {"scope": "edge", "district": district, "gen": gen})

    # -- query paths ----------------------------------------------------------

    def on_query_arrival(self, now, query: _Query):
        self._log(now, "query-arrival", {"query": query.qid, "rule": query.rule})
        e_c = self.topology.edge_center_delay_us
        if query.rule == RULE_LOCAL:
            self.process_in_district(now, query, host=query.origin)
        elif query.rule == RULE_REMOTE_DISTRICT:
            self._log(now, "forward-to-center", {"query": query.qid})
            self._push(now + 2 * e_c, "host", query)
        else:
            self._log(now, "forward-to-center", {"query": query.qid})
            self._push(now + e_c, "center", query)

    def process_at_center(self, now, query: _Query):
        """Cross-district answer via the border labels of the chosen generation."""
        top = self.topology
        target = self.announced_gen
        ready = self.center_ready_us[target]
        stale = False
        if ready > now and top.stale_reads:
            target = self.completed_gen
            ready = now
            stale = True
        done = max(now, ready) + top.center_service_us
        value = lambda_query(query.s, query.t, self.bl_by_gen[target])
        answer_us = done + top.edge_center_delay_us + top.client_edge_delay_us
        self._finish(query, answer_us, "border", target, value, certified=False, stale=stale)

    def process_in_district(self, now, query: _Query, host: int):
        """Rules 1 and 2 at the hosting edge server."""
        top = self.topology
        server = self.servers[host]
        statics = self.statics[host]
        target = self.announced_gen
        ready_here = self.aug_ready_us[(target, host)]
        if ready_here <= now:
            value = self._aug_value(target, host, query)
            self._answer_from_edge(query, now + top.edge_service_us, "aug", target, value)
            return
        # a fresher generation is still in flight
        if top.stale_reads:
            if server.li_busy_until is None:
                value, certified = self._certified_value(server, statics, query)
                if certified:
                    self._answer_from_edge(
                        query, now + top.edge_service_us, "local", target, value,
                        certified=True, server=server,
                    )
                    return
            value = self._aug_value(server.applied_gen, host, query)
            self._answer_from_edge(
                query, now + top.edge_service_us, "aug", server.applied_gen, value, stale=True
            )
            return
        if server.li_busy_until is not None:
            server.waiting.append(query)
            return
        value, certified = self._certified_value(server, statics, query)
        if certified:
            self._answer_from_edge(
                query, now + top.edge_service_us, "local", target, value,
                certified=True, server=server,
            )
            return
        # wait for the earliest index that can answer exactly
        local_done = max(now, ready_here) + top.edge_service_us
        local_answer = self._edge_answer_time(query, local_done)
        use_center = False
        if self.borders.is_border(query.s) and self.borders.is_border(query.t):
            center_done = (
                max(now + top.edge_center_delay_us, self.center_ready_us[target])
                + top.center_service_us
            )
            center_answer = center_done + top.edge_center_delay_us + top.client_edge_delay_us
            use_center = center_answer < local_answer
        if use_center:
            self._log(now, "forward-to-center", {"query": query.qid, "fallback": True})
            value = lambda_query(query.s, query.t, self.bl_by_gen[target])
            self._finish(query, center_answer, "border", target, value,
                         certified=False, stale=False)
        else:
            value = self._aug_value(target, host, query)
            self._finish(query, local_answer, "aug", target, value, certified=False, stale=False)

    def _aug_value(self, gen, district, query: _Query):
        statics = self.statics[district]
        return lambda_query(
            statics.to_local[query.s], statics.to_local[query.t], self.aug_by_gen[(gen, district)]
        )

    def _certified_value(self, server: _EdgeServer, statics: _DistrictStatics, query: _Query):
        return certify_local(
            statics.to_local[query.s],
            statics.to_local[query.t],
            server.li_labels,
            statics.border_locals,
        )

    def _edge_answer_time(self, query: _Query, done: int) -> int:
        top = self.topology
        if query.rule == RULE_LOCAL:
            return done + top.client_edge_delay_us
        return done + 2 * top.edge_center_delay_us + top.client_edge_delay_us

    def _answer_from_edge(self, query, done, kind, gen, value, certified=False, stale=False,
                          server=None):
        self._finish(query, self._edge_answer_time(query, done), kind, gen, value,
                     certified=certified, stale=stale, server=server)

    def _finish(self, query: _Query, answer_us, kind, gen, value, *, certified, stale,
                server: _EdgeServer | None = None):
        if query.answered:  # pragma: no cover - conservation guard
            raise CorrectnessError(f"query {query.qid} answered twice")
        query.answered = True
        record = QueryRecord(
            query_id=query.qid,
            s=query.s,
            t=query.t,
            origin_district=query.origin,
            arrival_us=query.arrival_us,
            answer_us=answer_us,
            rule=query.rule,
            answered_by=kind,
            gen=gen,
            certified=certified,
            stale=stale,
            value=value,
        )
        if kind == "local":
            # capture the exact weights the serving labels encode; the live
            # dict is replaced, never mutated, so the reference is stable
            oracle_key = ("local", gen, server.district, server.li_version, server.li_snapshot)
        else:
            oracle_key = (kind, gen, None, None, None)
        self._push(answer_us, "answer", (record, oracle_key))

    def on_answer(self, now, payload):
        record, oracle_key = payload
        record.correct = record.value == self._oracle_distance(record, oracle_key)
        self.records.append(record)
        self._log(now, "answer", {"query": record.query_id, "value": record.value})

    # -- oracle -------------------------------------------------------------

    def _oracle_distance(self, record: QueryRecord, oracle_key):
        kind, gen, district, li_version, li_weights = oracle_key
        if kind in ("border", "aug"):
            graph = self.snapshot_by_gen[gen]
        else:
            cache_key = ("overlay", gen, district, li_version)
            graph = self._oracle_cache.get(cache_key)
            if graph is None:
                graph = self._overlay_graph(gen, district, li_weights)
                self._oracle_cache[cache_key] = graph
        return dijkstra_pair(graph, record.s, record.t)

    def _overlay_graph(self, gen, district, li_weights) -> Graph:
        """Snapshot of generation `gen` with the district's intra edges
        replaced by the weights the serving local labels encoded."""
        snapshot = self.snapshot_by_gen[gen]
        district_of = self.partition.district_of
        to_global = self.statics[district].to_global
        edges = [
            (u, v, w)
            for u, v, w in snapshot.edges()
            if not (district_of[u] == district and district_of[v] == district)
        ]
        for (lu, lv), w in li_weights.items():
            edges.append((to_global[lu], to_global[lv], w))
        return Graph(snapshot.vertex_count, edges)

    # -- wrap-up ------------------------------------------------------------

    def finish(self) -> SimResult:
        if len(self.records) != self.query_count:
            raise CorrectnessError(
                f"conservation violated: {self.query_count} queries, {len(self.records)} answers"
            )
        self.records.sort(key=lambda r: r.query_id)
        violations = sum(1 for r in self.records if not r.correct)
        epochs = self._summarize()
        return SimResult(self.records, epochs, self.events, self.seed, violations)

    def _summarize(self) -> list[EpochSummary]:
        period = self.topology.epoch_us
        horizon = 0
        if self.records:
            horizon = max(horizon, max(r.answer_us for r in self.records))
        if self.updates_log:
            horizon = max(horizon, max(u[0] for u in self.updates_log))
        pulls = {t // period: gen for (t, _n, gen) in self.pull_history}
        summaries = []
        for e in range(horizon // period + 1):
            start, end = e * period, (e + 1) * period
            in_epoch = [r for r in self.records if start <= r.answer_us < end]
            rules = tuple(sum(1 for r in in_epoch if r.rule == k) for k in (1, 2, 3))
            summaries.append(
                EpochSummary(
                    epoch=e,
                    start_ms=start // 1000,
                    updates=sum(1 for u in self.updates_log if start <= u[0] < end),
                    rebuild_gen=pulls.get(e),
                    answered=len(in_epoch),
                    rule_counts=rules,
                    certified=sum(1 for r in in_epoch if r.certified),
                    stale=sum(1 for r in in_epoch if r.stale),
                    incorrect=sum(1 for r in in_epoch if not r.correct),
                )
            )
        return summaries


def run_simulation(
    graph: Graph,
    partition: Partition,
    topology: Topology,
    workload,
    seed: int = 0,
    *,
    strict: bool = True,
) -> SimResult:
    """Run the full choreography over a sorted query/update schedule.

    The trace is deterministic for fixed inputs; `seed` is recorded in the
    result for provenance (the event loop itself draws no randomness). With
    strict=True a CorrectnessError is raised if any answer disagrees with its
    oracle snapshot.
    """
    for a, b in zip(workload, workload[1:]):
        if b.time_us < a.time_us:
            raise InputError("workload timestamps must be sorted")
    n = graph.vertex_count
    for job in workload:
        if isinstance(job, QueryJob):
            if not (0 <= job.s < n and 0 <= job.t < n and 0 <= job.client < n):
                raise InputError(f"workload query ({job.s},{job.t}) out of range")
        else:
            if not graph.has_edge(job.u, job.v):
                raise InputError(f"workload update names unknown edge ({job.u},{job.v})")
            if job.weight < 1:
                raise InputError("workload update weight must be >= 1")
    result = _Simulator(graph, partition, topology, workload, seed).run()
    if strict and result.violations:
        first = next(r for r in result.records if not r.correct)
        raise CorrectnessError(
            f"{result.violations} answers disagree with the oracle; "
            f"first: query {first.query_id} ({first.s},{first.t}) -> {first.value}"
        )
    return result


def write_trace_csv(records, fp) -> None:
    """Fixed-column CSV trace; times in milliseconds with 3 decimals."""
    fp.write("query_id,arrival_ms,answer_ms,rule,certified,value,correct,stale\n")
    for r in records:
        value = "inf" if r.value == INF else str(r.value)
        fp.write(
            f"{r.query_id},{r.arrival_us / 1000:.3f},{r.answer_us / 1000:.3f},"
            f"{r.rule},{int(r.certified)},{value},{int(r.correct)},{int(r.stale)}\n"
        )

"""Two-hop-cover hub labeling: label sets, the linear-join query, vertex
ordering, and the pruned hub-pushing builder.

A label set stores, per vertex, (hub, distance) pairs sorted by hub id. A
distance query joins the two endpoint sequences in one linear merge and takes
the minimum hub-routed sum. The pruned builder pushes each hub with a Dijkstra
that skips (and stops expanding) any vertex already covered by earlier hubs.
"""

from __future__ import annotations

import struct
from array import array
from bisect import bisect_left
from dataclasses import dataclass
from heapq import heappop, heappush
from operator import add
from typing import Sequence

from .errors import InputError, ParseError
from .graph import INF, Graph, dijkstra

_MAGIC = b"BLIX"
_VERSION = 1
_FLAG_HUBS_ARE_BORDERS = 1


class LabelSet:
    """Per-vertex hub labels, each vertex's entries sorted by hub id."""

    def __init__(self, vertex_count: int):
        self.hubs: list[array] = [array("i") for _ in range(vertex_count)]
        self.dists: list[array] = [array("q") for _ in range(vertex_count)]

    @property
    def vertex_count(self) -> int:
        return len(self.hubs)

    @property
    def entry_count(self) -> int:
        return sum(len(h) for h in self.hubs)

    def insert(self, v: int, hub: int, dist: int) -> None:
        """Insert one entry keeping v's sequence sorted; hub must be new to v."""
        pos = bisect_left(self.hubs[v], hub)
        self.hubs[v].insert(pos, hub)
        self.dists[v].insert(pos, dist)

    def entries(self, v: int) -> list[tuple[int, int]]:
        return list(zip(self.hubs[v], self.dists[v]))

    def label_size(self, v: int) -> int:
        return len(self.hubs[v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelSet):
            return NotImplemented
        return self.hubs == other.hubs and self.dists == other.dists

    def __repr__(self) -> str:
        return f"LabelSet(vertices={self.vertex_count}, entries={self.entry_count})"


@dataclass(frozen=True)
class LabelStats:
    total_entries: int
    max_per_vertex: int
    mean_per_vertex: float
    byte_size: int  # 8 bytes per entry: 32-bit hub + 32-bit distance


def label_stats(labels: LabelSet) -> LabelStats:
    """Index-size accounting at 8 bytes per (hub, dist) entry."""
    sizes = [len(h) for h in labels.hubs]
    total = sum(sizes)
    if not sizes:
        return LabelStats(0, 0, 0.0, 0)
    return LabelStats(total, max(sizes), total / len(sizes), total * 8)


@dataclass(frozen=True)
class VertexOrder:
    """Total priority order over a vertex scope; position 0 pushes first."""

    sequence: tuple[int, ...]
    rank: dict[int, int]

    @classmethod
    def from_sequence(cls, sequence: Sequence[int]) -> "VertexOrder":
        seq = tuple(sequence)
        rank = {v: k for k, v in enumerate(seq)}
        if len(rank) != len(seq):
            raise InputError("order contains duplicate vertices")
        return cls(seq, rank)

    def __len__(self) -> int:
        return len(self.sequence)


def degree_order(graph: Graph, scope: Sequence[int]) -> VertexOrder:
    """Scope sorted by descending degree; ties broken by ascending vertex id."""
    scope = list(scope)
    if not scope:
        raise InputError("empty ordering scope")
    for v in scope:
        if not (0 <= v < graph.vertex_count):
            raise InputError(f"scope vertex {v} out of range")
    scope.sort(key=lambda v: (-graph.degree(v), v))
    return VertexOrder.from_sequence(scope)


def lambda_query(s: int, t: int, labels: LabelSet):
    """Linear-join distance query: min over common hubs of the summed
    distances; INF when the two hub sets are disjoint."""
    n = labels.vertex_count
    if not (0 <= s < n and 0 <= t < n):
        raise InputError(f"query ids ({s},{t}) out of range for {n} labeled vertices")
    return _merge_join(labels.hubs[s], labels.dists[s], labels.hubs[t], labels.dists[t])[0]


def lambda_query_counted(s: int, t: int, labels: LabelSet):
    """lambda_query plus the number of entries the merge touched
    (at most |L(s)| + |L(t)|)."""
    n = labels.vertex_count
    if not (0 <= s < n and 0 <= t < n):
        raise InputError(f"query ids ({s},{t}) out of range for {n} labeled vertices")
    return _merge_join(labels.hubs[s], labels.dists[s], labels.hubs[t], labels.dists[t])


def _merge_join(hs, ds, ht, dt):
    best = INF
    i = j = 0
    len_s, len_t = len(hs), len(ht)
    while i < len_s and j < len_t:
        a = hs[i]
        b = ht[j]
        if a == b:
            total = ds[i] + dt[j]
            if total < best:
                best = total
            i += 1
            j += 1
        elif a < b:
            i += 1
        else:
            j += 1
    return best, i + j


def pruned_push(graph: Graph, labels: LabelSet, root: int) -> None:
    """Push one hub: Dijkstra from root over graph, storing (root, d) at every
    settled vertex not already covered by earlier hubs.

    Covered means the two-sided label probe between root and the vertex is
    <= the settled distance; covered vertices are neither labeled nor
    expanded. The root stores its own (root, 0) entry unconditionally.
    """
    _pruned_push(graph, labels, root, [INF] * graph.vertex_count)


def _pruned_push(graph: Graph, labels: LabelSet, root: int, root_dist: list) -> None:
    # root_dist is INF-filled scratch indexed by hub id; restored before return
    labels.insert(root, root, 0)
    root_hubs = labels.hubs[root]
    for hub, d in zip(root_hubs, labels.dists[root]):
        root_dist[hub] = d
    hubs = labels.hubs
    dists = labels.dists
    nbrs = graph._nbr
    wts = graph._wt
    dist: dict[int, int] = {root: 0}
    dist_get = dist.get
    heap = [(0, root)]
    scratch_get = root_dist.__getitem__
    try:
        while heap:
            d, u = heappop(heap)
            if d > dist[u]:
                continue
            if u != root:
                # min over common hubs of stored + root-side distance;
                # misses cost INF, so no membership test is needed
                probe = min(map(add, dists[u], map(scratch_get, hubs[u])), default=INF)
                if probe <= d:
                    continue  # covered by earlier hubs: no label, no expansion
                labels.insert(u, root, d)
            for v, w in zip(nbrs[u], wts[u]):
                nd = d + w
                if nd < dist_get(v, INF):
                    dist[v] = nd
                    heappush(heap, (nd, v))
    finally:
        for hub in root_hubs:
            root_dist[hub] = INF


def _require_cover(graph: Graph, order: VertexOrder) -> None:
    if len(order) != graph.vertex_count or any(
        v not in order.rank for v in range(graph.vertex_count)
    ):
        raise InputError("order must cover every vertex of the graph exactly once")


def build_pll(graph: Graph, order: VertexOrder) -> LabelSet:
    """Pruned hub pushing over every vertex in priority order; the result is
    a 2-hop cover (lambda_query equals the true distance for every pair)."""
    _require_cover(graph, order)
    labels = LabelSet(graph.vertex_count)
    scratch = [INF] * graph.vertex_count
    for root in order.sequence:
        _pruned_push(graph, labels, root, scratch)
    return labels


def build_unpruned(graph: Graph, order: VertexOrder) -> LabelSet:
    """Exhaustive hub pushing (no pruning): hub v lands on every reachable
    vertex of equal or lower priority. Test oracle for pruning equivalence."""
    _require_cover(graph, order)
    labels = LabelSet(graph.vertex_count)
    rank = order.rank
    for root in order.sequence:
        root_rank = rank[root]
        dist = dijkstra(graph, root)
        for u, d in enumerate(dist):
            if d != INF and rank[u] >= root_rank:
                labels.insert(u, root, d)
    return labels


def save_labels(labels: LabelSet, fp, *, hubs_are_borders: bool = False, border_count: int = 0) -> None:
    """Write the little-endian binary label format.

    Header: magic, version, flags, vertex count, border count; then per vertex
    an entry count followed by (hub, dist) pairs as 32-bit unsigned ints.
    Distances that do not fit in 32 bits are a range error.
    """
    flags = _FLAG_HUBS_ARE_BORDERS if hubs_are_borders else 0
    fp.write(struct.pack("<4sHHII", _MAGIC, _VERSION, flags, labels.vertex_count, border_count))
    for v in range(labels.vertex_count):
        hubs = labels.hubs[v]
        dists = labels.dists[v]
        for d in dists:
            if d > 0xFFFFFFFF:
                raise InputError(f"label distance {d} at vertex {v} exceeds 32-bit range")
        flat = [x for pair in zip(hubs, dists) for x in pair]
        fp.write(struct.pack(f"<I{len(flat)}I", len(hubs), *flat))


@dataclass(frozen=True)
class LabelFileInfo:
    hubs_are_borders: bool
    border_count: int


def load_labels(fp) -> tuple[LabelSet, LabelFileInfo]:
    """Read the binary label format back; validates magic, version, and
    per-vertex hub ordering."""
    header = fp.read(16)
    if len(header) != 16:
        raise ParseError("truncated label file header")
    magic, version, flags, vertex_count, border_count = struct.unpack("<4sHHII", header)
    if magic != _MAGIC:
        raise ParseError(f"bad label file magic {magic!r}")
    if version != _VERSION:
        raise ParseError(f"unsupported label file version {version}")
    labels = LabelSet(vertex_count)
    for v in range(vertex_count):
        raw = fp.read(4)
        if len(raw) != 4:
            raise ParseError(f"truncated label file at vertex {v}")
        (count,) = struct.unpack("<I", raw)
        payload = fp.read(8 * count)
        if len(payload) != 8 * count:
            raise ParseError(f"truncated label entries at vertex {v}")
        flat = struct.unpack(f"<{2 * count}I", payload)
        hubs = array("i", flat[0::2])
        dists = array("q", flat[1::2])
        for k in range(1, count):
            if hubs[k] <= hubs[k - 1]:
                raise ParseError(f"label hubs not strictly increasing at vertex {v}")
        labels.hubs[v] = hubs
        labels.dists[v] = dists
    return labels, LabelFileInfo(bool(flags & _FLAG_HUBS_ARE_BORDERS), border_count)

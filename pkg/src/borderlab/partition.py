"""District decomposition: region-growing partitioner, border sets, subgraphs.

Districts are mutually exclusive and exhaustive blocks of the vertex set. A
border vertex is a district member with at least one neighbor outside its
district; every path between districts must pass through at least one border.
"""

from __future__ import annotations

import heapq
import random
from array import array
from collections import deque
from dataclasses import dataclass, field

from .errors import InputError, ParseError
from .graph import INF, Graph


@dataclass
class Partition:
    """Vertex -> district assignment with the per-district member lists."""

    district_of: array  # array('i'), one district id per vertex
    district_count: int
    district_vertices: list[list[int]]  # per district, ascending vertex ids

    @classmethod
    def from_assignment(cls, assignment) -> "Partition":
        """Build and validate from a per-vertex district-id sequence.

        District ids must be 0..m-1 with no gaps and every district non-empty.
        """
        district_of = array("i", assignment)
        if len(district_of) == 0:
            raise InputError("empty assignment")
        m = max(district_of) + 1
        members: list[list[int]] = [[] for _ in range(m)]
        for v, d in enumerate(district_of):
            if d < 0:
                raise InputError(f"negative district id {d} for vertex {v}")
            members[d].append(v)
        for d, verts in enumerate(members):
            if not verts:
                raise InputError(f"district {d} is unused (ids must have no gaps)")
        return cls(district_of, m, members)

    @property
    def vertex_count(self) -> int:
        return len(self.district_of)


@dataclass
class BorderSet:
    """Per-district border vertex lists plus the flattened global set."""

    per_district: list[list[int]]  # sorted ascending within each district
    all_borders: list[int]  # sorted ascending, disjoint union of the above
    _is_border: array = field(repr=False)  # array('b') membership flags

    @property
    def q(self) -> int:
        return len(self.all_borders)

    def is_border(self, v: int) -> bool:
        return bool(self._is_border[v])


@dataclass
class DistrictSubgraph:
    """A district's induced graph over local 0-based ids with id mappings."""

    district_id: int
    graph: Graph
    to_global: list[int]  # local id -> global id, ascending
    to_local: dict[int, int]  # global id -> local id


def partition_region_growing(graph: Graph, m: int, seed: int) -> Partition:
    """Split the graph into m districts by balanced multi-source BFS growth.

    Seeds are spread with a farthest-point heuristic (first seed from the
    seeded RNG, each next seed maximizes hop distance to the chosen ones),
    then districts claim vertices in rounds, always growing the currently
    smallest district with a live frontier. On a connected graph every
    district induces a connected subgraph; components left without a seed
    are assigned wholly to the smallest district. Deterministic for fixed
    (graph, m, seed).
    """
    n = graph.vertex_count
    if not (1 <= m <= n):
        raise InputError(f"district count {m} must be in [1, {n}]")
    rng = random.Random(seed)
    nbrs = graph._nbr

    seeds = [rng.randrange(n)]
    nearest = [INF] * n
    for k in range(m):
        if k > 0:
            # farthest remaining vertex; unreached components win first
            best_v, best_d = -1, -1
            for v in range(n):
                d = nearest[v]
                if d == INF:
                    best_v = v
                    break
                if d > best_d:
                    best_v, best_d = v, d
            seeds.append(best_v)
        # relax hop distances from the newest seed only
        s = seeds[-1]
        if nearest[s] != 0:
            nearest[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                du = nearest[u] + 1
                for v in nbrs[u]:
                    if du < nearest[v]:
                        nearest[v] = du
                        queue.append(v)

    district_of = array("i", [-1] * n)
    frontiers: list[deque[int]] = []
    sizes = [0] * m
    heap: list[tuple[int, int]] = []
    for i, s in enumerate(seeds):
        district_of[s] = i
        sizes[i] = 1
        frontiers.append(deque(v for v in nbrs[s] if district_of[v] < 0))
        heapq.heappush(heap, (1, i))
    while heap:
        size, i = heapq.heappop(heap)
        if size != sizes[i]:
            continue  # stale entry
        claimed = -1
        frontier = frontiers[i]
        while frontier:
            v = frontier.popleft()
            if district_of[v] < 0:
                claimed = v
                break
        if claimed < 0:
            continue  # frontier exhausted; district stops growing
        district_of[claimed] = i
        sizes[i] += 1
        frontier.extend(v for v in nbrs[claimed] if district_of[v] < 0)
        heapq.heappush(heap, (sizes[i], i))

    # components no seed reached: hand each one whole to the smallest district
    for v in range(n):
        if district_of[v] >= 0:
            continue
        target = min(range(m), key=lambda i: (sizes[i], i))
        queue = deque([v])
        district_of[v] = target
        sizes[target] += 1
        while queue:
            u = queue.popleft()
            for w in nbrs[u]:
                if district_of[w] < 0:
                    district_of[w] = target
                    sizes[target] += 1
                    queue.append(w)
    return Partition.from_assignment(district_of)


def save_partition(partition: Partition) -> str:
    """One decimal district id per line, vertex order = line order."""
    return "".join(f"{d}\n" for d in partition.district_of)


def load_partition(text, graph: Graph) -> Partition:
    """Parse the one-id-per-line partition format and validate against graph."""
    if isinstance(text, bytes):
        text = text.decode("ascii", errors="replace")
    ids: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            ids.append(int(line))
        except ValueError:
            raise ParseError(f"malformed district id {line!r}", lineno) from None
    if len(ids) != graph.vertex_count:
        raise InputError(
            f"partition has {len(ids)} lines but graph has {graph.vertex_count} vertices"
        )
    return Partition.from_assignment(ids)


def compute_borders(graph: Graph, partition: Partition) -> BorderSet:
    """Exact border sets: a vertex is a border iff some neighbor is foreign."""
    if partition.vertex_count != graph.vertex_count:
        raise InputError("partition does not match graph")
    district_of = partition.district_of
    flags = array("b", bytes(graph.vertex_count))
    for u in range(graph.vertex_count):
        du = district_of[u]
        for v in graph._nbr[u]:
            if district_of[v] != du:
                flags[u] = 1
                break
    per_district: list[list[int]] = [[] for _ in range(partition.district_count)]
    all_borders: list[int] = []
    for v in range(graph.vertex_count):
        if flags[v]:
            per_district[district_of[v]].append(v)
            all_borders.append(v)
    return BorderSet(per_district, all_borders, flags)


def extract_district_subgraph(graph: Graph, partition: Partition, i: int) -> DistrictSubgraph:
    """Induced subgraph of district i (intra-district edges only)."""
    if not (0 <= i < partition.district_count):
        raise InputError(f"district {i} out of range [0, {partition.district_count})")
    members = partition.district_vertices[i]
    to_local = {g: l for l, g in enumerate(members)}
    district_of = partition.district_of
    edges = []
    for g in members:
        lu = to_local[g]
        for v, w in zip(graph._nbr[g], graph._wt[g]):
            if g < v and district_of[v] == i:
                edges.append((lu, to_local[v], w))
    return DistrictSubgraph(i, Graph(len(members), edges), list(members), to_local)

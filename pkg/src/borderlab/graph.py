"""Weighted road-network graph, exact Dijkstra oracle, and DIMACS .gr ingestion.

Vertices are dense 0-based integer ids. Edge weights are non-negative integers
that fit in 32 bits; distances are accumulated as Python ints (no floating
point enters distance arithmetic). Unreachable is the INF sentinel, which
compares greater than every finite distance.
"""

from __future__ import annotations

import gzip
import heapq
import io
import math
from array import array
from typing import Iterable, Iterator

from .errors import InputError, ParseError

#: Distance sentinel for "no path". Finite distances are always ints.
INF = math.inf

_MAX_WEIGHT = 2**32 - 1


class Graph:
    """Immutable symmetric adjacency structure.

    Self-loops are dropped and parallel edges collapse to the minimum weight
    at construction; if both directions of a pair are supplied with different
    weights, the minimum wins for both (the structure is always symmetric).
    Safe for concurrent reads once built.
    """

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int, int]] = ()):
        if vertex_count < 0:
            raise InputError(f"vertex_count must be >= 0, got {vertex_count}")
        self.vertex_count = vertex_count
        self.undirected = True
        best: dict[tuple[int, int], int] = {}
        for u, v, w in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InputError(f"edge ({u},{v}) out of range for {vertex_count} vertices")
            if w < 0:
                raise InputError(f"negative weight {w} on edge ({u},{v})")
            if w > _MAX_WEIGHT:
                raise InputError(f"weight {w} on edge ({u},{v}) exceeds 32 bits")
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            prev = best.get(key)
            if prev is None or w < prev:
                best[key] = w
        nbr = [array("i") for _ in range(vertex_count)]
        wts = [array("q") for _ in range(vertex_count)]
        for (u, v), w in sorted(best.items()):
            nbr[u].append(v)
            wts[u].append(w)
            nbr[v].append(u)
            wts[v].append(w)
        # second endpoint appends arrive out of order; sort per vertex
        for v in range(vertex_count):
            if len(nbr[v]) > 1:
                pairs = sorted(zip(nbr[v], wts[v]))
                nbr[v] = array("i", (p[0] for p in pairs))
                wts[v] = array("q", (p[1] for p in pairs))
        self._nbr = nbr
        self._wt = wts

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return sum(len(a) for a in self._nbr) // 2

    def degree(self, v: int) -> int:
        return len(self._nbr[v])

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """(neighbor, weight) pairs for v, sorted by neighbor id."""
        return list(zip(self._nbr[v], self._wt[v]))

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """All undirected edges as (u, v, w) with u < v."""
        for u in range(self.vertex_count):
            nbr, wts = self._nbr[u], self._wt[u]
            for v, w in zip(nbr, wts):
                if u < v:
                    yield u, v, w

    def has_edge(self, u: int, v: int) -> bool:
        nbr = self._nbr[u]
        lo, hi = 0, len(nbr)
        while lo < hi:
            mid = (lo + hi) // 2
            if nbr[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(nbr) and nbr[lo] == v

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self._nbr == other._nbr
            and self._wt == other._wt
        )

    def __repr__(self) -> str:
        return f"Graph(vertices={self.vertex_count}, edges={self.edge_count})"


def _check_vertex(graph: Graph, v: int, name: str = "vertex") -> None:
    if not (0 <= v < graph.vertex_count):
        raise InputError(f"{name} {v} out of range for {graph.vertex_count} vertices")


def dijkstra(graph: Graph, source: int) -> list:
    """Exact distances from source to every vertex; INF where unreachable.

    Lazy-deletion binary heap; heap ties settle the lower vertex id first.
    Scratch state is per-call, so concurrent calls on one Graph are fine.
    """
    _check_vertex(graph, source, "source")
    n = graph.vertex_count
    dist: list = [INF] * n
    dist[source] = 0
    heap = [(0, source)]
    pop = heapq.heappop
    push = heapq.heappush
    nbrs = graph._nbr
    wts = graph._wt
    while heap:
        d, u = pop(heap)
        if d > dist[u]:
            continue
        for v, w in zip(nbrs[u], wts[u]):
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                push(heap, (nd, v))
    return dist


def dijkstra_pair(graph: Graph, s: int, t: int):
    """Point-to-point distance with early exit once t is settled."""
    _check_vertex(graph, s, "s")
    _check_vertex(graph, t, "t")
    if s == t:
        return 0
    dist: dict[int, int] = {s: 0}
    heap = [(0, s)]
    pop = heapq.heappop
    push = heapq.heappush
    nbrs = graph._nbr
    wts = graph._wt
    settled = set()
    while heap:
        d, u = pop(heap)
        if u in settled:
            continue
        if u == t:
            return d
        settled.add(u)
        for v, w in zip(nbrs[u], wts[u]):
            nd = d + w
            if v not in settled and nd < dist.get(v, INF):
                dist[v] = nd
                push(heap, (nd, v))
    return INF


def parse_dimacs(gr_text) -> Graph:
    """Parse the 9th DIMACS Challenge shortest-path .gr format.

    Accepts str, bytes, or a text stream. Lines: `c ...` comments, one
    `p sp <n> <m>` problem line, and `a <u> <v> <w>` arcs with 1-based ids.
    Arcs map to 0-based ids; parallel arcs keep the minimum weight and
    self-loops are dropped. The result is symmetric (road files list both
    directions; a lone direction is mirrored with the same weight).
    """
    if isinstance(gr_text, bytes):
        lines: Iterable[str] = gr_text.decode("ascii", errors="replace").splitlines()
    elif isinstance(gr_text, str):
        lines = gr_text.splitlines()
    else:
        lines = gr_text
    n = -1
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if n >= 0:
                raise ParseError("duplicate problem line", lineno)
            if len(tok) != 4 or tok[1] != "sp":
                raise ParseError(f"malformed problem line {line!r}", lineno)
            try:
                n = int(tok[2])
                int(tok[3])
            except ValueError:
                raise ParseError(f"malformed problem line {line!r}", lineno) from None
            if n < 0:
                raise ParseError(f"negative vertex count {n}", lineno)
        elif tok[0] == "a":
            if n < 0:
                raise ParseError("arc line before problem line", lineno)
            if len(tok) != 4:
                raise ParseError(f"malformed arc line {line!r}", lineno)
            try:
                u, v, w = int(tok[1]), int(tok[2]), int(tok[3])
            except ValueError:
                raise ParseError(f"malformed arc line {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"arc id out of range [1,{n}] in {line!r}", lineno)
            if w < 0:
                raise ParseError(f"negative weight in {line!r}", lineno)
            edges.append((u - 1, v - 1, w))
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", lineno)
    if n < 0:
        raise ParseError("missing problem line")
    return Graph(n, edges)


def serialize_dimacs(graph: Graph) -> str:
    """Dump a Graph in DIMACS .gr text; both arc directions are written."""
    out = io.StringIO()
    arc_count = sum(len(a) for a in graph._nbr)
    out.write(f"p sp {graph.vertex_count} {arc_count}\n")
    for u in range(graph.vertex_count):
        for v, w in zip(graph._nbr[u], graph._wt[u]):
            out.write(f"a {u + 1} {v + 1} {w}\n")
    return out.getvalue()


def load_graph(path) -> Graph:
    """Read a .gr file; gzip-compressed input is accepted for *.gr.gz names."""
    path = str(path)
    if path.endswith(".gr.gz"):
        with gzip.open(path, "rt", encoding="ascii", errors="replace") as fh:
            return parse_dimacs(fh)
    with open(path, "rt", encoding="ascii", errors="replace") as fh:
        return parse_dimacs(fh)

"""End-to-end index construction: borders, border labels, district indexes.

The build has two timed stages. The border-label stage orders the borders by
degree and pushes them over the full graph. The district stage computes each
district's shortcuts from the finished border labels and then builds its two
label sets; it runs sequentially by default (matching how its cost is
reported) with an opt-in process pool.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .borders import BorderLabels, build_border_labels
from .districts import DistrictIndex, build_district_index, build_shortcuts, augmented_graph
from .graph import Graph
from .labels import VertexOrder, degree_order
from .partition import (
    BorderSet,
    DistrictSubgraph,
    Partition,
    compute_borders,
    extract_district_subgraph,
)


@dataclass
class IndexFamily:
    """All query-serving artifacts for one graph + partition."""

    graph: Graph
    partition: Partition
    borders: BorderSet
    border_labels: BorderLabels
    district_indexes: list[DistrictIndex]

    def district_of(self, v: int) -> int:
        return self.partition.district_of[v]


@dataclass
class BuildTimings:
    border_label_s: float = 0.0
    districts_s: float = 0.0
    parallel_districts: bool = False
    per_district_s: list[float] = field(default_factory=list)


def default_district_count(vertex_count: int) -> int:
    """CLI default when no district count is given: ceil(sqrt(n) / 4)."""
    root = int(vertex_count**0.5)
    if root * root < vertex_count:
        root += 1
    return max(1, (root + 3) // 4)


def district_order(sub: DistrictSubgraph, shortcuts) -> VertexOrder:
    """Degree order on the shortcut-augmented subgraph, used for both label
    sets of a district."""
    aug = augmented_graph(sub, shortcuts)
    return degree_order(aug, range(aug.vertex_count))


def _build_one_district(args):
    graph, partition, borders, bl, i = args
    sub = extract_district_subgraph(graph, partition, i)
    shortcuts = build_shortcuts(bl, borders, i)
    order = district_order(sub, shortcuts)
    return build_district_index(sub, shortcuts, order, borders.per_district[i])


def build_index_family(
    graph: Graph,
    partition: Partition,
    *,
    parallel_districts: bool = False,
) -> tuple[IndexFamily, BuildTimings]:
    borders = compute_borders(graph, partition)
    timings = BuildTimings(parallel_districts=parallel_districts)

    start = time.perf_counter()
    if borders.q:
        order = degree_order(graph, borders.all_borders)
    else:
        order = VertexOrder.from_sequence(())
    bl = build_border_labels(graph, borders, order)
    timings.border_label_s = time.perf_counter() - start

    start = time.perf_counter()
    indexes: list[DistrictIndex]
    if parallel_districts and partition.district_count > 1:
        jobs = [(graph, partition, borders, bl, i) for i in range(partition.district_count)]
        with ProcessPoolExecutor() as pool:
            indexes = list(pool.map(_build_one_district, jobs))
        timings.per_district_s = []
    else:
        indexes = []
        for i in range(partition.district_count):
            stage = time.perf_counter()
            indexes.append(_build_one_district((graph, partition, borders, bl, i)))
            timings.per_district_s.append(time.perf_counter() - stage)
    timings.districts_s = time.perf_counter() - start
    return IndexFamily(graph, partition, borders, bl, indexes), timings

"""Border labeling: pruned hub pushing from every border vertex over the full
graph.

The resulting label set answers queries exactly whenever both endpoints are
borders or the endpoints lie in different districts (every cross-district
shortest path passes through a border, and border-to-border distances are
covered by the borders' own hubs). Same-district non-border pairs must go to
the district index instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, RoutingError
from .graph import INF, Graph, dijkstra
from .labels import LabelSet, VertexOrder, _pruned_push, lambda_query
from .partition import BorderSet, Partition


@dataclass
class BorderLabels:
    """Label set over all vertices whose hubs are exclusively border vertices."""

    labels: LabelSet
    order: VertexOrder  # push order over the border set

    @property
    def border_count(self) -> int:
        return len(self.order)


def _require_border_scope(borders: BorderSet, order: VertexOrder) -> None:
    if sorted(order.sequence) != borders.all_borders:
        raise InputError("order must be a permutation of the border set")


def build_border_labels(graph: Graph, borders: BorderSet, order: VertexOrder) -> BorderLabels:
    """Pruned Dijkstra from each border in priority order, over the full graph.

    Pushes cross district boundaries freely: stored distances are global.
    With zero borders the result is empty.
    """
    _require_border_scope(borders, order)
    labels = LabelSet(graph.vertex_count)
    scratch = [INF] * graph.vertex_count
    for b in order.sequence:
        _pruned_push(graph, labels, b, scratch)
    return BorderLabels(labels, order)


def unpruned_border_labels(graph: Graph, borders: BorderSet) -> BorderLabels:
    """Every vertex stores every reachable border with its exact global
    distance. Quadratic-size test oracle for the pruned build."""
    labels = LabelSet(graph.vertex_count)
    for b in borders.all_borders:
        dist = dijkstra(graph, b)
        for v, d in enumerate(dist):
            if d != INF:
                labels.insert(v, b, d)
    return BorderLabels(labels, VertexOrder.from_sequence(borders.all_borders))


def border_query(
    s: int,
    t: int,
    bl: BorderLabels,
    partition: Partition,
    borders: BorderSet,
):
    """Distance via the border labels; exact for the pairs they cover.

    Raises RoutingError for a same-district pair where either endpoint is a
    non-border: those queries belong to the district index.
    """
    n = partition.vertex_count
    if not (0 <= s < n and 0 <= t < n):
        raise InputError(f"query ids ({s},{t}) out of range")
    both_borders = borders.is_border(s) and borders.is_border(t)
    if not both_borders and partition.district_of[s] == partition.district_of[t]:
        raise RoutingError(
            f"pair ({s},{t}) is same-district with a non-border endpoint; "
            "answer it with the district index"
        )
    return lambda_query(s, t, bl.labels)

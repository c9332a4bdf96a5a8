import io
import random

import pytest

from borderlab import (
    INF,
    Graph,
    InputError,
    LabelSet,
    ParseError,
    VertexOrder,
    build_pll,
    build_unpruned,
    degree_order,
    dijkstra,
    label_stats,
    lambda_query,
    lambda_query_counted,
    load_labels,
    save_labels,
)
from oracles import random_connected_graph


def all_pairs_exact(graph, labels):
    for s in range(graph.vertex_count):
        truth = dijkstra(graph, s)
        for t in range(graph.vertex_count):
            if lambda_query(s, t, labels) != truth[t]:
                return False, (s, t)
    return True, None


def test_lambda_disjoint_hubs_is_inf():
    labels = LabelSet(2)
    labels.insert(0, 0, 0)
    labels.insert(1, 1, 0)
    assert lambda_query(0, 1, labels) == INF


def test_lambda_one_hop_bound():
    labels = LabelSet(2)
    labels.insert(0, 0, 0)
    labels.insert(1, 0, 9)
    assert lambda_query(0, 1, labels) <= 9


def test_lambda_out_of_scope():
    labels = LabelSet(2)
    with pytest.raises(InputError):
        lambda_query(0, 2, labels)


def test_lambda_symmetry():
    rng = random.Random(0)
    g = random_connected_graph(rng, 30, 45)
    labels = build_pll(g, degree_order(g, range(30)))
    for s in range(0, 30, 3):
        for t in range(0, 30, 4):
            assert lambda_query(s, t, labels) == lambda_query(t, s, labels)


def test_merge_touches_at_most_both_label_sizes():
    rng = random.Random(1)
    g = random_connected_graph(rng, 40, 55)
    labels = build_pll(g, degree_order(g, range(40)))
    for s in range(0, 40, 3):
        for t in range(0, 40, 5):
            value, touched = lambda_query_counted(s, t, labels)
            assert touched <= labels.label_size(s) + labels.label_size(t)
            assert value == lambda_query(s, t, labels)


def test_degree_order_star_center_first():
    g = Graph(5, [(0, v, 1) for v in range(1, 5)])
    order = degree_order(g, range(5))
    assert order.sequence[0] == 0


def test_degree_order_tie_break_ascending_id():
    g = Graph(4, [(0, 1, 1), (2, 3, 1)])
    order = degree_order(g, range(4))
    assert order.sequence == (0, 1, 2, 3)


def test_degree_order_is_permutation_with_non_increasing_degrees():
    rng = random.Random(2)
    g = random_connected_graph(rng, 50, 80)
    order = degree_order(g, range(50))
    assert sorted(order.sequence) == list(range(50))
    degrees = [g.degree(v) for v in order.sequence]
    assert degrees == sorted(degrees, reverse=True)
    assert all(order.rank[v] == k for k, v in enumerate(order.sequence))


def test_degree_order_empty_scope():
    g = Graph(2, [(0, 1, 1)])
    with pytest.raises(InputError):
        degree_order(g, [])


def test_build_pll_path_graph_forced_labels():
    w01, w12 = 3, 4
    g = Graph(3, [(0, 1, w01), (1, 2, w12)])
    labels = build_pll(g, VertexOrder.from_sequence([1, 0, 2]))
    assert labels.entries(0) == [(0, 0), (1, w01)]
    assert labels.entries(1) == [(1, 0)]
    assert labels.entries(2) == [(1, w12), (2, 0)]
    ok, bad = all_pairs_exact(g, labels)
    assert ok, bad


def test_build_pll_single_vertex_self_label():
    g = Graph(1)
    labels = build_pll(g, VertexOrder.from_sequence([0]))
    assert labels.entries(0) == [(0, 0)]


def test_build_pll_two_hop_cover_random_graphs():
    for seed in range(15):
        rng = random.Random(seed)
        n = rng.randint(10, 60)
        g = random_connected_graph(rng, n, rng.randint(n // 2, 2 * n))
        order = degree_order(g, range(n))
        labels = build_pll(g, order)
        ok, bad = all_pairs_exact(g, labels)
        assert ok, f"seed {seed}: wrong answer for pair {bad}"


def test_build_pll_random_orders_still_cover():
    for seed in range(5):
        rng = random.Random(100 + seed)
        n = rng.randint(8, 30)
        g = random_connected_graph(rng, n, n)
        scope = list(range(n))
        rng.shuffle(scope)
        labels = build_pll(g, VertexOrder.from_sequence(scope))
        ok, bad = all_pairs_exact(g, labels)
        assert ok, bad


def test_build_pll_requires_cover():
    g = Graph(3, [(0, 1, 1), (1, 2, 1)])
    with pytest.raises(InputError):
        build_pll(g, VertexOrder.from_sequence([0, 1]))
    with pytest.raises(InputError):
        build_unpruned(g, VertexOrder.from_sequence([0, 1]))


def test_pruning_equivalence_and_size():
    for seed in range(8):
        rng = random.Random(seed)
        n = rng.randint(10, 40)
        g = random_connected_graph(rng, n, n + 10)
        order = degree_order(g, range(n))
        pruned = build_pll(g, order)
        unpruned = build_unpruned(g, order)
        for v in range(n):
            assert pruned.label_size(v) <= unpruned.label_size(v)
            assert set(pruned.entries(v)) <= set(unpruned.entries(v))
        for s in range(n):
            for t in range(n):
                assert lambda_query(s, t, pruned) == lambda_query(s, t, unpruned)


def test_unpruned_highest_priority_hub_reaches_everyone():
    rng = random.Random(30)
    g = random_connected_graph(rng, 25, 30)
    order = degree_order(g, range(25))
    labels = build_unpruned(g, order)
    top = order.sequence[0]
    truth = dijkstra(g, top)
    for v in range(25):
        assert (top, truth[v]) in labels.entries(v)


def test_hierarchy_property():
    rng = random.Random(3)
    g = random_connected_graph(rng, 40, 60)
    order = degree_order(g, range(40))
    labels = build_pll(g, order)
    for v in range(40):
        for hub, _ in labels.entries(v):
            assert order.rank[hub] <= order.rank[v]


def test_build_is_deterministic():
    rng = random.Random(4)
    g = random_connected_graph(rng, 45, 70)
    order = degree_order(g, range(45))
    assert build_pll(g, order) == build_pll(g, order)


def test_label_stats_empty():
    stats = label_stats(LabelSet(0))
    assert (stats.total_entries, stats.max_per_vertex, stats.mean_per_vertex, stats.byte_size) == (
        0,
        0,
        0.0,
        0,
    )


def test_label_stats_three_entries():
    labels = LabelSet(1)
    for hub in (0, 3, 9):
        labels.insert(0, hub, hub)
    stats = label_stats(labels)
    assert stats.total_entries == 3
    assert stats.max_per_vertex == 3
    assert stats.byte_size == 24


def test_label_save_load_round_trip():
    rng = random.Random(5)
    g = random_connected_graph(rng, 30, 45)
    labels = build_pll(g, degree_order(g, range(30)))
    buf = io.BytesIO()
    save_labels(labels, buf, hubs_are_borders=True, border_count=7)
    buf.seek(0)
    again, info = load_labels(buf)
    assert again == labels
    assert info.hubs_are_borders
    assert info.border_count == 7


def test_label_save_rejects_wide_distances():
    labels = LabelSet(1)
    labels.insert(0, 0, 2**33)
    with pytest.raises(InputError, match="32-bit"):
        save_labels(labels, io.BytesIO())


def test_label_load_rejects_garbage():
    with pytest.raises(ParseError):
        load_labels(io.BytesIO(b"nope"))
    buf = io.BytesIO()
    save_labels(LabelSet(3), buf)
    data = buf.getvalue()
    with pytest.raises(ParseError):
        load_labels(io.BytesIO(data[:-2]))

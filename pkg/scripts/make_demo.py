#!/usr/bin/env python3
"""Regenerate the demo inputs under data/demo/ (graph, topology, workload).

The demo is a seeded 18x18 grid road network with random weights, a query/
update schedule spanning five epochs, and a topology whose rebuild windows
are wide enough that some in-district queries get answered through the
local-bound certificate. Everything is deterministic; rerunning this script
reproduces the shipped files byte for byte.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from borderlab import Graph, generate_workload, serialize_dimacs, serialize_workload

WIDTH = 18
HEIGHT = 18
SEED = 2024

TOPOLOGY = """\
# demo deployment: four districts, one edge server each
client_edge_delay_ms = 5
edge_center_delay_ms = 20
edge_service_us = 50
center_service_us = 80
epoch_ms = 30000
center_rebuild_ms = 5000
edge_rebuild_ms = 2000
stale_reads = off
"""


def grid_graph(width, height, seed):
    rng = random.Random(seed)
    def vid(x, y):
        return y * width + x
    edges = []
    for y in range(height):
        for x in range(width):
            if x + 1 < width:
                edges.append((vid(x, y), vid(x + 1, y), rng.randint(1, 30)))
            if y + 1 < height:
                edges.append((vid(x, y), vid(x, y + 1), rng.randint(1, 30)))
    return Graph(width * height, edges)


def main():
    out = Path(__file__).resolve().parent.parent / "data" / "demo"
    out.mkdir(parents=True, exist_ok=True)
    graph = grid_graph(WIDTH, HEIGHT, SEED)
    (out / "demo.gr").write_text(serialize_dimacs(graph))
    (out / "topology.cfg").write_text(TOPOLOGY)
    workload = generate_workload(graph, n_queries=1200, n_updates=40, horizon_ms=150_000, seed=SEED)
    (out / "workload.txt").write_text(serialize_workload(workload))
    print(f"wrote demo graph ({graph.vertex_count} vertices, {graph.edge_count} edges), "
          f"{len(workload)} schedule lines to {out}")


if __name__ == "__main__":
    main()

"""Exact shortest-distance queries on weighted road networks.

Builds a family of 2-hop-cover label indexes around a district decomposition:
global labels pushed from border vertices (exact for border-to-border and
cross-district pairs), per-district labels over shortcut-augmented subgraphs
(exact for all same-district pairs), and a local-bound certificate that
promotes plain local answers to global exactness. A deterministic
discrete-event simulator models the center/edge-server deployment of those
indexes under periodic weight updates.
"""

from .errors import CorrectnessError, InputError, ParseError, RoutingError
from .graph import INF, Graph, dijkstra, dijkstra_pair, load_graph, parse_dimacs, serialize_dimacs
from .labels import (
    LabelSet,
    LabelStats,
    VertexOrder,
    build_pll,
    build_unpruned,
    degree_order,
    label_stats,
    lambda_query,
    lambda_query_counted,
    load_labels,
    save_labels,
)
from .partition import (
    BorderSet,
    DistrictSubgraph,
    Partition,
    compute_borders,
    extract_district_subgraph,
    load_partition,
    partition_region_growing,
    save_partition,
)
from .borders import BorderLabels, border_query, build_border_labels, unpruned_border_labels
from .districts import (
    DistrictIndex,
    ShortcutEdge,
    aug_query,
    build_district_index,
    build_shortcuts,
    certified_local_query,
    load_district_index,
    local_bound,
    save_district_index,
)
from .pipeline import IndexFamily, build_index_family, default_district_count
from .sim import (
    EpochSummary,
    QueryJob,
    QueryRecord,
    SimEvent,
    SimResult,
    Topology,
    UpdateJob,
    generate_workload,
    parse_topology_config,
    parse_workload,
    route,
    run_simulation,
    serialize_workload,
)

__version__ = "0.1.0"

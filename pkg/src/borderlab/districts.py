"""Per-district indexes: plain local labels, shortcut-augmented labels, and
the local-bound certificate.

The plain labels answer distances within the district subgraph only. Adding
one shortcut edge per border pair, weighted with the exact global
border-to-border distance taken from the border labels, makes the augmented
subgraph distance-faithful to the full graph, so its labels answer every
same-district query exactly. The local bound certifies when a plain local
answer is already globally exact: no path leaving the district can beat the
cheapest exit-plus-entry border combination.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from .borders import BorderLabels
from .errors import InputError, ParseError
from .graph import INF, Graph
from .labels import LabelSet, VertexOrder, build_pll, lambda_query, load_labels, save_labels
from .partition import BorderSet, DistrictSubgraph

_MAGIC = b"BLDX"
_VERSION = 1


@dataclass(frozen=True)
class ShortcutEdge:
    """Extra edge between two borders of one district; the weight is the
    exact global distance between them."""

    u: int  # global border vertex id, u < v
    v: int
    weight: int


@dataclass
class DistrictIndex:
    """Everything an edge server holds for one district.

    local_labels cover the raw district subgraph; aug_labels cover the
    shortcut-augmented subgraph and answer same-district queries with global
    exactness. Vertex ids in both label sets are district-local.
    """

    district_id: int
    to_global: list[int]
    to_local: dict[int, int]
    border_locals: list[int]  # sorted local ids of the district's borders
    shortcuts: list[ShortcutEdge]
    local_labels: LabelSet
    aug_labels: LabelSet

    @property
    def vertex_count(self) -> int:
        return len(self.to_global)


def build_shortcuts(bl: BorderLabels, borders: BorderSet, i: int) -> list[ShortcutEdge]:
    """One shortcut per unordered border pair of district i with a finite
    border-label distance (which equals the global distance)."""
    members = borders.per_district[i]
    shortcuts: list[ShortcutEdge] = []
    for a_idx in range(len(members)):
        a = members[a_idx]
        for b in members[a_idx + 1 :]:
            w = lambda_query(a, b, bl.labels)
            if w != INF:
                shortcuts.append(ShortcutEdge(a, b, w))
    return shortcuts


def augmented_graph(sub: DistrictSubgraph, shortcuts: Sequence[ShortcutEdge]) -> Graph:
    """District subgraph plus shortcut edges; parallel edges keep the minimum."""
    edges = list(sub.graph.edges())
    for sc in shortcuts:
        lu = sub.to_local.get(sc.u)
        lv = sub.to_local.get(sc.v)
        if lu is None or lv is None:
            raise InputError(
                f"shortcut ({sc.u},{sc.v}) has an endpoint outside district {sub.district_id}"
            )
        edges.append((lu, lv, sc.weight))
    return Graph(sub.graph.vertex_count, edges)


def build_district_index(
    sub: DistrictSubgraph,
    shortcuts: Sequence[ShortcutEdge],
    order: VertexOrder,
    border_vertices: Sequence[int],
) -> DistrictIndex:
    """Build both label sets for one district with the given push order.

    border_vertices are the district's borders as global ids (the shortcut
    endpoints alone cannot recover them when the district has fewer than two
    borders).
    """
    for b in border_vertices:
        if b not in sub.to_local:
            raise InputError(f"border vertex {b} is not in district {sub.district_id}")
    aug = augmented_graph(sub, shortcuts)
    local_labels = build_pll(sub.graph, order)
    aug_labels = build_pll(aug, order)
    border_locals = sorted(sub.to_local[b] for b in border_vertices)
    return DistrictIndex(
        district_id=sub.district_id,
        to_global=list(sub.to_global),
        to_local=dict(sub.to_local),
        border_locals=border_locals,
        shortcuts=list(shortcuts),
        local_labels=local_labels,
        aug_labels=aug_labels,
    )


def _to_local_pair(idx: DistrictIndex, s: int, t: int) -> tuple[int, int]:
    ls = idx.to_local.get(s)
    lt = idx.to_local.get(t)
    if ls is None or lt is None:
        raise InputError(f"pair ({s},{t}) is not inside district {idx.district_id}")
    return ls, lt


def bound_local(ls: int, lt: int, labels: LabelSet, border_locals: Sequence[int]):
    """local_bound on district-local ids: cheapest exit-border distance plus
    cheapest entry-border distance (the two borders may coincide). Equals the
    minimum of the sum over all ordered border pairs because the two sides
    are independent. INF when there are no borders."""
    if not border_locals:
        return INF
    exit_side = min(lambda_query(ls, b, labels) for b in border_locals)
    entry_side = min(lambda_query(b, lt, labels) for b in border_locals)
    return exit_side + entry_side


def certify_local(ls: int, lt: int, labels: LabelSet, border_locals: Sequence[int]):
    """(local distance, certificate) on district-local ids."""
    local = lambda_query(ls, lt, labels)
    return local, local <= bound_local(ls, lt, labels, border_locals)


def local_bound(s: int, t: int, idx: DistrictIndex):
    """Lower bound on any s-to-t walk that leaves the district."""
    ls, lt = _to_local_pair(idx, s, t)
    return bound_local(ls, lt, idx.local_labels, idx.border_locals)


def certified_local_query(s: int, t: int, idx: DistrictIndex):
    """Local-label answer plus a certificate that it is globally exact.

    Certified means the local distance does not exceed the local bound, so no
    district-leaving path can be shorter and the local answer equals the true
    global distance. Uncertified answers are only upper bounds within the
    district; fall back to the augmented labels or the border labels.
    """
    ls, lt = _to_local_pair(idx, s, t)
    return certify_local(ls, lt, idx.local_labels, idx.border_locals)


def aug_query(s: int, t: int, idx: DistrictIndex):
    """Exact same-district distance via the shortcut-augmented labels."""
    ls, lt = _to_local_pair(idx, s, t)
    return lambda_query(ls, lt, idx.aug_labels)


def save_district_index(idx: DistrictIndex, fp) -> None:
    """Binary district file: header, id map, border list, shortcut list, then
    the two label blocks in the shared label format."""
    fp.write(
        struct.pack(
            "<4sHHIII",
            _MAGIC,
            _VERSION,
            0,
            idx.district_id,
            idx.vertex_count,
            len(idx.border_locals),
        )
    )
    fp.write(struct.pack(f"<{idx.vertex_count}I", *idx.to_global))
    fp.write(struct.pack(f"<{len(idx.border_locals)}I", *idx.border_locals))
    fp.write(struct.pack("<I", len(idx.shortcuts)))
    for sc in idx.shortcuts:
        if sc.weight > 0xFFFFFFFF:
            raise InputError(f"shortcut weight {sc.weight} exceeds 32-bit range")
        fp.write(struct.pack("<III", sc.u, sc.v, sc.weight))
    save_labels(idx.local_labels, fp)
    save_labels(idx.aug_labels, fp)


def load_district_index(fp) -> DistrictIndex:
    header = fp.read(20)
    if len(header) != 20:
        raise ParseError("truncated district index header")
    magic, version, _flags, district_id, vertex_count, border_count = struct.unpack(
        "<4sHHIII", header
    )
    if magic != _MAGIC:
        raise ParseError(f"bad district index magic {magic!r}")
    if version != _VERSION:
        raise ParseError(f"unsupported district index version {version}")
    payload = fp.read(4 * vertex_count)
    if len(payload) != 4 * vertex_count:
        raise ParseError("truncated district id map")
    to_global = list(struct.unpack(f"<{vertex_count}I", payload))
    payload = fp.read(4 * border_count)
    if len(payload) != 4 * border_count:
        raise ParseError("truncated district border list")
    border_locals = list(struct.unpack(f"<{border_count}I", payload))
    (shortcut_count,) = struct.unpack("<I", fp.read(4))
    shortcuts = []
    for _ in range(shortcut_count):
        raw = fp.read(12)
        if len(raw) != 12:
            raise ParseError("truncated shortcut list")
        u, v, w = struct.unpack("<III", raw)
        shortcuts.append(ShortcutEdge(u, v, w))
    local_labels, _ = load_labels(fp)
    aug_labels, _ = load_labels(fp)
    return DistrictIndex(
        district_id=district_id,
        to_global=to_global,
        to_local={g: l for l, g in enumerate(to_global)},
        border_locals=border_locals,
        shortcuts=shortcuts,
        local_labels=local_labels,
        aug_labels=aug_labels,
    )

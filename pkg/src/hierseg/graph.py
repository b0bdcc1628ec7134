"""Edge-weighted graphs, pixel-grid construction, Kruskal forests, partitions.

Vertices are dense integers in ``[0, vertex_count)``.  For grid graphs the
vertex of pixel ``(row, col)`` is ``row * width + col``.  All edge weights are
non-negative integers; real-valued dissimilarities must be quantized at the
boundary (see :func:`build_grid_graph`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "WeightedEdge",
    "EdgeWeightedGraph",
    "UnionFindForest",
    "Mst",
    "Partition",
    "round_half_up",
    "build_grid_graph",
    "kruskal_mst",
    "partition_at_threshold",
]


@dataclass(frozen=True)
class WeightedEdge:
    """Undirected edge with an integer weight and its insertion index."""

    u: int
    v: int
    weight: int
    edge_id: int

    def endpoints(self) -> tuple[int, int]:
        return (self.u, self.v)


class EdgeWeightedGraph:
    """Immutable undirected graph stored as parallel edge arrays.

    ``us``, ``vs`` and ``ws`` are aligned int64 arrays; position ``i`` holds
    the edge with ``edge_id == i`` (creation order).  ``grid_shape`` is
    ``(width, height)`` metadata set by :func:`build_grid_graph`.
    """

    def __init__(self, vertex_count, us, vs, ws, grid_shape=None, validate=True):
        us = np.ascontiguousarray(us, dtype=np.int64)
        vs = np.ascontiguousarray(vs, dtype=np.int64)
        ws = np.ascontiguousarray(ws, dtype=np.int64)
        if validate:
            if vertex_count < 0:
                raise InvalidInputError("vertex_count must be non-negative")
            if not (us.shape == vs.shape == ws.shape) or us.ndim != 1:
                raise InvalidInputError("edge arrays must be 1-d and aligned")
            if us.size:
                if us.min() < 0 or vs.min() < 0:
                    raise InvalidInputError("edge endpoint out of range")
                if max(us.max(), vs.max()) >= vertex_count:
                    raise InvalidInputError("edge endpoint out of range")
                if np.any(us == vs):
                    raise InvalidInputError("self-loops are not allowed")
                if np.any(ws < 0):
                    raise InvalidInputError("edge weights must be non-negative")
                lo = np.minimum(us, vs)
                hi = np.maximum(us, vs)
                codes = lo * np.int64(vertex_count) + hi
                if np.unique(codes).size != codes.size:
                    raise InvalidInputError("duplicate edge between a vertex pair")
        self.vertex_count = int(vertex_count)
        self.us = us
        self.vs = vs
        self.ws = ws
        self.grid_shape = grid_shape
        us.flags.writeable = False
        vs.flags.writeable = False
        ws.flags.writeable = False

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int, int]],
                   grid_shape=None) -> "EdgeWeightedGraph":
        """Build from ``(u, v, weight)`` triples; edge ids follow iteration order."""
        triples = list(edges)
        us = np.array([t[0] for t in triples], dtype=np.int64)
        vs = np.array([t[1] for t in triples], dtype=np.int64)
        ws = np.array([t[2] for t in triples], dtype=np.int64)
        return cls(vertex_count, us, vs, ws, grid_shape=grid_shape)

    @property
    def edge_count(self) -> int:
        return self.us.size

    def edge(self, i: int) -> WeightedEdge:
        return WeightedEdge(int(self.us[i]), int(self.vs[i]), int(self.ws[i]), i)

    def __iter__(self) -> Iterator[WeightedEdge]:
        for i in range(self.edge_count):
            yield self.edge(i)

    def __repr__(self):
        return (f"EdgeWeightedGraph(vertices={self.vertex_count}, "
                f"edges={self.edge_count}, grid={self.grid_shape})")


class UnionFindForest:
    """Disjoint sets with path compression, union by rank and root payloads.

    Each root carries the size of its set and the largest link weight seen
    inside it (the internal difference of the region it represents).
    """

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.rank = np.zeros(n, dtype=np.int8)
        self.size = np.ones(n, dtype=np.int64)
        self.internal = np.zeros(n, dtype=np.int64)
        self.set_count = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    def union(self, x: int, y: int, link_weight: int = 0) -> int:
        """Unite the sets of ``x`` and ``y``; returns the surviving root.

        ``link_weight`` feeds the internal-difference payload of the merged
        set: ``internal(new) = max(internal(x), internal(y), link_weight)``.
        """
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        elif self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.internal[rx] = max(self.internal[rx], self.internal[ry], link_weight)
        self.set_count -= 1
        return rx

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def size_of(self, x: int) -> int:
        return int(self.size[self.find(x)])

    def internal_of(self, x: int) -> int:
        return int(self.internal[self.find(x)])


@dataclass(frozen=True)
class Mst:
    """Minimum spanning forest in canonical processing order.

    Edges are sorted by ``(weight, edge_id)`` ascending; ``edge_ids`` keeps
    the original graph edge ids so weight ties stay reproducible.
    """

    vertex_count: int
    us: np.ndarray
    vs: np.ndarray
    ws: np.ndarray
    edge_ids: np.ndarray

    @property
    def edge_count(self) -> int:
        return self.us.size

    def edge(self, i: int) -> WeightedEdge:
        return WeightedEdge(int(self.us[i]), int(self.vs[i]), int(self.ws[i]),
                            int(self.edge_ids[i]))

    def __iter__(self) -> Iterator[WeightedEdge]:
        for i in range(self.edge_count):
            yield self.edge(i)

    def total_weight(self) -> int:
        return int(self.ws.sum())

    @classmethod
    def from_edges(cls, vertex_count: int,
                   edges: Iterable[tuple[int, int, int]]) -> "Mst":
        """Build a forest directly from ``(u, v, weight)`` triples.

        Intended for hand-built fixtures; edges are re-sorted into canonical
        order with ids taken from the input order.  The triples must form a
        forest (no cycles).
        """
        triples = list(edges)
        us = np.array([t[0] for t in triples], dtype=np.int64)
        vs = np.array([t[1] for t in triples], dtype=np.int64)
        ws = np.array([t[2] for t in triples], dtype=np.int64)
        ids = np.arange(len(triples), dtype=np.int64)
        order = np.lexsort((ids, ws))
        uf = UnionFindForest(vertex_count)
        for i in order:
            if uf.find(int(us[i])) == uf.find(int(vs[i])):
                raise InvalidInputError("edge list contains a cycle")
            uf.union(int(us[i]), int(vs[i]))
        return cls(vertex_count, us[order], vs[order], ws[order], ids[order])


class Partition:
    """Disjoint regions covering ``[0, vertex_count)``.

    Labels are dense in ``[0, region_count)`` and canonical: regions are
    numbered by their smallest contained vertex, ascending.
    """

    def __init__(self, labels, canonicalize: bool = True):
        labels = np.asarray(labels, dtype=np.int64)
        if canonicalize:
            labels = _canonical_labels(labels)
        self.labels = labels
        self.labels.flags.writeable = False
        self.region_count = int(labels.max()) + 1 if labels.size else 0

    @property
    def vertex_count(self) -> int:
        return self.labels.size

    def region_of(self, v: int) -> int:
        return int(self.labels[v])

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    def as_sets(self) -> list[frozenset[int]]:
        groups: list[list[int]] = [[] for _ in range(self.region_count)]
        for v, lab in enumerate(self.labels):
            groups[lab].append(v)
        return [frozenset(g) for g in groups]

    def region_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.region_count)

    def refines(self, coarser: "Partition") -> bool:
        """True when every region of self lies inside one region of ``coarser``."""
        if self.vertex_count != coarser.vertex_count:
            raise InvalidInputError("partitions cover different vertex sets")
        pairs = self.labels * np.int64(max(coarser.region_count, 1)) + coarser.labels
        return np.unique(pairs).size == self.region_count

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    def __repr__(self):
        return f"Partition(regions={self.region_count}, vertices={self.vertex_count})"


def _canonical_labels(raw: np.ndarray) -> np.ndarray:
    """Relabel arbitrary region ids to first-seen order over ascending vertices."""
    out = np.empty(raw.size, dtype=np.int64)
    remap: dict[int, int] = {}
    nxt = 0
    for v in range(raw.size):
        r = int(raw[v])
        lab = remap.get(r)
        if lab is None:
            lab = remap[r] = nxt
            nxt += 1
        out[v] = lab
    return out


def round_half_up(values) -> np.ndarray:
    """Quantize to the nearest integer, halves rounding up (away from zero
    never occurs here: inputs are non-negative distances)."""
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5).astype(np.int64)


def build_grid_graph(image, quantizer: Callable[[np.ndarray], np.ndarray] | None = None,
                     ) -> EdgeWeightedGraph:
    """4-adjacency graph of an RGB raster with quantized color-gradient weights.

    One vertex per pixel (``row * width + col``); one edge between each pair
    of horizontally or vertically adjacent pixels.  The weight is the
    Euclidean distance between the two RGB triples, passed through
    ``quantizer`` (default: round half up to the nearest integer).  Edges are
    created pixel by pixel in row-major order, right neighbor before down
    neighbor, which fixes the ``edge_id`` tie order.
    """
    pixels = np.asarray(getattr(image, "pixels", image))
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise InvalidInputError("expected an RGB raster of shape (height, width, 3)")
    h, w = pixels.shape[:2]
    if h < 1 or w < 1 or pixels.size == 0:
        raise InvalidInputError("image must have width >= 1 and height >= 1")
    if pixels.min() < 0 or pixels.max() > 255:
        raise InvalidInputError("channel values must lie in [0, 255]")
    if quantizer is None:
        quantizer = round_half_up

    n = h * w
    idx = np.arange(n, dtype=np.int64).reshape(h, w)
    # Two candidate slots per pixel (right, down), compacted in that order.
    cand_v = np.empty((n, 2), dtype=np.int64)
    valid = np.zeros((n, 2), dtype=bool)
    cand_v[:, 0] = idx.ravel() + 1
    cand_v[:, 1] = idx.ravel() + w
    valid[:, 0] = (np.arange(n) % w) < (w - 1)
    valid[:, 1] = (np.arange(n) // w) < (h - 1)
    flat = valid.ravel()
    us = np.repeat(np.arange(n, dtype=np.int64), 2)[flat]
    vs = cand_v.ravel()[flat]

    rgb = pixels.reshape(n, 3).astype(np.int64)
    diff = rgb[us] - rgb[vs]
    dist = np.sqrt(np.sum(diff * diff, axis=1, dtype=np.int64))
    ws = np.asarray(quantizer(dist), dtype=np.int64)
    if ws.size and ws.min() < 0:
        raise InvalidInputError("quantizer produced a negative weight")
    return EdgeWeightedGraph(n, us, vs, ws, grid_shape=(w, h), validate=False)


def _mst_accept_impl(n, us, vs):
    parent = np.arange(n, dtype=np.int64)
    keep = np.zeros(us.shape[0], dtype=np.bool_)
    for i in range(us.shape[0]):
        x = us[i]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = vs[i]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x != y:
            parent[y] = x
            keep[i] = True
    return keep


try:  # optional accelerator; the pure implementation is the reference
    from numba import njit as _njit

    _mst_accept = _njit(cache=True)(_mst_accept_impl)
except ImportError:  # pragma: no cover
    _mst_accept = _mst_accept_impl


def kruskal_mst(graph: EdgeWeightedGraph) -> Mst:
    """Minimum spanning forest; edges emitted in canonical order.

    Edges are scanned by ``(weight, edge_id)`` ascending, so equal-weight
    choices are resolved by creation order and the result is deterministic.
    Disconnected graphs yield one tree per component.
    """
    order = np.argsort(graph.ws, kind="stable")
    keep = _mst_accept(graph.vertex_count, graph.us[order], graph.vs[order])
    sel = order[keep]
    return Mst(graph.vertex_count, graph.us[sel], graph.vs[sel], graph.ws[sel],
               sel.astype(np.int64))


def _edge_value_arrays(edges, values=None):
    """Normalize the accepted edge/value forms to aligned arrays.

    ``edges`` may be a sequence of ``(WeightedEdge, value)`` pairs, or a
    sequence of edges (``WeightedEdge`` or ``(u, v)``) with a parallel
    ``values`` sequence.  Values may contain ``math.inf``.
    """
    us, vs, val = [], [], []
    pairs = edges if values is None else zip(edges, values)
    for e, x in pairs:
        if isinstance(e, WeightedEdge):
            us.append(e.u)
            vs.append(e.v)
        else:
            us.append(e[0])
            vs.append(e[1])
        val.append(x)
    return (np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64),
            np.asarray(val, dtype=np.float64))


def _components_of_admitted(vertex_count: int, us: np.ndarray, vs: np.ndarray,
                            admit: np.ndarray) -> Partition:
    uf = UnionFindForest(vertex_count)
    for u, v in zip(us[admit].tolist(), vs[admit].tolist()):
        uf.union(u, v)
    roots = np.fromiter((uf.find(v) for v in range(vertex_count)),
                        dtype=np.int64, count=vertex_count)
    return Partition(roots)


def partition_at_threshold(vertex_count: int, edges, lam, mode: str = "strict",
                           values=None) -> Partition:
    """Connected components of the edges whose value passes ``lam``.

    ``mode`` selects the comparison: ``"strict"`` admits ``value < lam``,
    ``"inclusive"`` admits ``value <= lam``.  The two readings both occur in
    the underlying method, so callers must always say which one they mean.
    """
    us, vs, val = _edge_value_arrays(edges, values)
    if val.size and val[np.isfinite(val)].min(initial=0) < 0:
        raise InvalidInputError("edge values must be non-negative")
    if mode == "strict":
        admit = val < lam
    elif mode == "inclusive":
        admit = val <= lam
    else:
        raise InvalidInputError(f"unknown threshold mode: {mode!r}")
    return _components_of_admitted(vertex_count, us, vs, admit)

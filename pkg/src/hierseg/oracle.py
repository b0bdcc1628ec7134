"""Brute-force references and property checkers.

Everything here trades speed for independence: partitions come from plain
breadth-first search, spanning forests from exhaustive enumeration, and the
hierarchical scale from a literal unit-step scan of the threshold axis.
Tests trust these implementations first and check the fast paths against
them.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import GraphTooLargeError, InvalidInputError
from .graph import EdgeWeightedGraph, Partition, UnionFindForest
from .hierarchy import UNASSIGNED, ScaleMap, cut

__all__ = [
    "PropertyReport",
    "bfs_partition",
    "naive_hierarchical_scale",
    "exhaustive_mst_weight",
    "check_causality",
    "check_nestedness",
    "random_instance",
    "replay_counterexample",
]


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a property check; failures carry a replayable payload."""

    name: str
    passed: bool
    counterexample: dict | None = None

    def __post_init__(self):
        if not self.passed and self.counterexample is None:
            raise InvalidInputError("failing reports must carry a counterexample")

    def to_text(self) -> str:
        return json.dumps({
            "property": self.name,
            "passed": self.passed,
            "counterexample": self.counterexample,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_text(cls, text: str) -> "PropertyReport":
        doc = json.loads(text)
        return cls(doc["property"], doc["passed"], doc.get("counterexample"))


def bfs_partition(vertex_count: int, edges, lam, mode: str = "strict",
                  values=None) -> Partition:
    """Connected components by breadth-first search; no union-find involved.

    Accepts the same edge/value forms as
    :func:`hierseg.graph.partition_at_threshold` and must agree with it.
    """
    pairs = []
    for e, x in (edges if values is None else zip(edges, values)):
        u, v = (e.u, e.v) if hasattr(e, "u") else (e[0], e[1])
        pairs.append((int(u), int(v), x))
    if mode == "strict":
        admitted = [(u, v) for u, v, x in pairs if x < lam]
    elif mode == "inclusive":
        admitted = [(u, v) for u, v, x in pairs if x <= lam]
    else:
        raise InvalidInputError(f"unknown threshold mode: {mode!r}")
    adjacency: list[list[int]] = [[] for _ in range(vertex_count)]
    for u, v in admitted:
        adjacency[u].append(v)
        adjacency[v].append(u)
    labels = [-1] * vertex_count
    nxt = 0
    for start in range(vertex_count):
        if labels[start] != -1:
            continue
        labels[start] = nxt
        queue = deque([start])
        while queue:
            for y in adjacency[queue.popleft()]:
                if labels[y] == -1:
                    labels[y] = nxt
                    queue.append(y)
        nxt += 1
    return Partition(np.asarray(labels, dtype=np.int64), canonicalize=False)


def _scan_inputs(partial: ScaleMap):
    """Plain-python edge pairs, scale values and weights for the unit scan."""
    mst = partial.mst
    pairs = list(zip(mst.us.tolist(), mst.vs.tolist()))
    vals = [math.inf if s == UNASSIGNED else s for s in partial.scales.tolist()]
    return pairs, vals, mst.ws.tolist()


def _component_stats(n, pairs, vals, weights, query, lam) -> tuple[int, int]:
    """Size and internal difference of query's region among edges with
    assigned scale <= lam, recomputed from scratch via bfs_partition."""
    part = bfs_partition(n, pairs, lam, mode="inclusive", values=vals)
    labels = part.labels.tolist()
    lab = labels[query]
    size = labels.count(lab)
    internal = 0
    for (u, _v), x, w in zip(pairs, vals, weights):
        if x <= lam and labels[u] == lab and w > internal:
            internal = w
    return size, internal


def default_v_bound(partial: ScaleMap) -> int:
    """Safe scan ceiling: largest assigned scale plus the largest possible
    one-sided demand plus one."""
    max_w = int(partial.mst.ws.max()) if partial.mst.edge_count else 0
    return partial.max_scale() + max_w * partial.vertex_count + 1


def naive_hierarchical_scale(partial: ScaleMap, query: int, edge_weight: int,
                             variant: str = "stabilized",
                             v_bound: int | None = None) -> int:
    """Unit-step scan of the one-sided hierarchical scale.

    ``variant="literal"`` follows the loop as written: return the first
    level v >= 1 whose region demands at most v.  ``variant="stabilized"``
    scans every level up to ``v_bound`` and returns one past the largest
    violating level, i.e. the smallest level from which the condition holds
    for every coarser level as well.  The two differ on instances where the
    demand dips below the line and then crosses back above it.

    ``v_bound`` defaults to :func:`default_v_bound`; callers may pass any
    smaller value that still provably exceeds every violating level (the
    demand never exceeds ``edge_weight * region_size``, so
    ``edge_weight * component_size(query) + 1`` is always safe).
    """
    if v_bound is None:
        v_bound = default_v_bound(partial)
    n = partial.vertex_count
    pairs, vals, weights = _scan_inputs(partial)
    if variant == "literal":
        v = 1
        while v <= v_bound:
            size, internal = _component_stats(n, pairs, vals, weights, query, v)
            if (edge_weight - internal) * size <= v:
                return v
            v += 1
        raise InvalidInputError("v_bound too small for the literal scan")
    if variant == "stabilized":
        worst = -1
        for v in range(v_bound + 1):
            size, internal = _component_stats(n, pairs, vals, weights, query, v)
            if (edge_weight - internal) * size > v:
                worst = v
        return max(1, worst + 1)
    raise InvalidInputError(f"unknown variant: {variant!r}")


def exhaustive_mst_weight(graph: EdgeWeightedGraph, max_vertices: int = 12,
                          max_combinations: int = 2_000_000) -> int:
    """Minimum spanning-forest weight by enumerating edge subsets.

    Deliberately exponential; refuses graphs beyond ``max_vertices`` or whose
    enumeration would exceed ``max_combinations`` subsets.
    """
    n = graph.vertex_count
    if n > max_vertices:
        raise GraphTooLargeError(f"{n} vertices exceed the oracle limit")
    m = graph.edge_count
    uf = UnionFindForest(n)
    for i in range(m):
        uf.union(int(graph.us[i]), int(graph.vs[i]))
    k = n - uf.set_count  # edges in any spanning forest
    if k == 0:
        return 0
    if math.comb(m, k) > max_combinations:
        raise GraphTooLargeError("too many edge subsets to enumerate")
    best = None
    for combo in itertools.combinations(range(m), k):
        uf = UnionFindForest(n)
        ok = True
        total = 0
        for i in combo:
            u, v = int(graph.us[i]), int(graph.vs[i])
            if uf.find(u) == uf.find(v):
                ok = False
                break
            uf.union(u, v)
            total += int(graph.ws[i])
        if ok and (best is None or total < best):
            best = total
    assert best is not None  # k acyclic edges always exist
    return best


def _lambda_axis(scale_map: ScaleMap) -> list[int]:
    return [0] + [int(s) for s in scale_map.distinct_scales()]


def _instance_payload(scale_map: ScaleMap) -> dict:
    mst = scale_map.mst
    return {
        "vertex_count": mst.vertex_count,
        "edges": [[int(mst.us[i]), int(mst.vs[i]), int(mst.ws[i])]
                  for i in range(mst.edge_count)],
        "scales": [int(s) for s in scale_map.scales],
    }


def check_causality(scale_map: ScaleMap) -> PropertyReport:
    """Region counts of the cut must be non-increasing along the threshold
    axis (checked at 0 and every distinct scale value)."""
    prev_lam = None
    prev_count = None
    for lam in _lambda_axis(scale_map):
        count = cut(scale_map, lam).region_count
        if prev_count is not None and count > prev_count:
            return PropertyReport("causality", False, {
                "instance": _instance_payload(scale_map),
                "lambda_pair": [prev_lam, lam],
                "region_counts": [prev_count, count],
            })
        prev_lam, prev_count = lam, count
    return PropertyReport("causality", True)


def _nested_violation(fine: Partition, coarse: Partition):
    """First region of ``fine`` that straddles two regions of ``coarse``."""
    for label in range(fine.region_count):
        members = fine.members(label)
        coarse_labels = np.unique(coarse.labels[members])
        if coarse_labels.size > 1:
            return members, coarse_labels
    return None


def check_nestedness(subject) -> PropertyReport:
    """Consecutive partitions must refine each other.

    ``subject`` is either a :class:`ScaleMap` (its cut family is checked at
    every distinct scale) or an explicit sequence of partitions ordered fine
    to coarse (used e.g. to exhibit the fixed-parameter baseline's failure).
    """
    if isinstance(subject, ScaleMap):
        partitions = [cut(subject, lam) for lam in _lambda_axis(subject)]
        payload_instance = _instance_payload(subject)
    else:
        partitions = list(subject)
        payload_instance = {
            "labels": [[int(x) for x in p.labels] for p in partitions],
        }
    for i in range(len(partitions) - 1):
        fine, coarse = partitions[i], partitions[i + 1]
        violation = _nested_violation(fine, coarse)
        if violation is not None:
            members, straddled = violation
            return PropertyReport("nestedness", False, {
                "instance": payload_instance,
                "pair_index": i,
                "region": [int(v) for v in members],
                "straddles": [int(c) for c in straddled],
            })
    return PropertyReport("nestedness", True)


def replay_counterexample(text: str) -> PropertyReport:
    """Re-run the property of a serialized report on its own counterexample.

    Returns the fresh report; a report that was failing stays failing when
    the counterexample is genuine.
    """
    report = PropertyReport.from_text(text)
    if report.passed or report.counterexample is None:
        return report
    payload = report.counterexample
    instance = payload.get("instance", {})
    if "labels" in instance:
        partitions = [Partition(np.asarray(l, dtype=np.int64))
                      for l in instance["labels"]]
        return check_nestedness(partitions)
    from .graph import Mst

    mst = Mst.from_edges(instance["vertex_count"],
                         [tuple(e) for e in instance["edges"]])
    # Mst.from_edges re-sorts; map the serialized scales onto the new order.
    scales = np.asarray(instance["scales"], dtype=np.int64)[mst.edge_ids]
    scale_map = ScaleMap(mst, scales)
    if report.name == "causality":
        return check_causality(scale_map)
    if report.name == "nestedness":
        return check_nestedness(scale_map)
    raise InvalidInputError(f"cannot replay property {report.name!r}")


def random_instance(seed: int, max_vertices: int = 64,
                    max_weight: int = 31) -> EdgeWeightedGraph:
    """Seeded random test graph: grid or sparse random topology,
    occasionally disconnected, weights in ``[0, max_weight]``."""
    rng = np.random.default_rng(seed)
    if rng.random() < 0.4:
        # grid topology with direct random weights
        w = int(rng.integers(1, 9))
        h = int(rng.integers(1, max(2, max_vertices // w) + 1))
        while w * h > max_vertices:
            h -= 1
        h = max(h, 1)
        n = w * h
        edges = []
        for r in range(h):
            for c in range(w):
                i = r * w + c
                if c + 1 < w:
                    edges.append((i, i + 1, int(rng.integers(0, max_weight + 1))))
                if r + 1 < h:
                    edges.append((i, i + w, int(rng.integers(0, max_weight + 1))))
        return EdgeWeightedGraph.from_edges(n, edges, grid_shape=(w, h))
    n = int(rng.integers(2, max_vertices + 1))
    edges = []
    seen = set()
    for v in range(1, n):
        if rng.random() < 0.1:
            continue  # leave a component boundary
        u = int(rng.integers(0, v))
        seen.add((u, v))
        edges.append((u, v, int(rng.integers(0, max_weight + 1))))
    extra = int(rng.integers(0, max(2, n // 2)))
    for _ in range(extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append((key[0], key[1], int(rng.integers(0, max_weight + 1))))
    return EdgeWeightedGraph.from_edges(n, edges)

"""Hierarchical observation scales over MST edges, cuts and merge trees.

The central operation recomputes, for every tree edge, the lowest threshold
at which the regions on both sides stay merged for all coarser thresholds as
well.  Thresholding the resulting per-edge scale map yields a family of
nested partitions: region counts are monotone in the threshold and contours
never move between levels, which the fixed-parameter region-merging baseline
(:mod:`hierseg.fh`) does not guarantee.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidInputError, NoPathError
from .graph import (EdgeWeightedGraph, Mst, Partition, UnionFindForest,
                    _components_of_admitted)

__all__ = [
    "UNASSIGNED",
    "ScaleMap",
    "MergeTree",
    "compute_hierarchy",
    "hierarchical_scale",
    "region_chain",
    "stabilized_scale_from_chain",
    "cut",
    "cut_to_region_count",
    "merge_tree",
]

UNASSIGNED = -1  # sentinel for "no scale assigned yet" (conceptually infinite)


class ScaleMap:
    """Per-MST-edge hierarchical scale values.

    ``scales[i]`` belongs to ``mst.edge(i)``; :data:`UNASSIGNED` marks edges
    whose scale has not been computed yet.  A completed map (as returned by
    :func:`compute_hierarchy`) has every scale finite and at least 1.
    """

    def __init__(self, mst: Mst, scales=None):
        self.mst = mst
        if scales is None:
            self.scales = np.full(mst.edge_count, UNASSIGNED, dtype=np.int64)
        else:
            self.scales = np.asarray(scales, dtype=np.int64).copy()
            if self.scales.shape != (mst.edge_count,):
                raise InvalidInputError("scale array does not match the tree")

    @property
    def vertex_count(self) -> int:
        return self.mst.vertex_count

    @property
    def edge_count(self) -> int:
        return self.mst.edge_count

    def is_complete(self) -> bool:
        return bool(np.all(self.scales != UNASSIGNED))

    def scale_of(self, i: int) -> int:
        return int(self.scales[i])

    def set_scale(self, i: int, value: int) -> None:
        if value < 1:
            raise InvalidInputError("assigned scales must be >= 1")
        self.scales[i] = value

    def max_scale(self) -> int:
        assigned = self.scales[self.scales != UNASSIGNED]
        return int(assigned.max()) if assigned.size else 0

    def distinct_scales(self) -> np.ndarray:
        assigned = self.scales[self.scales != UNASSIGNED]
        return np.unique(assigned)

    def as_dict(self) -> dict[tuple[int, int], int]:
        """Mapping ``(min(u, v), max(u, v)) -> scale`` for assigned edges."""
        out = {}
        for i in range(self.edge_count):
            if self.scales[i] != UNASSIGNED:
                u, v = int(self.mst.us[i]), int(self.mst.vs[i])
                out[(min(u, v), max(u, v))] = int(self.scales[i])
        return out

    def items(self):
        for i in range(self.edge_count):
            yield self.mst.edge(i), int(self.scales[i])

    def __repr__(self):
        done = int(np.count_nonzero(self.scales != UNASSIGNED))
        return f"ScaleMap(edges={self.edge_count}, assigned={done})"


# ---------------------------------------------------------------------------
# Scale computation kernel
#
# State is a forest of "level nodes" over int64 arrays.  Leaves 0..n-1 are
# vertices; each processed edge adds at most one internal node.  A node
# records the threshold (level) at which its region forms, the region size
# and the largest original edge weight inside it.  Walking leaf -> root and
# reading one node per distinct level yields exactly the growth chain of
# that vertex's region under the partial scale map, which is all the
# stabilized one-sided scale needs.  After an edge is assigned scale s, the
# two root paths above s are spliced into a single level-sorted path and the
# traversed nodes absorb the opposite side's size/internal stats in place.
# Nodes whose parent sits at the same level are shadowed (their threshold
# interval is empty); walks bypass them and keep the topmost node per level.
# ---------------------------------------------------------------------------


def _scale_loop_impl(n, src, dst, wgt):
    m = src.shape[0]
    cap = n + m + 1
    parent = np.full(cap, -1, dtype=np.int64)
    level = np.zeros(cap, dtype=np.int64)
    size = np.ones(cap, dtype=np.int64)
    internal = np.zeros(cap, dtype=np.int64)
    scales = np.zeros(m, dtype=np.int64)
    pn_a = np.empty(cap, dtype=np.int64)
    pl_a = np.empty(cap, dtype=np.int64)
    ps_a = np.empty(cap, dtype=np.int64)
    pi_a = np.empty(cap, dtype=np.int64)
    pn_b = np.empty(cap, dtype=np.int64)
    pl_b = np.empty(cap, dtype=np.int64)
    ps_b = np.empty(cap, dtype=np.int64)
    pi_b = np.empty(cap, dtype=np.int64)
    n_nodes = n

    for t in range(m):
        w = wgt[t]

        # Leaf-to-root event chain of the first endpoint.
        la = 0
        node = src[t]
        while node != -1:
            p = parent[node]
            while p != -1:
                gp = parent[p]
                if gp != -1 and level[gp] == level[p]:
                    parent[node] = gp  # bypass shadowed node
                    p = gp
                else:
                    break
            if la > 0 and pl_a[la - 1] == level[node]:
                la -= 1  # keep only the topmost node per level
            pn_a[la] = node
            pl_a[la] = level[node]
            ps_a[la] = size[node]
            pi_a[la] = internal[node]
            la += 1
            node = p

        # Same for the second endpoint.
        lb = 0
        node = dst[t]
        while node != -1:
            p = parent[node]
            while p != -1:
                gp = parent[p]
                if gp != -1 and level[gp] == level[p]:
                    parent[node] = gp
                    p = gp
                else:
                    break
            if lb > 0 and pl_b[lb - 1] == level[node]:
                lb -= 1
            pn_b[lb] = node
            pl_b[lb] = level[node]
            ps_b[lb] = size[node]
            pi_b[lb] = internal[node]
            lb += 1
            node = p

        if pn_a[la - 1] == pn_b[lb - 1]:
            raise ValueError("edge sequence is not a forest in canonical order")

        # Stabilized one-sided scale: 1 + the largest threshold v at which
        # the evolving region still wants a level above v.  Chain entry j
        # covers thresholds [pl[j], pl[j+1]); the last entry is unbounded.
        best = -1
        for j in range(la):
            s_val = (w - pi_a[j]) * ps_a[j]
            if s_val > pl_a[j]:
                hi = s_val - 1
                if j + 1 < la and pl_a[j + 1] - 1 < hi:
                    hi = pl_a[j + 1] - 1
                if hi > best:
                    best = hi
        sa = best + 1 if best >= 0 else 1

        best = -1
        for j in range(lb):
            s_val = (w - pi_b[j]) * ps_b[j]
            if s_val > pl_b[j]:
                hi = s_val - 1
                if j + 1 < lb and pl_b[j + 1] - 1 < hi:
                    hi = pl_b[j + 1] - 1
                if hi > best:
                    best = hi
        sb = best + 1 if best >= 0 else 1

        lam = sa if sa > sb else sb
        scales[t] = lam

        # Splice both structures at level lam.
        ia = la - 1
        while pl_a[ia] > lam:
            ia -= 1
        ib = lb - 1
        while pl_b[ib] > lam:
            ib -= 1
        a_low = pn_a[ia]
        b_low = pn_b[ib]
        ca_size = ps_a[ia]
        ca_int = pi_a[ia]
        cb_size = ps_b[ib]
        cb_int = pi_b[ib]
        base_int = ca_int if ca_int > cb_int else cb_int
        if w > base_int:
            base_int = w
        if pl_a[ia] == lam:
            host = a_low
            parent[b_low] = host
        elif pl_b[ib] == lam:
            host = b_low
            parent[a_low] = host
        else:
            host = n_nodes
            n_nodes += 1
            level[host] = lam
            parent[a_low] = host
            parent[b_low] = host
        size[host] = ca_size + cb_size
        internal[host] = base_int

        prev = host
        i = ia + 1
        j = ib + 1
        while i < la or j < lb:
            if j >= lb or (i < la and pl_a[i] <= pl_b[j]):
                nd = pn_a[i]
                old_size = ps_a[i]
                old_int = pi_a[i]
                size[nd] = old_size + cb_size
                ni = old_int if old_int > cb_int else cb_int
                if w > ni:
                    ni = w
                internal[nd] = ni
                ca_size = old_size
                ca_int = old_int
                i += 1
            else:
                nd = pn_b[j]
                old_size = ps_b[j]
                old_int = pi_b[j]
                size[nd] = old_size + ca_size
                ni = old_int if old_int > ca_int else ca_int
                if w > ni:
                    ni = w
                internal[nd] = ni
                cb_size = old_size
                cb_int = old_int
                j += 1
            parent[prev] = nd
            prev = nd
        parent[prev] = -1

    return scales


def _bind_kernel():
    if os.environ.get("HIERSEG_NO_JIT"):
        return _scale_loop_impl
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        return _scale_loop_impl
    return njit(cache=True)(_scale_loop_impl)


_scale_loop = _bind_kernel()


def compute_hierarchy(graph: EdgeWeightedGraph, mst: Mst) -> ScaleMap:
    """Assign a hierarchical scale to every edge of the spanning forest.

    Edges are processed in canonical ``(weight, edge_id)`` order.  For each
    edge the current components of its endpoints are the regions accumulated
    from previously processed edges; the assigned scale is the larger of the
    two stabilized one-sided scales (see :func:`hierarchical_scale`).  Every
    edge receives a finite scale >= 1.  The computation is sequential by
    nature but pure, so independent inputs can run in parallel.
    """
    if mst.vertex_count != graph.vertex_count:
        raise InvalidInputError("tree and graph disagree on vertex count")
    scales = _scale_loop(graph.vertex_count, mst.us, mst.vs, mst.ws)
    return ScaleMap(mst, scales)


def region_chain(partial: ScaleMap, query: int) -> list[tuple[int, int, int]]:
    """Growth chain ``(threshold, size, internal)`` of ``query``'s region.

    Entry ``(t, s, d)`` says: for thresholds in ``[t, next_t)`` the region of
    ``query`` among edges with assigned scale <= threshold has ``s`` vertices
    and largest original inside weight ``d``.  The chain starts at the
    singleton ``(0, 1, 0)`` and ends with the full component of ``query``.
    """
    mst = partial.mst
    assigned = np.flatnonzero(partial.scales != UNASSIGNED)
    order = assigned[np.argsort(partial.scales[assigned], kind="stable")]
    uf = UnionFindForest(mst.vertex_count)
    chain = [(0, 1, 0)]
    k = 0
    while k < order.size:
        s = int(partial.scales[order[k]])
        while k < order.size and int(partial.scales[order[k]]) == s:
            i = order[k]
            uf.union(int(mst.us[i]), int(mst.vs[i]), link_weight=int(mst.ws[i]))
            k += 1
        r = uf.find(query)
        if int(uf.size[r]) != chain[-1][1]:
            chain.append((s, int(uf.size[r]), int(uf.internal[r])))
    return chain


def stabilized_scale_from_chain(chain, diff: int) -> int:
    """Smallest level v >= 1 such that for every v' >= v the region in the
    chain active at v' asks for at most v'.

    The per-region demand at threshold v' is ``(diff - internal) * size`` of
    the chain entry covering v'; the answer is one more than the largest v'
    whose demand exceeds it (1 when no threshold is exceeded).
    """
    best = -1
    for j, (lo, sz, itn) in enumerate(chain):
        s_val = (diff - itn) * sz
        if s_val > lo:
            hi = s_val - 1
            if j + 1 < len(chain):
                hi = min(hi, chain[j + 1][0] - 1)
            if hi > best:
                best = hi
    return best + 1 if best >= 0 else 1


def hierarchical_scale(partial: ScaleMap, query: int, edge_weight: int) -> int:
    """One-sided hierarchical scale of ``query``'s region against the region
    across an edge of original weight ``edge_weight``.

    Declarative form of what the kernel inside :func:`compute_hierarchy`
    maintains incrementally: build the growth chain of ``query`` under the
    partial scale map, then stabilize.  The opposite region only enters
    through the edge weight: the processed edge is the minimum-weight link
    between the two regions, so the difference term is ``edge_weight``
    itself.
    """
    if not (0 <= query < partial.vertex_count):
        raise InvalidInputError("query vertex out of range")
    if edge_weight < 0:
        raise InvalidInputError("edge weight must be non-negative")
    return stabilized_scale_from_chain(region_chain(partial, query), edge_weight)


def cut(scale_map: ScaleMap, lam: int) -> Partition:
    """Partition induced by edges whose scale is at most ``lam``."""
    if lam < 0:
        raise InvalidInputError("threshold must be non-negative")
    mst = scale_map.mst
    admit = (scale_map.scales != UNASSIGNED) & (scale_map.scales <= lam)
    return _components_of_admitted(mst.vertex_count, mst.us, mst.vs, admit)


def cut_to_region_count(scale_map: ScaleMap, n_regions: int) -> tuple[int, Partition]:
    """Smallest threshold whose cut has at most ``n_regions`` regions.

    Returns ``(threshold, partition)``; the achieved count is
    ``partition.region_count`` and may undershoot ``n_regions`` when several
    edges share the boundary scale.
    """
    n = scale_map.vertex_count
    if not (1 <= n_regions <= n):
        raise InvalidInputError("target region count out of range")
    if not scale_map.is_complete():
        raise InvalidInputError("scale map has unassigned edges")
    mst = scale_map.mst
    order = np.argsort(scale_map.scales, kind="stable")
    uf = UnionFindForest(n)
    count = n
    lam = 0
    if count > n_regions:
        k = 0
        while k < order.size:
            s = int(scale_map.scales[order[k]])
            while k < order.size and int(scale_map.scales[order[k]]) == s:
                i = order[k]
                if uf.find(int(mst.us[i])) != uf.find(int(mst.vs[i])):
                    uf.union(int(mst.us[i]), int(mst.vs[i]))
                    count -= 1
                k += 1
            if count <= n_regions:
                lam = s
                break
        else:
            lam = scale_map.max_scale()  # disconnected graph: best achievable
    return lam, cut(scale_map, lam)


class MergeTree:
    """Dendrogram of the scale map: leaves are vertices, each internal node
    is the region created when two regions unite at its scale.

    Node ids: ``0..n-1`` are leaves, internal nodes follow in creation order
    (ascending scale).  Parent scales are non-decreasing towards the roots,
    so the lowest common ancestor of two leaves gives the smallest threshold
    at which they share a region.
    """

    def __init__(self, vertex_count, scale, size, internal, left, right, parent):
        self.vertex_count = int(vertex_count)
        self.scale = scale
        self.size = size
        self.internal = internal
        self.left = left
        self.right = right
        self.parent = parent
        self._lift = None

    @property
    def internal_count(self) -> int:
        return self.scale.size

    @property
    def node_count(self) -> int:
        return self.vertex_count + self.internal_count

    def roots(self) -> np.ndarray:
        return np.flatnonzero(self.parent == -1)

    def node_scale(self, node: int) -> int:
        n = self.vertex_count
        return 0 if node < n else int(self.scale[node - n])

    def node_size(self, node: int) -> int:
        n = self.vertex_count
        return 1 if node < n else int(self.size[node - n])

    def children(self, node: int) -> tuple[int, ...]:
        n = self.vertex_count
        if node < n:
            return ()
        return (int(self.left[node - n]), int(self.right[node - n]))

    def flatten(self, lam: int) -> Partition:
        """Partition whose regions are the maximal nodes of scale <= lam."""
        total = self.node_count
        n = self.vertex_count
        rep = np.empty(total, dtype=np.int64)
        for node in range(total - 1, -1, -1):
            p = self.parent[node]
            if p == -1 or self.node_scale(int(p)) > lam:
                rep[node] = node
            else:
                rep[node] = rep[p]
        return Partition(rep[:n])

    def _lifting(self):
        if self._lift is None:
            total = self.node_count
            depth = np.zeros(total, dtype=np.int64)
            for node in range(total - 1, -1, -1):
                p = self.parent[node]
                if p != -1:
                    depth[node] = depth[p] + 1
            k = max(1, int(np.max(depth)).bit_length())
            up = np.empty((k, total), dtype=np.int64)
            up[0] = np.where(self.parent == -1, np.arange(total), self.parent)
            for j in range(1, k):
                up[j] = up[j - 1][up[j - 1]]
            self._lift = (depth, up)
        return self._lift

    def lca(self, a, b) -> np.ndarray:
        """Vectorized lowest common ancestor of leaf/node id pairs."""
        depth, up = self._lifting()
        a = np.asarray(a, dtype=np.int64).copy()
        b = np.asarray(b, dtype=np.int64).copy()
        scalar = a.ndim == 0
        a, b = np.atleast_1d(a), np.atleast_1d(b)
        da, db = depth[a], depth[b]
        swap = da < db
        a[swap], b[swap] = b[swap], a[swap].copy()
        diff = np.abs(da - db)
        for j in range(up.shape[0]):
            mask = (diff >> j) & 1 == 1
            if mask.any():
                a[mask] = up[j][a[mask]]
        neq = a != b
        for j in range(up.shape[0] - 1, -1, -1):
            lift = neq & (up[j][a] != up[j][b])
            if lift.any():
                a[lift] = up[j][a[lift]]
                b[lift] = up[j][b[lift]]
        out = np.where(neq, up[0][a], a)
        if np.any(out != np.where(neq, up[0][b], b)):
            raise NoPathError("nodes lie in different trees")
        return out[0] if scalar else out

    def lca_scale(self, u: int, v: int) -> int:
        """Smallest threshold at which leaves ``u`` and ``v`` share a region."""
        if u == v:
            return 0
        node = int(self.lca(u, v))
        if node < self.vertex_count:
            raise NoPathError("leaves lie in different trees")
        return int(self.scale[node - self.vertex_count])

    def records(self):
        """Yield ``(id, scale, size, children)`` per node, leaves first."""
        for v in range(self.vertex_count):
            yield v, 0, 1, ()
        n = self.vertex_count
        for i in range(self.internal_count):
            yield n + i, int(self.scale[i]), int(self.size[i]), \
                (int(self.left[i]), int(self.right[i]))


def merge_tree(scale_map: ScaleMap) -> MergeTree:
    """Build the dendrogram by uniting regions in ascending (scale, edge id)
    order; each union creates one internal node carrying that scale."""
    if not scale_map.is_complete():
        raise InvalidInputError("scale map has unassigned edges")
    mst = scale_map.mst
    n = mst.vertex_count
    m = mst.edge_count
    order = np.lexsort((mst.edge_ids, scale_map.scales))
    scale = np.empty(m, dtype=np.int64)
    size = np.empty(m, dtype=np.int64)
    internal = np.empty(m, dtype=np.int64)
    left = np.empty(m, dtype=np.int64)
    right = np.empty(m, dtype=np.int64)
    parent = np.full(n + m, -1, dtype=np.int64)
    node_of = np.arange(n, dtype=np.int64)  # current tree node per UF root
    uf = UnionFindForest(n)
    for t, i in enumerate(order):
        u, v = int(mst.us[i]), int(mst.vs[i])
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            raise InvalidInputError("scale map edges contain a cycle")
        a, b = int(node_of[ru]), int(node_of[rv])
        node = n + t
        scale[t] = scale_map.scales[i]
        size[t] = uf.size[ru] + uf.size[rv]
        internal[t] = max(uf.internal[ru], uf.internal[rv], int(mst.ws[i]))
        left[t] = a
        right[t] = b
        parent[a] = node
        parent[b] = node
        node_of[uf.union(u, v, link_weight=int(mst.ws[i]))] = node
    return MergeTree(n, scale, size, internal, left, right, parent)

"""Fixed-parameter region merging over the spanning forest.

The comparison baseline: regions merge greedily at a single scale parameter
``k``.  Useful segmentations come out of it, but its output is not a
hierarchy: region counts can grow as ``k`` grows and contours move between
parameter values, which is exactly what the scale-map hierarchy fixes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .graph import Mst, Partition, UnionFindForest

__all__ = ["FhParams", "RegionStats", "observation_scale", "segment_fh"]


@dataclass(frozen=True)
class FhParams:
    """Scale parameter ``k`` and optional small-region post-filter size."""

    k: int
    min_area: int | None = None

    def __post_init__(self):
        if self.k < 0:
            raise InvalidInputError("k must be non-negative")
        if self.min_area is not None and self.min_area < 1:
            raise InvalidInputError("min_area must be >= 1")


@dataclass(frozen=True)
class RegionStats:
    """Vertex count and internal difference of a region."""

    size: int
    internal_difference: int

    def __post_init__(self):
        if self.size < 1:
            raise InvalidInputError("regions have at least one vertex")


def observation_scale(x: RegionStats, y: RegionStats, diff: int) -> int:
    """Scale at which regions with these stats merge across a link of weight
    ``diff``: the larger of ``(diff - internal) * size`` for the two sides.

    May be negative when ``diff`` is below an internal difference.  Two
    regions merge at parameter ``k`` exactly when ``k >= observation_scale``,
    which restates the quotient test ``diff <= min(int_x + k/|X|,
    int_y + k/|Y|)`` in integer arithmetic.
    """
    return max((diff - x.internal_difference) * x.size,
               (diff - y.internal_difference) * y.size)


def segment_fh(mst: Mst, params: FhParams) -> Partition:
    """Greedy region merging at fixed ``k`` over canonical-order tree edges.

    For each edge the two current regions merge iff ``k`` is at least their
    observation scale (all arithmetic exact in integers, including the
    ``k / |region|`` quotients, so equality cases match the exact rational
    comparison).  The merged region's internal difference is the maximum of
    both sides and the edge weight.

    ``params.min_area`` is carried for callers that post-filter: it needs
    the adjacency graph, so it is applied with
    :func:`hierseg.image_io.area_filter`, not here.
    """
    n = mst.vertex_count
    uf = UnionFindForest(n)
    k = params.k
    for i in range(mst.edge_count):
        u, v, w = int(mst.us[i]), int(mst.vs[i]), int(mst.ws[i])
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        dx = (w - int(uf.internal[ru])) * int(uf.size[ru])
        dy = (w - int(uf.internal[rv])) * int(uf.size[rv])
        if k >= dx and k >= dy:
            uf.union(ru, rv, link_weight=w)
    roots = np.fromiter((uf.find(v) for v in range(n)), dtype=np.int64, count=n)
    return Partition(roots)

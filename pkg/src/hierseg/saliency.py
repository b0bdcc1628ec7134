"""Contour disappearance levels per adjacency edge, and their rendering.

Each graph edge gets the smallest threshold at which its two endpoints fall
into one region; thresholding these values reproduces every cut boundary,
and the values form an ultrametric (max over the tree path between the
endpoints).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NoPathError, UnsupportedTopologyError
from .graph import EdgeWeightedGraph, Mst, round_half_up
from .hierarchy import ScaleMap, merge_tree

__all__ = ["SaliencyMap", "ContourImage", "ultrametric", "saliency_map",
           "render_contours"]


@dataclass(frozen=True)
class SaliencyMap:
    """Disappearance level for every edge of ``graph`` (aligned by edge id)."""

    graph: EdgeWeightedGraph
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.graph.edge_count,):
            raise InvalidInputError("one saliency value per graph edge required")

    def value_of(self, i: int) -> int:
        return int(self.values[i])

    def max_value(self) -> int:
        return int(self.values.max()) if self.values.size else 0

    def boundary_edges(self, lam: int) -> np.ndarray:
        """Edge ids still separating regions at threshold ``lam``."""
        return np.flatnonzero(self.values > lam)


def ultrametric(scale_map: ScaleMap, mst: Mst, edge: tuple[int, int]) -> int:
    """Largest scale on the tree path between the endpoints of ``edge``.

    Declarative per-pair form; equals the smallest threshold at which the
    endpoints share a region of the cut.  Raises :class:`NoPathError` when
    the endpoints lie in different components.
    """
    p, q = edge
    n = mst.vertex_count
    if not (0 <= p < n and 0 <= q < n):
        raise InvalidInputError("endpoint out of range")
    if p == q:
        return 0
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i in range(mst.edge_count):
        u, v, s = int(mst.us[i]), int(mst.vs[i]), int(scale_map.scales[i])
        adj[u].append((v, s))
        adj[v].append((u, s))
    seen = {p: (None, 0)}
    queue = deque([p])
    while queue:
        x = queue.popleft()
        if x == q:
            break
        for y, s in adj[x]:
            if y not in seen:
                seen[y] = (x, s)
                queue.append(y)
    if q not in seen:
        raise NoPathError(f"vertices {p} and {q} are not connected in the tree")
    best = 0
    x = q
    while x != p:
        x, s = seen[x]
        if s > best:
            best = s
    return best


def saliency_map(scale_map: ScaleMap, graph: EdgeWeightedGraph, mst: Mst) -> SaliencyMap:
    """Disappearance level of every graph edge in one dendrogram pass.

    The level of edge ``(p, q)`` is the scale of the lowest common ancestor
    of the two leaves in the merge tree, which equals the path maximum
    without walking any path.
    """
    if graph.vertex_count != mst.vertex_count:
        raise InvalidInputError("graph and tree disagree on vertex count")
    tree = merge_tree(scale_map)
    if graph.edge_count == 0:
        return SaliencyMap(graph, np.zeros(0, dtype=np.int64))
    nodes = tree.lca(graph.us, graph.vs)
    if np.any(nodes < tree.vertex_count):
        raise NoPathError("graph edge endpoints lie in different components")
    values = tree.scale[nodes - tree.vertex_count]
    return SaliencyMap(graph, values.astype(np.int64))


@dataclass(frozen=True)
class ContourImage:
    """Grayscale raster on the doubled grid ``(2*height-1, 2*width-1)``.

    Cells at even/even coordinates sit on pixels and hold 0; odd cells
    between two pixels hold the normalized saliency of their edge; odd/odd
    corner cells hold the maximum of the incident inter-pixel cells so
    contours close visually.
    """

    samples: np.ndarray

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def bit_depth(self) -> int:
        return 16 if self.samples.dtype == np.uint16 else 8


def render_contours(sal: SaliencyMap, grid: tuple[int, int] | None = None,
                    norm: str = "linear", invert: bool = False) -> ContourImage:
    """Render a saliency map of a 4-adjacency grid as an inter-pixel image.

    ``norm`` is ``"linear"`` (value / max scaled to full range) or ``"log"``
    (``log1p(value) / log1p(max)``).  Output is 8-bit unless the raw maximum
    exceeds 255, then 16-bit.  High values mean salient contours; ``invert``
    flips the polarity for dark-contour renderings.
    """
    graph = sal.graph
    if grid is None:
        grid = graph.grid_shape
    if grid is None:
        raise UnsupportedTopologyError("saliency rendering needs a pixel-grid graph")
    w, h = grid
    if w < 1 or h < 1 or w * h != graph.vertex_count:
        raise UnsupportedTopologyError("grid dimensions do not match the graph")
    if norm not in ("linear", "log"):
        raise InvalidInputError(f"unknown normalization: {norm!r}")

    raw = np.zeros((2 * h - 1, 2 * w - 1), dtype=np.int64)
    if graph.edge_count:
        rows = graph.us // w
        cols = graph.us % w
        # col bound keeps width-1 grids from reading u+1 == u+w as horizontal
        horizontal = (graph.vs == graph.us + 1) & (cols < w - 1)
        vertical = graph.vs == graph.us + w
        if not np.all(horizontal | vertical):
            raise UnsupportedTopologyError("graph edges do not follow 4-adjacency")
        raw[2 * rows[horizontal], 2 * cols[horizontal] + 1] = sal.values[horizontal]
        raw[2 * rows[vertical] + 1, 2 * cols[vertical]] = sal.values[vertical]
        if h > 1 and w > 1:
            corners = np.maximum.reduce([
                raw[0:-2:2, 1::2],   # above
                raw[2::2, 1::2],     # below
                raw[1::2, 0:-2:2],   # left
                raw[1::2, 2::2],     # right
            ])
            raw[1::2, 1::2] = corners

    max_raw = int(raw.max()) if raw.size else 0
    dtype = np.uint16 if max_raw > 255 else np.uint8
    full = 65535 if dtype == np.uint16 else 255
    if max_raw == 0:
        out = np.zeros_like(raw)
    elif norm == "linear":
        out = round_half_up(raw * (full / max_raw))
    else:
        out = round_half_up(np.log1p(raw) / np.log1p(max_raw) * full)
    if invert:
        out = full - out  # dark contours on a light background
    return ContourImage(out.astype(dtype))

"""Shared fixtures: the two worked graphs used throughout the tests.

``worked_graph`` is the six-vertex example (vertices a..f mapped to 0..5)
whose spanning tree, baseline segmentations, scale map, cuts and saliency
values are all known in closed form.  ``two_cluster_scalemap`` is the
nine-vertex configuration (A..I mapped to 0..8) with pre-assigned scales on
two separate components, used to pin the one-sided scale computation.
"""

from __future__ import annotations

import numpy as np
import pytest

from hierseg import EdgeWeightedGraph, Mst, ScaleMap, kruskal_mst

A, B, C, D, E, F = range(6)

# printed edge order fixes the edge ids (ties resolved by creation order)
WORKED_EDGES = [
    (A, D, 1), (B, A, 11), (C, B, 5), (B, E, 9), (C, F, 3), (F, E, 1), (E, D, 1),
]

# per-edge hierarchical scales of the worked graph, keyed (min, max)
WORKED_SCALES = {(0, 3): 1, (3, 4): 1, (4, 5): 1, (2, 5): 8, (1, 2): 10}


@pytest.fixture
def worked_graph() -> EdgeWeightedGraph:
    return EdgeWeightedGraph.from_edges(6, WORKED_EDGES)


@pytest.fixture
def worked_mst(worked_graph) -> Mst:
    return kruskal_mst(worked_graph)


@pytest.fixture
def two_cluster_scalemap() -> tuple[ScaleMap, int, int, int]:
    """Nine-vertex forest (A..I = 0..8) with scales already assigned.

    Left component {A..E}, right component {F..I}; the query edge joins
    B and G with original weight 10.  Returns (scale map, B, G, weight).
    """
    a, b, c, d, e, f, g, h, i = range(9)
    forest = Mst.from_edges(9, [
        (b, c, 1), (b, a, 9), (a, e, 2), (a, d, 1),  # left, original weights
        (g, h, 4), (h, f, 8), (h, i, 1),             # right
    ])
    assigned = {(b, c): 1, (b, a): 21, (a, e): 2, (a, d): 1,
                (g, h): 6, (h, f): 12, (h, i): 1}
    sm = ScaleMap(forest)
    for idx in range(forest.edge_count):
        u, v = int(forest.us[idx]), int(forest.vs[idx])
        key = (u, v) if (u, v) in assigned else (v, u)
        sm.set_scale(idx, assigned[key])
    return sm, b, g, 10


def sets_of(partition):
    return {frozenset(s) for s in partition.as_sets()}


@pytest.fixture
def random_rgb():
    def make(seed: int, height: int = 8, width: int = 8):
        from hierseg import RgbImage

        rng = np.random.default_rng(seed)
        return RgbImage(rng.integers(0, 256, size=(height, width, 3),
                                     dtype=np.uint8))
    return make

"""Fixed-parameter baseline: worked-example partitions and the scale identity."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hierseg import (FhParams, InvalidInputError, Partition, RegionStats,
                     UnionFindForest, kruskal_mst, observation_scale,
                     random_instance, segment_fh)
from conftest import sets_of


class TestSegmentFh:
    def test_k5_partition(self, worked_mst):
        part = segment_fh(worked_mst, FhParams(5))
        assert sets_of(part) == {frozenset({0, 3, 4, 5}), frozenset({1, 2})}

    def test_k8_partition(self, worked_mst):
        part = segment_fh(worked_mst, FhParams(8))
        assert sets_of(part) == {frozenset({0, 2, 3, 4, 5}), frozenset({1})}

    def test_huge_k_merges_everything(self, worked_graph, worked_mst):
        k = int(worked_graph.ws.max()) * worked_graph.vertex_count
        assert segment_fh(worked_mst, FhParams(k)).region_count == 1

    def test_k0_joins_only_zero_weight_edges(self, worked_mst):
        part = segment_fh(worked_mst, FhParams(0))
        assert part.region_count == 6  # no zero-weight edge in the fixture

    def test_k0_with_zero_weight_edges(self):
        from hierseg import EdgeWeightedGraph

        g = EdgeWeightedGraph.from_edges(4, [(0, 1, 0), (1, 2, 3), (2, 3, 0)])
        part = segment_fh(kruskal_mst(g), FhParams(0))
        assert sets_of(part) == {frozenset({0, 1}), frozenset({2, 3})}

    def test_instability_between_k5_and_k8(self, worked_mst):
        at5 = segment_fh(worked_mst, FhParams(5))
        at8 = segment_fh(worked_mst, FhParams(8))
        assert not at5.refines(at8)
        assert not at8.refines(at5)

    def test_deterministic(self, worked_mst):
        assert segment_fh(worked_mst, FhParams(7)) == segment_fh(worked_mst, FhParams(7))

    def test_rejects_negative_k(self):
        with pytest.raises(InvalidInputError):
            FhParams(-1)


class TestObservationScale:
    def test_worked_side_values(self):
        # singleton against the four-vertex region across a weight-3 link
        value = observation_scale(RegionStats(1, 0), RegionStats(4, 1), 3)
        assert value == 8

    def test_identical_singletons(self):
        assert observation_scale(RegionStats(1, 0), RegionStats(1, 0), 7) == 7

    def test_two_vertex_side_contributes_18(self):
        # the (size 2, internal 1) region against weight-10 link asks for 18
        value = observation_scale(RegionStats(2, 1), RegionStats(1, 0), 10)
        assert value == 18

    def test_negative_when_diff_below_internal(self):
        assert observation_scale(RegionStats(3, 9), RegionStats(2, 9), 5) == -8

    @settings(max_examples=200, deadline=None)
    @given(sx=st.integers(1, 50), sy=st.integers(1, 50),
           ix=st.integers(0, 40), iy=st.integers(0, 40),
           diff=st.integers(0, 40), k=st.integers(0, 2000))
    def test_quotient_form_equals_scale_form(self, sx, sy, ix, iy, diff, k):
        # merge test written with exact rationals, as the quotient reads
        quotient = (Fraction(diff) <= min(ix + Fraction(k, sx),
                                          iy + Fraction(k, sy)))
        by_scale = k >= observation_scale(RegionStats(sx, ix),
                                          RegionStats(sy, iy), diff)
        assert quotient == by_scale


@pytest.mark.parametrize("seed", range(10))
def test_merge_decisions_match_rational_replay(seed):
    """Replay the greedy merging with Fraction arithmetic and compare."""
    g = random_instance(seed, max_vertices=24)
    mst = kruskal_mst(g)
    k = int(np.random.default_rng(seed).integers(0, 60))
    mine = segment_fh(mst, FhParams(k))

    uf = UnionFindForest(g.vertex_count)
    for i in range(mst.edge_count):
        u, v, w = int(mst.us[i]), int(mst.vs[i]), int(mst.ws[i])
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        bound = min(int(uf.internal[ru]) + Fraction(k, int(uf.size[ru])),
                    int(uf.internal[rv]) + Fraction(k, int(uf.size[rv])))
        if Fraction(w) <= bound:
            uf.union(u, v, link_weight=w)
    roots = [uf.find(x) for x in range(g.vertex_count)]
    assert mine == Partition(np.asarray(roots))

"""Hierarchical graph-based image segmentation driven by observation scales.

The library turns an RGB image into a 4-adjacency edge-weighted graph,
computes its minimum spanning forest, and assigns every tree edge a
hierarchical observation scale.  Thresholding that scale map produces a full
family of nested segmentations (one per scale), along with saliency maps,
merge trees and the fixed-parameter region-merging baseline for comparison.
"""

from .errors import (FormatError, GraphTooLargeError, HiersegError,
                     InvalidInputError, NoPathError, UnsupportedTopologyError)
from .fh import FhParams, RegionStats, observation_scale, segment_fh
from .graph import (EdgeWeightedGraph, Mst, Partition, UnionFindForest,
                    WeightedEdge, build_grid_graph, kruskal_mst,
                    partition_at_threshold, round_half_up)
from .hierarchy import (UNASSIGNED, MergeTree, ScaleMap, compute_hierarchy,
                        cut, cut_to_region_count, hierarchical_scale,
                        merge_tree, region_chain, stabilized_scale_from_chain)
from .image_io import (GrayImage, RgbImage, add_salt_noise, area_filter,
                       read_ppm, render_segmentation, write_pgm, write_ppm)
from .oracle import (PropertyReport, bfs_partition, check_causality,
                     check_nestedness, exhaustive_mst_weight,
                     naive_hierarchical_scale, random_instance,
                     replay_counterexample)
from .saliency import (ContourImage, SaliencyMap, render_contours,
                       saliency_map, ultrametric)

__version__ = "0.1.0"

__all__ = [
    "HiersegError", "InvalidInputError", "FormatError", "NoPathError",
    "UnsupportedTopologyError", "GraphTooLargeError",
    "WeightedEdge", "EdgeWeightedGraph", "UnionFindForest", "Mst", "Partition",
    "build_grid_graph", "kruskal_mst", "partition_at_threshold", "round_half_up",
    "FhParams", "RegionStats", "observation_scale", "segment_fh",
    "UNASSIGNED", "ScaleMap", "MergeTree", "compute_hierarchy",
    "hierarchical_scale", "region_chain", "stabilized_scale_from_chain",
    "cut", "cut_to_region_count", "merge_tree",
    "SaliencyMap", "ContourImage", "ultrametric", "saliency_map",
    "render_contours",
    "RgbImage", "GrayImage", "read_ppm", "write_ppm", "write_pgm",
    "render_segmentation", "area_filter", "add_salt_noise",
    "PropertyReport", "bfs_partition", "naive_hierarchical_scale",
    "exhaustive_mst_weight", "check_causality", "check_nestedness",
    "random_instance", "replay_counterexample",
]

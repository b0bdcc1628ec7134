"""Command-line frontend for the segmentation pipeline.

Subcommands cover the full reproduction path: ``hierarchy`` (scale map +
merge tree documents), ``cut`` and ``fh`` (segmentations as mean-color
images), ``saliency`` (contour image), ``sweep`` (region counts over a
parameter list), ``noise`` (salt corruption) and ``check`` (property runs
and counterexample replay).  Inputs are PPM images, or small text graphs
via the ``--graph`` debug flag (first token: vertex count; then one
``u v w`` triple per edge).  All outputs are byte-deterministic.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (FormatError, GraphTooLargeError, HiersegError,
                     InvalidInputError, NoPathError, UnsupportedTopologyError)
from .fh import FhParams, segment_fh
from .graph import EdgeWeightedGraph, Partition, build_grid_graph, kruskal_mst
from .hierarchy import (ScaleMap, compute_hierarchy, cut, cut_to_region_count,
                        merge_tree)
from .image_io import (RgbImage, add_salt_noise, area_filter, read_ppm,
                       render_segmentation, write_pgm, write_ppm)
from .oracle import (check_causality, check_nestedness, random_instance,
                     replay_counterexample)
from .saliency import render_contours, saliency_map

_ERROR_CLASSES = [
    (FormatError, "format-error"),
    (NoPathError, "no-path"),
    (UnsupportedTopologyError, "unsupported-topology"),
    (GraphTooLargeError, "graph-too-large"),
    (InvalidInputError, "invalid-input"),
    (HiersegError, "error"),
    (OSError, "io-error"),
]


def _fail(exc) -> int:
    for etype, name in _ERROR_CLASSES:
        if isinstance(exc, etype):
            print(f"{name}: {exc}", file=sys.stderr)
            return 1
    raise exc


def _parse_graph_text(text: str) -> EdgeWeightedGraph:
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    if not tokens:
        raise InvalidInputError("graph file is empty")
    try:
        numbers = [int(t) for t in tokens]
    except ValueError as exc:
        raise InvalidInputError(f"graph file holds a non-integer token: {exc}")
    n, rest = numbers[0], numbers[1:]
    if len(rest) % 3 != 0:
        raise InvalidInputError("graph file edges must be 'u v w' triples")
    triples = [(rest[i], rest[i + 1], rest[i + 2]) for i in range(0, len(rest), 3)]
    return EdgeWeightedGraph.from_edges(n, triples)


def _load_input(path: str, as_graph: bool):
    """Returns ``(graph, image_or_None)`` for a PPM path or graph text file."""
    data = Path(path).read_bytes()
    if as_graph:
        return _parse_graph_text(data.decode("utf-8")), None
    image = read_ppm(data)
    return build_grid_graph(image), image


def _write_partition_text(path: str, partition: Partition) -> None:
    lines = []
    for label in range(partition.region_count):
        lines.append(" ".join(str(v) for v in partition.members(label)))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_scales_doc(path: str, scale_map: ScaleMap) -> None:
    mst = scale_map.mst
    rows = []
    for i in range(mst.edge_count):
        u, v = int(mst.us[i]), int(mst.vs[i])
        u, v = (u, v) if u < v else (v, u)
        rows.append((int(scale_map.scales[i]), u, v, int(mst.ws[i])))
    rows.sort()
    text = "edge_u,edge_v,weight,scale\n" + "".join(
        f"{u},{v},{w},{s}\n" for s, u, v, w in rows)
    Path(path).write_text(text)


def _write_tree_doc(path: str, scale_map: ScaleMap) -> None:
    tree = merge_tree(scale_map)
    lines = ["id,scale,size,children"]
    for node, scale, size, children in tree.records():
        kids = ";".join(str(c) for c in children)
        lines.append(f"{node},{scale},{size},{kids}")
    Path(path).write_text("\n".join(lines) + "\n")


def _rendered_output(path: str, partition: Partition, image) -> None:
    if image is None:
        _write_partition_text(path, partition)
    else:
        Path(path).write_bytes(write_ppm(render_segmentation(partition, image)))


def _cmd_hierarchy(args) -> int:
    graph, _image = _load_input(args.input, args.graph)
    t0 = time.perf_counter()
    mst = kruskal_mst(graph)
    scale_map = compute_hierarchy(graph, mst)
    elapsed = time.perf_counter() - t0
    if args.scales_out:
        _write_scales_doc(args.scales_out, scale_map)
    if args.tree_out:
        _write_tree_doc(args.tree_out, scale_map)
    print(f"edges={mst.edge_count}")
    print(f"distinct_scales={scale_map.distinct_scales().size}")
    print(f"wall_time_s={elapsed:.3f}")
    return 0


def _apply_area_filter(partition, graph, min_area):
    if min_area is None or min_area <= 1:
        return partition
    return area_filter(partition, graph, min_area)


def _cmd_cut(args) -> int:
    graph, image = _load_input(args.input, args.graph)
    mst = kruskal_mst(graph)
    scale_map = compute_hierarchy(graph, mst)
    if args.regions is not None:
        lam, partition = cut_to_region_count(scale_map, args.regions)
    else:
        lam, partition = args.scale, cut(scale_map, args.scale)
    before = partition.region_count
    partition = _apply_area_filter(partition, graph, args.min_area)
    _rendered_output(args.output, partition, image)
    print(f"lambda={lam}")
    print(f"regions_before={before}")
    print(f"regions_after={partition.region_count}")
    return 0


def _cmd_fh(args) -> int:
    graph, image = _load_input(args.input, args.graph)
    mst = kruskal_mst(graph)
    partition = segment_fh(mst, FhParams(args.k, args.min_area))
    before = partition.region_count
    partition = _apply_area_filter(partition, graph, args.min_area)
    _rendered_output(args.output, partition, image)
    print(f"k={args.k}")
    print(f"regions_before={before}")
    print(f"regions_after={partition.region_count}")
    return 0


def _cmd_saliency(args) -> int:
    graph, image = _load_input(args.input, args.graph)
    mst = kruskal_mst(graph)
    scale_map = compute_hierarchy(graph, mst)
    sal = saliency_map(scale_map, graph, mst)
    if image is None:
        rows = []
        for i in range(graph.edge_count):
            u, v = int(graph.us[i]), int(graph.vs[i])
            u, v = (u, v) if u < v else (v, u)
            rows.append((u, v, int(sal.values[i])))
        rows.sort()
        text = "edge_u,edge_v,saliency\n" + "".join(
            f"{u},{v},{s}\n" for u, v, s in rows)
        Path(args.output).write_text(text)
        print(f"max_saliency={sal.max_value()}")
        return 0
    contours = render_contours(sal, norm=args.norm, invert=args.invert)
    Path(args.output).write_bytes(write_pgm(contours))
    print(f"max_saliency={sal.max_value()}")
    print(f"bit_depth={contours.bit_depth}")
    return 0


def _parse_k_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise InvalidInputError(f"bad k list: {text!r}")
    if not values:
        raise InvalidInputError("k list must be non-empty")
    return values


def _cmd_sweep(args) -> int:
    graph, _image = _load_input(args.input, args.graph)
    ks = _parse_k_list(args.k_list)
    mst = kruskal_mst(graph)
    rows = []
    if args.method == "hier":
        scale_map = compute_hierarchy(graph, mst)
        partitions = [cut(scale_map, k) for k in ks]
    else:
        partitions = [segment_fh(mst, FhParams(k)) for k in ks]
    previous = None
    for k, part in zip(ks, partitions):
        nested = "yes" if previous is None or previous.refines(part) else "no"
        rows.append(f"{k},{part.region_count},{nested}")
        previous = part
    Path(args.output).write_text(
        "k,region_count,nested_with_previous\n" + "".join(r + "\n" for r in rows))
    print(f"rows={len(rows)}")
    return 0


def _cmd_noise(args) -> int:
    data = Path(args.input).read_bytes()
    image = read_ppm(data)
    noisy = add_salt_noise(image, args.salt, args.seed)
    Path(args.output).write_bytes(write_ppm(noisy))
    return 0


def _cmd_check(args) -> int:
    if args.replay:
        report = replay_counterexample(Path(args.replay).read_text())
        print(f"property={report.name}")
        print(f"passed={'yes' if report.passed else 'no'}")
        return 0
    failures = 0
    for i in range(args.random):
        seed = args.seed + i
        graph = random_instance(seed)
        mst = kruskal_mst(graph)
        scale_map = compute_hierarchy(graph, mst)
        for report in (check_causality(scale_map), check_nestedness(scale_map)):
            if not report.passed:
                failures += 1
                out = Path(args.out or ".") / f"counterexample_{report.name}_{seed}.txt"
                out.write_text(report.to_text())
                print(f"property-failure: {report.name} on seed {seed} -> {out}",
                      file=sys.stderr)
    print(f"instances={args.random}")
    print(f"failures={failures}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hierseg",
        description="Hierarchical graph-based image segmentation tool")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("input", help="input PPM image (or graph text with --graph)")
        p.add_argument("--graph", action="store_true",
                       help="treat input as a text graph: vertex count, then 'u v w' lines")

    p = sub.add_parser("hierarchy", help="compute the scale map and merge tree")
    add_input(p)
    p.add_argument("--scales-out", help="write per-edge scales (CSV)")
    p.add_argument("--tree-out", help="write the merge tree (CSV records)")
    p.set_defaults(fn=_cmd_hierarchy)

    p = sub.add_parser("cut", help="extract one segmentation from the hierarchy")
    add_input(p)
    sel = p.add_mutually_exclusive_group(required=True)
    sel.add_argument("--scale", type=int, help="threshold the scale map at this value")
    sel.add_argument("--regions", type=int, help="target region count")
    p.add_argument("--min-area", type=int, default=None,
                   help="absorb regions smaller than this many pixels (off by default; 500 reproduces the usual photo setting)")
    p.add_argument("output", help="output PPM (mean colors) or region list for --graph")
    p.set_defaults(fn=_cmd_cut)

    p = sub.add_parser("fh", help="fixed-parameter region-merging baseline")
    add_input(p)
    p.add_argument("--k", type=int, required=True, help="scale parameter")
    p.add_argument("--min-area", type=int, default=None,
                   help="absorb regions smaller than this many pixels (off by default)")
    p.add_argument("output", help="output PPM (mean colors) or region list for --graph")
    p.set_defaults(fn=_cmd_fh)

    p = sub.add_parser("saliency", help="render contour disappearance levels")
    add_input(p)
    p.add_argument("--norm", choices=("linear", "log"), default="linear")
    p.add_argument("--invert", action="store_true",
                   help="dark contours on a light background")
    p.add_argument("output", help="output PGM (or edge list for --graph)")
    p.set_defaults(fn=_cmd_saliency)

    p = sub.add_parser("sweep", help="region counts over a list of parameters")
    add_input(p)
    p.add_argument("--method", choices=("fh", "hier"), required=True)
    p.add_argument("--k-list", required=True, help="comma-separated parameter values")
    p.add_argument("output", help="output CSV")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("noise", help="corrupt an image with salt noise")
    p.add_argument("input", help="input PPM image")
    p.add_argument("--salt", type=float, required=True, help="per-pixel probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("output", help="output PPM")
    p.set_defaults(fn=_cmd_noise)

    p = sub.add_parser("check", help="run property checks or replay a counterexample")
    p.add_argument("--random", type=int, default=0, metavar="N",
                   help="check N seeded random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for counterexample files")
    p.add_argument("--replay", help="re-run a serialized counterexample")
    p.set_defaults(fn=_cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # map to machine-parseable one-liners
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())

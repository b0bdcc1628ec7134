"""Netpbm codecs, segmentation rendering, area filtering and salt noise.

PPM (P6 binary, P3 ASCII) is the only color input format; outputs are
canonical P6 and, for grayscale, P5 with 8- or 16-bit samples (16-bit
big-endian).  Everything is bit-exact and deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidInputError
from .graph import EdgeWeightedGraph, Partition, UnionFindForest

__all__ = [
    "RgbImage",
    "GrayImage",
    "read_ppm",
    "write_ppm",
    "write_pgm",
    "render_segmentation",
    "area_filter",
    "add_salt_noise",
]


@dataclass(frozen=True)
class RgbImage:
    """8-bit RGB raster stored as a ``(height, width, 3)`` uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise InvalidInputError("RgbImage expects a (h, w, 3) uint8 array")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidInputError("image must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class GrayImage:
    """Grayscale raster, uint8 or uint16 samples."""

    samples: np.ndarray

    def __post_init__(self):
        s = self.samples
        if s.ndim != 2 or s.dtype not in (np.uint8, np.uint16):
            raise InvalidInputError("GrayImage expects a 2-d uint8/uint16 array")

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def bit_depth(self) -> int:
        return 16 if self.samples.dtype == np.uint16 else 8


class _Tokenizer:
    """Whitespace/comment-aware token reader that remembers byte offsets."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _skip_separators(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in b" \t\r\n\x0b\x0c":
                self.pos += 1
            elif c == ord("#"):
                while self.pos < n and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                return

    def token(self, what: str) -> bytes:
        self._skip_separators()
        if self.pos >= len(self.data):
            raise FormatError(f"unexpected end of file while reading {what}",
                              offset=self.pos)
        start = self.pos
        data, n = self.data, len(self.data)
        while self.pos < n and data[self.pos] not in b" \t\r\n\x0b\x0c#":
            self.pos += 1
        return data[start:self.pos]

    def integer(self, what: str, lo: int = 0, hi: int | None = None) -> int:
        start = self.pos
        tok = self.token(what)
        if not tok.isdigit():
            raise FormatError(f"expected integer for {what}, got {tok[:16]!r}",
                              offset=start)
        value = int(tok)
        if value < lo or (hi is not None and value > hi):
            raise FormatError(f"{what} {value} out of range", offset=start)
        return value


def read_ppm(data: bytes) -> RgbImage:
    """Decode a binary (P6) or ASCII (P3) PPM stream with maxval 255.

    Malformed input raises :class:`FormatError` carrying the byte offset of
    the problem; decoding never crashes on truncated or garbled payloads.
    """
    tok = _Tokenizer(data)
    magic = tok.token("magic number")
    if magic not in (b"P6", b"P3"):
        raise FormatError(f"not a PPM stream (magic {magic[:8]!r})", offset=0)
    width = tok.integer("width", lo=1)
    height = tok.integer("height", lo=1)
    maxval_at = tok.pos
    maxval = tok.integer("maxval", lo=1)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}, only 255 is accepted",
                          offset=maxval_at)
    count = width * height * 3
    if magic == b"P6":
        if tok.pos >= len(data) or data[tok.pos] not in b" \t\r\n\x0b\x0c":
            raise FormatError("maxval must be followed by one whitespace byte",
                              offset=tok.pos)
        start = tok.pos + 1
        payload = data[start:start + count]
        if len(payload) < count:
            raise FormatError(
                f"truncated pixel data: expected {count} bytes, got {len(payload)}",
                offset=len(data))
        pixels = np.frombuffer(payload, dtype=np.uint8, count=count)
    else:
        values = np.empty(count, dtype=np.uint8)
        for i in range(count):
            values[i] = tok.integer("sample value", lo=0, hi=255)
        pixels = values
    return RgbImage(pixels.reshape(height, width, 3).copy())


def write_ppm(image: RgbImage) -> bytes:
    """Encode as canonical binary P6."""
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.tobytes()


def write_pgm(image: GrayImage) -> bytes:
    """Encode as binary P5; 16-bit samples are written big-endian."""
    maxval = 65535 if image.bit_depth == 16 else 255
    header = f"P5\n{image.width} {image.height}\n{maxval}\n".encode("ascii")
    if image.bit_depth == 16:
        payload = image.samples.astype(">u2").tobytes()
    else:
        payload = image.samples.tobytes()
    return header + payload


def _mix_label(labels: np.ndarray, seed: int) -> np.ndarray:
    """64-bit integer mix of region labels, stable across platforms."""
    offset = (seed * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    with np.errstate(over="ignore"):
        x = labels.astype(np.uint64) + np.uint64(offset)
        x ^= x >> np.uint64(30)
        x *= np.uint64(0xBF58476D1CE4E5B9)
        x ^= x >> np.uint64(27)
        x *= np.uint64(0x94D049BB133111EB)
        x ^= x >> np.uint64(31)
    return x


def render_segmentation(partition: Partition, image: RgbImage,
                        style: str = "mean-color", seed: int = 0) -> RgbImage:
    """Paint each region with its mean color or a label-seeded random color.

    Mean colors are channel-wise integer means rounded half up.  The random
    style hashes the region label with ``seed``; equal labels always get
    equal colors.
    """
    n = image.height * image.width
    if partition.vertex_count != n:
        raise InvalidInputError("partition does not cover the image pixels")
    labels = partition.labels
    if style == "mean-color":
        flat = image.pixels.reshape(n, 3).astype(np.int64)
        counts = np.bincount(labels, minlength=partition.region_count)
        out = np.empty((partition.region_count, 3), dtype=np.uint8)
        for c in range(3):
            sums = np.bincount(labels, weights=flat[:, c],
                               minlength=partition.region_count).astype(np.int64)
            out[:, c] = (2 * sums + counts) // (2 * counts)  # round half up
        pix = out[labels].reshape(image.height, image.width, 3)
    elif style == "random-color":
        mixed = _mix_label(np.arange(partition.region_count, dtype=np.int64), seed)
        colors = np.empty((partition.region_count, 3), dtype=np.uint8)
        colors[:, 0] = (mixed & np.uint64(0xFF)).astype(np.uint8)
        colors[:, 1] = ((mixed >> np.uint64(8)) & np.uint64(0xFF)).astype(np.uint8)
        colors[:, 2] = ((mixed >> np.uint64(16)) & np.uint64(0xFF)).astype(np.uint8)
        pix = colors[labels].reshape(image.height, image.width, 3)
    else:
        raise InvalidInputError(f"unknown rendering style: {style!r}")
    return RgbImage(pix.copy())


def area_filter(partition: Partition, graph: EdgeWeightedGraph,
                min_area: int) -> Partition:
    """Absorb undersized regions into neighbors until none remain.

    Repeatedly takes the smallest region below ``min_area`` (ties: smaller
    label) and merges it into the neighbor across the minimum-weight
    connecting edge (ties: smaller neighbor label).  Stops when every region
    reaches ``min_area``, a single region remains, or only neighborless
    undersized regions are left (possible on disconnected graphs).  The
    result coarsens the input partition.
    """
    if min_area < 1:
        raise InvalidInputError("min_area must be >= 1")
    if partition.vertex_count != graph.vertex_count:
        raise InvalidInputError("partition does not cover the graph vertices")
    labels = partition.labels
    r = partition.region_count
    sizes = np.bincount(labels, minlength=r).astype(np.int64)

    # Minimum crossing weight per region pair.
    lu = labels[graph.us]
    lv = labels[graph.vs]
    cross = lu != lv
    adj: list[dict[int, int]] = [dict() for _ in range(r)]
    for a, b, w in zip(lu[cross], lv[cross], graph.ws[cross]):
        a, b, w = int(a), int(b), int(w)
        if adj[a].get(b, w + 1) > w:
            adj[a][b] = w
        if adj[b].get(a, w + 1) > w:
            adj[b][a] = w

    uf = UnionFindForest(r) if r else None
    alive = r
    heap = [(int(sizes[i]), i) for i in range(r) if sizes[i] < min_area]
    heapq.heapify(heap)
    dead_end: set[int] = set()
    while heap and alive > 1:
        sz, lab = heapq.heappop(heap)
        if uf.find(lab) != lab or sizes[lab] != sz or sz >= min_area:
            continue  # stale entry
        if lab in dead_end:
            continue
        # Resolve the adjacency view of this region through current roots.
        view: dict[int, int] = {}
        for other, w in adj[lab].items():
            ro = uf.find(other)
            if ro == lab:
                continue
            if view.get(ro, w + 1) > w:
                view[ro] = w
        if not view:
            dead_end.add(lab)
            continue
        target = min(view.items(), key=lambda kv: (kv[1], kv[0]))[0]
        # The neighbor keeps its label; fold the undersized region into it.
        uf.parent[lab] = target
        uf.set_count -= 1
        sizes[target] += sizes[lab]
        alive -= 1
        if len(adj[lab]) > len(adj[target]):
            adj[lab], adj[target] = adj[target], adj[lab]
        for other, w in adj[lab].items():
            if adj[target].get(other, w + 1) > w:
                adj[target][other] = w
        adj[lab] = {}
        if sizes[target] < min_area:
            heapq.heappush(heap, (int(sizes[target]), target))
    if r == 0:
        return partition
    root_of = np.fromiter((uf.find(int(l)) for l in labels),
                          dtype=np.int64, count=labels.size)
    return Partition(root_of)


def add_salt_noise(image: RgbImage, p: float, seed: int) -> RgbImage:
    """Replace each pixel independently by white with probability ``p``.

    Uses numpy's seeded PCG64 generator, so equal ``(image, p, seed)`` calls
    are byte-identical.
    """
    if not (0.0 <= p <= 1.0):
        raise InvalidInputError("noise probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    mask = rng.random(image.height * image.width) < p
    pixels = image.pixels.copy()
    pixels.reshape(-1, 3)[mask] = 255
    return RgbImage(pixels)

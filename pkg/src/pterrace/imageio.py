"""Grayscale PGM images to point clouds by intensity-weighted sampling.

Pixel ``(col, row)`` covers the unit square with lower-left corner
``(col, height - 1 - row)``, so row 0 (the top of the file) ends up at the
top of plots.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from pterrace._io import PathLike, atomic_write
from pterrace.errors import DataError
from pterrace.pointcloud import PointCloud, rng_for


@dataclass(frozen=True, eq=False)
class GrayImage:
    width: int
    height: int
    maxval: int
    pixels: np.ndarray  # (height, width), row 0 at the top

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.int64, copy=True)
        if self.width < 1 or self.height < 1:
            raise DataError("image dimensions must be positive")
        if not 0 < self.maxval < 65536:
            raise DataError(f"maxval must be in [1, 65535], got {self.maxval}")
        if px.size != self.width * self.height:
            raise DataError(f"{px.size} pixels for a {self.width}x{self.height} image")
        px = px.reshape(self.height, self.width)
        if px.min() < 0 or px.max() > self.maxval:
            raise DataError("pixel values outside [0, maxval]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            (self.width, self.height, self.maxval) == (other.width, other.height, other.maxval)
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    __hash__ = None

    def to_pgm(self, binary: bool = True) -> bytes:
        header = f"{'P5' if binary else 'P2'}\n{self.width} {self.height}\n{self.maxval}\n".encode("ascii")
        if binary:
            dtype = ">u1" if self.maxval < 256 else ">u2"
            return header + self.pixels.astype(dtype).tobytes()
        rows = [" ".join(str(int(v)) for v in row) for row in self.pixels]
        return header + ("\n".join(rows) + "\n").encode("ascii")

    def save_pgm(self, path: PathLike, binary: bool = True) -> Path:
        return atomic_write(path, self.to_pgm(binary))


def _header_tokens(data: bytes, count: int) -> Tuple[list, int]:
    """Read ``count`` whitespace separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset just past the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise DataError(f"malformed PGM header: expected {count} fields, found {len(tokens)}")
        if data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def parse_pgm(data: bytes) -> GrayImage:
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise DataError(f"malformed PGM header: unsupported magic {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise DataError("malformed PGM header: non-integer size or maxval") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise DataError(f"malformed PGM header: width={width} height={height} maxval={maxval}")
    npix = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte before the raster
        bpp = 1 if maxval < 256 else 2
        need = npix * bpp
        if len(data) - pos < need:
            raise DataError(
                f"truncated PGM raster: expected {need} bytes from offset {pos}, "
                f"data ends at byte offset {len(data)}"
            )
        raster = np.frombuffer(data, dtype=">u1" if bpp == 1 else ">u2", count=npix, offset=pos)
        pixels = raster.astype(np.int64)
    else:
        fields = _strip_comments(data[pos:]).split()
        if len(fields) < npix:
            raise DataError(
                f"truncated PGM raster: {len(fields)} of {npix} values, data ends at byte offset {len(data)}"
            )
        try:
            pixels = np.array([int(f) for f in fields[:npix]], dtype=np.int64)
        except ValueError:
            raise DataError("malformed PGM raster: non-integer value") from None
    if pixels.max(initial=0) > maxval:
        raise DataError("PGM pixel value exceeds maxval")
    return GrayImage(width, height, maxval, pixels)


def _strip_comments(body: bytes) -> bytes:
    return b"\n".join(line.split(b"#")[0] for line in body.splitlines())


def load_pgm(path: PathLike) -> GrayImage:
    """Read a P2 (ASCII) or P5 (binary) PGM file."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"image not found: {path}")
    return parse_pgm(path.read_bytes())


def _pixel_corners(image: GrayImage, flat: np.ndarray) -> np.ndarray:
    row, col = np.divmod(flat, image.width)
    return np.stack([col, image.height - 1 - row], axis=1).astype(float)


def sample_intensity(image: GrayImage, n: int, darkness: bool = True, seed: int = 0) -> PointCloud:
    """Draw ``n`` pixels with probability proportional to their weight, jittered inside the pixel.

    The weight is ``maxval - value`` when ``darkness`` is set (dark pixels
    favoured) and ``value`` otherwise.
    """
    if int(n) != n or n < 1:
        raise DataError(f"n must be a positive integer, got {n}")
    px = image.pixels.ravel().astype(float)
    weights = (image.maxval - px) if darkness else px
    total = weights.sum()
    if not total > 0:
        raise DataError("every pixel has zero sampling weight")
    rng = rng_for(seed, "sample_intensity")
    flat = rng.choice(weights.size, size=int(n), replace=True, p=weights / total)
    jitter = rng.uniform(0.0, 1.0, size=(int(n), 2))
    return PointCloud(_pixel_corners(image, flat) + jitter)


def sample_boundary(image: GrayImage, n: int, seed: int = 0) -> PointCloud:
    """``n`` points uniformly distributed along the perimeter of ``[0, W] x [0, H]``."""
    if int(n) != n or n < 1:
        raise DataError(f"n must be a positive integer, got {n}")
    w, h = float(image.width), float(image.height)
    rng = rng_for(seed, "sample_boundary")
    s = rng.uniform(0.0, 2.0 * (w + h), size=int(n))
    pts = np.empty((int(n), 2))
    bottom = s < w
    right = (s >= w) & (s < w + h)
    top = (s >= w + h) & (s < 2 * w + h)
    left = s >= 2 * w + h
    pts[bottom] = np.stack([s[bottom], np.zeros(bottom.sum())], axis=1)
    pts[right] = np.stack([np.full(right.sum(), w), s[right] - w], axis=1)
    pts[top] = np.stack([w - (s[top] - w - h), np.full(top.sum(), h)], axis=1)
    pts[left] = np.stack([np.zeros(left.sum()), h - (s[left] - 2 * w - h)], axis=1)
    return PointCloud(pts)


def staggered_centers(cols: int, rows: int, width: int, height: int) -> np.ndarray:
    """Cell centres on a staggered lattice; rows alternate a quarter-cell shift left and right."""
    cw, rh = width / cols, height / rows
    centers = []
    for r in range(rows):
        shift = 0.25 * cw if r % 2 else -0.25 * cw
        for c in range(cols):
            centers.append(((c + 0.5) * cw + shift, (r + 0.5) * rh))
    return np.array(centers)


def honeycomb_image(
    width: int = 120,
    height: int = 120,
    cols: int = 3,
    rows: int = 3,
    wall: float = 3.0,
    maxval: int = 255,
    speckle: float = 0.0,
    seed: int = 0,
    centers: Optional[Sequence[Sequence[float]]] = None,
) -> GrayImage:
    """Dark cell walls on a white background, one closed cell per centre.

    Walls are the pixels whose two nearest centres are within ``wall`` of
    equidistant (a Voronoi diagram with thick edges).  Cells touching the
    image border are open there; boundary sampling closes them.  ``speckle``
    flips that fraction of pixels to the opposite intensity.
    """
    pts = staggered_centers(cols, rows, width, height) if centers is None else np.asarray(centers, float)
    if len(pts) < 2:
        raise DataError("a honeycomb needs at least two cells")
    yy, xx = np.mgrid[0:height, 0:width]
    px = np.stack([xx.ravel() + 0.5, yy.ravel() + 0.5], axis=1)
    dist = np.sqrt(((px[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    dist.sort(axis=1)
    is_wall = (dist[:, 1] - dist[:, 0]) < wall
    pixels = np.where(is_wall, 0, maxval).reshape(height, width)
    if speckle > 0:
        rng = rng_for(seed, "honeycomb_speckle")
        flip = rng.uniform(size=pixels.shape) < speckle
        pixels = np.where(flip, maxval - pixels, pixels)
    return GrayImage(width, height, maxval, pixels)

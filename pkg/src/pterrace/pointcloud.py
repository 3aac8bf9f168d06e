"""Point clouds, CSV I/O and the seeded generators for the synthetic datasets.

Random streams come from numpy's PCG64 bit generator.  Every generator call
derives its own stream from ``SeedSequence([seed, crc32(label)])`` so two
calls with the same seed but different roles (e.g. two circles of one
dataset) never share draws, and the output is identical across platforms.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from pterrace._io import PathLike, atomic_write, fmt_float
from pterrace.errors import DataError

DEGENERATE_EXTENT = 1e-6


@dataclass(frozen=True, eq=False)
class PointCloud:
    """An (n, d) array of finite coordinates, d in {2, 3}. Read-only."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2:
            if pts.size == 0:
                raise DataError("point cloud is empty")
            raise DataError(f"points must be an (n, d) array, got shape {pts.shape}")
        if pts.shape[1] not in (2, 3):
            raise DataError(f"point dimension must be 2 or 3, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise DataError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    __hash__ = None

    def concat(self, *others: "PointCloud") -> "PointCloud":
        for o in others:
            if o.dim != self.dim:
                raise DataError(f"cannot concatenate clouds of dimension {self.dim} and {o.dim}")
        return PointCloud(np.vstack([self.points] + [o.points for o in others]))

    def to_csv(self) -> str:
        lines = [f"# pterrace pointcloud d={self.dim}"]
        lines += [",".join(fmt_float(v) for v in row) for row in self.points]
        return "\n".join(lines) + "\n"

    def save_csv(self, path: PathLike) -> Path:
        return atomic_write(path, self.to_csv())


@dataclass(frozen=True)
class BoundingBox:
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper):
            raise DataError("box corners have different dimensions")
        for i, (lo, hi) in enumerate(zip(lower, upper)):
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise DataError(f"box axis {i}: need finite lower < upper, got [{lo}, {hi}]")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, points: np.ndarray) -> bool:
        pts = np.atleast_2d(points)
        return bool(np.all(pts >= np.array(self.lower)) and np.all(pts <= np.array(self.upper)))


@dataclass(frozen=True)
class GaussianRadial:
    """Radius perturbed by N(0, sd^2)."""

    sd: float


@dataclass(frozen=True)
class ExponentialInOut:
    """``n_in`` points at r(1 - Exp(rate_in)) followed by ``n_out`` at r(1 + Exp(rate_out))."""

    rate_in: float
    rate_out: float
    n_in: int
    n_out: int


NoiseSpec = Optional[Union[GaussianRadial, ExponentialInOut]]


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent PCG64 stream for a (seed, call-site label) pair."""
    entropy = [int(seed) % (1 << 64), zlib.crc32(label.encode("utf-8"))]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def load_csv(path: PathLike) -> PointCloud:
    """Read a comma separated point file.

    Blank lines and lines starting with ``#`` are skipped. A first row that is
    not numeric is taken as a header. Errors name the 1-based line number.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"point file not found: {path}")
    text = path.read_bytes().decode("utf-8-sig")
    rows = []
    dim = None
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            values = [float(f) for f in fields]
        except ValueError:
            if not rows and not header_seen and _looks_like_header(fields):
                header_seen = True
                continue
            bad = next(f for f in fields if not _is_float(f))
            raise DataError(f"{path}: row {lineno}: non-numeric field {bad!r}") from None
        if dim is None:
            dim = len(values)
            if dim not in (2, 3):
                raise DataError(f"{path}: row {lineno}: expected 2 or 3 fields, got {dim}")
        elif len(values) != dim:
            raise DataError(f"{path}: row {lineno}: expected {dim} fields, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise DataError(f"{path}: row {lineno}: non-finite coordinate")
        rows.append(values)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return PointCloud(np.array(rows, dtype=float))


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _looks_like_header(fields: Sequence[str]) -> bool:
    return all(f and not _is_float(f) for f in fields)


def generate_circle(
    center: Sequence[float],
    radius: float,
    n: int,
    noise: NoiseSpec = None,
    seed: int = 0,
    label: str = "circle",
) -> PointCloud:
    """Points on a circle with uniform angles, optionally with radial noise.

    For a 3-tuple center the circle lies in the plane z = center[2].
    """
    center = np.asarray(center, dtype=float)
    if center.shape not in ((2,), (3,)):
        raise DataError("center must be a 2- or 3-tuple")
    if not radius > 0:
        raise DataError(f"radius must be positive, got {radius}")
    if int(n) != n or n < 1:
        raise DataError(f"n must be a positive integer, got {n}")
    n = int(n)
    rng = rng_for(seed, label)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    if noise is None:
        r = np.full(n, float(radius))
    elif isinstance(noise, GaussianRadial):
        if not noise.sd > 0:
            raise DataError("GaussianRadial.sd must be positive")
        r = radius + rng.normal(0.0, noise.sd, size=n)
    elif isinstance(noise, ExponentialInOut):
        if not (noise.rate_in > 0 and noise.rate_out > 0):
            raise DataError("exponential rates must be positive")
        if noise.n_in < 0 or noise.n_out < 0 or noise.n_in + noise.n_out != n:
            raise DataError(f"n_in + n_out must equal n={n}")
        inner = radius * (1.0 - rng.exponential(1.0 / noise.rate_in, size=noise.n_in))
        outer = radius * (1.0 + rng.exponential(1.0 / noise.rate_out, size=noise.n_out))
        r = np.concatenate([inner, outer])
    else:
        raise DataError(f"unknown noise spec {noise!r}")
    pts = np.zeros((n, center.size))
    pts[:, 0] = r * np.cos(theta)
    pts[:, 1] = r * np.sin(theta)
    return PointCloud(pts + center)


def generate_polygon_edges(
    vertices: Sequence[Sequence[float]],
    n_per_edge: int,
    gaussian_sd: float = 0.0,
    seed: int = 0,
    label: str = "polygon",
) -> PointCloud:
    """Uniform points along each edge of a closed polygon, then isotropic Gaussian jitter."""
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2:
        raise DataError("vertices must be a sequence of 2-tuples")
    if len(verts) < 3:
        raise DataError(f"a polygon needs at least 3 vertices, got {len(verts)}")
    if int(n_per_edge) != n_per_edge or n_per_edge < 1:
        raise DataError("n_per_edge must be a positive integer")
    if gaussian_sd < 0:
        raise DataError("gaussian_sd must be non-negative")
    n_per_edge = int(n_per_edge)
    rng = rng_for(seed, label)
    starts = verts
    ends = np.roll(verts, -1, axis=0)
    t = rng.uniform(0.0, 1.0, size=(len(verts), n_per_edge, 1))
    pts = starts[:, None, :] + t * (ends - starts)[:, None, :]
    pts = pts.reshape(-1, 2)
    if gaussian_sd > 0:
        pts = pts + rng.normal(0.0, gaussian_sd, size=pts.shape)
    return PointCloud(pts)


def bounding_box(cloud: PointCloud, margin: float = 0.0) -> BoundingBox:
    """Axis-aligned box around the cloud, grown by ``margin`` on every side.

    An axis along which every point has the same coordinate gets half-width
    ``max(margin, DEGENERATE_EXTENT / 2)``, so the box is never flat and still
    grows monotonically with ``margin``.
    """
    if len(cloud) == 0:
        raise DataError("bounding box of an empty cloud")
    if not margin >= 0:
        raise DataError(f"margin must be non-negative, got {margin}")
    lo = cloud.points.min(axis=0)
    hi = cloud.points.max(axis=0)
    flat = ~(hi > lo)
    half = max(float(margin), DEGENERATE_EXTENT / 2.0)
    lo = np.where(flat, lo - half, lo - margin)
    hi = np.where(flat, hi + half, hi + margin)
    return BoundingBox(tuple(lo), tuple(hi))

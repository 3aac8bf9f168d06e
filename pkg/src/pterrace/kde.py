"""Gaussian kernel density estimates sampled on a regular grid."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from pterrace._io import fmt_float
from pterrace.errors import DataError
from pterrace.pointcloud import BoundingBox, PointCloud, bounding_box

MARGIN_FACTOR = 3.0

KDE_DESCRIPTOR = {
    "kernel": "gaussian",
    "formula": "f_h(v) = 1/(n (2 pi)^(d/2) h^d) * sum_i exp(-|v - x_i|^2 / (2 h^2))",
    "bandwidth": "single scalar h shared by all axes",
}


@dataclass(frozen=True)
class GridSpec:
    box: BoundingBox
    resolution: Tuple[int, ...]

    def __post_init__(self):
        res = tuple(int(r) for r in self.resolution)
        if len(res) != self.box.dim:
            raise DataError(f"resolution has {len(res)} axes but box has {self.box.dim}")
        if any(r < 2 for r in res):
            raise DataError(f"resolution must be >= 2 on every axis, got {res}")
        object.__setattr__(self, "resolution", res)

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / (r - 1) for lo, hi, r in zip(self.box.lower, self.box.upper, self.resolution))

    def axes(self):
        """Vertex coordinates along each axis; endpoints are exactly the box corners."""
        return [np.linspace(lo, hi, r) for lo, hi, r in zip(self.box.lower, self.box.upper, self.resolution)]

    def header(self) -> str:
        res = ",".join(str(r) for r in self.resolution)
        box = ";".join(f"{fmt_float(lo)}:{fmt_float(hi)}" for lo, hi in zip(self.box.lower, self.box.upper))
        return f"d={self.dim} res={res} box={box}"

    def to_dict(self) -> dict:
        return {
            "lower": list(self.box.lower),
            "upper": list(self.box.upper),
            "resolution": list(self.resolution),
        }


@dataclass(frozen=True, eq=False)
class ScalarGrid:
    """KDE values at the grid vertices; ``values[i0, i1, ...]`` indexes axis 0 first."""

    spec: GridSpec
    values: np.ndarray
    bandwidth: float

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != self.spec.resolution:
            if vals.size != math.prod(self.spec.resolution):
                raise DataError(f"{vals.size} values do not match resolution {self.spec.resolution}")
            vals = vals.reshape(self.spec.resolution)
        if not np.all(np.isfinite(vals)):
            raise DataError("grid values must be finite")
        if vals.min() < 0:
            raise DataError("density values must be non-negative")
        if not self.bandwidth > 0:
            raise DataError(f"bandwidth must be positive, got {self.bandwidth}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self) -> str:
        lines = [f"# pterrace grid {self.spec.header()} bandwidth={fmt_float(self.bandwidth)}"]
        lines += [fmt_float(v) for v in self.values.ravel(order="C")]
        return "\n".join(lines) + "\n"


def _resolution_tuple(resolution: Union[int, Sequence[int]], dim: int) -> Tuple[int, ...]:
    if isinstance(resolution, (int, np.integer)):
        return (int(resolution),) * dim
    return tuple(int(r) for r in resolution)


def grid_spec_auto(
    cloud: PointCloud,
    max_bandwidth: float,
    resolution: Union[int, Sequence[int]] = 64,
    margin: Optional[float] = None,
) -> GridSpec:
    """Grid over the cloud's bounding box padded by ``3 * max_bandwidth`` (or ``margin``)."""
    if not max_bandwidth > 0:
        raise DataError(f"max_bandwidth must be positive, got {max_bandwidth}")
    if margin is None:
        margin = MARGIN_FACTOR * max_bandwidth
    box = bounding_box(cloud, margin=margin)
    return GridSpec(box, _resolution_tuple(resolution, cloud.dim))


def evaluate_kde(cloud: PointCloud, bandwidth: float, spec: GridSpec) -> ScalarGrid:
    """Gaussian KDE of ``cloud`` with scalar bandwidth, evaluated at every grid vertex.

    The isotropic kernel factorizes over axes, so the sum over points is an
    einsum of per-axis factor tables.  einsum is used instead of a BLAS product
    to keep the summation order fixed regardless of threading.
    """
    if not (bandwidth > 0 and math.isfinite(bandwidth)):
        raise DataError(f"bandwidth must be positive, got {bandwidth}")
    if len(cloud) == 0:
        raise DataError("KDE of an empty cloud")
    if cloud.dim != spec.dim:
        raise DataError(f"cloud has dimension {cloud.dim} but grid has {spec.dim}")
    n, d = cloud.points.shape
    h = float(bandwidth)
    factors = []
    for axis, coords in enumerate(spec.axes()):
        diff = coords[None, :] - cloud.points[:, axis : axis + 1]
        factors.append(np.exp(-(diff * diff) / (2.0 * h * h)))
    letters = "ijk"[:d]
    subscripts = ",".join(f"n{c}" for c in letters) + "->" + letters
    total = np.einsum(subscripts, *factors, optimize=False)
    norm = 1.0 / (n * (2.0 * math.pi) ** (d / 2.0) * h**d)
    return ScalarGrid(spec, total * norm, h)


def peak_value(dim: int, bandwidth: float) -> float:
    """Largest value a single kernel can contribute, ``1 / ((2 pi)^(d/2) h^d)``."""
    return 1.0 / ((2.0 * math.pi) ** (dim / 2.0) * bandwidth**dim)

"""Named synthetic datasets.

Each generator is a fixed composition of circles and noisy polygons with
its own labelled random streams, so a (name, seed) pair always gives the same
points.
"""
from __future__ import annotations

import math
from typing import Callable, Dict

from pterrace.errors import ConfigError
from pterrace.imageio import honeycomb_image, sample_boundary, sample_intensity
from pterrace.pointcloud import (
    ExponentialInOut,
    GaussianRadial,
    PointCloud,
    generate_circle,
    generate_polygon_edges,
)

FOUR_SHAPES_SD = 0.15


def three_circles(seed: int = 0) -> PointCloud:
    """Three circles of 200 points: large/sparse, medium, small/dense."""
    noise = GaussianRadial(0.05)
    a = generate_circle((0.0, 0.0), 1.6, 200, noise, seed, label="three-circles/a")
    b = generate_circle((3.4, 0.8), 1.0, 200, noise, seed, label="three-circles/b")
    c = generate_circle((2.9, -1.9), 0.7, 200, noise, seed, label="three-circles/c")
    return a.concat(b, c)


def two_noisy_circles(seed: int = 0) -> PointCloud:
    """A large sparse circle and a small dense one, both with radial noise."""
    big = generate_circle((0.0, 0.0), 1.0, 150, GaussianRadial(0.08), seed, label="two-noisy/big")
    small = generate_circle((2.2, 0.0), 0.3, 250, GaussianRadial(0.03), seed, label="two-noisy/small")
    return big.concat(small)


def density_pair(seed: int = 0) -> PointCloud:
    """Two unit circles with 100 and 400 points."""
    sparse = generate_circle((0.0, 0.0), 1.0, 100, None, seed, label="density-pair/sparse")
    dense = generate_circle((3.0, 0.0), 1.0, 400, None, seed, label="density-pair/dense")
    return sparse.concat(dense)


def size_pair(seed: int = 0) -> PointCloud:
    """200 points on a radius-1 circle and 800 on a radius-4 circle (equal density)."""
    small = generate_circle((6.0, 0.0), 1.0, 200, None, seed, label="size-pair/small")
    large = generate_circle((0.0, 0.0), 4.0, 800, None, seed, label="size-pair/large")
    return small.concat(large)


def four_shapes(seed: int = 0) -> PointCloud:
    """Noisy square (400), exponential-noise circle (800) and two noisy triangles (600 each)."""
    sd = FOUR_SHAPES_SD
    square = generate_polygon_edges(
        [(2.0, -0.5), (3.0, -0.5), (3.0, 0.5), (2.0, 0.5)], 100, sd, seed, label="four-shapes/square"
    )
    circle = generate_circle(
        (0.0, 0.0), 1.0, 800, ExponentialInOut(4.0, 10.0, 400, 400), seed, label="four-shapes/circle"
    )
    side = 1.2
    h = side * math.sqrt(3.0) / 2.0
    equilateral = generate_polygon_edges(
        [(-3.0 - side / 2, -h / 3), (-3.0 + side / 2, -h / 3), (-3.0, 2 * h / 3)],
        200,
        sd,
        seed,
        label="four-shapes/equilateral",
    )
    isosceles = generate_polygon_edges(
        [(-0.8, -3.8), (0.8, -3.8), (0.0, -1.9)], 200, sd, seed, label="four-shapes/isosceles"
    )
    return square.concat(circle, equilateral, isosceles)


HONEYCOMB_CELLS = 9


def honeycomb(seed: int = 0, n_walls: int = 5000, n_boundary: int = 1500) -> PointCloud:
    """Points sampled from the synthetic 3x3 honeycomb image plus its border."""
    image = honeycomb_image()
    walls = sample_intensity(image, n_walls, darkness=True, seed=seed)
    border = sample_boundary(image, n_boundary, seed=seed)
    return walls.concat(border)


# Sweep settings used with each dataset unless overridden.
DATASET_DEFAULTS: Dict[str, dict] = {
    "three-circles": {"bw_min": 0.01, "bw_max": 1.5, "grid_res": (64,)},
    "two-noisy-circles": {"bw_min": 0.01, "bw_max": 0.5, "grid_res": (96,)},
    "density-pair": {"bw_min": 0.02, "bw_max": 1.0, "grid_res": (64,)},
    "size-pair": {"bw_min": 0.05, "bw_max": 3.0, "grid_res": (96,)},
    "four-shapes": {"bw_min": 0.01, "bw_max": 0.6, "grid_res": (128,), "height_cap": 6},
    "honeycomb": {"bw_min": 1.0, "bw_max": 15.0, "grid_res": (96,), "height_cap": 12},
}

DATASETS: Dict[str, Callable[[int], PointCloud]] = {
    "three-circles": three_circles,
    "two-noisy-circles": two_noisy_circles,
    "density-pair": density_pair,
    "size-pair": size_pair,
    "four-shapes": four_shapes,
    "honeycomb": honeycomb,
}


def make_dataset(name: str, seed: int = 0) -> PointCloud:
    try:
        factory = DATASETS[name]
    except KeyError:
        raise ConfigError(f"unknown dataset {name!r}; choose from {', '.join(DATASETS)}") from None
    return factory(seed)

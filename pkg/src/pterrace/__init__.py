"""Persistence terraces: multi-bandwidth super-level persistent homology of point clouds."""

from pterrace.pointcloud import (
    BoundingBox,
    ExponentialInOut,
    GaussianRadial,
    PointCloud,
    bounding_box,
    generate_circle,
    generate_polygon_edges,
    load_csv,
)
from pterrace.kde import GridSpec, ScalarGrid, evaluate_kde, grid_spec_auto
from pterrace.persistence import Barcode, PersistencePair, betti_at, superlevel_persistence
from pterrace.terrace import (
    BettiStepFunction,
    TerraceAreaSummary,
    TerraceMatrix,
    assemble_terrace,
    betti_step_function,
    slice_at_bandwidth,
    terrace_area,
)

__version__ = "0.1.0"

__all__ = [
    "Barcode",
    "BettiStepFunction",
    "BoundingBox",
    "ExponentialInOut",
    "GaussianRadial",
    "GridSpec",
    "PersistencePair",
    "PointCloud",
    "ScalarGrid",
    "TerraceAreaSummary",
    "TerraceMatrix",
    "assemble_terrace",
    "betti_at",
    "betti_step_function",
    "bounding_box",
    "evaluate_kde",
    "generate_circle",
    "generate_polygon_edges",
    "grid_spec_auto",
    "load_csv",
    "slice_at_bandwidth",
    "superlevel_persistence",
    "terrace_area",
]

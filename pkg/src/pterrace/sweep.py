"""Bandwidth sweep: one KDE + persistence computation per bandwidth, in parallel.

Each bandwidth is an independent task.  Results are gathered into a buffer
indexed by bandwidth position, so the assembled terrace does not depend on
the worker count or completion order.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from pterrace.errors import ComputeError, ConfigError, PterraceError
from pterrace.kde import GridSpec, evaluate_kde
from pterrace.persistence import Barcode, superlevel_persistence
from pterrace.pointcloud import PointCloud
from pterrace.terrace import TerraceMatrix, assemble_terrace, betti_step_function


def bandwidth_grid(bw_min: float, bw_max: float, count: int, spacing: str = "linear") -> List[float]:
    """``count`` bandwidths from ``bw_min`` to ``bw_max`` inclusive.

    Position ``i`` uses the fraction ``t = i / (count - 1)``, so two grids over
    the same range share bit-identical values wherever their fractions agree.
    """
    if int(count) != count or count < 1:
        raise ConfigError(f"bandwidth count must be a positive integer, got {count}")
    if not (bw_min > 0 and math.isfinite(bw_max)):
        raise ConfigError(f"bandwidths must be positive and finite, got [{bw_min}, {bw_max}]")
    if count == 1:
        return [float(bw_min)]
    if not bw_min < bw_max:
        raise ConfigError(f"need bw_min < bw_max, got {bw_min} >= {bw_max}")
    out = []
    for i in range(count):
        t = i / (count - 1)
        if spacing == "linear":
            out.append(bw_min * (1.0 - t) + bw_max * t)
        elif spacing == "log":
            out.append(math.exp(math.log(bw_min) * (1.0 - t) + math.log(bw_max) * t))
        else:
            raise ConfigError(f"unknown bandwidth spacing {spacing!r}")
    out[0], out[-1] = float(bw_min), float(bw_max)
    return out


@dataclass(frozen=True)
class SweepResult:
    bandwidths: Tuple[float, ...]
    barcodes: Tuple[Barcode, ...]
    seconds: Tuple[float, ...]

    def terrace(self, k: int) -> TerraceMatrix:
        steps = [betti_step_function(b, k) for b in self.barcodes]
        return assemble_terrace(steps, self.bandwidths, k)


def _one_bandwidth(task):
    index, points, bandwidth, spec, max_dim = task
    start = time.perf_counter()
    stage = "kde"
    try:
        grid = evaluate_kde(PointCloud(points), bandwidth, spec)
        stage = "persistence"
        barcode = superlevel_persistence(grid, max_dim)
    except PterraceError as exc:
        raise ComputeError(f"stage {stage}, bandwidth index {index} (h={bandwidth!r}): {exc}") from exc
    except Exception as exc:  # noqa: BLE001 - reported with stage context
        raise ComputeError(f"stage {stage}, bandwidth index {index} (h={bandwidth!r}): {exc!r}") from exc
    return index, barcode, time.perf_counter() - start


def sweep(
    cloud: PointCloud,
    bandwidths: Sequence[float],
    spec: GridSpec,
    max_dim: int = 1,
    workers: int = 1,
) -> SweepResult:
    bandwidths = [float(h) for h in bandwidths]
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    tasks = [(i, cloud.points, h, spec, max_dim) for i, h in enumerate(bandwidths)]
    barcodes: List[Optional[Barcode]] = [None] * len(tasks)
    seconds = [0.0] * len(tasks)
    if workers == 1 or len(tasks) == 1:
        results = map(_one_bandwidth, tasks)
        for index, barcode, secs in results:
            barcodes[index], seconds[index] = barcode, secs
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, barcode, secs in pool.map(_one_bandwidth, tasks):
                barcodes[index], seconds[index] = barcode, secs
    return SweepResult(tuple(bandwidths), tuple(barcodes), tuple(seconds))

"""End-to-end terrace pipeline: load or generate points, sweep, assemble, write outputs."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pterrace import __version__
from pterrace._io import atomic_write, atomic_write_all, sha256_of
from pterrace.datasets import DATASET_DEFAULTS, make_dataset
from pterrace.errors import ConfigError, DataError
from pterrace.imageio import load_pgm, sample_boundary, sample_intensity
from pterrace.kde import KDE_DESCRIPTOR, GridSpec, grid_spec_auto
from pterrace.pointcloud import BoundingBox, PointCloud, load_csv
from pterrace.render import RenderOptions, area_svg, barcode_slice_svg, terrace_svg
from pterrace.sweep import SweepResult, bandwidth_grid, sweep
from pterrace.terrace import TerraceAreaSummary, TerraceMatrix, terrace_area

OUTPUT_KINDS = ("matrix_csv", "matrix_json", "area_csv", "terrace_svg", "area_svg", "barcodes_csv")
DEFAULT_EMIT = ("matrix_csv", "matrix_json", "area_csv", "terrace_svg", "area_svg")
DEFAULT_GRID_RES = 64
OUTPUT_FILES = {
    "matrix_csv": "terrace.csv",
    "matrix_json": "terrace.json",
    "area_csv": "area.csv",
    "terrace_svg": "terrace.svg",
    "area_svg": "area.svg",
}


@dataclass
class PipelineConfig:
    dataset: Optional[str] = None
    input: Optional[str] = None
    pgm: Optional[str] = None
    pgm_points: int = 5000
    pgm_boundary: int = 1500
    pgm_darkness: bool = True
    k: int = 1
    bw_min: Optional[float] = None
    bw_max: Optional[float] = None
    bw_count: int = 50
    bw_spacing: str = "linear"
    grid_res: Optional[Tuple[int, ...]] = None
    margin: Optional[float] = None
    box: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    emit: Tuple[str, ...] = DEFAULT_EMIT
    workers: int = 1
    seed: int = 0
    height_cap: Optional[int] = None
    out_dir: str = "."

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "PipelineConfig":
        """Build from a flat mapping; nested ``bandwidths``/``grid``/``input`` blocks are flattened."""
        flat = dict(raw)
        bw = flat.pop("bandwidths", None)
        if isinstance(bw, dict):
            for key in ("min", "max", "count", "spacing"):
                if key in bw:
                    flat[f"bw_{key}"] = bw[key]
        grid = flat.pop("grid", None)
        if isinstance(grid, dict):
            if "resolution" in grid:
                flat["grid_res"] = grid["resolution"]
            for key in ("margin", "box"):
                if key in grid:
                    flat[key] = grid[key]
        src = flat.get("input")
        if isinstance(src, dict):
            flat.pop("input")
            for key in ("dataset", "pgm"):
                if key in src:
                    flat[key] = src[key]
            if "csv" in src:
                flat["input"] = src["csv"]
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(flat) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**flat)
        cfg.normalize()
        return cfg

    def normalize(self) -> None:
        """Fill dataset defaults for unset fields and coerce types. Idempotent."""
        if self.dataset in DATASET_DEFAULTS:
            for key, value in DATASET_DEFAULTS[self.dataset].items():
                if getattr(self, key) is None:
                    setattr(self, key, value)
        if self.grid_res is None:
            self.grid_res = (DEFAULT_GRID_RES,)
        if isinstance(self.grid_res, (int, float)):
            self.grid_res = (int(self.grid_res),)
        self.grid_res = tuple(int(r) for r in self.grid_res)
        self.emit = tuple(self.emit)
        if self.box is not None:
            self.box = (tuple(map(float, self.box[0])), tuple(map(float, self.box[1])))

    def validate(self) -> None:
        sources = [s for s in (self.dataset, self.input, self.pgm) if s is not None]
        if len(sources) != 1:
            raise ConfigError("exactly one of dataset, input (CSV) or pgm must be given")
        if self.bw_min is None or self.bw_max is None:
            raise ConfigError("bandwidth range (bw_min, bw_max) is required")
        if self.bw_count < 1:
            raise ConfigError("bw_count must be >= 1")
        if self.bw_count > 1 and not self.bw_min < self.bw_max:
            raise ConfigError("bw_min must be < bw_max")
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if any(r < 2 for r in self.grid_res):
            raise ConfigError("grid resolution must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.height_cap is not None and self.height_cap < 1:
            raise ConfigError("height_cap must be >= 1")
        for e in self.emit:
            if e not in OUTPUT_KINDS and not e.startswith("barcode_svg@"):
                raise ConfigError(f"unknown output {e!r}")
            if e.startswith("barcode_svg@"):
                try:
                    float(e.split("@", 1)[1])
                except ValueError:
                    raise ConfigError(f"bad bandwidth in {e!r}") from None

    def to_dict(self) -> Dict[str, Any]:
        d = dataclasses.asdict(self)
        d["grid_res"] = list(self.grid_res)
        d["emit"] = list(self.emit)
        if self.box is not None:
            d["box"] = [list(self.box[0]), list(self.box[1])]
        return d


@dataclass
class PipelineResult:
    cloud: PointCloud
    spec: GridSpec
    sweep: SweepResult
    matrix: TerraceMatrix
    summary: Optional[TerraceAreaSummary]
    files: Dict[str, Path] = field(default_factory=dict)
    manifest: Dict[str, Any] = field(default_factory=dict)


def load_points(cfg: PipelineConfig) -> PointCloud:
    if cfg.dataset is not None:
        return make_dataset(cfg.dataset, cfg.seed)
    if cfg.input is not None:
        return load_csv(cfg.input)
    image = load_pgm(cfg.pgm)
    walls = sample_intensity(image, cfg.pgm_points, darkness=cfg.pgm_darkness, seed=cfg.seed)
    if cfg.pgm_boundary:
        return walls.concat(sample_boundary(image, cfg.pgm_boundary, seed=cfg.seed))
    return walls


def grid_for(cfg: PipelineConfig, cloud: PointCloud) -> GridSpec:
    res = cfg.grid_res * cloud.dim if len(cfg.grid_res) == 1 else cfg.grid_res
    if len(res) != cloud.dim:
        raise ConfigError(f"grid resolution has {len(res)} axes but the data is {cloud.dim}-dimensional")
    if cfg.box is not None:
        return GridSpec(BoundingBox(*cfg.box), res)
    return grid_spec_auto(cloud, cfg.bw_max, res, margin=cfg.margin)


def nearest_column(matrix: TerraceMatrix, bandwidth: float) -> int:
    return min(range(len(matrix.xvec)), key=lambda i: (abs(matrix.xvec[i] - bandwidth), i))


def run_pipeline(cfg: PipelineConfig, write: bool = True) -> PipelineResult:
    """Run the sweep and write every requested output plus ``manifest.json``.

    Outputs are rendered in memory first and renamed into place together, so
    a failure leaves none of them half written.
    """
    cfg.normalize()
    cfg.validate()
    cloud = load_points(cfg)
    spec = grid_for(cfg, cloud)
    if cfg.k > cloud.dim:
        raise ConfigError(f"k={cfg.k} exceeds the data dimension {cloud.dim}")
    bandwidths = bandwidth_grid(cfg.bw_min, cfg.bw_max, cfg.bw_count, cfg.bw_spacing)
    result = sweep(cloud, bandwidths, spec, max_dim=cfg.k, workers=cfg.workers)
    matrix = result.terrace(cfg.k)
    options = RenderOptions(height_cap=cfg.height_cap)
    needs_area = any(e in ("area_csv", "area_svg") for e in cfg.emit)
    summary = terrace_area(matrix) if needs_area else None

    header = f"{spec.header()} kde=gaussian"
    out_dir = Path(cfg.out_dir)
    contents: Dict[str, Tuple[Path, str]] = {}
    for e in cfg.emit:
        if e == "matrix_csv":
            contents[e] = (out_dir / OUTPUT_FILES[e], matrix.to_csv(header))
        elif e == "matrix_json":
            contents[e] = (out_dir / OUTPUT_FILES[e], matrix.to_json(KDE_DESCRIPTOR, spec.to_dict()))
        elif e == "area_csv":
            contents[e] = (out_dir / OUTPUT_FILES[e], summary.to_csv())
        elif e == "terrace_svg":
            contents[e] = (out_dir / OUTPUT_FILES[e], terrace_svg(matrix, options))
        elif e == "area_svg":
            contents[e] = (out_dir / OUTPUT_FILES[e], area_svg(summary, options))
        elif e == "barcodes_csv":
            for i, bc in enumerate(result.barcodes):
                contents[f"barcode_csv_{i:03d}"] = (out_dir / f"barcode_{i:03d}.csv", bc.to_csv(header))
        elif e.startswith("barcode_svg@"):
            col = nearest_column(matrix, float(e.split("@", 1)[1]))
            contents[e] = (out_dir / f"barcode_{col:03d}.svg", barcode_slice_svg(matrix, col, options))

    files = {name: path for name, (path, _) in contents.items()}
    manifest = {
        "pterrace_version": __version__,
        "config": cfg.to_dict(),
        "kde": KDE_DESCRIPTOR,
        "grid": spec.to_dict(),
        "points": len(cloud),
        "bandwidths": list(result.bandwidths),
        "timings": [
            {"index": i, "bandwidth": h, "seconds": round(s, 6)}
            for i, (h, s) in enumerate(zip(result.bandwidths, result.seconds))
        ],
        "outputs": {
            name: {"path": path.name, "sha256": sha256_of(data)} for name, (path, data) in contents.items()
        },
    }
    if write:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            atomic_write_all({path: data for path, data in contents.values()})
            atomic_write(out_dir / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        except OSError as exc:
            raise DataError(f"cannot write outputs to {out_dir}: {exc}") from exc
        files["manifest"] = out_dir / "manifest.json"
    return PipelineResult(cloud, spec, result, matrix, summary, files, manifest)

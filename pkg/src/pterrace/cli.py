"""Command line interface.

    pterrace generate four-shapes --seed 1 --out shapes.csv
    pterrace terrace --dataset three-circles --bw-count 50 --out-dir out/
    pterrace slice --dataset three-circles --bandwidth 0.2 --out bars.csv --svg bars.svg
    pterrace area --in out/terrace.csv --out area.csv
    pterrace sample-image --pgm cells.pgm --n 5000 --n-boundary 1500 --out cells.csv

Exit codes: 0 success, 2 configuration error, 3 data error, 4 compute error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from pterrace import __version__
from pterrace._io import atomic_write
from pterrace.datasets import DATASETS, make_dataset
from pterrace.errors import ConfigError, DataError, PterraceError
from pterrace.imageio import load_pgm, sample_boundary, sample_intensity
from pterrace.kde import evaluate_kde
from pterrace.persistence import superlevel_persistence
from pterrace.pipeline import PipelineConfig, grid_for, load_points, run_pipeline
from pterrace.render import RenderOptions, render_area, render_barcode_slice
from pterrace.terrace import TerraceMatrix, assemble_terrace, betti_step_function, terrace_area

log = logging.getLogger("pterrace")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers separated by commas, got {text!r}") from None


def _emit_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _default_workers() -> Optional[int]:
    raw = os.environ.get("PTERRACE_WORKERS")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"PTERRACE_WORKERS must be an integer, got {raw!r}") from None


def _add_source_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="point cloud CSV")
    src.add_argument("--dataset", help=f"named dataset: {', '.join(DATASETS)}")
    src.add_argument("--pgm", help="grayscale PGM image to sample points from")
    p.add_argument("--pgm-points", type=int, help="intensity-weighted samples from --pgm (default 5000)")
    p.add_argument("--pgm-boundary", type=int, help="extra samples on the image border (default 1500)")
    p.add_argument("--light", action="store_true", help="favour bright pixels instead of dark ones")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-res", type=_int_list, help="vertices per axis, e.g. 64 or 64,96")
    p.add_argument("--margin", type=float, help="grid padding around the data (default 3 * bw-max)")
    p.add_argument("--k", type=int, help="homological dimension (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pterrace", description="Persistence terraces of point clouds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a named synthetic dataset as CSV")
    g.add_argument("name", help=f"one of: {', '.join(DATASETS)}")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output CSV (default: stdout)")

    t = sub.add_parser("terrace", help="compute a persistence terrace")
    t.add_argument("--config", help="JSON config file; flags override its values")
    _add_source_args(t)
    t.add_argument("--bw-min", type=float)
    t.add_argument("--bw-max", type=float)
    t.add_argument("--bw-count", type=int)
    t.add_argument("--log-spacing", action="store_true", help="geometric instead of equal bandwidth steps")
    t.add_argument("--workers", type=int)
    t.add_argument("--out-dir")
    t.add_argument("--emit", type=_emit_list, help="comma list of matrix_csv, matrix_json, area_csv, "
                   "terrace_svg, area_svg, barcodes_csv, barcode_svg@<bandwidth>")
    t.add_argument("--height-cap", type=int)

    s = sub.add_parser("slice", help="barcode at a single bandwidth")
    _add_source_args(s)
    s.add_argument("--bandwidth", type=float, required=True)
    s.add_argument("--bw-max", type=float, help="bandwidth used for the grid margin (default --bandwidth)")
    s.add_argument("--out", help="barcode CSV (default: stdout)")
    s.add_argument("--svg", help="also draw the barcode as SVG")

    a = sub.add_parser("area", help="terrace area summary from a terrace matrix file")
    a.add_argument("--in", dest="matrix", required=True, help="terrace CSV or JSON")
    a.add_argument("--out", help="area CSV (default: stdout)")
    a.add_argument("--svg", help="also draw the area plot as SVG")

    si = sub.add_parser("sample-image", help="sample a point cloud from a PGM image")
    si.add_argument("--pgm", required=True)
    si.add_argument("--n", type=int, default=5000)
    si.add_argument("--n-boundary", type=int, default=1500)
    si.add_argument("--light", action="store_true")
    si.add_argument("--seed", type=int, default=0)
    si.add_argument("--out", help="output CSV (default: stdout)")
    return parser


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _config_from_args(args) -> PipelineConfig:
    raw = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    cfg = PipelineConfig.from_dict(raw) if raw else PipelineConfig()
    if args.input or args.dataset or args.pgm:
        cfg.input, cfg.dataset, cfg.pgm = args.input, args.dataset, args.pgm
    flags = {
        "pgm_points": args.pgm_points,
        "pgm_boundary": args.pgm_boundary,
        "seed": args.seed,
        "grid_res": tuple(args.grid_res) if args.grid_res else None,
        "margin": args.margin,
        "k": args.k,
        "bw_min": getattr(args, "bw_min", None),
        "bw_max": getattr(args, "bw_max", None),
        "bw_count": getattr(args, "bw_count", None),
        "workers": getattr(args, "workers", None),
        "out_dir": getattr(args, "out_dir", None),
        "emit": tuple(args.emit) if getattr(args, "emit", None) else None,
        "height_cap": getattr(args, "height_cap", None),
    }
    for key, value in flags.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.light:
        cfg.pgm_darkness = False
    if getattr(args, "log_spacing", False):
        cfg.bw_spacing = "log"
    if getattr(args, "workers", None) is None and "workers" not in raw:
        env = _default_workers()
        if env is not None:
            cfg.workers = env
    cfg.normalize()
    return cfg


def cmd_generate(args) -> int:
    _emit_text(make_dataset(args.name, args.seed).to_csv(), args.out)
    return 0


def cmd_terrace(args) -> int:
    cfg = _config_from_args(args)
    result = run_pipeline(cfg)
    for name, path in sorted(result.files.items()):
        log.info("wrote %s: %s", name, path)
    print(f"terrace: {len(result.matrix.xvec)} bandwidths x {len(result.matrix.yvec)} filtration values, "
          f"max height {result.matrix.max_height}; outputs in {cfg.out_dir}")
    return 0


def cmd_slice(args) -> int:
    cfg = _config_from_args(args)
    cfg.bw_min = args.bandwidth
    if cfg.bw_max is None:
        cfg.bw_max = args.bandwidth
    cfg.bw_count = 1
    cfg.validate()
    cloud = load_points(cfg)
    spec = grid_for(cfg, cloud)
    grid = evaluate_kde(cloud, args.bandwidth, spec)
    barcode = superlevel_persistence(grid, max_dim=min(cfg.k, cloud.dim))
    _emit_text(barcode.to_csv(f"{spec.header()} kde=gaussian"), args.out)
    if args.svg:
        matrix = assemble_terrace([betti_step_function(barcode, cfg.k)], [args.bandwidth], cfg.k)
        render_barcode_slice(matrix, 0, RenderOptions(), args.svg)
    return 0


def _read_matrix(path: str) -> TerraceMatrix:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"matrix file not found: {p}")
    text = p.read_text(encoding="utf-8")
    if p.suffix.lower() == ".json":
        return TerraceMatrix.from_json_text(text)
    return TerraceMatrix.from_csv_text(text)


def cmd_area(args) -> int:
    summary = terrace_area(_read_matrix(args.matrix))
    _emit_text(summary.to_csv(), args.out)
    if args.svg:
        render_area(summary, RenderOptions(), args.svg)
    return 0


def cmd_sample_image(args) -> int:
    image = load_pgm(args.pgm)
    cloud = sample_intensity(image, args.n, darkness=not args.light, seed=args.seed)
    if args.n_boundary:
        cloud = cloud.concat(sample_boundary(image, args.n_boundary, seed=args.seed))
    _emit_text(cloud.to_csv(), args.out)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "terrace": cmd_terrace,
    "slice": cmd_slice,
    "area": cmd_area,
    "sample-image": cmd_sample_image,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PterraceError as exc:
        print(f"pterrace {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"pterrace {args.command}: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())

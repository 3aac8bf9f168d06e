"""Acceptance criteria 1-9, each at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
lists one PASS/FAIL line per criterion.  The full-size sweeps take about a
minute in total on one core.
"""
import math
import time

import numpy as np
import pytest
from scipy import ndimage

from conftest import criterion
from oracles import components_above, euler_above, kde_scalar
from pterrace.datasets import HONEYCOMB_CELLS
from pterrace.imageio import honeycomb_image
from pterrace.kde import GridSpec, evaluate_kde, grid_spec_auto
from pterrace.persistence import betti_at, superlevel_persistence
from pterrace.pipeline import PipelineConfig, run_pipeline
from pterrace.pointcloud import BoundingBox, PointCloud
from pterrace.terrace import slice_at_bandwidth

THREE_CIRCLES = dict(dataset="three-circles", k=1, bw_min=0.01, bw_max=1.5, bw_count=50, grid_res=(64,), seed=0)
ALL_OUTPUTS = ("matrix_csv", "matrix_json", "area_csv", "terrace_svg", "area_svg", "barcode_svg@0.2")


def random_grid(rng, max_side, dim):
    shape = tuple(int(s) for s in rng.integers(1, max_side + 1, size=dim))
    if rng.random() < 0.5:
        return rng.random(shape)
    # small integer alphabet: many ties
    return rng.integers(0, 4, size=shape).astype(float)


@pytest.fixture(scope="module")
def three_circles(tmp_path_factory):
    out = tmp_path_factory.mktemp("three-circles-w1")
    start = time.perf_counter()
    result = run_pipeline(PipelineConfig(**THREE_CIRCLES, workers=1, emit=ALL_OUTPUTS, out_dir=str(out)))
    return result, time.perf_counter() - start, out


def test_criterion_1_dim0_union_find():
    with criterion(1, "dim-0 Betti numbers match union-find on 200 random grids up to 8x8") as rec:
        rng = np.random.default_rng(20240101)
        start = time.perf_counter()
        checked = 0
        for _ in range(200):
            g = random_grid(rng, 8, 2)
            bc = superlevel_persistence(g, max_dim=0)
            for y in np.unique(g):
                assert betti_at(bc, 0, y) == components_above(g, y), (g, y)
                checked += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"took {elapsed:.1f} s"
        rec["text"] = f"{checked} thresholds agree, {elapsed:.2f} s"


def euler_check(g):
    bc = superlevel_persistence(g, max_dim=g.ndim)
    for y in np.unique(g):
        chi = sum((-1) ** k * betti_at(bc, k, y) for k in range(g.ndim + 1))
        assert chi == euler_above(g, y), (g.shape, y)
    return len(np.unique(g))


def test_criterion_2_euler_identity():
    with criterion(2, "Euler identity on 100 grids up to 16x16 and 20 up to 8x8x8") as rec:
        rng = np.random.default_rng(7)
        start = time.perf_counter()
        n2 = sum(euler_check(random_grid(rng, 16, 2)) for _ in range(100))
        n3 = sum(euler_check(random_grid(rng, 8, 3)) for _ in range(20))
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"took {elapsed:.1f} s"
        rec["text"] = f"{n2} 2D and {n3} 3D thresholds agree, {elapsed:.2f} s"


def test_criterion_3_terrace_matches_betti_at(three_circles):
    with criterion(3, "three-circles terrace cells equal betti_at of each barcode") as rec:
        result, seconds, _ = three_circles
        m = result.matrix
        assert len(m.xvec) == 50 and len(result.cloud) == 600
        assert result.spec.resolution == (64, 64)
        for i, bc in enumerate(result.sweep.barcodes):
            column = [betti_at(bc, 1, y) for y in m.yvec]
            assert m.zmat[:, i].tolist() == column, f"column {i}"
        assert seconds < 60.0, f"took {seconds:.1f} s"
        rec["text"] = f"{m.zmat.size} cells agree, run took {seconds:.1f} s"


def test_criterion_4_three_circles_areas(three_circles):
    with criterion(4, "three-circles areas at heights 1-3 dominate heights >= 5") as rec:
        s = three_circles[0].summary
        high = [a for h, a in s.areas.items() if h >= 5]
        top = max(high, default=0.0)
        for h in (1, 2, 3):
            assert s.area(h) > top, f"area({h})={s.area(h)} <= {top}"
        tail = sum(high)
        assert tail < 0.05 * s.total, f"tail {tail} vs total {s.total}"
        rec["text"] = (
            f"areas 1-3 = {s.area(1):.4f}, {s.area(2):.4f}, {s.area(3):.4f}; "
            f"max above 4 = {top:.2e}; tail fraction {tail / s.total:.2e}"
        )


def test_criterion_5_four_shapes(tmp_path):
    with criterion(5, "four-shapes areas 1-3 exceed every height >= 4, max height >= 20") as rec:
        cfg = PipelineConfig(dataset="four-shapes", k=1, bw_min=0.01, bw_max=0.6, bw_count=50, grid_res=(128,),
                             seed=0, emit=("matrix_csv", "area_csv", "terrace_svg", "area_svg"),
                             out_dir=str(tmp_path))
        result = run_pipeline(cfg)
        s = result.summary
        assert len(result.cloud) == 2400
        rest = max((a for h, a in s.areas.items() if h >= 4), default=0.0)
        for h in (1, 2, 3):
            assert s.area(h) > rest, f"area({h})={s.area(h)} <= {rest}"
        assert result.matrix.max_height >= 20, f"max height {result.matrix.max_height}"
        rec["text"] = (
            f"areas 1-3 = {s.area(1):.4f}, {s.area(2):.4f}, {s.area(3):.4f} > {rest:.4f}; "
            f"max height {result.matrix.max_height}"
        )


def test_criterion_6_resolution_consistency(tmp_path):
    with criterion(6, "25 vs 100 bandwidths: shared columns identical") as rec:
        start = time.perf_counter()
        runs = {}
        for count in (25, 100):
            cfg = PipelineConfig(**{**THREE_CIRCLES, "bw_count": count}, emit=("matrix_csv",),
                                 out_dir=str(tmp_path / str(count)))
            runs[count] = run_pipeline(cfg, write=False)
        elapsed = time.perf_counter() - start
        coarse, fine = runs[25], runs[100]
        shared = sorted(set(coarse.matrix.xvec) & set(fine.matrix.xvec))
        assert len(shared) == 4, shared
        for h in shared:
            i, j = coarse.matrix.xvec.index(h), fine.matrix.xvec.index(h)
            assert coarse.sweep.barcodes[i] == fine.sweep.barcodes[j]
            assert slice_at_bandwidth(coarse.matrix, i) == slice_at_bandwidth(fine.matrix, j)
            ys = np.array(sorted(set(coarse.matrix.yvec) | set(fine.matrix.yvec)))
            assert np.array_equal(slice_at_bandwidth(coarse.matrix, i)(ys), slice_at_bandwidth(fine.matrix, j)(ys))
        assert elapsed < 120.0, f"took {elapsed:.1f} s"
        rec["text"] = f"{len(shared)} shared bandwidths {[round(h, 4) for h in shared]} identical, {elapsed:.1f} s"


def test_criterion_7_parallel_determinism(three_circles, tmp_path):
    with criterion(7, "workers 1 vs 8 give byte-identical outputs") as rec:
        result1, _, out1 = three_circles
        out8 = tmp_path / "w8"
        result8 = run_pipeline(PipelineConfig(**THREE_CIRCLES, workers=8, emit=ALL_OUTPUTS, out_dir=str(out8)))
        compared = []
        for name, path in result1.files.items():
            if name == "manifest":
                continue
            assert path.read_bytes() == result8.files[name].read_bytes(), name
            compared.append(path.name)
        assert {"terrace.csv", "terrace.json", "area.csv", "terrace.svg", "area.svg"} <= set(compared)
        rec["text"] = f"{len(compared)} files identical: {', '.join(sorted(compared))}"


def test_criterion_8_kde():
    with criterion(8, "KDE normalization within 1e-2; spot values within 1e-12 relative") as rec:
        origin = PointCloud(np.zeros((1, 2)))
        peak = evaluate_kde(origin, 0.5, GridSpec(BoundingBox((-1, -1), (1, 1)), (5, 5))).values[2, 2]
        expected_peak = 1.0 / (2.0 * math.pi * 0.25)
        assert abs(peak - expected_peak) <= 1e-12 * expected_peak
        off = evaluate_kde(origin, 1.0, GridSpec(BoundingBox((-1, -1), (1, 1)), (3, 3))).values[2, 2]
        expected_off = math.exp(-1.0) / (2.0 * math.pi)
        assert abs(off - expected_off) <= 1e-12 * expected_off
        assert abs(off - kde_scalar([(0.0, 0.0)], 1.0, (1.0, 1.0))) <= 1e-12 * expected_off

        worst = 0.0
        rng = np.random.default_rng(8)
        for h in (0.1, 0.3, 0.8):
            cloud = PointCloud(rng.normal(size=(40, 2)))
            spec = grid_spec_auto(cloud, h, int(math.ceil(12 / h)) + 60, margin=5 * h)
            integral = evaluate_kde(cloud, h, spec).values.sum() * np.prod(spec.spacing)
            worst = max(worst, abs(integral - 1.0))
        assert worst < 1e-2, f"integral off by {worst}"
        rec["text"] = f"peak {peak:.6f}, off-peak {off:.7f}, worst |integral - 1| = {worst:.2e}"


def test_criterion_9_honeycomb(tmp_path):
    with criterion(9, "honeycomb terrace: plateau at heights 1..L, tail beyond L+1 below 5%") as rec:
        _, cells = ndimage.label(honeycomb_image().pixels == 255)
        L = cells
        assert L == HONEYCOMB_CELLS == 9
        cfg = PipelineConfig(dataset="honeycomb", k=1, seed=0, emit=("matrix_csv", "area_csv", "terrace_svg"),
                             out_dir=str(tmp_path))
        result = run_pipeline(cfg)
        assert len(result.cloud) == 5000 + 1500
        s = result.summary
        plateau = [s.area(h) for h in range(1, L + 1)]
        beyond = [a for h, a in s.areas.items() if h > L + 1]
        assert min(plateau) > 0.0
        assert min(plateau) > max(beyond, default=0.0)
        tail = sum(beyond)
        assert tail < 0.05 * s.total, f"tail {tail} vs total {s.total}"
        rec["text"] = (
            f"L={L}; smallest area in 1..L = {min(plateau):.4f}; "
            f"tail beyond L+1 = {tail / s.total:.2e} of total; max height {result.matrix.max_height}"
        )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))

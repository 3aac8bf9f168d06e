import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kde_scalar
from pterrace.errors import DataError
from pterrace.kde import GridSpec, ScalarGrid, evaluate_kde, grid_spec_auto, peak_value
from pterrace.pointcloud import BoundingBox, PointCloud, generate_circle


def square_spec(half, res, dim=2):
    return GridSpec(BoundingBox((-half,) * dim, (half,) * dim), (res,) * dim)


def test_peak_value_at_origin():
    grid = evaluate_kde(PointCloud(np.zeros((1, 2))), 0.5, square_spec(1.0, 5))
    assert grid.values[2, 2] == pytest.approx(1.0 / (2.0 * math.pi * 0.25), rel=1e-12, abs=0)


def test_off_peak_value():
    grid = evaluate_kde(PointCloud(np.zeros((1, 2))), 1.0, square_spec(1.0, 3))
    expected = math.exp(-1.0) / (2.0 * math.pi)
    assert grid.values[2, 2] == pytest.approx(expected, rel=1e-12, abs=0)
    assert grid.values[2, 2] == pytest.approx(kde_scalar([(0.0, 0.0)], 1.0, (1.0, 1.0)), rel=1e-12, abs=0)


@pytest.mark.parametrize("dim", [2, 3])
def test_matches_scalar_formula(dim):
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(17, dim))
    spec = GridSpec(BoundingBox((-2.0,) * dim, (2.5,) * dim), (7,) * dim)
    grid = evaluate_kde(PointCloud(pts), 0.7, spec)
    axes = spec.axes()
    for idx in np.ndindex(*spec.resolution):
        v = [axes[a][i] for a, i in enumerate(idx)]
        assert grid.values[idx] == pytest.approx(kde_scalar(pts, 0.7, v), rel=1e-12, abs=0)


@pytest.mark.parametrize("dim,h,res", [(2, 0.3, 161), (3, 0.5, 61)])
def test_normalization(dim, h, res):
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(25, dim))
    spec = grid_spec_auto(PointCloud(pts), h, res, margin=5 * h)
    grid = evaluate_kde(PointCloud(pts), h, spec)
    integral = grid.values.sum() * np.prod(spec.spacing)
    assert abs(integral - 1.0) < 1e-2


def test_grid_spec_auto_margin():
    cloud = generate_circle((0, 0), 1.0, 500, None, seed=0)
    spec = grid_spec_auto(cloud, 1.5, 64)
    assert spec.resolution == (64, 64)
    assert np.allclose(spec.box.lower, (-5.5, -5.5), atol=1e-3)
    assert np.allclose(spec.box.upper, (5.5, 5.5), atol=1e-3)


def test_grid_spec_auto_single_point():
    spec = grid_spec_auto(PointCloud(np.array([[2.0, -1.0, 0.5]])), 1.0, 8)
    assert spec.box.lower == (-1.0, -4.0, -2.5)
    assert spec.box.upper == (5.0, 2.0, 3.5)


def test_grid_spec_auto_rejects_zero_bandwidth():
    with pytest.raises(DataError):
        grid_spec_auto(PointCloud(np.zeros((1, 2))), 0.0, 8)


def test_errors():
    spec = square_spec(1.0, 5)
    with pytest.raises(DataError):
        evaluate_kde(PointCloud(np.zeros((1, 2))), 0.0, spec)
    with pytest.raises(DataError):
        evaluate_kde(PointCloud(np.zeros((1, 3))), 1.0, spec)
    with pytest.raises(DataError):
        GridSpec(BoundingBox((0, 0), (1, 1)), (1, 5))


def test_grid_csv_header():
    grid = evaluate_kde(PointCloud(np.zeros((1, 2))), 0.5, square_spec(1.0, 3))
    text = grid.to_csv()
    first, *rows = text.splitlines()
    assert first.startswith("# pterrace grid d=2 res=3,3 box=")
    assert first.endswith("bandwidth=0.5")
    assert len(rows) == 9
    assert float(rows[4]) == grid.values[1, 1]


def test_scalar_grid_rejects_negative():
    with pytest.raises(DataError):
        ScalarGrid(square_spec(1.0, 2), np.array([[0.0, -1.0], [0.0, 0.0]]), 1.0)


def test_deterministic():
    cloud = generate_circle((0, 0), 1.0, 300, None, seed=3)
    spec = grid_spec_auto(cloud, 0.4, 40)
    a = evaluate_kde(cloud, 0.4, spec).values
    b = evaluate_kde(cloud, 0.4, spec).values
    assert a.tobytes() == b.tobytes()


points_2d = st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=1, max_size=12)


@settings(max_examples=40, deadline=None)
@given(pts=points_2d, h=st.floats(0.1, 2.0), tx=st.floats(-5, 5), ty=st.floats(-5, 5))
def test_translation_equivariance(pts, h, tx, ty):
    pts = np.array(pts)
    t = np.array([tx, ty])
    spec = GridSpec(BoundingBox((-4.0, -4.0), (4.0, 4.0)), (9, 9))
    moved = GridSpec(BoundingBox(tuple(np.array(spec.box.lower) + t), tuple(np.array(spec.box.upper) + t)), (9, 9))
    a = evaluate_kde(PointCloud(pts), h, spec).values
    b = evaluate_kde(PointCloud(pts + t), h, moved).values
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * peak_value(2, h))


@settings(max_examples=40, deadline=None)
@given(pts=points_2d, h=st.floats(0.1, 2.0), pick=st.integers(0, 11))
def test_duplicate_point_adds_one_kernel(pts, h, pick):
    pts = np.array(pts)
    v = pts[pick % len(pts)]
    spec = GridSpec(BoundingBox(tuple(v - 1.0), tuple(v + 1.0)), (3, 3))
    before = evaluate_kde(PointCloud(pts), h, spec).values[1, 1] * len(pts)
    after = evaluate_kde(PointCloud(np.vstack([pts, v])), h, spec).values[1, 1] * (len(pts) + 1)
    assert after >= before
    assert after - before == pytest.approx(peak_value(2, h), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(pts=points_2d, h=st.floats(0.1, 2.0))
def test_reflection_symmetry(pts, h):
    pts = np.array(pts)
    sym = np.vstack([pts, pts * np.array([-1.0, 1.0])])
    grid = evaluate_kde(PointCloud(sym), h, square_spec(4.0, 11)).values
    assert np.allclose(grid, grid[::-1, :], rtol=1e-12, atol=1e-12 * peak_value(2, h))


@settings(max_examples=40, deadline=None)
@given(pts=points_2d, h=st.floats(0.05, 2.0))
def test_bounded_by_peak(pts, h):
    grid = evaluate_kde(PointCloud(np.array(pts)), h, square_spec(4.0, 13)).values
    assert grid.min() >= 0.0
    assert grid.max() <= peak_value(2, h) * (1 + 1e-12)

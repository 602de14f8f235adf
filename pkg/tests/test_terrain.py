import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetbench.synthetic import fractal_raster, planar_raster
from planetbench.terrain import (
    ElevationRaster,
    IngestConfig,
    RasterFormatError,
    compute_roughness,
    compute_slope,
    downsample,
    read_esri_ascii,
    read_raster,
    threshold_to_grid,
    write_esri_ascii,
)


def lstsq_roughness(z, window):
    """Per-sample plane fit with numpy's least squares over the clipped
    window; population std-dev of the residuals."""
    h, w = z.shape
    half = window // 2
    out = np.full((h, w), np.nan)
    for r in range(h):
        for c in range(w):
            if np.isnan(z[r, c]):
                continue
            rows, cols, vals = [], [], []
            for rr in range(max(0, r - half), min(h, r + half + 1)):
                for cc in range(max(0, c - half), min(w, c + half + 1)):
                    if not np.isnan(z[rr, cc]):
                        rows.append(rr)
                        cols.append(cc)
                        vals.append(z[rr, cc])
            a = np.column_stack([np.ones(len(vals)), cols, rows])
            coef, *_ = np.linalg.lstsq(a, np.array(vals), rcond=None)
            resid = np.array(vals) - a @ coef
            out[r, c] = math.sqrt(np.mean(resid**2))
    return out


class TestSlope:
    def test_flat(self):
        r = ElevationRaster(np.full((6, 7), 5.0))
        assert np.all(compute_slope(r) == 0)

    def test_ten_degree_ramp(self):
        r = planar_raster(8, 9, math.tan(math.radians(10)), 0.0, ground_res_m=2.5)
        s = compute_slope(r)
        assert np.max(np.abs(s[1:-1, 1:-1] - 10.0)) <= 1e-9

    def test_diagonal_ramp(self):
        g = 0.3
        s = compute_slope(planar_raster(6, 6, g, g))
        assert np.max(np.abs(s[1:-1, 1:-1] - math.degrees(math.atan(g * math.sqrt(2))))) <= 1e-9

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 10))
    def test_plane_gradient(self, gx, gy, res):
        s = compute_slope(planar_raster(5, 6, gx, gy, ground_res_m=res))
        expected = math.degrees(math.atan(math.hypot(gx, gy)))
        assert np.max(np.abs(s[1:-1, 1:-1] - expected)) <= 1e-9

    def test_too_small(self):
        with pytest.raises(ValueError):
            compute_slope(ElevationRaster(np.zeros((1, 5))))

    def test_nodata_propagates(self):
        z = np.zeros((4, 4))
        z[1, 1] = np.nan
        s = compute_slope(ElevationRaster(z))
        assert np.isnan(s[1, 1])
        assert np.isfinite(s[1, 2])


class TestRoughness:
    def test_constant(self):
        assert np.allclose(compute_roughness(ElevationRaster(np.full((5, 5), 3.0))), 0)

    def test_plane_removed(self):
        r = compute_roughness(planar_raster(7, 8, 0.4, -0.7, offset=100.0))
        assert np.max(np.abs(r)) < 1e-9

    def test_center_spike(self):
        h = 3.0
        z = np.zeros((3, 3))
        z[1, 1] = h
        # the window plane is the mean h/9; residuals 8h/9 once and -h/9 eight times
        assert compute_roughness(ElevationRaster(z))[1, 1] == pytest.approx(2 * math.sqrt(2) * h / 9, abs=1e-12)

    @pytest.mark.parametrize("window", [3, 5])
    def test_matches_lstsq(self, window):
        rng = np.random.default_rng(4)
        z = rng.normal(0, 2, (7, 9))
        z[3, 4] = np.nan
        ours = compute_roughness(ElevationRaster(z), window)
        ref = lstsq_roughness(z, window)
        assert np.array_equal(np.isnan(ours), np.isnan(ref))
        ok = ~np.isnan(ref)
        assert np.max(np.abs(ours[ok] - ref[ok])) < 1e-9

    def test_window_too_large(self):
        with pytest.raises(ValueError):
            compute_roughness(ElevationRaster(np.zeros((4, 4))), window=5)


class TestThreshold:
    def test_flat_all_free(self):
        g = threshold_to_grid(ElevationRaster(np.zeros((5, 5))), IngestConfig(slope_threshold_deg=10))
        assert g.cells.sum() == 0

    def test_ramp_at_threshold_is_occupied(self):
        r = planar_raster(6, 6, math.tan(math.radians(10)), 0.0)
        g = threshold_to_grid(r, IngestConfig(slope_threshold_deg=10))
        assert g.cells[1:-1, 1:-1].all()

    def test_half_flat_half_steep(self):
        z = np.zeros((6, 12))
        z[:, 6:] = np.arange(6) * math.tan(math.radians(30))
        g = threshold_to_grid(ElevationRaster(z), IngestConfig(slope_threshold_deg=20))
        assert g.cells[:, :5].sum() == 0
        assert g.cells[1:-1, 7:-1].all()

    def test_nodata_policy(self):
        z = np.zeros((4, 4))
        z[0, 0] = np.nan
        assert threshold_to_grid(ElevationRaster(z), IngestConfig()).cells[0, 0] == 1
        assert threshold_to_grid(ElevationRaster(z), IngestConfig(nodata_policy="free")).cells[0, 0] == 0

    def test_resolution_follows_downsampling(self):
        r = ElevationRaster(np.zeros((8, 8)), ground_res_m=0.5)
        assert threshold_to_grid(r, IngestConfig(downsample_factor=4)).resolution_m == 2.0

    def test_downsample_too_far(self):
        with pytest.raises(ValueError):
            threshold_to_grid(ElevationRaster(np.zeros((6, 6))), IngestConfig(downsample_factor=4))

    def test_roughness_marks_spike(self):
        z = np.zeros((9, 9))
        z[4, 4] = 0.05
        cfg = IngestConfig(slope_threshold_deg=80, roughness_threshold_m=0.01)
        assert threshold_to_grid(ElevationRaster(z), cfg).cells[4, 4] == 1

    @given(st.integers(0, 10_000), st.floats(-500, 500))
    @settings(max_examples=20, deadline=None)
    def test_offset_invariant(self, seed, offset):
        r = fractal_raster(16, 16, seed, relief_m=8)
        shifted = ElevationRaster(r.values + offset)
        cfg = IngestConfig(slope_threshold_deg=15)
        assert np.array_equal(threshold_to_grid(r, cfg).cells, threshold_to_grid(shifted, cfg).cells)

    @given(st.integers(0, 10_000), st.floats(1, 40), st.floats(1, 40))
    @settings(max_examples=30, deadline=None)
    def test_monotone(self, seed, t1, t2):
        lo, hi = sorted((t1, t2))
        r = fractal_raster(20, 20, seed, relief_m=10)
        a = threshold_to_grid(r, IngestConfig(slope_threshold_deg=lo)).cells
        b = threshold_to_grid(r, IngestConfig(slope_threshold_deg=hi)).cells
        assert np.all(b <= a)


class TestDownsample:
    def test_identity(self):
        r = fractal_raster(9, 7, 1)
        assert np.array_equal(downsample(r, 1).values, r.values)

    def test_block_mean_crops_remainder(self):
        z = np.arange(30, dtype=float).reshape(5, 6)
        d = downsample(ElevationRaster(z), 2)
        assert d.values.shape == (2, 3)
        assert d.values[0, 0] == np.mean([0, 1, 6, 7])

    def test_ignores_nodata_in_block(self):
        z = np.array([[1.0, np.nan], [3.0, 5.0]])
        assert downsample(ElevationRaster(z), 2).values[0, 0] == 3.0


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"slope_threshold_deg": 0},
            {"slope_threshold_deg": 90},
            {"downsample_factor": 0},
            {"roughness_threshold_m": -1.0},
            {"roughness_window": 4},
            {"nodata_policy": "maybe"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            IngestConfig(**kwargs)


class TestRasterFiles:
    def test_asc_round_trip(self, tmp_path):
        z = fractal_raster(6, 5, 3).values.copy()
        z[2, 2] = np.nan
        r = ElevationRaster(z, ground_res_m=1.5, name="dtm")
        p = write_esri_ascii(r, tmp_path / "dtm.asc")
        back = read_raster(p)
        assert back.ground_res_m == 1.5
        assert np.array_equal(np.isnan(back.values), np.isnan(z))
        ok = ~np.isnan(z)
        assert np.allclose(back.values[ok], z[ok], rtol=0, atol=1e-9)

    def test_asc_header_parsing(self, tmp_path):
        p = tmp_path / "a.asc"
        p.write_text("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 3\nNODATA_value -1\n1 2\n-1 4\n")
        r = read_esri_ascii(p)
        assert r.ground_res_m == 3
        assert np.isnan(r.values[1, 0])
        assert r.values[1, 1] == 4

    def test_asc_wrong_count(self, tmp_path):
        p = tmp_path / "bad.asc"
        p.write_text("ncols 2\nnrows 2\ncellsize 1\n1 2 3\n")
        with pytest.raises(RasterFormatError, match="bad.asc"):
            read_esri_ascii(p)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmapopt import optimize as op
from cmapopt.colormaps import Colormap
from cmapopt.colorspace import DEFAULT_VIEWING_CONDITIONS, srgb_to_jab
from cmapopt.cvd import CvdSpec


def right_angle_curve():
    # legs of length 3 and 4 in (a', b'), total arc length 7
    return np.array([[0.0, 0.0, 0.0], [50.0, 3.0, 0.0], [100.0, 3.0, 4.0]])


def random_feasible_bounds(rng, n=64, margin_hi=30.0):
    # a random in-range line plus independent slack on each side; the
    # generating line is feasible by construction
    t = np.arange(n)
    y0, y1 = rng.uniform(5.0, 95.0, size=2)
    line = y0 + (y1 - y0) * t / (n - 1)
    jmin = np.clip(line - rng.uniform(0.5, margin_hi, n), 0.0, 100.0)
    jmax = np.clip(line + rng.uniform(0.5, margin_hi, n), 0.0, 100.0)
    return op.JpBounds(jmin, jmax)


def brute_force_max_slope(bounds, direction, resolution=1e-3):
    """Oracle: scan a slope grid; a slope is feasible iff the band of
    admissible intercepts max(jmin - m*t) <= min(jmax - m*t) is nonempty."""
    n = len(bounds)
    t = np.arange(n, dtype=float)
    lim = 100.0 / (n - 1)
    ms = np.arange(-lim - resolution, lim + 2 * resolution, resolution)
    lo = np.max(bounds.jmin[None, :] - ms[:, None] * t[None, :], axis=1)
    hi = np.min(bounds.jmax[None, :] - ms[:, None] * t[None, :], axis=1)
    feasible = lo <= hi + 1e-12
    if not np.any(feasible):
        return None
    score = direction * ms[feasible]
    return float(ms[feasible][np.argmax(score)])


class TestResampleEquidistant:
    def test_right_angle_oracle(self):
        out = op.resample_equidistant(right_angle_curve(), n_out=8)
        chords = np.hypot(np.diff(out[:, 1]), np.diff(out[:, 2]))
        assert np.max(np.abs(chords - 1.0)) < 1e-9
        # the corner (3, 0) is crossed mid-sequence
        assert out[3, 1:] == pytest.approx([3.0, 0.0], abs=1e-9)

    def test_endpoints_preserved(self):
        out = op.resample_equidistant(right_angle_curve(), n_out=17)
        assert out[0] == pytest.approx([0.0, 0.0, 0.0])
        assert out[-1] == pytest.approx([100.0, 3.0, 4.0])

    def test_already_equispaced_path_unchanged(self):
        t = np.linspace(0.0, 1.0, 9)
        curve = np.stack([100 * t, 10 * t, np.zeros_like(t)], axis=1)
        out = op.resample_equidistant(curve, n_out=9)
        assert np.allclose(out, curve, atol=1e-9)

    def test_viridis_arc_length_conserved(self, viridis, deut100):
        curve = op.colormap_to_cvd_jab(viridis, deut100)
        before = op._hue_path_length(curve)
        out = op.resample_equidistant(curve, n_out=256)
        after = op._hue_path_length(out)
        assert abs(after - before) / before < 0.005
        # equal arc spacing means equal chords except where a chord spans
        # a corner of the path (gamut clipping creases the simulated
        # curve near the yellow end); corner chords can only be shorter
        chords = np.hypot(np.diff(out[:, 1]), np.diff(out[:, 2]))
        spacing = before / 255.0
        assert np.all(chords <= spacing * (1 + 1e-9))
        off = np.abs(chords - spacing) / spacing
        assert np.mean(off < 0.005) >= 0.95

    def test_degenerate_path_raises(self):
        flat = np.stack([np.linspace(0, 100, 8), np.full(8, 2.0), np.full(8, -1.0)], axis=1)
        with pytest.raises(op.DegeneratePathError):
            op.resample_equidistant(flat)

    def test_duplicate_points_tolerated(self):
        curve = np.array([[0, 0, 0], [10, 1, 0], [10, 1, 0], [30, 1, 2]], dtype=float)
        out = op.resample_equidistant(curve, n_out=7)
        chords = np.hypot(np.diff(out[:, 1]), np.diff(out[:, 2]))
        assert np.max(np.abs(chords - 0.5)) < 1e-9

    @settings(max_examples=30, deadline=None)
    @given(st.integers(3, 12), st.integers(8, 64), st.integers(0, 2**31 - 1))
    def test_arc_length_never_grows(self, n_in, n_out, seed):
        rng = np.random.default_rng(seed)
        curve = np.column_stack([np.linspace(0, 100, n_in),
                                 rng.uniform(-30, 30, n_in),
                                 rng.uniform(-30, 30, n_in)])
        if op._hue_path_length(curve) == 0.0:
            return
        out = op.resample_equidistant(curve, n_out=n_out)
        # chords can only cut corners, never add length
        assert op._hue_path_length(out) <= op._hue_path_length(curve) + 1e-9


class TestJpBounds:
    def test_achromatic_spans_full_axis(self):
        b = op.compute_jp_bounds(np.array([[50.0, 0.0, 0.0]]))
        assert b.jmin[0] == pytest.approx(0.0, abs=1e-3)
        assert b.jmax[0] == pytest.approx(100.0, abs=1e-3)

    def test_high_chroma_yellow_floor_is_high(self):
        # dark saturated yellows do not exist in sRGB
        yellow = srgb_to_jab([1.0, 1.0, 0.0])
        b = op.compute_jp_bounds(np.array([yellow]))
        assert b.jmin[0] > 50.0
        assert b.jmin[0] == pytest.approx(yellow[0], abs=0.1)

    def test_matches_brute_force_scan(self):
        # oracle: dense 10,000-step scan of the same validity predicate
        rng = np.random.default_rng(7)
        curve = srgb_to_jab(rng.uniform(0.05, 0.95, size=(20, 3)))
        bounds = op.compute_jp_bounds(curve)
        jps = np.linspace(0.0, 100.0, 10000)
        for i in range(20):
            ok = op._valid_jp(jps, curve[i, 1:], DEFAULT_VIEWING_CONDITIONS)
            assert abs(bounds.jmin[i] - jps[ok][0]) < 0.02
            assert abs(bounds.jmax[i] - jps[ok][-1]) < 0.02

    def test_own_lightness_inside_bounds(self, viridis, deut100):
        curve = op.colormap_to_cvd_jab(viridis, deut100)
        rs = op.resample_equidistant(curve)
        b = op.compute_jp_bounds(rs)
        assert np.all(b.jmin <= b.jmax)
        assert np.all(b.jmin >= 0.0) and np.all(b.jmax <= 100.0)

    def test_infeasible_chroma_raises(self):
        with pytest.raises(op.InfeasiblePointError, match="no J'"):
            op.compute_jp_bounds(np.array([[50.0, 60.0, 60.0]]))


class TestFitOriginal:
    def test_closed_form_three_points(self):
        slope, intercept, r2 = op.fit_line_ols([0.0, 10.0, 0.0])
        assert slope == pytest.approx(0.0)
        assert intercept == pytest.approx(10.0 / 3.0)
        assert r2 == pytest.approx(0.0)

    def test_exact_line_reproduced(self):
        t = np.arange(32)
        curve = np.column_stack([5.0 + 0.7 * t, np.sin(t), np.cos(t)])
        out = op.linearize_fit_original(curve)
        assert np.allclose(out, curve, atol=1e-10)

    def test_viridis_fit_stays_close_to_endpoints(self, viridis, deut100):
        curve = op.resample_equidistant(op.colormap_to_cvd_jab(viridis, deut100))
        out = op.linearize_fit_original(curve)
        slope, intercept, r2 = op.fit_line_ols(curve[:, 0])
        assert r2 > 0.9  # the simulated viridis J' trend is close to linear
        # the fit tracks the original trend ends (a loose anchor: the
        # dark end flattens, pulling the fit up by ~10 J' units)
        assert abs(out[0, 0] - curve[0, 0]) < 15.0
        assert abs(out[-1, 0] - curve[-1, 0]) < 15.0
        assert np.array_equal(out[:, 1:], curve[:, 1:])


class TestMaxRangeLine:
    def test_unconstrained_full_span(self):
        b = op.JpBounds(np.zeros(64), np.full(64, 100.0))
        slope, intercept = op.max_range_line(b, 1)
        assert slope == pytest.approx(100.0 / 63.0, abs=1e-12)
        assert intercept == pytest.approx(0.0, abs=1e-9)

    def test_pinch_forces_line_through_point(self):
        jmin = np.zeros(64)
        jmax = np.full(64, 100.0)
        jmin[32] = jmax[32] = 50.0
        slope, intercept = op.max_range_line(op.JpBounds(jmin, jmax), 1)
        assert intercept + slope * 32 == pytest.approx(50.0, abs=1e-9)
        assert slope == pytest.approx(50.0 / 32.0, abs=1e-9)  # vs 50/31 from the top bound

    def test_crossed_bounds_infeasible(self):
        jmin = np.zeros(16)
        jmax = np.full(16, 100.0)
        jmin[5] = 70.0
        jmax[5] = 69.0
        with pytest.raises(op.InfeasibleBoundsError):
            op.max_range_line(op.JpBounds(jmin, jmax), 1)

    def test_constant_band_gives_steepest_diagonal(self):
        b = op.JpBounds(np.full(8, 30.0), np.full(8, 60.0))
        slope, intercept = op.max_range_line(b, 1)
        assert slope == pytest.approx(30.0 / 7.0, abs=1e-12)
        assert intercept == pytest.approx(30.0, abs=1e-9)

    def test_forced_flat_line(self):
        # two pinches at the same value leave only the flat line through them
        jmin = np.zeros(8)
        jmax = np.full(8, 100.0)
        jmin[1] = jmax[1] = 50.0
        jmin[6] = jmax[6] = 50.0
        slope, intercept = op.max_range_line(op.JpBounds(jmin, jmax), 1)
        assert slope == pytest.approx(0.0, abs=1e-12)
        assert intercept == pytest.approx(50.0, abs=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        bounds = random_feasible_bounds(rng)
        direction = 1 if rng.uniform() < 0.5 else -1
        slope, intercept = op.max_range_line(bounds, direction)
        oracle = brute_force_max_slope(bounds, direction)
        assert oracle is not None
        assert direction * slope >= direction * oracle - 1e-9
        assert abs(slope - oracle) <= 1e-3 + 1e-9
        t = np.arange(len(bounds))
        line = intercept + slope * t
        assert np.all(line >= bounds.jmin - 1e-6) and np.all(line <= bounds.jmax + 1e-6)

    def test_direction_sign_respected(self):
        rng = np.random.default_rng(99)
        bounds = random_feasible_bounds(rng)
        up, _ = op.max_range_line(bounds, 1)
        down, _ = op.max_range_line(bounds, -1)
        assert up > 0 > down


class TestOptimizeColormap:
    def test_unknown_method_rejected(self, viridis, deut100):
        with pytest.raises(ValueError, match="method"):
            op.optimize_colormap(viridis, deut100, method="steepest")

    def test_cividis_construction_properties(self, viridis, deut100):
        result = op.optimize_colormap(viridis, deut100, method="max_range")
        assert len(result) == 256
        assert np.all(result.entries >= 0.0) and np.all(result.entries <= 1.0)
        jab = srgb_to_jab(result.entries)
        assert np.all(np.diff(jab[:, 0]) > 0)
        assert jab[0, 2] < 0 < jab[-1, 2]  # blue start, yellow end
        _, _, r2 = op.fit_line_ols(jab[:, 0])
        assert r2 >= 0.999

    def test_metadata_records_stages(self, viridis, deut100):
        result = op.optimize_colormap(viridis, deut100, method="max_range", n_out=64)
        meta = result.metadata
        assert meta["source"] == "viridis"
        assert meta["cvd"] == {"kind": "deuteranomaly", "severity": 100.0}
        assert meta["method"] == "max_range"
        assert meta["n_out"] == 64
        assert "whitepoint" in meta["viewing_conditions"]
        assert {"slope", "intercept"} <= set(meta["line"])
        assert {"max_channel_overshoot", "mean_relative_jab_error",
                "undefined_points"} <= set(meta["clamp"])

    def test_max_range_dominates_fit(self, viridis, jet, deut100):
        for cmap in (viridis,):
            a = op.optimize_colormap(cmap, deut100, method="max_range")
            b = op.optimize_colormap(cmap, deut100, method="fit_original")
            ja = srgb_to_jab(a.entries)[:, 0]
            jb = srgb_to_jab(b.entries)[:, 0]
            assert ja.max() - ja.min() >= jb.max() - jb.min() - 1e-6

    def test_near_idempotence(self, viridis, deut100):
        # The severity-100 matrices are not exact projections, so
        # re-simulating an optimized map shifts its most chromatic
        # entries; the bulk of the map must stay put.
        once = op.optimize_colormap(viridis, deut100)
        twice = op.optimize_colormap(once, deut100)
        diff = np.abs(twice.entries - once.entries)
        assert diff.mean() <= 2.0 / 255.0
        assert diff.max() <= 20.0 / 255.0

    def test_decreasing_trend_preserved(self, viridis, deut100):
        reversed_map = Colormap(viridis.entries[::-1].copy(), "viridis-reversed")
        out = op.optimize_colormap(reversed_map, deut100)
        jp = srgb_to_jab(out.entries)[:, 0]
        assert np.all(np.diff(jp) < 0)

    def test_achromatic_input_bypasses_hue_resampling(self, grayscale, deut100):
        out = op.optimize_colormap(grayscale, deut100)
        assert out.metadata["degenerate_hue_path"] is True
        assert np.max(np.abs(out.entries - grayscale.entries)) < 1e-4
        jab = srgb_to_jab(out.entries)
        assert np.max(np.hypot(jab[:, 1], jab[:, 2])) < 0.01

    def test_single_color_map_rejected_as_degenerate(self, deut100):
        solid = Colormap(np.tile([[0.3, 0.5, 0.7]], (8, 1)), "solid")
        with pytest.raises(op.DegeneratePathError):
            op.resample_equidistant(op.colormap_to_cvd_jab(solid, deut100))

    def test_identical_jab_for_single_color(self, deut100):
        solid = Colormap(np.tile([[0.3, 0.5, 0.7]], (8, 1)), "solid")
        curve = op.colormap_to_cvd_jab(solid, deut100)
        assert np.max(np.ptp(curve, axis=0)) < 1e-12

    def test_zigzag_saturated_map_infeasible(self, deut100):
        zigzag = Colormap(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0],
                                    [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]), "zigzag")
        with pytest.raises(op.InfeasibleBoundsError):
            op.optimize_colormap(zigzag, deut100, method="max_range")
        # the other linearization still returns a result
        out = op.optimize_colormap(zigzag, deut100, method="fit_original")
        assert np.all(out.entries >= 0.0) and np.all(out.entries <= 1.0)

    def test_severity_zero_on_achromatic_ramp(self, grayscale):
        curve = op.colormap_to_cvd_jab(grayscale, CvdSpec("deuteranomaly", 0.0))
        assert np.max(np.abs(curve[:, 1:])) < 1e-6
        assert np.all(np.diff(curve[:, 0]) > 0)

    def test_deut100_viridis_collapses_red_green_axis(self, viridis, deut100):
        curve = op.colormap_to_cvd_jab(viridis, deut100)
        # deuteranopes keep blue-yellow discrimination: b' spans far more than a'
        assert np.ptp(curve[:, 2]) > 4 * np.ptp(curve[:, 1])

    def test_alternative_output_sizes(self, viridis, deut100):
        for n_out in (64, 512):
            out = op.optimize_colormap(viridis, deut100, n_out=n_out)
            assert len(out) == n_out
            jp = srgb_to_jab(out.entries)[:, 0]
            assert np.all(np.diff(jp) > 0)
            assert np.all((out.entries >= 0) & (out.entries <= 1))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31 - 1),
           st.floats(0.0, 100.0, allow_nan=False),
           st.sampled_from(["fit_original", "max_range"]))
    def test_pipeline_on_random_interior_maps(self, seed, severity, method):
        # interior colors keep the hue path well inside the gamut, so the
        # pipeline must either finish cleanly or raise a declared error
        rng = np.random.default_rng(seed)
        entries = rng.uniform(0.15, 0.85, size=(rng.integers(4, 9), 3))
        cmap = Colormap(entries, "random")
        try:
            out = op.optimize_colormap(cmap, CvdSpec("deuteranomaly", severity),
                                       method=method, n_out=32, dense_n=2000)
        except (op.DegeneratePathError, op.InfeasibleBoundsError):
            return
        assert len(out) == 32
        assert np.all((out.entries >= 0.0) & (out.entries <= 1.0))
        assert out.metadata["clamp"]["undefined_points"] == 0

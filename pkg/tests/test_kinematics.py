import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iolens import kinematics
from iolens.errors import (
    EmptySeries,
    NoOrientationAfterUnfold,
    TooFewSamples,
)
from iolens.geometry import FrameGeometry


def geom(frame, rel=(0.0, 0.0), area=100.0):
    return FrameGeometry(
        frame_index=frame,
        lens_center=(50.0 + rel[0], 50.0 + rel[1]),
        pupil_center=(50.0, 50.0),
        lens_area=area,
        pupil_area=900.0,
        rel_pos=rel,
    )


class TestSmoothArea:
    def test_constant_fixed_point(self):
        out = kinematics.smooth_area([1.0] * 40)
        assert (out == 1.0).all()

    def test_center_spike(self):
        values = [1.0] * 15
        values[7] = 16.0
        out = kinematics.smooth_area(values)
        assert out[7] == pytest.approx(2.0)
        assert list(out[:7]) == [1.0] * 7
        assert list(out[8:]) == [1.0] * 7

    def test_matches_sliding_window_oracle(self):
        rng = np.random.default_rng(1)
        values = rng.uniform(0, 100, 60)
        out = kinematics.smooth_area(values)
        for i in range(60):
            if 7 <= i <= 52:
                expected = sum(values[i - 7 : i + 8]) / 15
            else:
                expected = values[i]
            assert out[i] == pytest.approx(expected, rel=1e-12)

    def test_short_series_copied(self):
        values = [3.0, 1.0, 2.0]
        assert list(kinematics.smooth_area(values)) == values

    def test_even_window_rejected(self):
        with pytest.raises(ValueError):
            kinematics.smooth_area([1.0], window=4)

    def test_empty(self):
        with pytest.raises(EmptySeries):
            kinematics.smooth_area([])


class TestUnfoldingTime:
    def test_all_equal_takes_first(self):
        assert kinematics.unfolding_time([5, 5, 5]) == 0

    def test_first_argmax(self):
        assert kinematics.unfolding_time([1, 2, 3, 3, 2]) == 2

    def test_empty(self):
        with pytest.raises(EmptySeries):
            kinematics.unfolding_time([])

    @given(
        st.lists(st.integers(0, 10**6), min_size=1, max_size=50),
        st.floats(0.1, 10),
        st.floats(-5, 5),
    )
    @settings(max_examples=100, deadline=None)
    def test_positive_affine_invariance(self, values, a, b):
        # integer-valued inputs keep the rescaled ordering free of float
        # collapse, which is what the invariance is about
        assert kinematics.unfolding_time(values) == kinematics.unfolding_time(
            [a * v + b for v in values]
        )


class TestInstability:
    def test_constant_zero_both_modes(self):
        pos = [(3.0, 4.0)] * 5
        assert kinematics.instability(pos, "literal") == 0.0
        assert kinematics.instability(pos, "displacement") == 0.0

    def test_single_step_from_origin(self):
        pos = [(0.0, 0.0), (3.0, 4.0)]
        assert kinematics.instability(pos, "literal") == pytest.approx(5.0)
        assert kinematics.instability(pos, "displacement") == pytest.approx(5.0)

    def test_modes_differ_on_rotation_around_center(self):
        pos = [(5.0, 0.0), (0.0, 5.0)]
        assert kinematics.instability(pos, "literal") == pytest.approx(0.0)
        assert kinematics.instability(pos, "displacement") == pytest.approx(math.sqrt(50))

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            kinematics.instability([(1.0, 1.0)])

    def test_additive_over_shared_boundary(self):
        rng = np.random.default_rng(0)
        pos = [tuple(p) for p in rng.uniform(-5, 5, (10, 2))]
        for mode in kinematics.INSTABILITY_MODES:
            total = kinematics.instability(pos, mode)
            split = kinematics.instability(pos[:5], mode) + kinematics.instability(pos[4:], mode)
            assert total == pytest.approx(split)


class TestAngularDiff:
    def test_equal(self):
        assert kinematics.angular_diff(10, 10) == 0.0

    def test_wrap_mod_180(self):
        assert kinematics.angular_diff(10, 350) == pytest.approx(20.0)

    def test_max_axis_separation(self):
        assert kinematics.angular_diff(0, 90) == 90.0

    @given(st.floats(-720, 720), st.floats(-720, 720))
    @settings(max_examples=200, deadline=None)
    def test_range_and_symmetry(self, a, b):
        d = kinematics.angular_diff(a, b)
        assert 0.0 <= d <= 90.0
        assert d == pytest.approx(kinematics.angular_diff(b, a))


class TestRotation:
    def test_constant(self):
        assert kinematics.rotation([(0, 45.0), (1, 45.0), (2, 45.0)], 0) == 0.0

    def test_monotone_telescopes(self):
        assert kinematics.rotation([(0, 0.0), (1, 10.0), (2, 20.0)], 0) == pytest.approx(20.0)

    def test_wraps_mod_180(self):
        assert kinematics.rotation([(0, 175.0), (1, 5.0)], 0) == pytest.approx(10.0)

    def test_starts_at_unfold_index(self):
        samples = [(0, 0.0), (1, 50.0), (2, 50.0), (3, 60.0)]
        assert kinematics.rotation(samples, 1) == pytest.approx(10.0)

    def test_bridges_gaps(self):
        assert kinematics.rotation([(0, 0.0), (5, 10.0)], 0) == pytest.approx(10.0)

    def test_no_samples_after_unfold(self):
        with pytest.raises(NoOrientationAfterUnfold):
            kinematics.rotation([(0, 10.0)], 3)

    def test_single_sample_is_zero(self):
        assert kinematics.rotation([(5, 10.0)], 3) == 0.0

    @given(st.lists(st.floats(0, 360), min_size=2, max_size=20), st.floats(-360, 360))
    @settings(max_examples=100, deadline=None)
    def test_offset_invariance(self, angles, c):
        samples = list(enumerate(angles))
        shifted = [(i, (a + c) % 360) for i, a in samples]
        assert kinematics.rotation(samples, 0) == pytest.approx(
            kinematics.rotation(shifted, 0), abs=1e-6
        )


class TestComputeReport:
    def test_stationary_unfolded(self):
        track = [geom(i) for i in range(30)]
        orient = [type("S", (), {"frame_index": i, "angle_deg": 30.0})() for i in range(30)]
        report = kinematics.compute_report(track, orient, start_frame=0)
        assert report.t_u_frames == 0
        assert report.instability_px == 0.0
        assert report.rotation_deg == 0.0
        assert report.coverage == 1.0
        assert report.n_frames == 30

    def test_single_frame_track(self):
        with pytest.raises(TooFewSamples):
            kinematics.compute_report([geom(0)], [], start_frame=0)

    def test_gap_skips_instability_terms(self):
        # frames 0,1 then 5,6: only the two consecutive pairs count
        track = [
            geom(0, rel=(0.0, 0.0)),
            geom(1, rel=(3.0, 4.0)),
            geom(5, rel=(100.0, 100.0)),
            geom(6, rel=(103.0, 96.0)),
        ]
        orient = [type("S", (), {"frame_index": i, "angle_deg": 0.0})() for i in (0, 1, 5, 6)]
        report = kinematics.compute_report(track, orient, start_frame=0, instability_mode="displacement")
        assert report.instability_px == pytest.approx(10.0)

    def test_low_coverage_warning(self):
        track = [geom(i) for i in range(40)]
        orient = [type("S", (), {"frame_index": 0, "angle_deg": 0.0})()]
        report = kinematics.compute_report(track, orient, start_frame=0)
        assert "low_coverage" in report.warnings

    def test_report_dict_keys(self):
        track = [geom(i) for i in range(20)]
        orient = [type("S", (), {"frame_index": i, "angle_deg": 1.0})() for i in range(20)]
        d = kinematics.compute_report(track, orient, start_frame=0).to_dict()
        for key in (
            "t_u_frames",
            "t_u_seconds",
            "instability_px",
            "rotation_deg",
            "coverage",
            "instability_mode",
        ):
            assert key in d

    def test_seconds_conversion(self):
        areas = [float(i) for i in range(10)] + [10.0] * 20
        track = [geom(i, area=areas[i]) for i in range(30)]
        orient = [type("S", (), {"frame_index": i, "angle_deg": 0.0})() for i in range(30)]
        report = kinematics.compute_report(track, orient, start_frame=0)
        assert report.t_u_seconds == pytest.approx(report.t_u_frames / 25.0)

"""End-to-end acceptance suite.

Each test covers one release criterion at a fixed tolerance and prints one
PASS line when it holds (run with -s to see them). Tolerances are pinned
here, not configurable.
"""

import itertools
import math
import time

import numpy as np
import pytest
import scipy.stats

from iolens import evalmetrics, geometry, hookpose, ingest, phase, pipeline, stats, synth
from iolens.config import AnalysisConfig


def _ok(name):
    print(f"ACCEPTANCE {name}: PASS")


class TestKinematicsOracle:
    def test_fifty_mixed_noise_videos_within_tolerance(self):
        cfg = AnalysisConfig(instability_mode="displacement")
        specs = synth.default_corpus(50, seed=20260810)
        start = time.monotonic()
        for i, spec in enumerate(specs):
            video = synth.generate_video(spec)
            report = pipeline.analyze_streams(
                video.masks_jsonl, video.detections_jsonl, video.phase_csv, cfg
            )
            truth = video.ground_truth
            assert abs(report.t_u_frames - truth.t_u_true) <= 8, f"video {i}: unfolding"
            assert abs(report.rotation_deg - truth.r_true) <= max(
                2.0, 0.05 * truth.r_true
            ), f"video {i}: rotation"
            ins_true = truth.ins_true["displacement"]
            assert abs(report.instability_px - ins_true) <= 0.05 * ins_true, (
                f"video {i}: instability"
            )
        elapsed = time.monotonic() - start
        assert elapsed < 60.0, f"oracle suite took {elapsed:.1f}s"
        _ok(f"kinematics oracle (50 videos, {elapsed:.1f}s)")


class TestZeroNoiseExactness:
    def test_static_unfolded_lens_exact_zeros(self):
        spec = synth.SynthSpec(
            seed=11,
            n_frames=150 + 120,
            implantation_clip_range=(1, 1),
            unfold=synth.UnfoldCurve(plateau=0, settle=0.0),
            drift_path=((0, (3.0, -2.0)),),
            orientation_path=((0, 40.0),),
            phase_jitter=0.0,
        )
        video = synth.generate_video(spec)
        report = pipeline.analyze_streams(
            video.masks_jsonl, video.detections_jsonl, video.phase_csv
        )
        assert report.t_u_frames == 0
        assert report.instability_px == 0.0
        assert report.rotation_deg == 0.0
        _ok("zero-noise static lens -> (t_u, ins, rot) == (0, 0, 0)")

    def test_noiseless_unfolding_recovers_t_u_exactly(self):
        # area rises strictly until the final frame; the raw-edge rule of the
        # mean filter puts the first maximum exactly at the plateau frame
        n_post = 140
        spec = synth.SynthSpec(
            seed=12,
            n_frames=150 + n_post,
            implantation_clip_range=(1, 1),
            unfold=synth.UnfoldCurve(
                initial_fraction=0.3,
                midpoint=70,
                steepness=0.07,
                plateau=n_post - 1,
                settle=0.0,
            ),
            drift_path=((0, (0.0, 0.0)),),
            orientation_path=((0, 15.0),),
            phase_jitter=0.0,
        )
        video = synth.generate_video(spec)
        report = pipeline.analyze_streams(
            video.masks_jsonl, video.detections_jsonl, video.phase_csv
        )
        assert video.ground_truth.t_u_true == n_post - 1
        assert report.t_u_frames == video.ground_truth.t_u_true
        _ok("zero-noise unfolding -> t_u exactly t_u_true")


class TestConvexRefinement:
    def test_wedge_occluded_disks(self):
        rng = np.random.default_rng(4242)
        size = 110
        for case in range(20):
            r = float(rng.uniform(16, 40))
            cx = float(rng.uniform(r + 4, size - r - 4))
            cy = float(rng.uniform(r + 4, size - r - 4))
            fraction = float(rng.uniform(0.05, 0.20))
            angle = float(rng.uniform(0, 2 * math.pi))
            depth = 0.85

            ys, xs = np.mgrid[0:size, 0:size]
            d2 = (xs - cx) ** 2 + (ys - cy) ** 2
            disk = d2 <= r * r
            ang = np.arctan2(ys - cy, xs - cx) - angle
            ang = np.mod(ang + math.pi, 2 * math.pi) - math.pi
            half_width = math.pi * fraction / depth**2
            wedge = (d2 <= (depth * r) ** 2) & (np.abs(ang) <= half_width)
            occluded = disk & ~wedge
            removed = wedge.sum() / disk.sum()
            assert removed <= 0.21, "construction sanity"

            refined = geometry.refine_bitmap(occluded)
            area_err = abs(refined.sum() - disk.sum()) / disk.sum()
            assert area_err <= 0.03, f"case {case}: area error {area_err:.4f}"
            rx, ry = geometry.mask_centroid(refined)
            dx, dy = geometry.mask_centroid(disk)
            assert math.hypot(rx - dx, ry - dy) <= 1.0, f"case {case}: centroid"
        _ok("convex refinement on 20 wedge-occluded disks (<=3% area, <=1px centroid)")


class TestHookScenarios:
    def test_scenario_1_passthrough(self):
        for dets in ([], [_hook(0, 50, 50, 0.7)]):
            sel = hookpose.select_hooks(dets, (40.0, 40.0), frame_index=0)
            assert sel.scenario == "zero_or_one"
            assert len(sel.kept_hooks) == len(dets)
            for d, kept in zip(dets, sel.kept_hooks):
                assert kept == (d.center, d.confidence)
        _ok("hook scenario 1 passthrough")

    def test_scenario_2_opposition_boundary(self):
        center = (200.0, 200.0)
        for offset, expected in ((150.0, 2), (210.0, 2), (149.0, 1), (211.0, 1), (180.0, 2)):
            h2 = (
                200.0 + 100 * math.cos(math.radians(offset)),
                200.0 + 100 * math.sin(math.radians(offset)),
            )
            dets = [_hook(0, 300.0, 200.0, 0.9), _hook(0, h2[0], h2[1], 0.8)]
            sel = hookpose.select_hooks(dets, center)
            assert len(sel.kept_hooks) == expected, f"angle {offset}"
            if expected == 1:
                assert sel.kept_hooks[0][1] == 0.9
        _ok("hook scenario 2 keep/drop at the 180+-30 degree boundary")

    def test_scenario_3_clustering_matches_exhaustive(self):
        rng = np.random.default_rng(77)
        for case in range(1000):
            n = int(rng.integers(3, 9))
            pts = [(float(x), float(y)) for x, y in rng.uniform(0, 120, (n, 2))]
            ia, ib = hookpose.cluster_two_indices(pts)
            mine = _max_diam(pts, ia, ib)
            best = min(
                _max_diam(pts, part_a, part_b)
                for part_a, part_b in _all_two_partitions(n)
            )
            assert mine == best, f"case {case}"
        _ok("hook scenario 3 clustering == brute-force min-max-diameter (1000 cases)")


class TestStatisticsOracles:
    def test_match_reference_within_1e6(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            m = int(rng.integers(3, 120))
            x = rng.normal(size=m)
            y = rng.normal(size=m) + rng.uniform(-1, 1) * x
            r = stats.pearson(x, y)
            ref_r, ref_p = scipy.stats.pearsonr(x, y)
            assert abs(r - ref_r) <= 1e-6
            assert abs(stats.pearson_pvalue(r, m) - ref_p) <= 1e-6
            res = stats.ttest(x, y)
            ref = scipy.stats.ttest_ind(x, y, equal_var=True)
            assert abs(res.statistic - ref.statistic) <= 1e-6
            assert abs(res.pvalue - ref.pvalue) <= 1e-6
            t = float(rng.uniform(-50, 50))
            dof = int(rng.integers(1, 1001))
            assert abs(stats.student_t_sf(t, dof) - scipy.stats.t.sf(t, dof)) <= 1e-6
        assert stats.pearson_pvalue(0.0, 30) == 1.0
        assert stats.ttest([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]).statistic == 0.0
        _ok("statistics oracles within 1e-6 of reference (1000 instances)")


class TestStudyDiscrimination:
    def test_separated_brands_detected(self, tmp_path):
        groups = [
            synth.BrandGroupSpec(
                "brand_a", 20, seed=501, rotation_mean_deg=5.0, rotation_std_deg=3.0
            ),
            synth.BrandGroupSpec(
                "brand_b", 20, seed=502, rotation_mean_deg=25.0, rotation_std_deg=3.0
            ),
        ]
        synth.generate_study(groups, tmp_path / "study")
        manifest = pipeline.StudyManifest.from_json(tmp_path / "study" / "manifest.json")
        outcome = pipeline.run_study(
            manifest, AnalysisConfig(instability_mode="displacement")
        )
        p = outcome.result.ttest_pvalues["rotation"]["brand_a"]["brand_b"]
        assert p < 0.01, f"rotation p = {p}"
        _ok(f"study discrimination: 5 vs 25 deg rotation p = {p:.2e} < 0.01")

    def test_null_pvalues_uniform(self):
        rng = np.random.default_rng(99)
        pvalues = []
        for _ in range(200):
            x = rng.normal(10.0, 3.0, 20)
            y = rng.normal(10.0, 3.0, 20)
            pvalues.append(stats.ttest(x, y).pvalue)
        ks = scipy.stats.kstest(pvalues, "uniform")
        assert ks.pvalue > 0.01, f"KS p = {ks.pvalue}"
        _ok(f"null t-test p-values uniform (KS p = {ks.pvalue:.3f} > 0.01)")


class TestMetricIdentities:
    def test_iou_dice_inequality_and_exact_cases(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            a = rng.random((10, 10)) < rng.uniform(0.1, 0.7)
            b = rng.random((10, 10)) < rng.uniform(0.1, 0.7)
            assert evalmetrics.mask_iou(a, b) <= evalmetrics.mask_dice(a, b) + 1e-12
        bar_a = np.array([[True, True, False]])
        bar_b = np.array([[False, True, True]])
        assert evalmetrics.mask_iou(bar_a, bar_b) == pytest.approx(1 / 3)
        assert evalmetrics.mask_dice(bar_a, bar_b) == pytest.approx(1 / 2)
        gt = [_hook(0, 20.0, 20.0, 1.0)]
        dets = [_hook(0, 90.0, 90.0, 0.95), _hook(0, 20.0, 20.0, 0.9)]
        assert evalmetrics.average_precision_at_iou(dets, gt) == pytest.approx(0.5)
        _ok("metric identities: IoU<=Dice x1000, bars exact, two-detection AP == 0.5")


class TestFormatRoundTrips:
    def test_rle_identity_on_1000_random_bitmaps(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            w = int(rng.integers(1, 24))
            h = int(rng.integers(1, 24))
            bitmap = rng.random((h, w)) < rng.uniform(0, 1)
            rle = ingest.encode_rle(bitmap, w, h)
            assert (ingest.decode_rle(rle, w, h) == bitmap).all()
        _ok("RLE encode/decode identity on 1000 random bitmaps")

    def test_parse_serialize_byte_identity_on_canonical_files(self, sample_video):
        masks = ingest.parse_mask_stream(sample_video.masks_jsonl)
        assert ingest.serialize_mask_sequences(masks) == sample_video.masks_jsonl
        dets = ingest.parse_detection_stream(sample_video.detections_jsonl)
        assert ingest.serialize_detections(dets) == sample_video.detections_jsonl
        series = ingest.parse_phase_series(sample_video.phase_csv)
        assert ingest.serialize_phase_series(series) == sample_video.phase_csv
        _ok("parse -> serialize byte identity on canonical files")


class TestPhaseLocalization:
    def test_single_positive_block_exact(self):
        probs = [0.1] * 75 + [0.9] * 150 + [0.1] * 150
        series = ingest.PhaseProbSeries(entries=tuple(enumerate(probs)))
        labeling = phase.classify_clips(series, threshold=0.5)
        interval = phase.locate_implantation_interval(labeling.labels)
        assert (interval.first_clip, interval.last_clip) == (1, 2)
        assert interval.post_implantation_start_frame == 225
        _ok("phase localization exact on constructed positive block")

    def test_start_frame_always_multiple_of_75(self):
        rng = np.random.default_rng(8)
        checked = 0
        for _ in range(300):
            labels = rng.random(int(rng.integers(1, 30))) < 0.4
            if not labels.any():
                continue
            interval = phase.locate_implantation_interval(labels.tolist())
            assert interval.post_implantation_start_frame % 75 == 0
            checked += 1
        assert checked > 100
        _ok("post-implantation start frame always == 0 mod 75")


def _hook(frame, cx, cy, conf, cls="hook"):
    return ingest.DetectionRecord(
        frame_index=frame,
        class_label=cls,
        bbox=(cx - 1.5, cy - 1.5, 3.0, 3.0),
        confidence=conf,
    )


def _max_diam(pts, a, b):
    return max(
        (
            (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
            for part in (a, b)
            for i, j in itertools.combinations(part, 2)
        ),
        default=0.0,
    )


def _all_two_partitions(n):
    for bits in range(2 ** (n - 1)):
        a = [0] + [i for i in range(1, n) if not (bits >> (i - 1)) & 1]
        b = [i for i in range(1, n) if (bits >> (i - 1)) & 1]
        yield a, b

import json

import pytest
from fastapi.testclient import TestClient

from iolens import synth
from iolens.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_health(self, client):
        res = client.get("/health")
        assert res.status_code == 200
        body = res.json()
        assert body["status"] == "ok"
        assert "version" in body


class TestAnalyze:
    def test_inline_streams(self, client, sample_video):
        res = client.post(
            "/analyze",
            json={
                "masks": sample_video.masks_jsonl,
                "detections": sample_video.detections_jsonl,
                "phase": sample_video.phase_csv,
                "config": {"instability_mode": "displacement"},
            },
        )
        assert res.status_code == 200
        body = res.json()
        assert body["report"]["instability_mode"] == "displacement"
        assert body["report"]["t_u_frames"] >= 0
        assert body["config"]["conf_threshold"] == 0.6

    def test_path_variant(self, client, sample_video, tmp_path):
        paths = sample_video.write(tmp_path / "v")
        res = client.post(
            "/analyze",
            json={
                "masks_path": paths["masks"],
                "detections_path": paths["detections"],
                "phase_path": paths["phase"],
            },
        )
        assert res.status_code == 200

    def test_mixed_sources_rejected(self, client, sample_video):
        res = client.post(
            "/analyze",
            json={
                "masks": sample_video.masks_jsonl,
                "masks_path": "also.jsonl",
                "detections": sample_video.detections_jsonl,
                "phase": sample_video.phase_csv,
            },
        )
        assert res.status_code == 422

    def test_unknown_config_key(self, client, sample_video):
        res = client.post(
            "/analyze",
            json={
                "masks": sample_video.masks_jsonl,
                "detections": sample_video.detections_jsonl,
                "phase": sample_video.phase_csv,
                "config": {"not_a_key": 1},
            },
        )
        assert res.status_code == 422

    def test_domain_error_carries_stage(self, client, sample_video):
        flat = "frame,prob\n" + "".join(f"{i},0.05\n" for i in range(340))
        res = client.post(
            "/analyze",
            json={
                "masks": sample_video.masks_jsonl,
                "detections": sample_video.detections_jsonl,
                "phase": flat,
            },
        )
        assert res.status_code == 422
        detail = res.json()["detail"]
        assert detail["stage"] == "phase"
        assert detail["error"] == "NoImplantationDetected"


class TestSynthAndStudy:
    def test_synth_video_endpoint(self, client, tmp_path):
        spec = synth.SynthSpec(
            seed=5,
            n_frames=150 + 100,
            implantation_clip_range=(1, 1),
            unfold=synth.UnfoldCurve(plateau=30, midpoint=10, steepness=0.1, settle=0.1),
        )
        res = client.post(
            "/synth", json={"spec": spec.to_dict(), "out_dir": str(tmp_path / "video")}
        )
        assert res.status_code == 200
        body = res.json()
        assert body["ground_truth"]["t_u_true"] == 30
        assert (tmp_path / "video" / "masks.jsonl").exists()

    def test_synth_study_and_run_study(self, client, tmp_path):
        groups = [
            {"name": "a", "n_videos": 4, "seed": 1, "rotation_mean_deg": 8, "rotation_std_deg": 2},
            {"name": "b", "n_videos": 4, "seed": 2, "rotation_mean_deg": 30, "rotation_std_deg": 2},
        ]
        res = client.post(
            "/synth/study", json={"groups": groups, "out_dir": str(tmp_path / "study")}
        )
        assert res.status_code == 200
        manifest_path = res.json()["manifest_path"]

        res = client.post("/study", json={"manifest_path": manifest_path})
        assert res.status_code == 200
        body = res.json()
        assert body["study"]["brands"] == ["a", "b"]
        csv_lines = body["boxplots_csv"].strip().splitlines()
        assert csv_lines[0].startswith("brand,metric,")
        assert len(csv_lines) == 1 + 2 * 3
        assert body["study"]["ttest_pvalues"]["rotation"]["a"]["b"] < 0.05

    def test_study_manifest_inline(self, client, tmp_path):
        groups = [
            {"name": "x", "n_videos": 3, "seed": 5, "rotation_mean_deg": 10, "rotation_std_deg": 2},
            {"name": "y", "n_videos": 3, "seed": 6, "rotation_mean_deg": 12, "rotation_std_deg": 2},
        ]
        client.post("/synth/study", json={"groups": groups, "out_dir": str(tmp_path / "s2")})
        manifest = json.loads((tmp_path / "s2" / "manifest.json").read_text())
        res = client.post(
            "/study", json={"manifest": manifest, "base_dir": str(tmp_path / "s2")}
        )
        assert res.status_code == 200


class TestEval:
    def test_mask_eval(self, client, sample_video):
        res = client.post(
            "/eval", json={"pred": sample_video.masks_jsonl, "gt": sample_video.masks_jsonl}
        )
        assert res.status_code == 200
        assert res.json()["classes"]["lens"]["mean_iou"] == 1.0

    def test_detection_eval(self, client, sample_video):
        res = client.post(
            "/eval",
            json={
                "pred": sample_video.detections_jsonl,
                "gt": sample_video.detections_jsonl,
                "kind": "detections",
            },
        )
        assert res.status_code == 200
        assert res.json()["map"] == 1.0

"""HTTP service exposing the analysis pipeline.

The service is the integration surface: clients post stream contents (or
server-local paths) and receive report/study JSON. The CLI is a thin client
of these endpoints.

Endpoints:
* GET  /health          liveness and version
* POST /analyze         one video -> kinematics report
* POST /study           manifest of brands -> study statistics
* POST /synth           synthetic video spec -> files + ground truth
* POST /synth/study     brand group specs -> study directory + manifest
* POST /eval            prediction vs ground-truth streams -> metrics
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import __version__, pipeline, stats, synth
from .config import AnalysisConfig
from .errors import IolensError, PipelineStageError


class AnalyzeRequest(BaseModel):
    """One video: inline stream contents or server-local paths (one of each)."""

    masks: str | None = None
    detections: str | None = None
    phase: str | None = None
    masks_path: str | None = None
    detections_path: str | None = None
    phase_path: str | None = None
    config: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_sources(self):
        for inline, path in (
            (self.masks, self.masks_path),
            (self.detections, self.detections_path),
            (self.phase, self.phase_path),
        ):
            if (inline is None) == (path is None):
                raise ValueError("provide exactly one of inline content and _path per stream")
        return self


class VideoReportModel(BaseModel):
    t_u_frames: int
    t_u_seconds: float
    instability_px: float
    rotation_deg: float
    coverage: float
    instability_mode: str
    n_frames: int
    start_frame: int
    warnings: list[str]


class AnalyzeResponse(BaseModel):
    report: VideoReportModel
    config: dict


class StudyRequest(BaseModel):
    manifest_path: str | None = None
    manifest: dict | None = None
    base_dir: str | None = None
    config: dict = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_sources(self):
        if (self.manifest_path is None) == (self.manifest is None):
            raise ValueError("provide exactly one of manifest_path and manifest")
        return self


class SynthRequest(BaseModel):
    spec: dict
    out_dir: str


class SynthStudyRequest(BaseModel):
    groups: list[dict]
    out_dir: str


class EvalRequest(BaseModel):
    pred: str | None = None
    gt: str | None = None
    pred_path: str | None = None
    gt_path: str | None = None
    kind: str | None = None

    @model_validator(mode="after")
    def _check_sources(self):
        if (self.pred is None) == (self.pred_path is None):
            raise ValueError("provide exactly one of pred and pred_path")
        if (self.gt is None) == (self.gt_path is None):
            raise ValueError("provide exactly one of gt and gt_path")
        return self


def create_app() -> FastAPI:
    app = FastAPI(title="iolens", version=__version__)

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest):
        cfg = _config(req.config)
        masks = req.masks if req.masks is not None else _read(req.masks_path)
        dets = req.detections if req.detections is not None else _read(req.detections_path)
        phase_text = req.phase if req.phase is not None else _read(req.phase_path)
        report = _run(lambda: pipeline.analyze_streams(masks, dets, phase_text, cfg))
        return {"report": report.to_dict(), "config": cfg.to_dict()}

    @app.post("/study")
    def study(req: StudyRequest):
        cfg = _config(req.config)
        if req.manifest_path is not None:
            manifest = _run(lambda: pipeline.StudyManifest.from_json(req.manifest_path))
        else:
            base = Path(req.base_dir or ".")
            manifest = _run(lambda: _manifest_from_dict(req.manifest, base))
        outcome = _run(lambda: pipeline.run_study(manifest, cfg))
        payload = outcome.to_dict()
        payload["boxplots_csv"] = stats.boxplots_to_csv(outcome.result)
        return payload

    @app.post("/synth")
    def synth_video(req: SynthRequest):
        spec = _run(lambda: synth.SynthSpec.from_dict(req.spec))
        video = _run(lambda: synth.generate_video(spec))
        paths = video.write(req.out_dir)
        return {
            "files": paths,
            "ground_truth": video.ground_truth.to_dict(),
        }

    @app.post("/synth/study")
    def synth_study(req: SynthStudyRequest):
        groups = [synth.BrandGroupSpec(**g) for g in req.groups]
        manifest = _run(lambda: synth.generate_study(groups, req.out_dir))
        return {
            "manifest_path": str(Path(req.out_dir) / "manifest.json"),
            "manifest": manifest,
        }

    @app.post("/eval")
    def evaluate(req: EvalRequest):
        pred = req.pred if req.pred is not None else _read(req.pred_path)
        gt = req.gt if req.gt is not None else _read(req.gt_path)
        return _run(lambda: pipeline.evaluate_streams(pred, gt, req.kind))

    return app


def _config(obj: dict) -> AnalysisConfig:
    try:
        return AnalysisConfig.from_mapping(obj)
    except IolensError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc)) from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise HTTPException(status_code=422, detail={"error": "IOError", "message": str(exc)})


def _run(fn):
    try:
        return fn()
    except (IolensError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc)) from exc


def _error_detail(exc: Exception) -> dict:
    detail = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, PipelineStageError):
        detail["stage"] = exc.stage
        detail["error"] = type(exc.cause).__name__
    return detail


def _manifest_from_dict(data: dict, base: Path) -> "pipeline.StudyManifest":
    brands = {}
    for name, entries in data["brands"].items():
        videos = []
        for i, e in enumerate(entries):
            videos.append(
                pipeline.VideoInputs(
                    masks=base / e["masks"],
                    detections=base / e["detections"],
                    phase=base / e["phase"],
                    name=e.get("name", f"{name}/{i}"),
                )
            )
        brands[name] = videos
    return pipeline.StudyManifest(brands=brands)


app = create_app()

"""Per-video orchestration and the batch study driver.

run_video executes the full chain for one video: locate the implantation
interval from the phase probabilities, build the refined mask track from the
post-implantation frames, estimate per-frame lens orientation from hook
detections, and assemble the kinematics report. run_study does that for
every video of every brand and feeds the per-brand vectors into the
statistical study. A failing video never aborts a study; it is recorded with
the stage that failed.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import evalmetrics, hookpose, ingest, kinematics, phase, stats
from .config import AnalysisConfig
from .errors import EmptySequence, InsufficientBrands, IolensError, PipelineStageError
from .geometry import build_track
from .kinematics import VideoReport


@dataclass(frozen=True)
class VideoInputs:
    """Paths to the three interchange streams of one video."""

    masks: str | Path
    detections: str | Path
    phase: str | Path
    name: str = ""


@dataclass(frozen=True)
class StudyManifest:
    """Brand name to list of VideoInputs."""

    brands: dict

    def __post_init__(self):
        if len(self.brands) < 2:
            raise InsufficientBrands(f"manifest has {len(self.brands)} brand(s), needs >= 2")

    @classmethod
    def from_json(cls, path: str | Path) -> "StudyManifest":
        path = Path(path)
        data = json.loads(path.read_text())
        base = path.parent
        brands = {}
        for name, entries in data["brands"].items():
            videos = []
            for i, e in enumerate(entries):
                videos.append(
                    VideoInputs(
                        masks=base / e["masks"],
                        detections=base / e["detections"],
                        phase=base / e["phase"],
                        name=e.get("name", f"{name}/{i}"),
                    )
                )
            brands[name] = videos
        return cls(brands=brands)


@dataclass(frozen=True)
class VideoFailure:
    brand: str
    index: int
    name: str
    stage: str
    error: str

    def to_dict(self) -> dict:
        return {
            "brand": self.brand,
            "index": self.index,
            "name": self.name,
            "stage": self.stage,
            "error": self.error,
        }


@dataclass(frozen=True)
class StudyOutcome:
    """Study statistics plus per-video reports, failures, and exclusions."""

    result: stats.StudyResult
    reports: dict
    failures: tuple[VideoFailure, ...]
    excluded_brands: tuple[str, ...]
    config: AnalysisConfig = field(default_factory=AnalysisConfig)

    def to_dict(self) -> dict:
        return {
            "study": self.result.to_dict(),
            "reports": {
                brand: [r.to_dict() if r is not None else None for r in reports]
                for brand, reports in self.reports.items()
            },
            "failures": [f.to_dict() for f in self.failures],
            "excluded_brands": list(self.excluded_brands),
            "config": self.config.to_dict(),
        }


def analyze_streams(
    masks_text: str,
    detections_text: str,
    phase_text: str,
    config: AnalysisConfig | None = None,
) -> VideoReport:
    """Run the full per-video analysis on in-memory stream contents."""
    cfg = config or AnalysisConfig()

    with _stage("ingest"):
        mask_seqs = ingest.parse_mask_stream(masks_text)
        detections = ingest.parse_detection_stream(detections_text)
        phase_series = ingest.parse_phase_series(phase_text)

    with _stage("phase"):
        labeling = phase.classify_clips(phase_series, cfg.phase_threshold)
        interval = phase.locate_implantation_interval(labeling.labels)
        start = interval.post_implantation_start_frame

    with _stage("geometry"):
        if "lens" not in mask_seqs or "pupil" not in mask_seqs:
            missing = {"lens", "pupil"} - set(mask_seqs)
            raise EmptySequence(f"mask stream lacks classes: {sorted(missing)}")
        track = build_track(mask_seqs["lens"], mask_seqs["pupil"], start)

    with _stage("hookpose"):
        orientations = _orientation_samples(detections, track, start, cfg)

    with _stage("kinematics"):
        report = kinematics.compute_report(
            track,
            orientations,
            start_frame=start,
            instability_mode=cfg.instability_mode,
            smooth_window=cfg.smooth_window,
            coverage_min=cfg.coverage_min,
        )
    return report


def run_video(inputs: VideoInputs, config: AnalysisConfig | None = None) -> VideoReport:
    """Analyze one video from files on disk."""
    with _stage("ingest"):
        masks_text = Path(inputs.masks).read_text()
        detections_text = Path(inputs.detections).read_text()
        phase_text = Path(inputs.phase).read_text()
    return analyze_streams(masks_text, detections_text, phase_text, config)


def run_study(manifest: StudyManifest, config: AnalysisConfig | None = None) -> StudyOutcome:
    """Analyze every video of every brand and run the cross-brand statistics.

    Per-video failures are recorded, not fatal. Brands with fewer than three
    usable videos are excluded; fewer than two usable brands is an error.
    """
    cfg = config or AnalysisConfig()
    jobs = [
        (brand, i, inputs)
        for brand, videos in sorted(manifest.brands.items())
        for i, inputs in enumerate(videos)
    ]

    def _one(job):
        brand, i, inputs = job
        try:
            return brand, i, run_video(inputs, cfg), None
        except PipelineStageError as exc:
            failure = VideoFailure(
                brand=brand, index=i, name=inputs.name, stage=exc.stage, error=str(exc.cause)
            )
            return brand, i, None, failure

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(job) for job in jobs]

    reports: dict = {brand: [None] * len(videos) for brand, videos in manifest.brands.items()}
    failures: list[VideoFailure] = []
    for brand, i, report, failure in results:
        reports[brand][i] = report
        if failure is not None:
            failures.append(failure)

    samples = []
    excluded = []
    for brand in sorted(manifest.brands):
        usable = [r for r in reports[brand] if r is not None]
        if len(usable) < 3:
            excluded.append(brand)
            continue
        samples.append(
            stats.BrandSample(
                brand=brand,
                unfolding=tuple(r.t_u_seconds for r in usable),
                instability=tuple(r.instability_px for r in usable),
                rotation=tuple(r.rotation_deg for r in usable),
            )
        )
    if len(samples) < 2:
        raise InsufficientBrands(
            f"only {len(samples)} brand(s) have >= 3 usable videos (excluded: {excluded})"
        )
    result = stats.run_study(samples, ttest_mode=cfg.ttest_mode)
    return StudyOutcome(
        result=result,
        reports=reports,
        failures=tuple(failures),
        excluded_brands=tuple(excluded),
        config=cfg,
    )


def evaluate_streams(pred_text: str, gt_text: str, kind: str | None = None) -> dict:
    """Compare prediction and ground-truth streams in the interchange formats.

    kind is sniffed from the records when not given: mask streams yield
    per-class IoU/Dice means, detection streams yield AP per class plus mAP
    and, when lens and hook boxes allow it, an orientation-error summary.
    """
    if kind is None:
        kind = _sniff_kind(gt_text)
    if kind == "masks":
        pred = ingest.parse_mask_stream(pred_text)
        gt = ingest.parse_mask_stream(gt_text)
        out = {"kind": "masks", "classes": {}}
        for label in sorted(gt):
            if label not in pred:
                out["classes"][label] = None
                continue
            pred_by_frame = {f.frame_index: f for f in pred[label].frames}
            ious, dices = [], []
            for g in gt[label].frames:
                p = pred_by_frame.get(g.frame_index)
                if p is None:
                    continue
                ious.append(evalmetrics.mask_iou(p, g))
                dices.append(evalmetrics.mask_dice(p, g))
            out["classes"][label] = {
                "n_frames": len(ious),
                "mean_iou": sum(ious) / len(ious) if ious else None,
                "mean_dice": sum(dices) / len(dices) if dices else None,
            }
        return out
    if kind == "detections":
        pred = ingest.parse_detection_stream(pred_text)
        gt = ingest.parse_detection_stream(gt_text)
        out = {"kind": "detections"}
        out.update(evalmetrics.map_at_iou(pred, gt, iou_thresh=0.5))
        orient = _orientation_errors(pred, gt)
        out["orientation_error"] = orient.to_dict() if orient is not None else None
        return out
    raise ValueError(f"unknown eval kind {kind!r}")


def _orientation_samples(detections, track, start, cfg: AnalysisConfig):
    """Per-frame orientation from confidence-filtered detections.

    The lens center comes from the lens box of the same frame when present,
    then from the refined lens mask centroid, then from the last known center.
    """
    filtered = hookpose.filter_by_confidence(detections, cfg.conf_threshold)
    dets_by_frame: dict[int, list] = {}
    for d in filtered:
        dets_by_frame.setdefault(d.frame_index, []).append(d)
    centers_by_frame = {g.frame_index: g.lens_center for g in track}
    last_frame = track[-1].frame_index

    samples = []
    prev_center = None
    for idx in range(start, last_frame + 1):
        frame_dets = dets_by_frame.get(idx, [])
        lens_dets = [d for d in frame_dets if d.class_label == "lens"]
        if lens_dets:
            center = max(lens_dets, key=lambda d: d.confidence).center
        elif idx in centers_by_frame:
            center = centers_by_frame[idx]
        else:
            center = prev_center
        if center is None:
            continue
        prev_center = center
        hooks = [d for d in frame_dets if d.class_label == "hook"]
        if not hooks:
            continue
        selection = hookpose.select_hooks(
            hooks, center, opposition_tol_deg=cfg.opposition_tol_deg, frame_index=idx
        )
        sample = hookpose.orientation(selection, center)
        if sample is not None:
            samples.append(sample)
    return samples


def _orientation_errors(pred, gt):
    cfg = AnalysisConfig()
    pred_angles = _angles_by_frame(pred, cfg)
    gt_angles = _angles_by_frame(gt, cfg)
    common = sorted(pred_angles.keys() & gt_angles.keys())
    if not common:
        return None
    return evalmetrics.orientation_error_summary(
        [pred_angles[i] for i in common], [gt_angles[i] for i in common]
    )


def _angles_by_frame(dets, cfg: AnalysisConfig) -> dict[int, float]:
    filtered = hookpose.filter_by_confidence(dets, cfg.conf_threshold)
    by_frame: dict[int, list] = {}
    for d in filtered:
        by_frame.setdefault(d.frame_index, []).append(d)
    angles = {}
    prev_center = None
    for idx in sorted(by_frame):
        frame_dets = by_frame[idx]
        lens_dets = [d for d in frame_dets if d.class_label == "lens"]
        center = max(lens_dets, key=lambda d: d.confidence).center if lens_dets else prev_center
        if center is None:
            continue
        prev_center = center
        hooks = [d for d in frame_dets if d.class_label == "hook"]
        if not hooks:
            continue
        selection = hookpose.select_hooks(
            hooks, center, opposition_tol_deg=cfg.opposition_tol_deg, frame_index=idx
        )
        sample = hookpose.orientation(selection, center)
        if sample is not None:
            angles[idx] = sample.angle_deg
    return angles


def _sniff_kind(text: str) -> str:
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("frame,"):
            break
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            break
        if "rle" in obj:
            return "masks"
        if "bbox" in obj:
            return "detections"
        break
    raise ValueError("cannot determine stream kind; pass kind explicitly")


class _stage:
    """Context manager rewrapping any domain error with the stage name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (IolensError, OSError)):
            if isinstance(exc, PipelineStageError):
                return False
            raise PipelineStageError(self.name, exc) from exc
        return False

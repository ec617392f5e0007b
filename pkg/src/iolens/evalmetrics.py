"""Backend validation metrics: mask overlap, box AP, orientation error.

These metrics grade any segmentation or detection backend against ground
truth expressed in the same interchange formats the pipeline consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, LengthMismatch, NoGroundTruth
from .ingest import DetectionRecord, MaskFrame
from .kinematics import angular_diff

TOPK_LEVELS = (75, 50, 25)


@dataclass(frozen=True)
class OrientationErrorSummary:
    """Mean/std of angular errors plus means over the best k% of samples."""

    mean: float
    std: float
    topk_means: dict

    def __post_init__(self):
        prev = self.mean + 1e-9
        for k in TOPK_LEVELS:
            if self.topk_means[k] > prev + 1e-9:
                raise InvariantViolation("topk_means non-increasing as k shrinks")
            prev = self.topk_means[k]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "std": self.std,
            "topk_means": {str(k): v for k, v in self.topk_means.items()},
        }


def _as_array(mask) -> np.ndarray:
    return mask.decode() if isinstance(mask, MaskFrame) else np.asarray(mask, bool)


def mask_iou(a, b) -> float:
    """Intersection over union of two masks; both empty counts as 1.0."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise DimensionMismatch(f"{aa.shape} vs {bb.shape}")
    inter = float(np.logical_and(aa, bb).sum())
    union = float(np.logical_or(aa, bb).sum())
    return 1.0 if union == 0 else inter / union


def mask_dice(a, b) -> float:
    """Dice coefficient of two masks; both empty counts as 1.0."""
    aa, bb = _as_array(a), _as_array(b)
    if aa.shape != bb.shape:
        raise DimensionMismatch(f"{aa.shape} vs {bb.shape}")
    inter = float(np.logical_and(aa, bb).sum())
    total = float(aa.sum() + bb.sum())
    return 1.0 if total == 0 else 2.0 * inter / total


def box_iou(b1, b2) -> float:
    """IoU of two axis-aligned (x, y, w, h) boxes."""
    x1, y1, w1, h1 = (float(v) for v in b1)
    x2, y2, w2, h2 = (float(v) for v in b2)
    ix = max(0.0, min(x1 + w1, x2 + w2) - max(x1, x2))
    iy = max(0.0, min(y1 + h1, y2 + h2) - max(y1, y2))
    inter = ix * iy
    union = w1 * h1 + w2 * h2 - inter
    return 0.0 if union <= 0 else inter / union


def average_precision_at_iou(
    dets: list[DetectionRecord],
    gts: list[DetectionRecord],
    iou_thresh: float = 0.5,
) -> float:
    """Average precision for one class at a fixed box-IoU threshold.

    Detections are matched greedily in confidence-descending order, one
    detection per ground-truth box, and the precision-recall curve is
    integrated with all-points interpolation.
    """
    if not gts:
        raise NoGroundTruth("average precision needs at least one ground-truth box")
    if not dets:
        return 0.0
    gt_by_frame: dict[int, list[DetectionRecord]] = {}
    for g in gts:
        gt_by_frame.setdefault(g.frame_index, []).append(g)
    matched = {frame: [False] * len(boxes) for frame, boxes in gt_by_frame.items()}

    order = sorted(range(len(dets)), key=lambda i: -dets[i].confidence)
    tp = np.zeros(len(dets))
    fp = np.zeros(len(dets))
    for rank, i in enumerate(order):
        d = dets[i]
        best_iou, best_j = 0.0, -1
        for j, g in enumerate(gt_by_frame.get(d.frame_index, [])):
            if matched[d.frame_index][j]:
                continue
            iou = box_iou(d.bbox, g.bbox)
            if iou > best_iou:
                best_iou, best_j = iou, j
        if best_j >= 0 and best_iou >= iou_thresh:
            matched[d.frame_index][best_j] = True
            tp[rank] = 1
        else:
            fp[rank] = 1
    tp_cum = np.cumsum(tp)
    fp_cum = np.cumsum(fp)
    recalls = tp_cum / len(gts)
    precisions = tp_cum / (tp_cum + fp_cum)
    interp = np.maximum.accumulate(precisions[::-1])[::-1]
    ap = 0.0
    prev_r = 0.0
    for r, p in zip(recalls, interp):
        ap += (r - prev_r) * p
        prev_r = r
    return float(ap)


def map_at_iou(
    dets: list[DetectionRecord],
    gts: list[DetectionRecord],
    iou_thresh: float = 0.5,
) -> dict:
    """Mean AP over every class present in the ground truth."""
    classes = sorted({g.class_label for g in gts})
    if not classes:
        raise NoGroundTruth("no ground-truth boxes")
    per_class = {
        cls: average_precision_at_iou(
            [d for d in dets if d.class_label == cls],
            [g for g in gts if g.class_label == cls],
            iou_thresh,
        )
        for cls in classes
    }
    return {"per_class": per_class, "map": sum(per_class.values()) / len(per_class)}


def orientation_error_summary(pred_angles, true_angles) -> OrientationErrorSummary:
    """Axis-angle errors (period 180) with best-k% means for k in 75/50/25."""
    pred = list(pred_angles)
    true = list(true_angles)
    if len(pred) != len(true):
        raise LengthMismatch(f"{len(pred)} vs {len(true)}")
    if not pred:
        raise LengthMismatch("no samples")
    errors = sorted(angular_diff(p, t) for p, t in zip(pred, true))
    arr = np.asarray(errors)
    topk = {}
    for k in TOPK_LEVELS:
        count = max(1, math.floor(len(errors) * k / 100))
        topk[k] = float(arr[:count].mean())
    return OrientationErrorSummary(
        mean=float(arr.mean()), std=float(arr.std()), topk_means=topk
    )

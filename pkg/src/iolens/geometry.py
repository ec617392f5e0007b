"""Mask refinement and per-frame geometric measurements.

Instruments frequently occlude the lens and pupil, leaving dents in the
segmentation masks. Both objects are convex in practice, so each mask is
refined to the filled convex hull of its foreground pixels before centers
and areas are measured. Refinement is exact integer geometry: a pixel is
foreground in the refined mask iff its center lies inside or on the hull,
which makes the operation idempotent and a superset of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, EmptyMask, NoOverlap
from .ingest import MaskFrame, MaskSequence, decode_rle, encode_rle


@dataclass(frozen=True)
class FrameGeometry:
    """Measurements for one frame where both lens and pupil masks exist."""

    frame_index: int
    lens_center: tuple[float, float]
    pupil_center: tuple[float, float]
    lens_area: float
    pupil_area: float
    rel_pos: tuple[float, float]


def convex_refine(mask: MaskFrame) -> MaskFrame:
    """Replace the mask foreground with its filled convex hull."""
    arr = mask.decode()
    refined = refine_bitmap(arr)
    return MaskFrame(
        frame_index=mask.frame_index,
        class_label=mask.class_label,
        width=mask.width,
        height=mask.height,
        rle=tuple(encode_rle(refined, mask.width, mask.height)),
    )


def refine_bitmap(arr: np.ndarray) -> np.ndarray:
    """Filled convex hull of a boolean bitmap's foreground pixels."""
    if not arr.any():
        raise EmptyMask("cannot refine an empty mask")
    hull = _convex_hull(_row_extremes(arr))
    return _fill_hull(hull, arr.shape[1], arr.shape[0])


def mask_centroid(mask: MaskFrame | np.ndarray) -> tuple[float, float]:
    """Mean (x, y) of foreground pixel coordinates."""
    arr = mask.decode() if isinstance(mask, MaskFrame) else np.asarray(mask, bool)
    ys, xs = np.nonzero(arr)
    if xs.size == 0:
        raise EmptyMask("centroid of an empty mask")
    return (float(xs.mean()), float(ys.mean()))


def mask_area(mask: MaskFrame | np.ndarray) -> float:
    """Foreground pixel count."""
    arr = mask.decode() if isinstance(mask, MaskFrame) else np.asarray(mask, bool)
    return float(arr.sum())


def relative_position(lens_mask: MaskFrame, pupil_mask: MaskFrame) -> tuple[float, float]:
    """Lens centroid minus pupil centroid, in pixels."""
    if (lens_mask.width, lens_mask.height) != (pupil_mask.width, pupil_mask.height):
        raise DimensionMismatch(
            f"lens {lens_mask.width}x{lens_mask.height} vs "
            f"pupil {pupil_mask.width}x{pupil_mask.height}"
        )
    lx, ly = mask_centroid(lens_mask)
    px, py = mask_centroid(pupil_mask)
    return (lx - px, ly - py)


def build_track(
    lens_seq: MaskSequence,
    pupil_seq: MaskSequence,
    start_frame: int,
) -> list[FrameGeometry]:
    """Per-frame geometry for frames >= start_frame present in both sequences.

    Each mask is convex-refined before measurement. Frames where either mask
    is empty contribute no entry; downstream difference sums skip the terms
    adjacent to such gaps.
    """
    lens_by_frame = {f.frame_index: f for f in lens_seq.frames}
    pupil_by_frame = {f.frame_index: f for f in pupil_seq.frames}
    common = sorted(
        idx for idx in lens_by_frame.keys() & pupil_by_frame.keys() if idx >= start_frame
    )
    if not common:
        raise NoOverlap(f"no common frames at or after {start_frame}")
    track: list[FrameGeometry] = []
    for idx in common:
        lens_f = lens_by_frame[idx]
        pupil_f = pupil_by_frame[idx]
        if (lens_f.width, lens_f.height) != (pupil_f.width, pupil_f.height):
            raise DimensionMismatch(f"frame {idx}: mask shapes differ")
        if _foreground_total(lens_f.rle) == 0 or _foreground_total(pupil_f.rle) == 0:
            continue
        lx, ly, la = _refined_stats(lens_f.rle, lens_f.width, lens_f.height)
        px, py, pa = _refined_stats(pupil_f.rle, pupil_f.width, pupil_f.height)
        track.append(
            FrameGeometry(
                frame_index=idx,
                lens_center=(lx, ly),
                pupil_center=(px, py),
                lens_area=la,
                pupil_area=pa,
                rel_pos=(lx - px, ly - py),
            )
        )
    if not track:
        raise NoOverlap(f"no frame at or after {start_frame} has both masks non-empty")
    return track


def _foreground_total(rle: tuple[int, ...]) -> int:
    return sum(rle[1::2])


@lru_cache(maxsize=256)
def _refined_stats(rle: tuple[int, ...], width: int, height: int) -> tuple[float, float, float]:
    """Centroid and area of the refined mask; cached because static objects
    (the pupil, typically) repeat the same RLE for many frames."""
    refined = refine_bitmap(decode_rle(rle, width, height))
    ys, xs = np.nonzero(refined)
    return (float(xs.mean()), float(ys.mean()), float(xs.size))


def _row_extremes(arr: np.ndarray) -> list[tuple[int, int]]:
    """Leftmost and rightmost foreground pixel of every occupied row.

    Every convex-hull vertex of the full pixel set is a row extreme, so the
    hull of these points equals the hull of all foreground pixels.
    """
    rows = np.flatnonzero(arr.any(axis=1))
    first = arr[rows].argmax(axis=1)
    last = arr.shape[1] - 1 - arr[rows, ::-1].argmax(axis=1)
    pts = []
    for y, lo, hi in zip(rows.tolist(), first.tolist(), last.tolist()):
        pts.append((lo, y))
        if hi != lo:
            pts.append((hi, y))
    return pts


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain convex hull, counterclockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all input points collinear
        return [pts[0], pts[-1]]
    return hull


def _fill_hull(hull: list[tuple[int, int]], width: int, height: int) -> np.ndarray:
    """Rasterize a convex polygon: pixel centers inside or on the boundary.

    Integer cross products keep the inclusion test exact, which is what makes
    refinement idempotent.
    """
    out = np.zeros((height, width), dtype=bool)
    if len(hull) == 1:
        x, y = hull[0]
        out[y, x] = True
        return out
    xs = np.array([p[0] for p in hull], dtype=np.int64)
    ys = np.array([p[1] for p in hull], dtype=np.int64)
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    px = np.arange(x0, x1 + 1, dtype=np.int64)[None, :]
    py = np.arange(y0, y1 + 1, dtype=np.int64)[:, None]
    if len(hull) == 2:
        (ax, ay), (bx, by) = hull
        on_line = (bx - ax) * (py - ay) - (by - ay) * (px - ax) == 0
        out[y0 : y1 + 1, x0 : x1 + 1] = on_line
        return out
    inside = np.ones((y1 - y0 + 1, x1 - x0 + 1), dtype=bool)
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        inside &= (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0
    out[y0 : y1 + 1, x0 : x1 + 1] = inside
    return out

"""Temporal lens statistics: unfolding delay, instability, rotation.

All three measurements run on the post-implantation window:

* unfolding delay: first index at which the mean-filtered visible lens area
  reaches its maximum;
* instability: accumulated absolute change of the lens position relative to
  the pupil center, summed over consecutive frames;
* rotation: accumulated absolute orientation change from the unfolding time
  onward, with differences reduced modulo 180 because the hook axis has no
  preferred direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptySeries,
    InvariantViolation,
    NoOrientationAfterUnfold,
    TooFewSamples,
)
from .geometry import FrameGeometry
from .hookpose import OrientationSample

DEFAULT_SMOOTH_WINDOW = 15
DEFAULT_FPS = 25.0

INSTABILITY_LITERAL = "literal"
INSTABILITY_DISPLACEMENT = "displacement"
INSTABILITY_MODES = (INSTABILITY_LITERAL, INSTABILITY_DISPLACEMENT)


@dataclass(frozen=True)
class AreaSeries:
    """Raw and mean-filtered lens areas."""

    values: tuple[float, ...]
    smoothed: tuple[float, ...]
    window: int = DEFAULT_SMOOTH_WINDOW

    def __post_init__(self):
        if len(self.values) != len(self.smoothed):
            raise InvariantViolation("len(smoothed) == len(values)")

    @classmethod
    def from_values(cls, values, window: int = DEFAULT_SMOOTH_WINDOW) -> "AreaSeries":
        vals = tuple(float(v) for v in values)
        return cls(values=vals, smoothed=tuple(smooth_area(vals, window)), window=window)


@dataclass(frozen=True)
class VideoReport:
    """Kinematics of one video, with the conventions used to compute them."""

    t_u_frames: int
    t_u_seconds: float
    instability_px: float
    rotation_deg: float
    n_frames: int
    coverage: float
    instability_mode: str = INSTABILITY_LITERAL
    start_frame: int = 0
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.t_u_frames < self.n_frames:
            raise InvariantViolation("t_u_frames < n_frames")
        if self.instability_px < 0:
            raise InvariantViolation("instability >= 0")
        if self.rotation_deg < 0:
            raise InvariantViolation("rotation >= 0")

    def to_dict(self) -> dict:
        return {
            "t_u_frames": self.t_u_frames,
            "t_u_seconds": self.t_u_seconds,
            "instability_px": self.instability_px,
            "rotation_deg": self.rotation_deg,
            "coverage": self.coverage,
            "instability_mode": self.instability_mode,
            "n_frames": self.n_frames,
            "start_frame": self.start_frame,
            "warnings": list(self.warnings),
        }


def smooth_area(values, window: int = DEFAULT_SMOOTH_WINDOW) -> np.ndarray:
    """Mean filter; positions where the full window does not fit keep raw values."""
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and positive, got {window}")
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size == 0:
        raise EmptySeries("area series is empty")
    out = vals.copy()
    if vals.size >= window:
        half = window // 2
        out[half : vals.size - half] = np.convolve(vals, np.ones(window), "valid") / window
    return out


def unfolding_time(smoothed) -> int:
    """Smallest index attaining the maximum of the smoothed series."""
    arr = np.asarray(smoothed, dtype=float)
    if arr.size == 0:
        raise EmptySeries("cannot take argmax of an empty series")
    return int(arr.argmax())


def instability(rel_positions, mode: str = INSTABILITY_LITERAL) -> float:
    """Accumulated absolute relative movement of the lens inside the pupil.

    literal mode sums | ||r_{i+1}|| - ||r_i|| | (change of center distance);
    displacement mode sums ||r_{i+1} - r_i|| (path length of the relative
    position). Both are zero for a perfectly stable lens.
    """
    if mode not in INSTABILITY_MODES:
        raise ValueError(f"unknown instability mode {mode!r}")
    pos = np.asarray(rel_positions, dtype=float).reshape(-1, 2)
    if pos.shape[0] < 2:
        raise TooFewSamples(f"instability needs >= 2 samples, got {pos.shape[0]}")
    if mode == INSTABILITY_LITERAL:
        norms = np.hypot(pos[:, 0], pos[:, 1])
        return float(np.abs(np.diff(norms)).sum())
    steps = np.diff(pos, axis=0)
    return float(np.hypot(steps[:, 0], steps[:, 1]).sum())


def angular_diff(a_deg: float, b_deg: float) -> float:
    """Smallest angle between two orientations of an undirected axis, in [0, 90]."""
    d = abs(a_deg - b_deg) % 180.0
    return min(d, 180.0 - d)


def rotation(orientations, t_u_index: int) -> float:
    """Sum of absolute orientation changes from the unfolding index onward.

    ``orientations`` is a sequence of (frame_index, angle_deg) pairs; frames
    with no sample are bridged, i.e. each valid sample is differenced against
    the next valid one.
    """
    samples = sorted((int(i), float(a)) for i, a in orientations)
    valid = [(i, a) for i, a in samples if i >= t_u_index]
    if not valid:
        raise NoOrientationAfterUnfold(f"no orientation sample at or after {t_u_index}")
    total = 0.0
    for (_, a), (_, b) in zip(valid, valid[1:]):
        total += angular_diff(a, b)
    return total


def compute_report(
    track: list[FrameGeometry],
    orientations: list[OrientationSample],
    start_frame: int,
    instability_mode: str = INSTABILITY_LITERAL,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    coverage_min: float = 0.3,
    fps: float = DEFAULT_FPS,
) -> VideoReport:
    """Assemble unfolding delay, instability, and rotation for one video.

    Frame gaps in the track (frames where a mask was empty or missing) drop
    the instability terms adjacent to the gap; orientation gaps are bridged.
    """
    if not track:
        raise EmptySeries("empty track")
    areas = AreaSeries.from_values([g.lens_area for g in track], smooth_window)
    t_pos = unfolding_time(areas.smoothed)
    t_u_abs = track[t_pos].frame_index
    t_u_frames = t_u_abs - start_frame
    n_frames = track[-1].frame_index - start_frame + 1

    if len(track) < 2:
        raise TooFewSamples("instability needs >= 2 track frames")
    ins = 0.0
    for run in _consecutive_runs(track):
        if len(run) >= 2:
            ins += instability([g.rel_pos for g in run], instability_mode)

    samples = [
        (s.frame_index, s.angle_deg)
        for s in orientations
        if start_frame <= s.frame_index <= track[-1].frame_index
    ]
    rot = rotation(samples, t_u_abs)
    coverage = len(samples) / n_frames

    warnings = []
    if coverage < coverage_min:
        warnings.append("low_coverage")
    return VideoReport(
        t_u_frames=t_u_frames,
        t_u_seconds=t_u_frames / fps,
        instability_px=ins,
        rotation_deg=rot,
        n_frames=n_frames,
        coverage=coverage,
        instability_mode=instability_mode,
        start_frame=start_frame,
        warnings=tuple(warnings),
    )


def _consecutive_runs(track: list[FrameGeometry]) -> list[list[FrameGeometry]]:
    runs: list[list[FrameGeometry]] = [[track[0]]]
    for prev, cur in zip(track, track[1:]):
        if cur.frame_index == prev.frame_index + 1:
            runs[-1].append(cur)
        else:
            runs.append([cur])
    return runs

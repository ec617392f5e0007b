"""Implantation-phase localization from per-frame phase probabilities.

Videos are scored in three-second clips (75 frames at 25 fps). Each clip is
split into five 15-frame subsequences; one frame per subsequence is sampled,
the five per-frame probabilities are averaged, and the mean is thresholded
into a clip label. The longest run of positive clips is the implantation
interval, and analysis starts at the first frame after it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityError,
    ClipTruncated,
    EmptySeries,
    InvariantViolation,
    NoImplantationDetected,
)
from .ingest import PhaseProbSeries

CLIP_LEN_FRAMES = 75
SUBSEQ_LEN = 15
SAMPLES_PER_CLIP = CLIP_LEN_FRAMES // SUBSEQ_LEN
UNIFORM_OFFSET = SUBSEQ_LEN // 2  # center frame of each 15-frame subsequence


@dataclass(frozen=True)
class ClipLabeling:
    """Per-clip probabilities and thresholded labels."""

    clip_probs: tuple[float, ...]
    labels: tuple[bool, ...]
    threshold: float
    clip_len_frames: int = CLIP_LEN_FRAMES

    def __post_init__(self):
        if len(self.labels) != len(self.clip_probs):
            raise InvariantViolation("len(labels) == len(clip_probs)")
        if not 0.0 < self.threshold < 1.0:
            raise InvariantViolation("threshold in (0, 1)", repr(self.threshold))
        for p, lab in zip(self.clip_probs, self.labels):
            if lab != (p >= self.threshold):
                raise InvariantViolation("labels[i] == (clip_probs[i] >= threshold)")


@dataclass(frozen=True)
class ImplantationInterval:
    """Clip range of the implantation phase and the first post-phase frame."""

    first_clip: int
    last_clip: int
    post_implantation_start_frame: int

    def __post_init__(self):
        if self.first_clip > self.last_clip:
            raise InvariantViolation("first_clip <= last_clip")
        expected = (self.last_clip + 1) * CLIP_LEN_FRAMES
        if self.post_implantation_start_frame != expected:
            raise InvariantViolation(
                "post_implantation_start_frame == (last_clip+1) * clip_len",
                f"got {self.post_implantation_start_frame}, expected {expected}",
            )


def sample_clip_frames(
    clip_start_frame: int,
    mode: str = "uniform",
    rng: np.random.Generator | None = None,
    n_frames: int | None = None,
) -> list[int]:
    """Pick one frame index per 15-frame subsequence of a 75-frame clip.

    Uniform mode takes the center of each subsequence (deterministic);
    stochastic mode draws uniformly within each subsequence and needs ``rng``.
    When ``n_frames`` is given and the clip does not fit, raises ClipTruncated.
    """
    if n_frames is not None and clip_start_frame + CLIP_LEN_FRAMES > n_frames:
        raise ClipTruncated(
            f"clip at {clip_start_frame} needs {CLIP_LEN_FRAMES} frames, "
            f"only {n_frames - clip_start_frame} remain"
        )
    starts = [clip_start_frame + k * SUBSEQ_LEN for k in range(SAMPLES_PER_CLIP)]
    if mode == "uniform":
        return [s + UNIFORM_OFFSET for s in starts]
    if mode == "stochastic":
        if rng is None:
            raise ValueError("stochastic sampling requires an rng")
        return [s + int(rng.integers(0, SUBSEQ_LEN)) for s in starts]
    raise ValueError(f"unknown sampling mode {mode!r}")


def aggregate_clip_probability(probs) -> float:
    """Mean of exactly five per-frame probabilities."""
    values = list(probs)
    if len(values) != SAMPLES_PER_CLIP:
        raise ArityError(f"expected {SAMPLES_PER_CLIP} probabilities, got {len(values)}")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise InvariantViolation("probabilities in [0, 1]")
    return float(sum(values) / SAMPLES_PER_CLIP)


def classify_clips(series: PhaseProbSeries, threshold: float = 0.5) -> ClipLabeling:
    """Label every full 75-frame clip via uniform sampling and thresholding.

    A sampled frame missing from the series falls back to the nearest frame
    present within the same subsequence (detectors may emit on a stride).
    The trailing partial clip, if any, is dropped.
    """
    if not series.entries:
        raise EmptySeries("no probability entries")
    by_frame = dict(series.entries)
    last_frame = series.entries[-1][0]
    n_clips = (last_frame + 1) // CLIP_LEN_FRAMES
    if n_clips == 0:
        raise EmptySeries(
            f"series ends at frame {last_frame}, shorter than one {CLIP_LEN_FRAMES}-frame clip"
        )
    probs = []
    for c in range(n_clips):
        sampled = sample_clip_frames(c * CLIP_LEN_FRAMES, mode="uniform")
        values = [_lookup(by_frame, idx) for idx in sampled]
        probs.append(aggregate_clip_probability(values))
    labels = tuple(p >= threshold for p in probs)
    return ClipLabeling(clip_probs=tuple(probs), labels=labels, threshold=threshold)


def locate_implantation_interval(labels) -> ImplantationInterval:
    """Longest consecutive run of positive labels; ties go to the earliest."""
    labels = list(labels)
    best_start, best_len = -1, 0
    run_start, run_len = -1, 0
    for i, lab in enumerate(labels):
        if lab:
            if run_len == 0:
                run_start = i
            run_len += 1
            if run_len > best_len:
                best_start, best_len = run_start, run_len
        else:
            run_len = 0
    if best_len == 0:
        raise NoImplantationDetected("all clip labels negative")
    last = best_start + best_len - 1
    return ImplantationInterval(
        first_clip=best_start,
        last_clip=last,
        post_implantation_start_frame=(last + 1) * CLIP_LEN_FRAMES,
    )


def _lookup(by_frame: dict[int, float], idx: int) -> float:
    if idx in by_frame:
        return by_frame[idx]
    lo = (idx // SUBSEQ_LEN) * SUBSEQ_LEN
    candidates = [f for f in range(lo, lo + SUBSEQ_LEN) if f in by_frame]
    if not candidates:
        raise EmptySeries(f"no probability entries in subsequence starting at {lo}")
    return by_frame[min(candidates, key=lambda f: (abs(f - idx), f))]

"""Interchange formats between detector/segmenter backends and the analysis core.

Three newline-delimited stream formats connect any upstream model to the
analysis pipeline, so long videos can be processed record by record:

* ``masks.jsonl``      one object per line:
  ``{"frame": int, "class": "lens"|"pupil", "w": int, "h": int, "rle": [int, ...]}``
* ``detections.jsonl`` one object per line:
  ``{"frame": int, "class": "lens"|"hook", "bbox": [x, y, w, h], "conf": float}``
* ``phase.csv``        header ``frame,prob``, one row per frame.

Masks are run-length encoded row-major, background first; a leading 0 run
encodes a mask that starts with foreground. Parsers validate every record
and never repair: a record that violates an invariant raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .errors import (
    EmptySequence,
    InvariantViolation,
    LengthMismatch,
    ParseError,
)

MASK_CLASSES = ("lens", "pupil")
DETECTION_CLASSES = ("lens", "hook")

DEFAULT_FPS = 25.0


@dataclass(frozen=True)
class MaskFrame:
    """One binary mask for one frame, stored as row-major RLE."""

    frame_index: int
    class_label: str
    width: int
    height: int
    rle: tuple[int, ...]

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvariantViolation("frame_index >= 0", f"got {self.frame_index}")
        if self.class_label not in MASK_CLASSES:
            raise InvariantViolation("class in {lens, pupil}", repr(self.class_label))
        if self.width <= 0 or self.height <= 0:
            raise InvariantViolation("width, height > 0", f"got {self.width}x{self.height}")
        if len(self.rle) == 0:
            raise InvariantViolation("rle non-empty")
        if any(r < 0 for r in self.rle):
            raise InvariantViolation("runs non-negative")
        if any(r <= 0 for r in self.rle[1:]):
            raise InvariantViolation("runs after the first are positive")
        if sum(self.rle) != self.width * self.height:
            raise LengthMismatch(
                f"sum(rle)={sum(self.rle)} != width*height={self.width * self.height}"
            )

    def decode(self) -> np.ndarray:
        return decode_rle(self.rle, self.width, self.height)


@dataclass(frozen=True)
class MaskSequence:
    """Ordered masks of one class; frame indices strictly increasing."""

    class_label: str
    frames: tuple[MaskFrame, ...]

    def __post_init__(self):
        for f in self.frames:
            if f.class_label != self.class_label:
                raise InvariantViolation("uniform class_label", f"frame {f.frame_index}")
        indices = [f.frame_index for f in self.frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise InvariantViolation("frame_index strictly increasing")
        dims = {(f.width, f.height) for f in self.frames}
        if len(dims) > 1:
            raise InvariantViolation("all frames share width/height", repr(dims))


@dataclass(frozen=True)
class DetectionRecord:
    """One detected bounding box: top-left origin, pixel units."""

    frame_index: int
    class_label: str
    bbox: tuple[float, float, float, float]
    confidence: float

    def __post_init__(self):
        if self.frame_index < 0:
            raise InvariantViolation("frame_index >= 0", f"got {self.frame_index}")
        if self.class_label not in DETECTION_CLASSES:
            raise InvariantViolation("class in {lens, hook}", repr(self.class_label))
        x, y, w, h = self.bbox
        if w <= 0 or h <= 0:
            raise InvariantViolation("bbox w, h > 0", repr(self.bbox))
        # The stream carries no frame dimensions, so only the origin side of
        # "bbox within frame bounds" is checkable here.
        if x < 0 or y < 0:
            raise InvariantViolation("bbox x, y >= 0", repr(self.bbox))
        if not 0.0 <= self.confidence <= 1.0:
            raise InvariantViolation("confidence in [0, 1]", repr(self.confidence))

    @property
    def center(self) -> tuple[float, float]:
        x, y, w, h = self.bbox
        return (x + w / 2.0, y + h / 2.0)


@dataclass(frozen=True)
class PhaseProbSeries:
    """Per-frame probability of the implantation phase at a fixed frame rate."""

    entries: tuple[tuple[int, float], ...]
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        if self.fps <= 0:
            raise InvariantViolation("fps > 0", repr(self.fps))
        indices = [i for i, _ in self.entries]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise InvariantViolation("frame_index strictly increasing")
        if any(i < 0 for i in indices):
            raise InvariantViolation("frame_index >= 0")
        if any(not 0.0 <= p <= 1.0 for _, p in self.entries):
            raise InvariantViolation("probabilities in [0, 1]")


def decode_rle(rle: Iterable[int], width: int, height: int) -> np.ndarray:
    """Expand run lengths into a (height, width) boolean bitmap.

    Runs alternate starting with background, so even-numbered runs (0, 2, ...)
    are background and odd-numbered runs are foreground.
    """
    runs = np.asarray(list(rle), dtype=np.int64)
    if runs.size == 0:
        raise InvariantViolation("rle non-empty")
    if (runs < 0).any():
        raise InvariantViolation("runs non-negative")
    total = int(runs.sum())
    if total != width * height:
        raise LengthMismatch(f"sum(rle)={total} != width*height={width * height}")
    values = np.zeros(runs.size, dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, runs)
    return flat.reshape(height, width)


def encode_rle(bitmap: np.ndarray, width: int, height: int) -> list[int]:
    """Encode a bitmap into canonical RLE.

    Canonical means: runs alternate background/foreground, only the first run
    may be zero (mask starting with foreground), and no other zero runs exist.
    decode_rle(encode_rle(b)) == b for any bitmap of the right size.
    """
    flat = np.asarray(bitmap, dtype=bool).ravel()
    if flat.size != width * height:
        raise LengthMismatch(f"bitmap size {flat.size} != width*height={width * height}")
    if flat.size == 0:
        raise InvariantViolation("rle non-empty", "zero-sized bitmap")
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], boundaries, [flat.size]))
    runs = np.diff(starts).tolist()
    if flat[0]:
        runs = [0] + runs
    return [int(r) for r in runs]


def _read_lines(stream: TextIO | str) -> list[str]:
    text = stream if isinstance(stream, str) else stream.read()
    return text.splitlines()


def _require_keys(obj: dict, keys: tuple[str, ...], line_no: int) -> None:
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ParseError(line_no, f"missing keys {missing}")
    extra = [k for k in obj if k not in keys]
    if extra:
        raise ParseError(line_no, f"unknown keys {extra}")


def parse_mask_stream(stream: TextIO | str) -> dict[str, MaskSequence]:
    """Parse masks.jsonl into one MaskSequence per class present.

    The file interleaves lens and pupil records; each class must be strictly
    increasing in frame index on its own.
    """
    frames_by_class: dict[str, list[MaskFrame]] = {}
    n_records = 0
    for line_no, line in enumerate(_read_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ParseError(line_no, "record is not an object")
        _require_keys(obj, ("frame", "class", "w", "h", "rle"), line_no)
        try:
            frame = MaskFrame(
                frame_index=_as_int(obj["frame"], line_no, "frame"),
                class_label=obj["class"],
                width=_as_int(obj["w"], line_no, "w"),
                height=_as_int(obj["h"], line_no, "h"),
                rle=tuple(_as_int(r, line_no, "rle") for r in obj["rle"]),
            )
        except (InvariantViolation, LengthMismatch) as exc:
            raise type(exc)(f"line {line_no}: {exc}") from exc
        frames_by_class.setdefault(frame.class_label, []).append(frame)
        n_records += 1
    if n_records == 0:
        raise EmptySequence("mask stream contains no records")
    return {
        label: MaskSequence(class_label=label, frames=tuple(frames))
        for label, frames in frames_by_class.items()
    }


def parse_detection_stream(stream: TextIO | str) -> list[DetectionRecord]:
    """Parse detections.jsonl; frame indices must be non-decreasing."""
    records: list[DetectionRecord] = []
    for line_no, line in enumerate(_read_lines(stream), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(line_no, f"invalid JSON: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ParseError(line_no, "record is not an object")
        _require_keys(obj, ("frame", "class", "bbox", "conf"), line_no)
        bbox = obj["bbox"]
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise ParseError(line_no, "bbox must be [x, y, w, h]")
        try:
            rec = DetectionRecord(
                frame_index=_as_int(obj["frame"], line_no, "frame"),
                class_label=obj["class"],
                bbox=tuple(float(v) for v in bbox),
                confidence=float(obj["conf"]),
            )
        except InvariantViolation as exc:
            raise InvariantViolation(exc.constraint, f"line {line_no}") from exc
        if records and rec.frame_index < records[-1].frame_index:
            raise InvariantViolation("frame_index non-decreasing", f"line {line_no}")
        records.append(rec)
    if not records:
        raise EmptySequence("detection stream contains no records")
    return records


def parse_phase_series(stream: TextIO | str, fps: float = DEFAULT_FPS) -> PhaseProbSeries:
    """Parse phase.csv (header ``frame,prob``)."""
    lines = _read_lines(stream)
    if not lines or not lines[0].strip():
        raise EmptySequence("phase stream is empty")
    if lines[0].strip() != "frame,prob":
        raise ParseError(1, f"expected header 'frame,prob', got {lines[0]!r}")
    entries: list[tuple[int, float]] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(line_no, "expected 'frame,prob'")
        try:
            frame = int(parts[0])
            prob = float(parts[1])
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from exc
        entries.append((frame, prob))
    if not entries:
        raise EmptySequence("phase stream contains no rows")
    return PhaseProbSeries(entries=tuple(entries), fps=fps)


def mask_frame_to_json(frame: MaskFrame) -> str:
    """Canonical one-line JSON for a mask record."""
    obj = {
        "frame": frame.frame_index,
        "class": frame.class_label,
        "w": frame.width,
        "h": frame.height,
        "rle": list(frame.rle),
    }
    return json.dumps(obj, separators=(",", ":"))


def detection_to_json(rec: DetectionRecord) -> str:
    """Canonical one-line JSON for a detection record."""
    obj = {
        "frame": rec.frame_index,
        "class": rec.class_label,
        "bbox": [float(v) for v in rec.bbox],
        "conf": float(rec.confidence),
    }
    return json.dumps(obj, separators=(",", ":"))


def serialize_mask_sequences(sequences: dict[str, MaskSequence]) -> str:
    """Serialize to canonical file order: by (frame_index, class_label)."""
    frames = [f for seq in sequences.values() for f in seq.frames]
    frames.sort(key=lambda f: (f.frame_index, f.class_label))
    return "".join(mask_frame_to_json(f) + "\n" for f in frames)


def serialize_detections(records: list[DetectionRecord]) -> str:
    return "".join(detection_to_json(r) + "\n" for r in records)


def serialize_phase_series(series: PhaseProbSeries) -> str:
    rows = [f"{i},{float(p)!r}" for i, p in series.entries]
    return "frame,prob\n" + "".join(r + "\n" for r in rows)


def _as_int(v, line_no: int, key: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(line_no, f"{key} must be an integer, got {v!r}")
    return v

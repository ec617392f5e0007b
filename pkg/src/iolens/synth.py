"""Deterministic synthetic-surgery generator.

Renders a parametric surgery video directly into the interchange streams
(masks.jsonl, detections.jsonl, phase.csv) together with the ground-truth
kinematics those streams encode, so the whole analysis pipeline can be
verified end to end without clinical data.

The scene is a static pupil disk plus a lens drawn as a rotated ellipse.
The ellipse area follows a logistic unfolding curve that peaks exactly at a
programmed frame and then settles slightly, the lens center follows a
piecewise-linear drift path relative to the pupil center, and the two hooks
sit on the major axis just outside the ellipse. Noise is optional and comes
in three flavors: smooth per-row boundary wobble on masks, smooth hook
position wobble plus confidence jitter on detections, and spurious duplicate
hook boxes.

Randomness comes from numpy's seeded PCG64 generator (np.random.default_rng);
the test suite pins reference draws so a drifting generator is caught. The
same seed always reproduces byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kinematics
from .errors import SpecInvalid
from .ingest import (
    DetectionRecord,
    MaskFrame,
    PhaseProbSeries,
    detection_to_json,
    encode_rle,
    mask_frame_to_json,
    serialize_phase_series,
)
from .phase import CLIP_LEN_FRAMES

DEFAULT_WIDTH = 192
DEFAULT_HEIGHT = 144
HOOK_BOX_SIZE = 9.0


@dataclass(frozen=True)
class UnfoldCurve:
    """Lens area over time: logistic rise to a peak, then a linear settle.

    The visible area fraction rises from ``initial_fraction`` to exactly 1.0
    at frame ``plateau`` (the true unfolding time), then decays linearly by
    ``settle`` toward the end of the video. A small positive settle keeps the
    area maximum unique, which is what makes the unfolding time recoverable
    from a noisy area series; motionless scenes may use settle 0.
    """

    initial_fraction: float = 0.30
    midpoint: int = 60
    steepness: float = 0.06
    plateau: int = 120
    settle: float = 0.04


@dataclass(frozen=True)
class DetectionNoise:
    lens_jitter_px: float = 0.0
    hook_wobble_px: float = 0.0
    hook_wobble_period: int = 160
    conf_lo: float = 0.86
    conf_hi: float = 0.98
    hook_visibility: float = 1.0
    spurious_rate: float = 0.0
    spurious_offset_px: float = 22.0
    spurious_conf_lo: float = 0.62
    spurious_conf_hi: float = 0.78


@dataclass(frozen=True)
class MaskNoise:
    """Per-row boundary raggedness: each row's span shifts horizontally.

    period 0 freezes the offsets for the whole video (ragged but stable
    boundary); a positive period makes them breathe sinusoidally over time.
    """

    row_shift_px: float = 0.0
    period: int = 0


@dataclass(frozen=True)
class OcclusionEvent:
    """Instrument occlusion: a wedge cut out of the lens mask.

    The wedge is a sector in the ellipse frame truncated at ``depth`` of the
    elliptical radius, so the outer rim survives and convex refinement can
    recover the full shape. ``fraction`` is the occluded share of lens area.
    """

    start: int
    end: int
    angle_deg: float
    fraction: float
    depth: float = 0.88


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_frames: int
    implantation_clip_range: tuple[int, int] = (1, 1)
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    pupil_center: tuple[float, float] = (96.0, 72.0)
    pupil_radius: float = 52.0
    lens_axes: tuple[float, float] = (34.0, 25.0)
    hook_offset_px: float = 8.0
    unfold: UnfoldCurve = field(default_factory=UnfoldCurve)
    drift_path: tuple = ((0, (0.0, 0.0)),)
    orientation_path: tuple = ((0, 0.0),)
    occlusions: tuple = ()
    detection_noise: DetectionNoise = field(default_factory=DetectionNoise)
    mask_noise: MaskNoise = field(default_factory=MaskNoise)
    phase_high: float = 0.93
    phase_low: float = 0.06
    phase_jitter: float = 0.02

    @property
    def post_start_frame(self) -> int:
        return (self.implantation_clip_range[1] + 1) * CLIP_LEN_FRAMES

    @property
    def n_post_frames(self) -> int:
        return self.n_frames - self.post_start_frame

    def validate(self) -> None:
        if self.n_frames <= 0:
            raise SpecInvalid("n_frames", "must be positive")
        c0, c1 = self.implantation_clip_range
        if not 0 <= c0 <= c1:
            raise SpecInvalid("implantation_clip_range", "need 0 <= first <= last")
        if self.n_post_frames < 30:
            raise SpecInvalid("n_frames", "fewer than 30 post-implantation frames")
        if not 0.0 < self.unfold.initial_fraction <= 1.0:
            raise SpecInvalid("unfold.initial_fraction", "must be in (0, 1]")
        if not 0 <= self.unfold.plateau < self.n_post_frames:
            raise SpecInvalid("unfold.plateau", "must lie inside the post window")
        if not 0.0 <= self.unfold.settle < 0.5:
            raise SpecInvalid("unfold.settle", "must be in [0, 0.5)")
        a, b = self.lens_axes
        if not 0 < b <= a:
            raise SpecInvalid("lens_axes", "need 0 < minor <= major")
        for occ in self.occlusions:
            if not 0.0 < occ.fraction <= 0.2:
                raise SpecInvalid("occlusions.fraction", "must be in (0, 0.2]")
            if not 0.3 <= occ.depth <= 0.95:
                raise SpecInvalid("occlusions.depth", "must be in [0.3, 0.95]")
            if occ.fraction > occ.depth**2:
                raise SpecInvalid("occlusions.fraction", "wedge wider than full turn")
        max_rel = max(
            (abs(dx) + abs(dy) for _, (dx, dy) in self.drift_path), default=0.0
        )
        reach = a + self.hook_offset_px + self.detection_noise.hook_wobble_px + 4
        px, py = self.pupil_center
        if (
            px - max_rel - reach < 0
            or px + max_rel + reach >= self.width
            or py - max_rel - reach < 0
            or py + max_rel + reach >= self.height
        ):
            raise SpecInvalid("drift_path", "lens or hooks leave the frame")
        if px - self.pupil_radius < 0 or px + self.pupil_radius >= self.width:
            raise SpecInvalid("pupil_center", "pupil leaves the frame")
        if py - self.pupil_radius < 0 or py + self.pupil_radius >= self.height:
            raise SpecInvalid("pupil_center", "pupil leaves the frame")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["drift_path"] = [[f, list(p)] for f, p in self.drift_path]
        d["orientation_path"] = [[f, a] for f, a in self.orientation_path]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        d = dict(d)
        d["implantation_clip_range"] = tuple(d.get("implantation_clip_range", (1, 1)))
        d["pupil_center"] = tuple(d.get("pupil_center", (96.0, 72.0)))
        d["lens_axes"] = tuple(d.get("lens_axes", (34.0, 25.0)))
        if "unfold" in d:
            d["unfold"] = UnfoldCurve(**d["unfold"])
        if "detection_noise" in d:
            d["detection_noise"] = DetectionNoise(**d["detection_noise"])
        if "mask_noise" in d:
            d["mask_noise"] = MaskNoise(**d["mask_noise"])
        d["drift_path"] = tuple(
            (int(f), (float(p[0]), float(p[1]))) for f, p in d.get("drift_path", [[0, [0, 0]]])
        )
        d["orientation_path"] = tuple(
            (int(f), float(a)) for f, a in d.get("orientation_path", [[0, 0.0]])
        )
        d["occlusions"] = tuple(OcclusionEvent(**o) for o in d.get("occlusions", ()))
        return cls(**d)


@dataclass(frozen=True)
class SynthGroundTruth:
    """Programmed kinematics, computed from the noiseless paths."""

    start_frame: int
    n_post_frames: int
    t_u_true: int
    ins_true: dict
    r_true: float
    lens_centers: tuple
    rel_positions: tuple
    areas: tuple
    orientations: tuple

    def to_dict(self) -> dict:
        return {
            "start_frame": self.start_frame,
            "n_post_frames": self.n_post_frames,
            "t_u_true": self.t_u_true,
            "ins_true": self.ins_true,
            "r_true": self.r_true,
            "lens_centers": [list(c) for c in self.lens_centers],
            "rel_positions": [list(p) for p in self.rel_positions],
            "areas": list(self.areas),
            "orientations": list(self.orientations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthGroundTruth":
        return cls(
            start_frame=d["start_frame"],
            n_post_frames=d["n_post_frames"],
            t_u_true=d["t_u_true"],
            ins_true=dict(d["ins_true"]),
            r_true=d["r_true"],
            lens_centers=tuple(tuple(c) for c in d["lens_centers"]),
            rel_positions=tuple(tuple(p) for p in d["rel_positions"]),
            areas=tuple(d["areas"]),
            orientations=tuple(d["orientations"]),
        )


@dataclass(frozen=True)
class GeneratedVideo:
    spec: SynthSpec
    masks_jsonl: str
    detections_jsonl: str
    phase_csv: str
    ground_truth: SynthGroundTruth

    def write(self, out_dir: str | Path) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "masks": out / "masks.jsonl",
            "detections": out / "detections.jsonl",
            "phase": out / "phase.csv",
            "ground_truth": out / "ground_truth.json",
        }
        paths["masks"].write_text(self.masks_jsonl)
        paths["detections"].write_text(self.detections_jsonl)
        paths["phase"].write_text(self.phase_csv)
        paths["ground_truth"].write_text(
            json.dumps(self.ground_truth.to_dict(), indent=1) + "\n"
        )
        return {k: str(v) for k, v in paths.items()}


def generate_video(spec: SynthSpec) -> GeneratedVideo:
    """Render one synthetic video into interchange streams plus ground truth."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    n_post = spec.n_post_frames
    start = spec.post_start_frame
    a_f, b_f = spec.lens_axes
    px, py = spec.pupil_center

    # Noiseless per-frame paths; lens centers are snapped to integers so a
    # motionless plateau rasterizes identically frame after frame.
    fractions = [_area_fraction(spec.unfold, tau, n_post) for tau in range(n_post)]
    rel = []
    for tau in range(n_post):
        dx, dy = _interp_path(spec.drift_path, tau)
        rel.append((round(dx), round(dy)))
    centers = [(int(round(px)) + dx, int(round(py)) + dy) for dx, dy in rel]
    thetas = [_interp_angle(spec.orientation_path, tau) for tau in range(n_post)]
    areas_true = [math.pi * a_f * b_f * f for f in fractions]
    orient_true = [t % 360.0 for t in thetas]

    ins_true = {
        mode: kinematics.instability([(float(x), float(y)) for x, y in rel], mode)
        if n_post >= 2
        else 0.0
        for mode in kinematics.INSTABILITY_MODES
    }
    r_true = kinematics.rotation(list(enumerate(orient_true)), spec.unfold.plateau)
    truth = SynthGroundTruth(
        start_frame=start,
        n_post_frames=n_post,
        t_u_true=spec.unfold.plateau,
        ins_true=ins_true,
        r_true=r_true,
        lens_centers=tuple((float(x), float(y)) for x, y in centers),
        rel_positions=tuple((float(x), float(y)) for x, y in rel),
        areas=tuple(areas_true),
        orientations=tuple(orient_true),
    )

    # Per-video random state for the noise models, drawn in a fixed order.
    noise = spec.detection_noise
    mask_noise = spec.mask_noise
    lens_row_phase = rng.uniform(0.0, 2 * math.pi, spec.height)
    pupil_row_phase = rng.uniform(0.0, 2 * math.pi, spec.height)
    wobble_phase = rng.uniform(0.0, 2 * math.pi, (2, 2))

    grid_x = np.arange(spec.width, dtype=float)[None, :]
    grid_y = np.arange(spec.height, dtype=float)[:, None]
    pupil_clean = (grid_x - px) ** 2 + (grid_y - py) ** 2 <= spec.pupil_radius**2

    mask_lines: list[str] = []
    det_lines: list[str] = []
    for tau in range(n_post):
        t = start + tau
        cx, cy = centers[tau]
        theta = math.radians(thetas[tau])
        scale = math.sqrt(fractions[tau])
        a_t, b_t = a_f * scale, b_f * scale

        lens = _ellipse_mask(grid_x, grid_y, cx, cy, a_t, b_t, theta)
        pupil = pupil_clean.copy()
        if mask_noise.row_shift_px > 0:
            lens = _shift_rows(lens, tau, mask_noise, lens_row_phase, cy)
            pupil = _shift_rows(pupil, tau, mask_noise, pupil_row_phase, int(round(py)))
        for occ in spec.occlusions:
            if occ.start <= tau < occ.end:
                lens &= ~_wedge(grid_x, grid_y, cx, cy, a_t, b_t, theta, occ)

        mask_lines.append(_mask_line(t, "lens", lens, spec))
        mask_lines.append(_mask_line(t, "pupil", pupil, spec))
        det_lines.extend(
            _frame_detections(rng, spec, t, tau, cx, cy, a_t, b_t, theta, wobble_phase)
        )

    phase_entries = []
    c0, c1 = spec.implantation_clip_range
    for t in range(spec.n_frames):
        inside = c0 * CLIP_LEN_FRAMES <= t < (c1 + 1) * CLIP_LEN_FRAMES
        base = spec.phase_high if inside else spec.phase_low
        if spec.phase_jitter > 0:
            base += float(rng.uniform(-spec.phase_jitter, spec.phase_jitter))
        phase_entries.append((t, round(min(1.0, max(0.0, base)), 4)))
    phase_csv = serialize_phase_series(PhaseProbSeries(entries=tuple(phase_entries)))

    return GeneratedVideo(
        spec=spec,
        masks_jsonl="".join(mask_lines),
        detections_jsonl="".join(det_lines),
        phase_csv=phase_csv,
        ground_truth=truth,
    )


@dataclass(frozen=True)
class BrandGroupSpec:
    """Distribution parameters for one synthetic lens brand."""

    name: str
    n_videos: int
    seed: int
    rotation_mean_deg: float
    rotation_std_deg: float
    unfold_mean_frames: float = 65.0
    unfold_std_frames: float = 12.0
    drift_amp_px: float = 7.0
    noise_preset: str = "clean"  # clean | detector | wobble


def generate_study(groups, out_dir: str | Path) -> dict:
    """Generate per-brand video sets and a manifest referencing them.

    Returns the manifest dict; also writes ``manifest.json`` plus one
    directory per video under ``out_dir``.
    """
    groups = list(groups)
    if not groups:
        raise SpecInvalid("groups", "empty group list")
    names = [g.name for g in groups]
    if len(set(names)) != len(names):
        raise SpecInvalid("groups", "brand names must be unique")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"brands": {}}
    for group in groups:
        if group.n_videos < 1:
            raise SpecInvalid("n_videos", f"brand {group.name!r}")
        entries = []
        for i in range(group.n_videos):
            spec = _group_video_spec(group, i)
            video = generate_video(spec)
            paths = video.write(out / group.name / f"video_{i:03d}")
            entries.append({k: str(Path(v).relative_to(out)) for k, v in paths.items()})
        manifest["brands"][group.name] = entries
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest


def default_corpus(n_videos: int = 50, seed: int = 20260810) -> list[SynthSpec]:
    """Mixed-noise spec corpus used by the end-to-end kinematics oracle.

    Roughly a quarter of the specs are noiseless; the rest mix mask boundary
    wobble, confidence jitter, spurious duplicate hook boxes, instrument
    occlusions, and (for large programmed rotations) smooth hook wobble.
    """
    rng = np.random.default_rng(seed)
    specs = []
    for i in range(n_videos):
        kind = ("clean", "detector", "dropout", "wobble")[i % 4]
        specs.append(_random_spec(rng, kind=kind))
    return specs


def _random_spec(
    rng: np.random.Generator,
    kind: str = "clean",
    rotation_total_deg: float | None = None,
    plateau: int | None = None,
    drift_amp: float | None = None,
) -> SynthSpec:
    seed = int(rng.integers(0, 2**31 - 1))
    n_post = int(rng.integers(190, 240))
    c1 = int(rng.integers(1, 3))
    n_frames = (c1 + 1) * CLIP_LEN_FRAMES + n_post
    if plateau is None:
        plateau = int(rng.integers(45, 85))
    if rotation_total_deg is None:
        rotation_total_deg = {
            "clean": float(rng.uniform(8, 45)),
            "detector": float(rng.uniform(10, 50)),
            "dropout": float(rng.uniform(10, 50)),
            "wobble": float(rng.uniform(60, 90)),
        }[kind]
    if drift_amp is None:
        drift_amp = float(rng.uniform(8, 12))

    drift = _random_drift_path(rng, n_post, drift_amp)
    theta0 = float(rng.uniform(0, 180))
    pre_rot = float(rng.uniform(-10, 10))
    # The lens holds still briefly after unfolding; rotation measured from
    # the (slightly biased) recovered unfolding time then matches the truth.
    hold = min(plateau + 12, n_post - 2)
    orientation = (
        (0, theta0),
        (plateau, theta0 + pre_rot),
        (hold, theta0 + pre_rot),
        (n_post - 1, theta0 + pre_rot + rotation_total_deg),
    )
    unfold = UnfoldCurve(
        initial_fraction=float(rng.uniform(0.25, 0.4)),
        midpoint=plateau - int(rng.integers(30, 45)),
        steepness=float(rng.uniform(0.07, 0.095)),
        plateau=plateau,
        settle=float(rng.uniform(0.10, 0.16)),
    )
    det_noise = DetectionNoise()
    m_noise = MaskNoise()
    occlusions: tuple = ()
    if kind != "clean":
        det_noise = DetectionNoise(
            conf_lo=0.85,
            conf_hi=0.98,
            hook_visibility=0.9 if kind == "dropout" else 1.0,
            spurious_rate=0.25 if kind == "detector" else 0.0,
            hook_wobble_px=0.25 if kind == "wobble" else 0.0,
            hook_wobble_period=int(rng.integers(150, 220)),
            lens_jitter_px=0.3 if kind == "wobble" else 0.0,
        )
        m_noise = MaskNoise(row_shift_px=0.9, period=0)
        occ_start = int(rng.integers(plateau + 25, n_post - 40))
        occlusions = (
            OcclusionEvent(
                start=occ_start,
                end=occ_start + int(rng.integers(12, 25)),
                angle_deg=float(rng.uniform(0, 360)),
                fraction=float(rng.uniform(0.08, 0.18)),
            ),
        )
    return SynthSpec(
        seed=seed,
        n_frames=n_frames,
        implantation_clip_range=(1, c1),
        unfold=unfold,
        drift_path=drift,
        orientation_path=orientation,
        occlusions=occlusions,
        detection_noise=det_noise,
        mask_noise=m_noise,
    )


def _random_drift_path(rng: np.random.Generator, n_post: int, amp: float):
    knots = [(0, (0.0, 0.0))]
    tau = 0
    while tau < n_post - 1:
        tau = min(n_post - 1, tau + int(rng.integers(9, 16)))
        knots.append(
            (tau, (float(rng.uniform(-amp, amp)), float(rng.uniform(-amp, amp))))
        )
    return tuple(knots)


def _group_video_spec(group: BrandGroupSpec, index: int) -> SynthSpec:
    rng = np.random.default_rng(np.random.SeedSequence((group.seed, index)))
    rotation = max(1.0, float(rng.normal(group.rotation_mean_deg, group.rotation_std_deg)))
    plateau = int(np.clip(rng.normal(group.unfold_mean_frames, group.unfold_std_frames), 30, 110))
    return _random_spec(
        rng,
        kind=group.noise_preset,
        rotation_total_deg=rotation,
        plateau=plateau,
        drift_amp=group.drift_amp_px,
    )


def _area_fraction(curve: UnfoldCurve, tau: int, n_post: int) -> float:
    if tau >= curve.plateau:
        if curve.settle <= 0 or n_post - 1 == curve.plateau:
            return 1.0
        return 1.0 - curve.settle * (tau - curve.plateau) / (n_post - 1 - curve.plateau)
    lo = 1.0 / (1.0 + math.exp(curve.steepness * curve.midpoint))
    hi = 1.0 / (1.0 + math.exp(-curve.steepness * (curve.plateau - curve.midpoint)))
    raw = 1.0 / (1.0 + math.exp(-curve.steepness * (tau - curve.midpoint)))
    rise = (raw - lo) / (hi - lo)
    return curve.initial_fraction + (1.0 - curve.initial_fraction) * rise


def _interp_path(path, tau: int) -> tuple[float, float]:
    if tau <= path[0][0]:
        return path[0][1]
    for (f0, p0), (f1, p1) in zip(path, path[1:]):
        if f0 <= tau <= f1:
            w = (tau - f0) / (f1 - f0) if f1 > f0 else 0.0
            return (p0[0] + w * (p1[0] - p0[0]), p0[1] + w * (p1[1] - p0[1]))
    return path[-1][1]


def _interp_angle(path, tau: int) -> float:
    if tau <= path[0][0]:
        return path[0][1]
    for (f0, a0), (f1, a1) in zip(path, path[1:]):
        if f0 <= tau <= f1:
            w = (tau - f0) / (f1 - f0) if f1 > f0 else 0.0
            return a0 + w * (a1 - a0)
    return path[-1][1]


def _ellipse_mask(gx, gy, cx, cy, a, b, theta) -> np.ndarray:
    dx = gx - cx
    dy = gy - cy
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    u = (dx * cos_t + dy * sin_t) / a
    v = (-dx * sin_t + dy * cos_t) / b
    return u * u + v * v <= 1.0


def _wedge(gx, gy, cx, cy, a, b, theta, occ: OcclusionEvent) -> np.ndarray:
    dx = gx - cx
    dy = gy - cy
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    u = (dx * cos_t + dy * sin_t) / a
    v = (-dx * sin_t + dy * cos_t) / b
    r2 = u * u + v * v
    half_width = math.pi * occ.fraction / (occ.depth**2)
    ang = np.arctan2(v, u) - math.radians(occ.angle_deg)
    ang = np.mod(ang + math.pi, 2 * math.pi) - math.pi
    return (r2 <= occ.depth**2) & (np.abs(ang) <= half_width)


def _shift_rows(
    mask: np.ndarray, tau: int, noise: MaskNoise, phases: np.ndarray, anchor_row: int
) -> np.ndarray:
    """Shift each row's span by a raggedness offset anchored to the object.

    Indexing the per-row phase relative to the object's center row keeps the
    raggedness pattern attached to the object while it translates, so frozen
    noise stays frozen in the object frame.
    """
    out = np.zeros_like(mask)
    width = mask.shape[1]
    omega = 0.0 if noise.period <= 0 else 2 * math.pi * tau / noise.period
    rows = np.flatnonzero(mask.any(axis=1))
    for y in rows.tolist():
        idx = np.flatnonzero(mask[y])
        phase = phases[(y - anchor_row) % phases.size]
        shift = round(noise.row_shift_px * math.sin(omega + phase))
        lo = max(0, int(idx[0]) + shift)
        hi = min(width - 1, int(idx[-1]) + shift)
        if lo <= hi:
            out[y, lo : hi + 1] = True
    return out


def _mask_line(t: int, label: str, arr: np.ndarray, spec: SynthSpec) -> str:
    frame = MaskFrame(
        frame_index=t,
        class_label=label,
        width=spec.width,
        height=spec.height,
        rle=tuple(encode_rle(arr, spec.width, spec.height)),
    )
    return mask_frame_to_json(frame) + "\n"


def _frame_detections(
    rng, spec: SynthSpec, t, tau, cx, cy, a_t, b_t, theta, wobble_phase
) -> list[str]:
    noise = spec.detection_noise
    lines = []
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    hw = math.sqrt((a_t * cos_t) ** 2 + (b_t * sin_t) ** 2)
    hh = math.sqrt((a_t * sin_t) ** 2 + (b_t * cos_t) ** 2)
    lens_cx, lens_cy = float(cx), float(cy)
    if noise.lens_jitter_px > 0:
        lens_cx += float(rng.normal(0.0, noise.lens_jitter_px))
        lens_cy += float(rng.normal(0.0, noise.lens_jitter_px))
    lines.append(
        _det_line(t, "lens", lens_cx, lens_cy, 2 * hw, 2 * hh, _conf(rng, noise), spec)
    )

    radius = a_t + spec.hook_offset_px
    visible_hooks = []
    for side, sign in enumerate((1.0, -1.0)):
        hx = cx + sign * radius * cos_t
        hy = cy + sign * radius * sin_t
        if noise.hook_wobble_px > 0:
            omega = 2 * math.pi * tau / noise.hook_wobble_period
            hx += noise.hook_wobble_px * math.sin(omega + wobble_phase[side][0])
            hy += noise.hook_wobble_px * math.sin(omega + wobble_phase[side][1])
        visible = noise.hook_visibility >= 1.0 or rng.random() < noise.hook_visibility
        if visible:
            visible_hooks.append((hx, hy))
            lines.append(
                _det_line(t, "hook", hx, hy, HOOK_BOX_SIZE, HOOK_BOX_SIZE, _conf(rng, noise), spec)
            )
    # Spurious boxes model duplicate detections, so they shadow a hook the
    # detector actually fired on.
    if noise.spurious_rate > 0 and visible_hooks and rng.random() < noise.spurious_rate:
        hx, hy = visible_hooks[int(rng.integers(0, len(visible_hooks)))]
        sx = hx + float(rng.uniform(-noise.spurious_offset_px, noise.spurious_offset_px))
        sy = hy + float(rng.uniform(-noise.spurious_offset_px, noise.spurious_offset_px))
        conf = round(float(rng.uniform(noise.spurious_conf_lo, noise.spurious_conf_hi)), 4)
        lines.append(_det_line(t, "hook", sx, sy, HOOK_BOX_SIZE, HOOK_BOX_SIZE, conf, spec))
    return lines


def _conf(rng, noise: DetectionNoise) -> float:
    return round(float(rng.uniform(noise.conf_lo, noise.conf_hi)), 4)


def _det_line(t, label, cx, cy, w, h, conf, spec: SynthSpec) -> str:
    x = cx - w / 2.0
    y = cy - h / 2.0
    x0 = max(0.0, x)
    y0 = max(0.0, y)
    w = min(x + w, spec.width - 1.0) - x0
    h = min(y + h, spec.height - 1.0) - y0
    rec = DetectionRecord(
        frame_index=t, class_label=label, bbox=(x0, y0, w, h), confidence=conf
    )
    return detection_to_json(rec) + "\n"

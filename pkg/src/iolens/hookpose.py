"""Hook selection and per-frame lens orientation from detection boxes.

The lens has exactly two hooks (haptics) sitting on its long axis, but a
detector may report zero to many hook boxes per frame. Selection keeps at
most two credible hooks:

1. zero or one detection passes through unchanged;
2. two detections are kept together only if they sit roughly opposite each
   other (about 180 degrees apart) around the lens center, otherwise the
   more confident one wins;
3. more than two detections are first split into two clusters, the most
   confident box per cluster is taken, then rule 2 applies.

Orientation is the angle of the hook-to-hook line (two hooks) or of the
center-to-hook line (one hook), measured as atan2(dy, dx) in image
coordinates and mapped to [0, 360). Rotation statistics difference these
angles modulo 180, so the hook ordering convention cancels out.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import DegenerateVector, InvariantViolation, TooFewPoints
from .ingest import DetectionRecord

Point = tuple[float, float]

DEFAULT_CONFIDENCE_THRESHOLD = 0.6
DEFAULT_OPPOSITION_TOL_DEG = 30.0

SCENARIO_ZERO_OR_ONE = "zero_or_one"
SCENARIO_PAIR = "pair"
SCENARIO_CLUSTERED = "clustered"

SOURCE_TWO_HOOKS = "two_hooks"
SOURCE_ONE_HOOK = "one_hook"


@dataclass(frozen=True)
class HookSelection:
    """Hooks kept for one frame: ((x, y), confidence) pairs."""

    frame_index: int
    kept_hooks: tuple[tuple[Point, float], ...]
    scenario: str

    def __post_init__(self):
        if len(self.kept_hooks) > 2:
            raise InvariantViolation("at most 2 hooks kept")


@dataclass(frozen=True)
class OrientationSample:
    frame_index: int
    angle_deg: float
    source: str

    def __post_init__(self):
        if not 0.0 <= self.angle_deg < 360.0:
            raise InvariantViolation("angle in [0, 360)", repr(self.angle_deg))


def filter_by_confidence(
    dets: list[DetectionRecord], threshold: float = DEFAULT_CONFIDENCE_THRESHOLD
) -> list[DetectionRecord]:
    """Keep detections strictly above the confidence threshold, order preserved."""
    return [d for d in dets if d.confidence > threshold]


def opposition_check(
    h1: Point, h2: Point, lens_center: Point, tol_deg: float = DEFAULT_OPPOSITION_TOL_DEG
) -> bool:
    """True iff the two hooks subtend about 180 degrees around the center."""
    angle = _angle_between(h1, h2, lens_center)
    return abs(angle - 180.0) <= tol_deg


def cluster_two(points: list[Point]) -> tuple[list[Point], list[Point]]:
    """Split points into the two-cluster partition minimizing the larger diameter.

    Exact: the smallest feasible diameter bound is found by binary search over
    pairwise distances, where a bound is feasible iff the graph of pairs
    farther apart than the bound is 2-colorable. The first cluster always
    contains the first point.
    """
    part_a, part_b = cluster_two_indices(points)
    pts = [tuple(float(c) for c in p) for p in points]
    return [pts[i] for i in part_a], [pts[i] for i in part_b]


def cluster_two_indices(points: list[Point]) -> tuple[list[int], list[int]]:
    """Index form of cluster_two."""
    n = len(points)
    if n < 3:
        raise TooFewPoints(f"clustering needs >= 3 points, got {n}")
    pts = [(float(x), float(y)) for x, y in points]
    d2 = [[0.0] * n for _ in range(n)]
    values = set()
    for i in range(n):
        for j in range(i + 1, n):
            v = (pts[i][0] - pts[j][0]) ** 2 + (pts[i][1] - pts[j][1]) ** 2
            d2[i][j] = d2[j][i] = v
            values.add(v)
    cands = sorted(values)
    lo, hi = 0, len(cands) - 1
    best = _two_color(d2, n, cands[hi])
    while lo <= hi:
        mid = (lo + hi) // 2
        coloring = _two_color(d2, n, cands[mid])
        if coloring is not None:
            best = coloring
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None
    part_a = [i for i in range(n) if best[i] == 0]
    part_b = [i for i in range(n) if best[i] == 1]
    if not part_b:
        # Only possible when the feasible bound equals the max distance (all
        # candidate splits tie); peel off the point farthest from point 0.
        far = max(range(1, n), key=lambda j: (d2[0][j], -j))
        part_a.remove(far)
        part_b = [far]
    return part_a, part_b


def select_hooks(
    hook_dets: list[DetectionRecord],
    lens_center: Point,
    opposition_tol_deg: float = DEFAULT_OPPOSITION_TOL_DEG,
    frame_index: int | None = None,
) -> HookSelection:
    """Apply the three-scenario rule to confidence-filtered hook detections."""
    if frame_index is None:
        frame_index = hook_dets[0].frame_index if hook_dets else -1
    hooks = [(d.center, d.confidence) for d in hook_dets]
    if len(hooks) <= 1:
        return HookSelection(frame_index, tuple(hooks), SCENARIO_ZERO_OR_ONE)
    if len(hooks) == 2:
        kept = _pair_rule(hooks[0], hooks[1], lens_center, opposition_tol_deg)
        return HookSelection(frame_index, kept, SCENARIO_PAIR)
    part_a, part_b = cluster_two_indices([h for h, _ in hooks])
    best_a = max(part_a, key=lambda i: (hooks[i][1], -i))
    best_b = max(part_b, key=lambda i: (hooks[i][1], -i))
    first, second = sorted((best_a, best_b))
    kept = _pair_rule(hooks[first], hooks[second], lens_center, opposition_tol_deg)
    return HookSelection(frame_index, kept, SCENARIO_CLUSTERED)


def orientation(selection: HookSelection, lens_center: Point) -> OrientationSample | None:
    """Lens orientation for one frame, or None when no hook was kept."""
    hooks = selection.kept_hooks
    if not hooks:
        return None
    if len(hooks) == 2:
        (x1, y1), _ = hooks[0]
        (x2, y2), _ = hooks[1]
        angle = _atan2_deg(y2 - y1, x2 - x1, "the two kept hooks coincide")
        return OrientationSample(selection.frame_index, angle, SOURCE_TWO_HOOKS)
    (hx, hy), _ = hooks[0]
    angle = _atan2_deg(
        hy - lens_center[1], hx - lens_center[0], "hook coincides with lens center"
    )
    return OrientationSample(selection.frame_index, angle, SOURCE_ONE_HOOK)


def _pair_rule(
    hook1: tuple[Point, float],
    hook2: tuple[Point, float],
    lens_center: Point,
    tol_deg: float,
) -> tuple[tuple[Point, float], ...]:
    try:
        opposed = opposition_check(hook1[0], hook2[0], lens_center, tol_deg)
    except DegenerateVector:
        opposed = False
    if opposed:
        return (hook1, hook2)
    return (hook1,) if hook1[1] >= hook2[1] else (hook2,)


def _angle_between(h1: Point, h2: Point, center: Point) -> float:
    v1 = (h1[0] - center[0], h1[1] - center[1])
    v2 = (h2[0] - center[0], h2[1] - center[1])
    n1 = math.hypot(*v1)
    n2 = math.hypot(*v2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateVector("hook coincides with lens center")
    cosang = (v1[0] * v2[0] + v1[1] * v2[1]) / (n1 * n2)
    return math.degrees(math.acos(max(-1.0, min(1.0, cosang))))


def _atan2_deg(dy: float, dx: float, degenerate_msg: str) -> float:
    if dx == 0.0 and dy == 0.0:
        raise DegenerateVector(degenerate_msg)
    angle = math.degrees(math.atan2(dy, dx)) % 360.0
    # a tiny negative input angle can round the modulo up to exactly 360.0
    return 0.0 if angle >= 360.0 else angle


def _two_color(d2, n: int, bound: float) -> list[int] | None:
    """2-color the graph whose edges join points with squared distance > bound.

    Components are processed from their smallest vertex, which gets color 0;
    returns None when some component has an odd cycle.
    """
    adj = [[j for j in range(n) if j != i and d2[i][j] > bound] for i in range(n)]
    colors = [-1] * n
    for start in range(n):
        if colors[start] != -1:
            continue
        colors[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if colors[v] == -1:
                    colors[v] = 1 - colors[u]
                    queue.append(v)
                elif colors[v] == colors[u]:
                    return None
    return colors

"""Deterministic synthetic road scenes for desk-scale evaluation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .apf import default_start
from .segmap import DEFAULT_CLASS_TABLE, ClassMap

ROAD_LABEL = 1
OBSTACLE_LABEL = 2
OTHERS_LABEL = 0


@dataclass(frozen=True)
class ObstacleBlob:
    """Axis-aligned obstacle footprint: top-left ``(x, y)``, size ``w x h``."""

    x: int
    y: int
    w: int
    h: int
    shape: str = "rect"

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError("obstacle size must be positive")
        if self.shape not in ("rect", "ellipse"):
            raise ValueError(f"unknown obstacle shape {self.shape!r}")

    def mask(self, height: int, width: int) -> np.ndarray:
        rows, cols = np.ogrid[0:height, 0:width]
        if self.shape == "rect":
            return (rows >= self.y) & (rows < self.y + self.h) & (cols >= self.x) & (cols < self.x + self.w)
        cy = self.y + (self.h - 1) / 2
        cx = self.x + (self.w - 1) / 2
        return ((cols - cx) / (self.w / 2)) ** 2 + ((rows - cy) / (self.h / 2)) ** 2 <= 1.0


@dataclass(frozen=True)
class SceneSpec:
    width: int = 640
    height: int = 480
    count: tuple[int, int] = (1, 4)
    size: tuple[int, int] = (5, 50)
    shapes: tuple[str, ...] = ("rect", "ellipse")
    fixed: tuple[ObstacleBlob, ...] = ()
    start_clearance: int = 20
    side_margin: int = 0
    reference_step: float = 5.0
    max_attempts: int = 100

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("scene dimensions must be positive")
        if not 0 <= self.count[0] <= self.count[1]:
            raise ValueError("count range must satisfy 0 <= lo <= hi")
        if not 1 <= self.size[0] <= self.size[1]:
            raise ValueError("size range must satisfy 1 <= lo <= hi")
        if 2 * self.side_margin >= self.width:
            raise ValueError("side margins leave no road")


@dataclass(frozen=True, eq=False)
class Scene:
    class_map: ClassMap
    obstacles: tuple[ObstacleBlob, ...]
    reference_path: tuple[tuple[float, float], ...] | None


def _straight_reference(spec: SceneSpec, labels: np.ndarray):
    """Straight path from the robot to the top-row centre, if nothing lies on it."""
    sx, sy = default_start((spec.height, spec.width))
    gx, gy = float((spec.width - 1) // 2), 0.0
    length = float(np.hypot(gx - sx, gy - sy))
    n = max(1, int(np.ceil(length / spec.reference_step)))
    t = np.arange(n + 1) / n
    pts = [(sx + (gx - sx) * ti, sy + (gy - sy) * ti) for ti in t]
    lo = int(min(sx, gx)) - spec.start_clearance // 2
    hi = int(max(sx, gx)) + spec.start_clearance // 2 + 1
    corridor = labels[:, max(lo, 0) : min(hi, spec.width)]
    if np.any(corridor != ROAD_LABEL):
        return None
    return tuple((float(x), float(y)) for x, y in pts)


def generate_scene(seed: int, spec: SceneSpec = SceneSpec()) -> Scene:
    """Road plane with random rectangular/elliptical obstacles, deterministic per seed.

    The square of side ``2 * start_clearance + 1`` around the robot start is
    kept free of obstacles; random layouts violating it are redrawn up to
    ``max_attempts`` times.

    Raises:
        ValueError: if no valid layout is found (e.g. a fixed obstacle covers the start).
    """
    rng = np.random.default_rng(seed)
    h, w = spec.height, spec.width
    sx, sy = (int(v) for v in default_start((h, w)))
    for _ in range(spec.max_attempts):
        blobs = list(spec.fixed)
        for _ in range(int(rng.integers(spec.count[0], spec.count[1] + 1))):
            bw = int(rng.integers(spec.size[0], spec.size[1] + 1))
            bh = int(rng.integers(spec.size[0], spec.size[1] + 1))
            x = int(rng.integers(spec.side_margin, max(spec.side_margin + 1, w - spec.side_margin - bw + 1)))
            y = int(rng.integers(0, max(1, h - bh + 1)))
            shape = spec.shapes[int(rng.integers(len(spec.shapes)))]
            blobs.append(ObstacleBlob(x, y, bw, bh, shape))

        labels = np.full((h, w), ROAD_LABEL, dtype=np.uint8)
        if spec.side_margin:
            labels[:, : spec.side_margin] = OTHERS_LABEL
            labels[:, w - spec.side_margin :] = OTHERS_LABEL
        for blob in blobs:
            labels[blob.mask(h, w)] = OBSTACLE_LABEL
        c = spec.start_clearance
        clear = labels[max(sy - c, 0) : sy + c + 1, max(sx - c, 0) : sx + c + 1]
        if np.all(clear == ROAD_LABEL):
            return Scene(
                ClassMap(labels, DEFAULT_CLASS_TABLE),
                tuple(blobs),
                _straight_reference(spec, labels),
            )
    raise ValueError(f"no obstacle layout keeps the start clear after {spec.max_attempts} attempts")

"""Artificial potential field planning over a binary road image.

Positions are ``(x, y)`` pixel coordinates. Forces are expressed as
``(lateral, forward)`` where lateral points along +x and forward points toward
the top of the image (-y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .destination import Destination, DestinationConfig, find_destination
from .morphology import Obstacle, connected_components
from .raster import as_grid

REACHED = "Reached"
BLOCKED = "Blocked"
STALLED = "Stalled"


@dataclass(frozen=True)
class APFConfig:
    mu_r: float = 1.0
    mu_a: float = 10.0
    step_px: float = 5.0
    max_steps: int = 400
    reach_px: float = 1.0
    min_force: float = 1e-12
    steps_per_replan: int = 5
    rotate_deg: float = 15.0

    def __post_init__(self):
        for name in ("mu_r", "mu_a", "step_px", "reach_px", "min_force", "rotate_deg"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        for name in ("max_steps", "steps_per_replan"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")


class ForceVec(NamedTuple):
    lateral: float
    forward: float

    @property
    def norm(self) -> float:
        return math.hypot(self.lateral, self.forward)

    def scaled(self, factor: float) -> "ForceVec":
        return ForceVec(self.lateral * factor, self.forward * factor)


@dataclass(frozen=True)
class PathPlan:
    positions: tuple[tuple[float, float], ...]
    status: str
    forces: tuple[ForceVec, ...] = ()

    @property
    def reached(self) -> bool:
        return self.status == REACHED


@dataclass(frozen=True)
class Proceed:
    waypoints: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class RotateAndRescan:
    degrees: float


@dataclass(frozen=True)
class AvoidanceResult:
    destination: Destination | None
    path: PathPlan | None
    directive: Proceed | RotateAndRescan


def default_start(shape) -> tuple[float, float]:
    """Bottom-centre pixel of an ``(h, w)`` image."""
    h, w = shape
    return float(w // 2), float(h - 1)


def polar_to(robot, target) -> tuple[float, float]:
    """Distance and heading of ``target`` seen from ``robot``.

    The heading is measured from the forward axis (image up), positive toward
    +x, in ``(-pi, pi]``.
    """
    dx = target[0] - robot[0]
    dfwd = robot[1] - target[1]
    if dx == 0 and dfwd == 0:
        raise ValueError("target coincides with robot position")
    return math.hypot(dx, dfwd), math.atan2(dx, dfwd)


def _inverse_square(robot, points: np.ndarray) -> tuple[float, float]:
    # sum of (1/d^2) * unit vector toward each point, in (lateral, forward)
    dx = points[:, 0] - robot[0]
    dfwd = robot[1] - points[:, 1]
    d = np.hypot(dx, dfwd)
    if np.any(d == 0):
        raise ValueError("obstacle centroid coincides with robot position")
    inv_cube = 1.0 / (d * d * d)
    return float(np.sum(dx * inv_cube)), float(np.sum(dfwd * inv_cube))


def _centroids(obstacles) -> np.ndarray:
    pts = [o.centroid if isinstance(o, Obstacle) else tuple(o) for o in obstacles]
    return np.asarray(pts, dtype=np.float64).reshape(-1, 2)


def repulsive_force(robot, obstacles: Sequence, mu_r: float) -> ForceVec:
    """Inverse-square pull toward each obstacle centroid, scaled by ``mu_r``.

    ``obstacles`` holds :class:`Obstacle` instances or plain ``(x, y)`` centroids.
    The resultant subtracts this vector, so obstacles end up repelling.
    """
    pts = _centroids(obstacles)
    if pts.shape[0] == 0:
        return ForceVec(0.0, 0.0)
    lat, fwd = _inverse_square(robot, pts)
    return ForceVec(mu_r * lat, mu_r * fwd)


def attractive_force(robot, dest, mu_a: float) -> ForceVec:
    lat, fwd = _inverse_square(robot, np.asarray([dest], dtype=np.float64))
    return ForceVec(mu_a * lat, mu_a * fwd)


def resultant(fa: ForceVec, fr: ForceVec) -> ForceVec:
    return ForceVec(fa.lateral - fr.lateral, fa.forward - fr.forward)


def _touches_cell(x0, y0, x1, y1, col, row) -> bool:
    # Liang-Barsky clip of the segment against the closed pixel square
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, x0 - (col - 0.5)),
        (dx, (col + 0.5) - x0),
        (-dy, y0 - (row - 0.5)),
        (dy, (row + 0.5) - y0),
    ):
        if p == 0:
            if q < 0:
                return False
        else:
            t = q / p
            if p < 0:
                t0 = max(t0, t)
            else:
                t1 = min(t1, t)
            if t0 > t1:
                return False
    return True


def supercover(p0, p1) -> list[tuple[int, int]]:
    """Every ``(col, row)`` pixel whose closed unit square the segment touches."""
    x0, y0 = p0
    x1, y1 = p1
    cols = range(math.ceil(min(x0, x1) - 0.5), math.floor(max(x0, x1) + 0.5) + 1)
    rows = range(math.ceil(min(y0, y1) - 0.5), math.floor(max(y0, y1) + 0.5) + 1)
    return [(c, r) for r in rows for c in cols if _touches_cell(x0, y0, x1, y1, c, r)]


def segment_is_clear(road: np.ndarray, p0, p1) -> bool:
    h, w = road.shape
    for c, r in supercover(p0, p1):
        if 0 <= r < h and 0 <= c < w and not road[r, c]:
            return False
    return True


def is_road(binary: np.ndarray, point) -> bool:
    col, row = int(round(point[0])), int(round(point[1]))
    h, w = binary.shape
    return 0 <= row < h and 0 <= col < w and bool(binary[row, col])


def plan_path(binary, dest: Destination, start=None, cfg: APFConfig = APFConfig()) -> PathPlan:
    """Follow the normalised resultant force in fixed steps until arrival.

    Obstacles are the 8-connected non-road components of ``binary``, computed
    once. Each step moves ``step_px`` (or the remaining distance to the goal,
    if shorter) along the resultant force, clamped into the image. The plan ends ``Reached`` within ``reach_px`` of the destination,
    ``Blocked`` when the next segment would touch a non-road pixel, and
    ``Stalled`` when the force vanishes or ``max_steps`` runs out.
    """
    road = as_grid(binary) > 0
    h, w = road.shape
    start = default_start(road.shape) if start is None else (float(start[0]), float(start[1]))
    if not is_road(road, start):
        raise ValueError(f"start {start} is not a road pixel")
    goal = dest.xy
    centroids = _centroids(connected_components(road.astype(np.uint8)))

    pos = start
    positions = [pos]
    forces = []
    status = STALLED
    for _ in range(cfg.max_steps + 1):
        remaining = math.hypot(goal[0] - pos[0], goal[1] - pos[1])
        if remaining <= cfg.reach_px:
            status = REACHED
            break
        if len(forces) == cfg.max_steps:
            break
        if centroids.size and np.any((centroids[:, 0] == pos[0]) & (centroids[:, 1] == pos[1])):
            break
        force = resultant(attractive_force(pos, goal, cfg.mu_a), repulsive_force(pos, centroids, cfg.mu_r))
        forces.append(force)
        norm = force.norm
        if norm < cfg.min_force:
            break
        # never step past the goal distance, so a clear approach lands on it
        length = min(cfg.step_px, remaining)
        nxt = (
            min(max(pos[0] + length * force.lateral / norm, 0.0), w - 1.0),
            min(max(pos[1] - length * force.forward / norm, 0.0), h - 1.0),
        )
        if not segment_is_clear(road, pos, nxt):
            status = BLOCKED
            break
        pos = nxt
        positions.append(pos)
    return PathPlan(positions=tuple(positions), status=status, forces=tuple(forces))


def rotation_for(retry: int, cfg: APFConfig) -> float:
    """Rotation request for the given retry count, alternating sign."""
    return cfg.rotate_deg if retry % 2 == 0 else -cfg.rotate_deg


def avoidance_step(
    binary,
    cfg: APFConfig = APFConfig(),
    dest_cfg: DestinationConfig = DestinationConfig(),
    start=None,
    retry: int = 0,
    workers: int = 1,
) -> AvoidanceResult:
    """Pick a destination, plan to it, and decide what the robot does next."""
    binary = as_grid(binary)
    dest = find_destination(binary, dest_cfg, workers=workers)
    if dest is None:
        return AvoidanceResult(None, None, RotateAndRescan(rotation_for(retry, cfg)))
    start = default_start(binary.shape) if start is None else start
    if not is_road(binary, start):
        return AvoidanceResult(dest, None, RotateAndRescan(rotation_for(retry, cfg)))
    path = plan_path(binary, dest, start, cfg)
    if not path.reached:
        return AvoidanceResult(dest, path, RotateAndRescan(rotation_for(retry, cfg)))
    return AvoidanceResult(dest, path, Proceed(path.positions[1 : 1 + cfg.steps_per_replan]))

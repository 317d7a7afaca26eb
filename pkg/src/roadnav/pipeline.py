"""Per-frame processing chain and the episode harness built on it."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .apf import AvoidanceResult, PathPlan, Proceed, RotateAndRescan, avoidance_step, default_start, segment_is_clear
from .config import PipelineConfig
from .destination import Destination
from .metrics import hausdorff
from .morphology import smooth
from .scene import Scene
from .segmap import ClassMap, NoRoad, binarize, extract_road_roi


@dataclass(frozen=True, eq=False)
class FrameResult:
    binary: np.ndarray
    roi: np.ndarray | None
    smoothed: np.ndarray
    destination: Destination | None
    path: PathPlan | None
    directive: Proceed | RotateAndRescan
    timings_ms: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.roi is None:
            return "NoRoad"
        if self.destination is None:
            return "NoDestination"
        if self.path is None:
            return "StartNotRoad"
        return self.path.status

    def to_json_dict(self) -> dict:
        """Path document: status, planned waypoints, destination ``[col, row]`` and directive.

        Timings are left out so the document is reproducible byte for byte.
        """
        if isinstance(self.directive, Proceed):
            directive = {"type": "Proceed", "waypoints": [list(p) for p in self.directive.waypoints]}
        else:
            directive = {"type": "RotateAndRescan", "degrees": self.directive.degrees}
        return {
            "status": self.status,
            "waypoints": [list(p) for p in self.path.positions] if self.path else [],
            "destination": [self.destination.col, self.destination.row] if self.destination else None,
            "directive": directive,
        }


def run_frame(class_map: ClassMap, cfg: PipelineConfig = PipelineConfig(), start=None, retry: int = 0) -> FrameResult:
    """Binarize, mask, smooth, pick a destination and plan toward it."""
    timings = {}

    t = time.perf_counter()
    binary = binarize(class_map)
    timings["binarize"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    try:
        roi = extract_road_roi(binary, cfg.roi_min_area_fraction)
    except NoRoad:
        roi = None
    timings["roi"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    smoothed = smooth(binary, cfg.morphology)
    timings["smooth"] = (time.perf_counter() - t) * 1e3

    if roi is None:
        directive = RotateAndRescan(cfg.apf.rotate_deg if retry % 2 == 0 else -cfg.apf.rotate_deg)
        return FrameResult(binary, None, smoothed, None, None, directive, timings)

    t = time.perf_counter()
    step: AvoidanceResult = avoidance_step(smoothed, cfg.apf, cfg.destination, start, retry, cfg.workers)
    timings["plan"] = (time.perf_counter() - t) * 1e3
    timings["total"] = sum(timings.values())
    return FrameResult(binary, roi, smoothed, step.destination, step.path, step.directive, timings)


FrameSource = Iterable[ClassMap | Scene] | Callable[[dict, int], ClassMap | Scene]


def run_episode(
    frames: FrameSource,
    cfg: PipelineConfig = PipelineConfig(),
    n_frames: int | None = None,
    reference_paths: Sequence | None = None,
) -> dict:
    """Drive :func:`run_frame` over a sequence of frames with a translation-only pose.

    ``frames`` is either an iterable of class maps / scenes or a sampler called
    as ``sampler(pose, index)`` (pose keys ``x``, ``y``, ``heading``), which lets
    a synthetic scene react to rotation requests. A ``Proceed`` directive moves
    the pose by the displacement of its last waypoint from the robot start; a
    rotation adds to the heading. ``collisions`` counts executed waypoint
    segments that touch non-road pixels of the unsmoothed map.

    Reference paths come from ``reference_paths[i]`` when given, otherwise
    from the ``reference_path`` of a :class:`Scene` frame. Only ``Reached``
    plans are scored against them; failed frames show up as rotations.

    Returns:
        JSON-ready report. Hausdorff fields appear only when at least one
        ``Reached`` frame has a reference path.
    """
    if callable(frames):
        if n_frames is None:
            raise ValueError("n_frames is required with a frame sampler")
        sampler = frames
    else:
        frame_list = list(frames)
        if not frame_list:
            raise ValueError("episode needs at least one frame")
        sampler = lambda pose, i: frame_list[i]  # noqa: E731
        n_frames = len(frame_list) if n_frames is None else min(n_frames, len(frame_list))

    pose = {"x": 0.0, "y": 0.0, "heading": 0.0}
    retry = 0
    rotations = []
    collisions = 0
    per_frame = []
    dists = []
    stage_totals: dict[str, float] = {}
    for i in range(n_frames):
        frame = sampler(dict(pose), i)
        ref = None
        if isinstance(frame, Scene):
            frame, ref = frame.class_map, frame.reference_path
        if reference_paths is not None:
            ref = reference_paths[i] if i < len(reference_paths) else None
        result = run_frame(frame, cfg, retry=retry)
        for stage, ms in result.timings_ms.items():
            stage_totals[stage] = stage_totals.get(stage, 0.0) + ms

        if isinstance(result.directive, Proceed):
            start = default_start(result.binary.shape)
            pts = [start, *result.directive.waypoints]
            road = result.binary > 0
            collisions += sum(not segment_is_clear(road, p, q) for p, q in zip(pts[:-1], pts[1:]))
            if result.directive.waypoints:
                last = result.directive.waypoints[-1]
                pose["x"] += last[0] - start[0]
                pose["y"] += last[1] - start[1]
            retry = 0
        else:
            pose["heading"] += result.directive.degrees
            rotations.append({"frame": i, "degrees": result.directive.degrees})
            retry += 1

        if ref is not None and len(ref) and result.path is not None and result.path.reached:
            dists.append(hausdorff(result.path.positions, ref))
        per_frame.append({"frame": i, "status": result.status, "pose": [pose["x"], pose["y"], pose["heading"]]})

    report = {
        "frames": n_frames,
        "rotation_events": rotations,
        "rotations": len(rotations),
        "collisions": collisions,
        "final_pose": [pose["x"], pose["y"], pose["heading"]],
        "per_frame": per_frame,
        "timings_ms": {k: v / n_frames for k, v in stage_totals.items()},
    }
    if dists:
        report["hausdorff_px"] = sum(dists) / len(dists)
        report["hausdorff_px_max"] = max(dists)
        report["hausdorff_frames"] = len(dists)
    return report


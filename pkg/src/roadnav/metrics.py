"""Pixel, instance and path-level evaluation metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .morphology import EIGHT_CONNECTED
from .raster import as_grid


class UndefinedMetric(ValueError):
    """The metric's denominator is zero."""


def confusion_matrix(pred, gt, num_classes: int) -> np.ndarray:
    """``K x K`` counts; entry ``[g, p]`` is the number of pixels labelled ``g`` predicted ``p``."""
    pred = as_grid(pred).astype(np.int64)
    gt = as_grid(gt).astype(np.int64)
    if pred.shape != gt.shape:
        raise ValueError(f"prediction shape {pred.shape} does not match ground truth {gt.shape}")
    for name, grid in (("prediction", pred), ("ground truth", gt)):
        if grid.min() < 0 or grid.max() >= num_classes:
            raise ValueError(f"{name} label out of range [0, {num_classes})")
    counts = np.bincount((gt * num_classes + pred).ravel(), minlength=num_classes * num_classes)
    return counts.reshape(num_classes, num_classes)


def class_ious(cm: np.ndarray) -> dict[int, Fraction]:
    """Exact IoU of every class that occurs in either the prediction or the ground truth."""
    tp = np.diag(cm)
    union = cm.sum(axis=0) + cm.sum(axis=1) - tp
    return {k: Fraction(int(tp[k]), int(union[k])) for k in range(cm.shape[0]) if union[k] > 0}


def miou(pred, gt, num_classes: int) -> float:
    """Mean IoU over classes present in ``pred`` or ``gt``; absent classes are skipped."""
    ious = class_ious(confusion_matrix(pred, gt, num_classes))
    return float(sum(ious.values(), Fraction(0)) / len(ious))


@dataclass(frozen=True)
class InstanceMatch:
    """Obstacle instance bookkeeping for one frame.

    A predicted instance succeeds when more than half of its pixels lie on
    ground-truth obstacle pixels, and is a false positive when none do.
    """

    pred_sizes: tuple[int, ...]
    pred_overlaps: tuple[int, ...]
    gt_instances: int

    @property
    def successes(self) -> tuple[bool, ...]:
        return tuple(2 * o > s for o, s in zip(self.pred_overlaps, self.pred_sizes))

    @property
    def false_positives(self) -> tuple[bool, ...]:
        return tuple(o == 0 for o in self.pred_overlaps)


def match_instances(pred_obstacle, gt_obstacle) -> InstanceMatch:
    """Build the per-frame instance record from boolean obstacle masks (8-connected instances)."""
    pred = as_grid(pred_obstacle) > 0
    gt = as_grid(gt_obstacle) > 0
    if pred.shape != gt.shape:
        raise ValueError(f"mask shapes differ: {pred.shape} vs {gt.shape}")
    pred_labels, n_pred = ndimage.label(pred, structure=EIGHT_CONNECTED)
    _, n_gt = ndimage.label(gt, structure=EIGHT_CONNECTED)
    sizes = np.bincount(pred_labels.ravel(), minlength=n_pred + 1)[1:]
    overlaps = np.bincount(pred_labels[gt].ravel(), minlength=n_pred + 1)[1:]
    return InstanceMatch(tuple(sizes.tolist()), tuple(overlaps.tolist()), int(n_gt))


def instance_counts(matches: Iterable[InstanceMatch]) -> dict[str, int]:
    matches = list(matches)
    return {
        "success_predictions": sum(sum(m.successes) for m in matches),
        "gt_instances": sum(m.gt_instances for m in matches),
        "false_predictions": sum(sum(m.false_positives) for m in matches),
        "frames": len(matches),
    }


def odr(matches: Iterable[InstanceMatch]) -> float:
    """Obstacle detection rate: successful predictions over ground-truth instances."""
    counts = instance_counts(matches)
    if counts["gt_instances"] == 0:
        raise UndefinedMetric("ODR undefined: no ground-truth obstacle instances")
    return float(Fraction(counts["success_predictions"], counts["gt_instances"]))


def nofp(matches: Iterable[InstanceMatch], total_frames: int | None = None) -> float:
    """False (zero-overlap) predicted instances per test frame."""
    counts = instance_counts(matches)
    frames = counts["frames"] if total_frames is None else total_frames
    if frames < 1:
        raise UndefinedMetric("NOFP undefined: no frames")
    return float(Fraction(counts["false_predictions"], frames))


def _points(path) -> np.ndarray:
    pts = np.asarray(path, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("path must contain at least one point")
    return pts


def hausdorff(path_a: Sequence, path_b: Sequence) -> float:
    """Symmetric Hausdorff distance between two waypoint sets (pixels)."""
    a, b = _points(path_a), _points(path_b)
    d = np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def densify(path: Sequence, spacing: float) -> np.ndarray:
    """Insert evenly spaced points so consecutive points are at most ``spacing`` apart."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pts = _points(path)
    out = [pts[:1]]
    for p, q in zip(pts[:-1], pts[1:]):
        n = max(1, math.ceil(float(np.hypot(*(q - p))) / spacing))
        t = np.arange(1, n + 1)[:, None] / n
        out.append(p + t * (q - p))
    return np.concatenate(out)


def metrics_report(
    pred=None,
    gt=None,
    num_classes: int | None = None,
    matches: Sequence[InstanceMatch] | None = None,
    total_frames: int | None = None,
    path_pairs: Sequence[tuple[Sequence, Sequence]] | None = None,
) -> dict:
    """Assemble the JSON metrics document; sections without inputs are left out."""
    report: dict = {}
    if pred is not None and gt is not None:
        cm = confusion_matrix(pred, gt, num_classes)
        report["miou"] = miou(pred, gt, num_classes)
        report["confusion_matrix"] = cm.tolist()
    if matches is not None:
        counts = instance_counts(matches)
        if total_frames is not None:
            counts["frames"] = total_frames
        report["counts"] = counts
        if counts["gt_instances"]:
            report["odr"] = odr(matches)
        if counts["frames"]:
            report["nofp"] = nofp(matches, counts["frames"])
    if path_pairs:
        dists = [hausdorff(a, b) for a, b in path_pairs]
        report["hausdorff_px"] = sum(dists) / len(dists)
        report["hausdorff_px_max"] = max(dists)
    return report

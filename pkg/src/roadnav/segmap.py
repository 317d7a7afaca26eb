"""Class maps, road binarization, road-region masking and score-map utilities."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import ndimage

from .raster import as_grid, as_tensor

ROAD = "road"
OBSTACLE = "obstacle"
OTHERS = "others"
CATEGORIES = (ROAD, OBSTACLE, OTHERS)

FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


class NoRoad(Exception):
    """No road component is large enough to define a region of interest."""


@dataclass(frozen=True)
class ClassTable:
    """Maps raw label ids onto the three categories road / obstacle / others."""

    categories: Mapping[int, str]

    def __post_init__(self):
        for label, category in self.categories.items():
            if category not in CATEGORIES:
                raise ValueError(f"label {label}: unknown category {category!r}")
        if ROAD not in self.categories.values():
            raise ValueError("class table must map at least one label to road")

    @classmethod
    def from_lists(cls, road, obstacle=(), others=()) -> "ClassTable":
        mapping: dict[int, str] = {}
        for category, ids in ((ROAD, road), (OBSTACLE, obstacle), (OTHERS, others)):
            for label in ids:
                label = int(label)
                if label in mapping:
                    raise ValueError(f"label {label} assigned to both {mapping[label]} and {category}")
                mapping[label] = category
        return cls(mapping)

    @classmethod
    def from_json(cls, text: str) -> "ClassTable":
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise ValueError("class table must be a JSON object")
        unknown = set(doc) - set(CATEGORIES)
        if unknown:
            raise ValueError(f"unknown class table keys: {sorted(unknown)}")
        return cls.from_lists(doc.get(ROAD, []), doc.get(OBSTACLE, []), doc.get(OTHERS, []))

    def to_json(self) -> str:
        doc = {c: sorted(k for k, v in self.categories.items() if v == c) for c in CATEGORIES}
        return json.dumps(doc)

    def ids(self, category: str) -> list[int]:
        return sorted(k for k, v in self.categories.items() if v == category)


DEFAULT_CLASS_TABLE = ClassTable.from_lists(road=[1], obstacle=[2], others=[0])


@dataclass(frozen=True, eq=False)
class ClassMap:
    labels: np.ndarray
    table: ClassTable

    def __post_init__(self):
        labels = as_grid(self.labels)
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError("class map labels must be integers")
        missing = set(np.unique(labels).tolist()) - set(self.table.categories)
        if missing:
            raise ValueError(f"labels missing from class table: {sorted(missing)}")
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self):
        return self.labels.shape


def binarize(class_map: ClassMap) -> np.ndarray:
    """Road pixels become 1, everything else 0 (``uint8``)."""
    road_ids = class_map.table.ids(ROAD)
    return np.isin(class_map.labels, road_ids).astype(np.uint8)


def fill_holes(mask: np.ndarray) -> np.ndarray:
    """Add every background pixel not 4-connected to the image border through background."""
    mask = np.asarray(mask, dtype=bool)
    background, _ = ndimage.label(~mask, structure=FOUR_CONNECTED)
    border = np.concatenate([background[0], background[-1], background[:, 0], background[:, -1]])
    outside = np.isin(background, np.unique(border[border > 0]))
    return ~outside


def extract_road_roi(binary, min_area_fraction: float = 0.01) -> np.ndarray:
    """Region inside the outer contour of every sufficiently large road component.

    Road components are 4-connected. Each one with area of at least
    ``min_area_fraction * w * h`` pixels is hole-filled, and the union of the
    filled components is returned as a ``uint8`` mask.

    Raises:
        NoRoad: if no component meets the area threshold.
    """
    if not 0 <= min_area_fraction < 1:
        raise ValueError("min_area_fraction must lie in [0, 1)")
    road = as_grid(binary) > 0
    labels, count = ndimage.label(road, structure=FOUR_CONNECTED)
    if count == 0:
        raise NoRoad("image contains no road pixels")
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    keep = np.flatnonzero(areas >= min_area_fraction * road.size)
    keep = keep[keep > 0]
    if keep.size == 0:
        raise NoRoad(f"no road component covers {min_area_fraction:.4g} of the image")
    roi = np.zeros(road.shape, dtype=bool)
    for label in keep:
        roi |= fill_holes(labels == label)
    return roi.astype(np.uint8)


def apply_roi_mask(features, roi) -> np.ndarray:
    """Zero every feature outside the ROI, across all channels."""
    features = as_tensor(features)
    roi = as_grid(roi)
    if features.shape[1:] != roi.shape:
        raise ValueError(f"ROI shape {roi.shape} does not match feature shape {features.shape[1:]}")
    return features * (roi != 0)[np.newaxis]


def cross_entropy(scores, ground_truth) -> float:
    """Mean softmax cross-entropy of per-pixel class scores against integer labels.

    Args:
        scores: ``(K, H, W)`` raw scores, ``K >= 2``.
        ground_truth: ``(H, W)`` class indices in ``[0, K)``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 3 or scores.shape[0] < 2:
        raise ValueError(f"scores must be (K>=2, H, W), got {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores contain non-finite values")
    gt = as_grid(ground_truth)
    if gt.shape != scores.shape[1:]:
        raise ValueError(f"ground truth shape {gt.shape} does not match scores {scores.shape[1:]}")
    if gt.min() < 0 or gt.max() >= scores.shape[0]:
        raise ValueError("ground-truth index out of range")
    peak = scores.max(axis=0)
    shifted = scores - peak
    log_norm = np.log(np.exp(shifted).sum(axis=0))
    picked = np.take_along_axis(shifted, gt[np.newaxis].astype(np.int64), axis=0)[0]
    return float(np.mean(log_norm - picked))


def downsample_labels(gt, factor: int) -> np.ndarray:
    """Nearest-neighbour label downsampling anchored at the top-left of each block."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    return as_grid(gt)[::factor, ::factor].copy()
